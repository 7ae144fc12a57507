#pragma once

#include <cstdint>
#include <vector>

#include "symreg/params.hpp"

namespace symreg {

struct AdamConfig {
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Bias-corrected adaptive-moment optimizer state. One first/second moment
/// buffer per parameter; step count increases by exactly 1 per update.
class OptimizerState {
  public:
    OptimizerState(const ParameterStore& store, AdamConfig cfg);

    std::int64_t step_count() const { return step_; }
    const AdamConfig& config() const { return cfg_; }

    const std::vector<double>& first_moment(int id) const { return m_[static_cast<std::size_t>(id)]; }
    const std::vector<double>& second_moment(int id) const { return v_[static_cast<std::size_t>(id)]; }

    friend void adam_step(ParameterStore& params, OptimizerState& state);

  private:
    AdamConfig cfg_;
    std::vector<std::vector<double>> m_;
    std::vector<std::vector<double>> v_;
    std::int64_t step_ = 0;
};

/// Applies one update using the gradients currently held in the store.
/// Frozen parameters are left untouched. Deterministic: identical
/// (params, grads, state) give a bit-identical result.
void adam_step(ParameterStore& params, OptimizerState& state);

}  // namespace symreg
