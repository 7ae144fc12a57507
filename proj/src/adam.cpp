#include "symreg/adam.hpp"

#include <cmath>

#include "symreg/errors.hpp"

namespace symreg {

OptimizerState::OptimizerState(const ParameterStore& store, AdamConfig cfg) : cfg_(cfg) {
    m_.reserve(static_cast<std::size_t>(store.count()));
    v_.reserve(static_cast<std::size_t>(store.count()));
    for (const auto& p : store.all()) {
        m_.emplace_back(p.value.size(), 0.0);
        v_.emplace_back(p.value.size(), 0.0);
    }
}

void adam_step(ParameterStore& params, OptimizerState& state) {
    if (static_cast<int>(state.m_.size()) != params.count())
        throw StateError("adam_step: optimizer state does not match parameter store");

    state.step_ += 1;
    const auto& cfg = state.cfg_;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step_));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step_));

    for (int id = 0; id < params.count(); ++id) {
        Parameter& p = params.at(id);
        if (!p.trainable) continue;
        if (!p.value.has_grad()) throw StateError("adam_step: parameter '" + p.name + "' has no gradient");
        auto& m = state.m_[static_cast<std::size_t>(id)];
        auto& v = state.v_[static_cast<std::size_t>(id)];
        for (std::size_t i = 0; i < p.value.size(); ++i) {
            const double g = p.value.grad[i];
            if (!std::isfinite(g))
                throw TrainingError("non-finite gradient in parameter '" + p.name + "'");
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
            v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g;
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            p.value.v[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
        }
    }
}

}  // namespace symreg
