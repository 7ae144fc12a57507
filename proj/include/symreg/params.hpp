#pragma once

#include <string>
#include <vector>

#include "symreg/tensor.hpp"

namespace symreg {

struct Parameter {
    std::string name;
    Tensor value;  // value.grad holds dL/dparam
    bool trainable = true;
};

/// Flat registry of named parameters. Graphs reference entries by id, so two
/// graph paths holding the same id share weights exactly.
class ParameterStore {
  public:
    int add(std::string name, Tensor value, bool trainable = true);

    Parameter& at(int id) { return params_[static_cast<std::size_t>(id)]; }
    const Parameter& at(int id) const { return params_[static_cast<std::size_t>(id)]; }

    int count() const { return static_cast<int>(params_.size()); }
    std::size_t total_elements() const;
    std::size_t trainable_elements() const;

    void zero_grads();

    std::vector<Parameter>& all() { return params_; }
    const std::vector<Parameter>& all() const { return params_; }

  private:
    std::vector<Parameter> params_;
};

/// Per-sample gradient sink: one buffer per parameter, reduced by the caller
/// in a fixed order so batch gradients stay order-deterministic.
class GradSink {
  public:
    explicit GradSink(const ParameterStore& store);
    void zero();
    std::vector<double>& at(int id) { return grads_[static_cast<std::size_t>(id)]; }
    const std::vector<double>& at(int id) const { return grads_[static_cast<std::size_t>(id)]; }
    int count() const { return static_cast<int>(grads_.size()); }

    /// Adds `scale * other` into this sink, element by element.
    void accumulate(const GradSink& other, double scale = 1.0);

    /// Copies the accumulated gradients into the store's grad buffers.
    void store_into(ParameterStore& store) const;

  private:
    std::vector<std::vector<double>> grads_;
};

}  // namespace symreg
