#include "symreg/params.hpp"

#include "symreg/errors.hpp"

namespace symreg {

int ParameterStore::add(std::string name, Tensor value, bool trainable) {
    value.ensure_grad();
    params_.push_back(Parameter{std::move(name), std::move(value), trainable});
    return static_cast<int>(params_.size()) - 1;
}

std::size_t ParameterStore::total_elements() const {
    std::size_t n = 0;
    for (const auto& p : params_) n += p.value.size();
    return n;
}

std::size_t ParameterStore::trainable_elements() const {
    std::size_t n = 0;
    for (const auto& p : params_) {
        if (p.trainable) n += p.value.size();
    }
    return n;
}

void ParameterStore::zero_grads() {
    for (auto& p : params_) p.value.zero_grad();
}

GradSink::GradSink(const ParameterStore& store) {
    grads_.reserve(static_cast<std::size_t>(store.count()));
    for (const auto& p : store.all()) grads_.emplace_back(p.value.size(), 0.0);
}

void GradSink::zero() {
    for (auto& g : grads_) std::fill(g.begin(), g.end(), 0.0);
}

void GradSink::accumulate(const GradSink& other, double scale) {
    if (other.grads_.size() != grads_.size()) throw StateError("GradSink: layout mismatch");
    for (std::size_t i = 0; i < grads_.size(); ++i) {
        const auto& src = other.grads_[i];
        auto& dst = grads_[i];
        for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += scale * src[j];
    }
}

void GradSink::store_into(ParameterStore& store) const {
    for (std::size_t i = 0; i < grads_.size(); ++i) {
        auto& p = store.at(static_cast<int>(i));
        p.value.ensure_grad();
        for (std::size_t j = 0; j < grads_[i].size(); ++j) p.value.grad[j] = grads_[i][j];
    }
}

}  // namespace symreg
