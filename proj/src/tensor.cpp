#include "symreg/tensor.hpp"

#include <cmath>
#include <sstream>

#include "symreg/errors.hpp"

namespace symreg {

std::size_t shape_numel(const std::vector<int>& shape) {
    std::size_t n = 1;
    for (int e : shape) {
        if (e <= 0) throw DimensionError("tensor extent must be positive, got shape " + shape_str(shape));
        n *= static_cast<std::size_t>(e);
    }
    return n;
}

std::string shape_str(const std::vector<int>& shape) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << ",";
        os << shape[i];
    }
    os << "]";
    return os.str();
}

Tensor::Tensor(std::vector<int> s) : shape(std::move(s)), v(shape_numel(shape), 0.0) {}

Tensor::Tensor(std::vector<int> s, double fill) : shape(std::move(s)), v(shape_numel(shape), fill) {}

void Tensor::ensure_grad() {
    if (grad.size() != v.size()) grad.assign(v.size(), 0.0);
}

void Tensor::zero_grad() {
    if (grad.size() != v.size()) {
        grad.assign(v.size(), 0.0);
    } else {
        std::fill(grad.begin(), grad.end(), 0.0);
    }
}

bool Tensor::all_finite() const {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

bool same_shape(const Tensor& a, const Tensor& b) { return a.shape == b.shape; }

}  // namespace symreg
