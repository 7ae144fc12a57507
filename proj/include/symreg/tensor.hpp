#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace symreg {

/// Dense n-dimensional tensor of doubles, C-order (last axis fastest).
/// `grad`, when non-empty, has the same element count as `v`.
struct Tensor {
    std::vector<int> shape;
    std::vector<double> v;
    std::vector<double> grad;

    Tensor() = default;
    explicit Tensor(std::vector<int> s);
    Tensor(std::vector<int> s, double fill);

    std::size_t size() const { return v.size(); }
    int dim(int i) const { return shape[static_cast<std::size_t>(i)]; }
    int ndim() const { return static_cast<int>(shape.size()); }

    bool has_grad() const { return !grad.empty(); }
    void ensure_grad();
    void zero_grad();

    /// True if every value is finite.
    bool all_finite() const;
};

std::size_t shape_numel(const std::vector<int>& shape);
std::string shape_str(const std::vector<int>& shape);
bool same_shape(const Tensor& a, const Tensor& b);

}  // namespace symreg
