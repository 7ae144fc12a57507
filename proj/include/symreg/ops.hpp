#pragma once

#include <random>
#include <vector>

#include "symreg/tensor.hpp"

namespace symreg {

/// Forward-pass mode. Dropout is live in train and mc, identity in eval;
/// mc draws a fresh mask on every call.
enum class Mode { train, mc, eval };

namespace ops {

// Layout conventions: activations are [W,H,D,C] with C fastest,
// convolution kernels are [k,k,k,Cin,Cout] with Cout fastest.

/// 3D convolution, no bias. Requires odd k and matching Cin.
/// With zero_pad and stride 1 the spatial shape is preserved.
Tensor conv3d(const Tensor& input, const Tensor& kernels, int stride, bool zero_pad);

/// Accumulates input/kernel gradients for conv3d. Either sink may be null.
void conv3d_backward(const Tensor& input, const Tensor& kernels, int stride, bool zero_pad,
                     const std::vector<double>& d_out, std::vector<double>* d_input,
                     std::vector<double>* d_kernels);

/// Max pooling over cubic windows. Full windows only; a trailing partial
/// window is dropped, except that an axis shorter than the window is pooled
/// whole into a single output. Errors if the window exceeds every spatial
/// extent. `argmax`, when given, receives the flat input index of each
/// window maximum (first hit in scan order).
Tensor maxpool3d(const Tensor& input, int window, int stride, std::vector<int>* argmax = nullptr);

void maxpool3d_backward(const std::vector<int>& argmax, const std::vector<double>& d_out,
                        std::vector<double>& d_input);

/// Fully connected layer: out = flatten(input)^T * weights + bias.
Tensor dense(const Tensor& input, const Tensor& weights, const Tensor& bias);

void dense_backward(const Tensor& input, const Tensor& weights, const std::vector<double>& d_out,
                    std::vector<double>* d_input, std::vector<double>* d_weights,
                    std::vector<double>* d_bias);

Tensor relu(const Tensor& input);

/// Subgradient at 0 is 0.
void relu_backward(const Tensor& input, const std::vector<double>& d_out,
                   std::vector<double>& d_input);

/// Inverted dropout: in train/mc each element is zeroed with probability
/// `rate`, survivors scaled by 1/(1-rate); eval is the exact identity.
/// `mask_out`, when given, receives the per-element scale factors.
Tensor dropout(const Tensor& input, double rate, Mode mode, std::mt19937_64* rng,
               std::vector<double>* mask_out = nullptr);

}  // namespace ops
}  // namespace symreg
