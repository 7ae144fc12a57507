#include "symreg/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "symreg/errors.hpp"

namespace symreg::ops {

namespace {

int conv_out_extent(int e, int k, int pad, int stride) {
    return (e + 2 * pad - k) / stride + 1;
}

void check_conv_args(const Tensor& input, const Tensor& kernels, int stride) {
    if (input.ndim() != 4)
        throw DimensionError("conv3d: input must be [W,H,D,Cin], got " + shape_str(input.shape));
    if (kernels.ndim() != 5)
        throw DimensionError("conv3d: kernels must be [k,k,k,Cin,Cout], got " +
                             shape_str(kernels.shape));
    const int k = kernels.dim(0);
    if (kernels.dim(1) != k || kernels.dim(2) != k)
        throw DimensionError("conv3d: kernel must be cubic, got " + shape_str(kernels.shape));
    if (k % 2 == 0) throw DimensionError("conv3d: kernel size must be odd, got " + shape_str(kernels.shape));
    if (stride < 1) throw DimensionError("conv3d: stride must be >= 1");
    if (input.dim(3) != kernels.dim(3))
        throw DimensionError("conv3d: input channels mismatch, input " + shape_str(input.shape) +
                             " vs kernels " + shape_str(kernels.shape));
}

}  // namespace

Tensor conv3d(const Tensor& input, const Tensor& kernels, int stride, bool zero_pad) {
    check_conv_args(input, kernels, stride);
    const int W = input.dim(0), H = input.dim(1), D = input.dim(2), Cin = input.dim(3);
    const int k = kernels.dim(0), Cout = kernels.dim(4);
    const int pad = zero_pad ? (k - 1) / 2 : 0;
    const int OW = conv_out_extent(W, k, pad, stride);
    const int OH = conv_out_extent(H, k, pad, stride);
    const int OD = conv_out_extent(D, k, pad, stride);
    if (OW < 1 || OH < 1 || OD < 1)
        throw DimensionError("conv3d: kernel " + shape_str(kernels.shape) +
                             " does not fit input " + shape_str(input.shape));

    Tensor out({OW, OH, OD, Cout});
    const double* in = input.v.data();
    const double* ker = kernels.v.data();
    double* o = out.v.data();

    for (int ow = 0; ow < OW; ++ow) {
        for (int oh = 0; oh < OH; ++oh) {
            for (int od = 0; od < OD; ++od) {
                double* op = o + (static_cast<std::size_t>((ow * OH + oh) * OD + od)) * Cout;
                for (int kw = 0; kw < k; ++kw) {
                    const int iw = ow * stride - pad + kw;
                    if (iw < 0 || iw >= W) continue;
                    for (int kh = 0; kh < k; ++kh) {
                        const int ih = oh * stride - pad + kh;
                        if (ih < 0 || ih >= H) continue;
                        for (int kd = 0; kd < k; ++kd) {
                            const int id = od * stride - pad + kd;
                            if (id < 0 || id >= D) continue;
                            const double* ip =
                                in + (static_cast<std::size_t>((iw * H + ih) * D + id)) * Cin;
                            const double* kp =
                                ker + (static_cast<std::size_t>(((kw * k + kh) * k + kd)) * Cin) * Cout;
                            for (int ci = 0; ci < Cin; ++ci) {
                                const double a = ip[ci];
                                const double* kc = kp + static_cast<std::size_t>(ci) * Cout;
                                for (int co = 0; co < Cout; ++co) op[co] += a * kc[co];
                            }
                        }
                    }
                }
            }
        }
    }
    return out;
}

void conv3d_backward(const Tensor& input, const Tensor& kernels, int stride, bool zero_pad,
                     const std::vector<double>& d_out, std::vector<double>* d_input,
                     std::vector<double>* d_kernels) {
    check_conv_args(input, kernels, stride);
    const int W = input.dim(0), H = input.dim(1), D = input.dim(2), Cin = input.dim(3);
    const int k = kernels.dim(0), Cout = kernels.dim(4);
    const int pad = zero_pad ? (k - 1) / 2 : 0;
    const int OW = conv_out_extent(W, k, pad, stride);
    const int OH = conv_out_extent(H, k, pad, stride);
    const int OD = conv_out_extent(D, k, pad, stride);

    const double* in = input.v.data();
    const double* ker = kernels.v.data();
    const double* dob = d_out.data();
    double* din = d_input ? d_input->data() : nullptr;
    double* dker = d_kernels ? d_kernels->data() : nullptr;

    for (int ow = 0; ow < OW; ++ow) {
        for (int oh = 0; oh < OH; ++oh) {
            for (int od = 0; od < OD; ++od) {
                const double* dop =
                    dob + (static_cast<std::size_t>((ow * OH + oh) * OD + od)) * Cout;
                for (int kw = 0; kw < k; ++kw) {
                    const int iw = ow * stride - pad + kw;
                    if (iw < 0 || iw >= W) continue;
                    for (int kh = 0; kh < k; ++kh) {
                        const int ih = oh * stride - pad + kh;
                        if (ih < 0 || ih >= H) continue;
                        for (int kd = 0; kd < k; ++kd) {
                            const int id = od * stride - pad + kd;
                            if (id < 0 || id >= D) continue;
                            const std::size_t in_off =
                                (static_cast<std::size_t>((iw * H + ih) * D + id)) * Cin;
                            const std::size_t ker_off =
                                (static_cast<std::size_t>(((kw * k + kh) * k + kd)) * Cin) * Cout;
                            for (int ci = 0; ci < Cin; ++ci) {
                                const double* kc = ker + ker_off + static_cast<std::size_t>(ci) * Cout;
                                if (din) {
                                    double s = 0.0;
                                    for (int co = 0; co < Cout; ++co) s += kc[co] * dop[co];
                                    din[in_off + static_cast<std::size_t>(ci)] += s;
                                }
                                if (dker) {
                                    const double a = in[in_off + static_cast<std::size_t>(ci)];
                                    double* dkc = dker + ker_off + static_cast<std::size_t>(ci) * Cout;
                                    for (int co = 0; co < Cout; ++co) dkc[co] += a * dop[co];
                                }
                            }
                        }
                    }
                }
            }
        }
    }
}

namespace {

// Full windows only; an axis shorter than the window collapses to one
// output pooled over the partial remainder.
int pool_out_extent(int e, int window, int stride) {
    if (e < window) return 1;
    return (e - window) / stride + 1;
}

}  // namespace

Tensor maxpool3d(const Tensor& input, int window, int stride, std::vector<int>* argmax) {
    if (input.ndim() != 4)
        throw DimensionError("maxpool3d: input must be [W,H,D,C], got " + shape_str(input.shape));
    if (window < 1 || stride < 1) throw DimensionError("maxpool3d: window and stride must be >= 1");
    const int W = input.dim(0), H = input.dim(1), D = input.dim(2), C = input.dim(3);
    if (window > W && window > H && window > D)
        throw DimensionError("maxpool3d: window " + std::to_string(window) +
                             " larger than every spatial extent of " + shape_str(input.shape));

    const int OW = pool_out_extent(W, window, stride);
    const int OH = pool_out_extent(H, window, stride);
    const int OD = pool_out_extent(D, window, stride);

    Tensor out({OW, OH, OD, C});
    if (argmax) argmax->assign(out.size(), -1);
    const double* in = input.v.data();
    double* o = out.v.data();

    for (int ow = 0; ow < OW; ++ow) {
        const int w0 = ow * stride, w1 = std::min(w0 + window, W);
        for (int oh = 0; oh < OH; ++oh) {
            const int h0 = oh * stride, h1 = std::min(h0 + window, H);
            for (int od = 0; od < OD; ++od) {
                const int d0 = od * stride, d1 = std::min(d0 + window, D);
                const std::size_t out_off =
                    (static_cast<std::size_t>((ow * OH + oh) * OD + od)) * C;
                for (int c = 0; c < C; ++c) {
                    double best = -std::numeric_limits<double>::infinity();
                    int best_idx = -1;
                    for (int w = w0; w < w1; ++w) {
                        for (int h = h0; h < h1; ++h) {
                            for (int d = d0; d < d1; ++d) {
                                const std::size_t idx =
                                    (static_cast<std::size_t>((w * H + h) * D + d)) * C +
                                    static_cast<std::size_t>(c);
                                if (in[idx] > best) {
                                    best = in[idx];
                                    best_idx = static_cast<int>(idx);
                                }
                            }
                        }
                    }
                    o[out_off + static_cast<std::size_t>(c)] = best;
                    if (argmax) (*argmax)[out_off + static_cast<std::size_t>(c)] = best_idx;
                }
            }
        }
    }
    return out;
}

void maxpool3d_backward(const std::vector<int>& argmax, const std::vector<double>& d_out,
                        std::vector<double>& d_input) {
    for (std::size_t i = 0; i < d_out.size(); ++i) {
        d_input[static_cast<std::size_t>(argmax[i])] += d_out[i];
    }
}

Tensor dense(const Tensor& input, const Tensor& weights, const Tensor& bias) {
    if (weights.ndim() != 2)
        throw DimensionError("dense: weights must be [n,m], got " + shape_str(weights.shape));
    const int n = weights.dim(0), m = weights.dim(1);
    if (static_cast<int>(input.size()) != n)
        throw DimensionError("dense: input length " + std::to_string(input.size()) +
                             " (shape " + shape_str(input.shape) + ") does not match weights " +
                             shape_str(weights.shape));
    if (static_cast<int>(bias.size()) != m)
        throw DimensionError("dense: bias " + shape_str(bias.shape) + " does not match weights " +
                             shape_str(weights.shape));

    Tensor out({m});
    const double* x = input.v.data();
    const double* wt = weights.v.data();
    double* o = out.v.data();
    for (int j = 0; j < m; ++j) o[j] = bias.v[static_cast<std::size_t>(j)];
    for (int i = 0; i < n; ++i) {
        const double a = x[i];
        const double* wr = wt + static_cast<std::size_t>(i) * m;
        for (int j = 0; j < m; ++j) o[j] += a * wr[j];
    }
    return out;
}

void dense_backward(const Tensor& input, const Tensor& weights, const std::vector<double>& d_out,
                    std::vector<double>* d_input, std::vector<double>* d_weights,
                    std::vector<double>* d_bias) {
    const int n = weights.dim(0), m = weights.dim(1);
    const double* x = input.v.data();
    const double* wt = weights.v.data();
    if (d_bias) {
        for (int j = 0; j < m; ++j) (*d_bias)[static_cast<std::size_t>(j)] += d_out[static_cast<std::size_t>(j)];
    }
    for (int i = 0; i < n; ++i) {
        const double* wr = wt + static_cast<std::size_t>(i) * m;
        if (d_input) {
            double s = 0.0;
            for (int j = 0; j < m; ++j) s += wr[j] * d_out[static_cast<std::size_t>(j)];
            (*d_input)[static_cast<std::size_t>(i)] += s;
        }
        if (d_weights) {
            const double a = x[i];
            double* dw = d_weights->data() + static_cast<std::size_t>(i) * m;
            for (int j = 0; j < m; ++j) dw[j] += a * d_out[static_cast<std::size_t>(j)];
        }
    }
}

Tensor relu(const Tensor& input) {
    Tensor out(input.shape);
    for (std::size_t i = 0; i < input.size(); ++i) out.v[i] = input.v[i] > 0.0 ? input.v[i] : 0.0;
    return out;
}

void relu_backward(const Tensor& input, const std::vector<double>& d_out,
                   std::vector<double>& d_input) {
    for (std::size_t i = 0; i < input.size(); ++i) {
        if (input.v[i] > 0.0) d_input[i] += d_out[i];
    }
}

Tensor dropout(const Tensor& input, double rate, Mode mode, std::mt19937_64* rng,
               std::vector<double>* mask_out) {
    if (rate < 0.0 || rate >= 1.0)
        throw ConfigError("dropout: rate must be in [0,1), got " + std::to_string(rate));
    Tensor out(input.shape);
    if (mode == Mode::eval || rate == 0.0) {
        out.v = input.v;
        if (mask_out) mask_out->assign(input.size(), 1.0);
        return out;
    }
    if (!rng) throw StateError("dropout: train/mc mode requires an rng");
    const double scale = 1.0 / (1.0 - rate);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    if (mask_out) mask_out->resize(input.size());
    for (std::size_t i = 0; i < input.size(); ++i) {
        const double factor = (u(*rng) < rate) ? 0.0 : scale;
        out.v[i] = input.v[i] * factor;
        if (mask_out) (*mask_out)[i] = factor;
    }
    return out;
}

}  // namespace symreg::ops
