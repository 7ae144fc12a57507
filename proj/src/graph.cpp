#include "symreg/graph.hpp"

#include <cmath>

#include "symreg/errors.hpp"

namespace symreg {

int ComputeGraph::push(Node n) {
    nodes_.push_back(std::move(n));
    forward_done_ = false;
    return static_cast<int>(nodes_.size()) - 1;
}

int ComputeGraph::add_input(std::vector<int> shape, std::string label) {
    Node n;
    n.kind = OpKind::input;
    n.label = std::move(label);
    n.out = Tensor(std::move(shape));
    return push(std::move(n));
}

int ComputeGraph::add_conv3d(int in, int weight_id, int stride, bool zero_pad, std::string label) {
    Node n;
    n.kind = OpKind::conv3d;
    n.in0 = in;
    n.weight_id = weight_id;
    n.stride = stride;
    n.zero_pad = zero_pad;
    n.label = std::move(label);
    return push(std::move(n));
}

int ComputeGraph::add_maxpool3d(int in, int window, int stride, std::string label) {
    Node n;
    n.kind = OpKind::maxpool3d;
    n.in0 = in;
    n.window = window;
    n.stride = stride;
    n.label = std::move(label);
    return push(std::move(n));
}

int ComputeGraph::add_dense(int in, int weight_id, int bias_id, std::string label) {
    Node n;
    n.kind = OpKind::dense;
    n.in0 = in;
    n.weight_id = weight_id;
    n.bias_id = bias_id;
    n.label = std::move(label);
    return push(std::move(n));
}

int ComputeGraph::add_relu(int in) {
    Node n;
    n.kind = OpKind::relu;
    n.in0 = in;
    n.label = "relu";
    return push(std::move(n));
}

int ComputeGraph::add_dropout(int in, double rate, std::string label) {
    if (rate < 0.0 || rate >= 1.0)
        throw ConfigError("dropout rate must be in [0,1), got " + std::to_string(rate));
    Node n;
    n.kind = OpKind::dropout;
    n.in0 = in;
    n.rate = rate;
    n.label = std::move(label);
    return push(std::move(n));
}

int ComputeGraph::add_flatten(int in) {
    Node n;
    n.kind = OpKind::flatten;
    n.in0 = in;
    n.label = "flatten";
    return push(std::move(n));
}

int ComputeGraph::add_add(int a, int b) {
    Node n;
    n.kind = OpKind::add;
    n.in0 = a;
    n.in1 = b;
    n.label = "add";
    return push(std::move(n));
}

int ComputeGraph::add_sub(int a, int b) {
    Node n;
    n.kind = OpKind::sub;
    n.in0 = a;
    n.in1 = b;
    n.label = "sub";
    return push(std::move(n));
}

int ComputeGraph::add_square(int in) {
    Node n;
    n.kind = OpKind::square;
    n.in0 = in;
    n.label = "square";
    return push(std::move(n));
}

int ComputeGraph::add_scale(int in, double factor) {
    Node n;
    n.kind = OpKind::scale;
    n.in0 = in;
    n.factor = factor;
    n.label = "scale";
    return push(std::move(n));
}

int ComputeGraph::add_clip(int in, double threshold) {
    Node n;
    n.kind = OpKind::clip;
    n.in0 = in;
    n.threshold = threshold;
    n.label = "clip";
    return push(std::move(n));
}

void ComputeGraph::set_output(int node) {
    if (node < 0 || node >= node_count()) throw StateError("set_output: node id out of range");
    output_ = node;
}

void ComputeGraph::set_input(int node, Tensor value) {
    Node& n = nodes_[static_cast<std::size_t>(node)];
    if (n.kind != OpKind::input) throw StateError("set_input: node is not an input");
    if (value.shape != n.out.shape)
        throw DimensionError("set_input '" + n.label + "': expected " + shape_str(n.out.shape) +
                             ", got " + shape_str(value.shape));
    n.out.v = std::move(value.v);
    forward_done_ = false;
}

void ComputeGraph::set_scalar_input(int node, double value) {
    Node& n = nodes_[static_cast<std::size_t>(node)];
    if (n.kind != OpKind::input || n.out.size() != 1)
        throw StateError("set_scalar_input: node is not a scalar input");
    n.out.v[0] = value;
    forward_done_ = false;
}

const Tensor& ComputeGraph::in_val(const Node& n, int which) const {
    const int id = which == 0 ? n.in0 : n.in1;
    return nodes_[static_cast<std::size_t>(id)].out;
}

void ComputeGraph::forward(Mode mode, std::mt19937_64* rng, bool check_finite) {
    for (auto& n : nodes_) {
        switch (n.kind) {
            case OpKind::input:
                break;
            case OpKind::conv3d:
                n.out = ops::conv3d(in_val(n, 0), params_->at(n.weight_id).value, n.stride,
                                    n.zero_pad);
                break;
            case OpKind::maxpool3d:
                n.out = ops::maxpool3d(in_val(n, 0), n.window, n.stride, &n.argmax);
                break;
            case OpKind::dense:
                n.out = ops::dense(in_val(n, 0), params_->at(n.weight_id).value,
                                   params_->at(n.bias_id).value);
                break;
            case OpKind::relu:
                n.out = ops::relu(in_val(n, 0));
                break;
            case OpKind::dropout:
                n.out = ops::dropout(in_val(n, 0), n.rate, mode, rng, &n.mask);
                break;
            case OpKind::flatten: {
                const Tensor& x = in_val(n, 0);
                n.out.shape = {static_cast<int>(x.size())};
                n.out.v = x.v;
                break;
            }
            case OpKind::add: {
                const Tensor& a = in_val(n, 0);
                const Tensor& b = in_val(n, 1);
                if (!same_shape(a, b))
                    throw DimensionError("add: shape mismatch " + shape_str(a.shape) + " vs " +
                                         shape_str(b.shape));
                n.out.shape = a.shape;
                n.out.v.resize(a.size());
                for (std::size_t i = 0; i < a.size(); ++i) n.out.v[i] = a.v[i] + b.v[i];
                break;
            }
            case OpKind::sub: {
                const Tensor& a = in_val(n, 0);
                const Tensor& b = in_val(n, 1);
                if (!same_shape(a, b))
                    throw DimensionError("sub: shape mismatch " + shape_str(a.shape) + " vs " +
                                         shape_str(b.shape));
                n.out.shape = a.shape;
                n.out.v.resize(a.size());
                for (std::size_t i = 0; i < a.size(); ++i) n.out.v[i] = a.v[i] - b.v[i];
                break;
            }
            case OpKind::square: {
                const Tensor& x = in_val(n, 0);
                n.out.shape = x.shape;
                n.out.v.resize(x.size());
                for (std::size_t i = 0; i < x.size(); ++i) n.out.v[i] = x.v[i] * x.v[i];
                break;
            }
            case OpKind::scale: {
                const Tensor& x = in_val(n, 0);
                n.out.shape = x.shape;
                n.out.v.resize(x.size());
                for (std::size_t i = 0; i < x.size(); ++i) n.out.v[i] = n.factor * x.v[i];
                break;
            }
            case OpKind::clip: {
                const Tensor& x = in_val(n, 0);
                n.out.shape = x.shape;
                n.out.v.resize(x.size());
                for (std::size_t i = 0; i < x.size(); ++i)
                    n.out.v[i] = x.v[i] > n.threshold ? x.v[i] : 0.0;
                break;
            }
        }
        if (check_finite && !n.out.all_finite())
            throw NumericError("non-finite activation in layer '" + n.label + "'");
    }
    forward_done_ = true;
}

double ComputeGraph::output_value() const {
    if (output_ < 0) throw StateError("graph has no designated output node");
    const Tensor& t = nodes_[static_cast<std::size_t>(output_)].out;
    if (t.size() != 1) throw StateError("output node is not scalar");
    return t.v[0];
}

const Tensor& ComputeGraph::value(int node) const { return nodes_[static_cast<std::size_t>(node)].out; }

void ComputeGraph::backward(double seed, GradSink* sink) {
    if (!forward_done_) throw StateError("backward: missing forward cache");
    if (output_ < 0) throw StateError("backward: no designated output node");
    if (nodes_[static_cast<std::size_t>(output_)].out.size() != 1)
        throw StateError("backward: output node is not scalar");

    for (auto& n : nodes_) n.out.zero_grad();
    nodes_[static_cast<std::size_t>(output_)].out.grad[0] = seed;

    auto weight_grad = [&](int id) -> std::vector<double>* {
        if (sink) return &sink->at(id);
        Parameter& p = params_->at(id);
        p.value.ensure_grad();
        return &p.value.grad;
    };

    for (int i = node_count() - 1; i >= 0; --i) {
        Node& n = nodes_[static_cast<std::size_t>(i)];
        const std::vector<double>& g = n.out.grad;
        switch (n.kind) {
            case OpKind::input:
                break;
            case OpKind::conv3d: {
                Node& src = nodes_[static_cast<std::size_t>(n.in0)];
                std::vector<double>* din = src.kind == OpKind::input ? nullptr : &src.out.grad;
                ops::conv3d_backward(src.out, params_->at(n.weight_id).value, n.stride, n.zero_pad,
                                     g, din, weight_grad(n.weight_id));
                break;
            }
            case OpKind::maxpool3d: {
                Node& src = nodes_[static_cast<std::size_t>(n.in0)];
                ops::maxpool3d_backward(n.argmax, g, src.out.grad);
                break;
            }
            case OpKind::dense: {
                Node& src = nodes_[static_cast<std::size_t>(n.in0)];
                std::vector<double>* din = src.kind == OpKind::input ? nullptr : &src.out.grad;
                ops::dense_backward(src.out, params_->at(n.weight_id).value, g, din,
                                    weight_grad(n.weight_id), weight_grad(n.bias_id));
                break;
            }
            case OpKind::relu: {
                Node& src = nodes_[static_cast<std::size_t>(n.in0)];
                ops::relu_backward(src.out, g, src.out.grad);
                break;
            }
            case OpKind::dropout: {
                Node& src = nodes_[static_cast<std::size_t>(n.in0)];
                auto& dg = src.out.grad;
                for (std::size_t j = 0; j < g.size(); ++j) dg[j] += g[j] * n.mask[j];
                break;
            }
            case OpKind::flatten: {
                Node& src = nodes_[static_cast<std::size_t>(n.in0)];
                auto& dg = src.out.grad;
                for (std::size_t j = 0; j < g.size(); ++j) dg[j] += g[j];
                break;
            }
            case OpKind::add: {
                Node& a = nodes_[static_cast<std::size_t>(n.in0)];
                Node& b = nodes_[static_cast<std::size_t>(n.in1)];
                for (std::size_t j = 0; j < g.size(); ++j) {
                    a.out.grad[j] += g[j];
                    b.out.grad[j] += g[j];
                }
                break;
            }
            case OpKind::sub: {
                Node& a = nodes_[static_cast<std::size_t>(n.in0)];
                Node& b = nodes_[static_cast<std::size_t>(n.in1)];
                for (std::size_t j = 0; j < g.size(); ++j) {
                    a.out.grad[j] += g[j];
                    b.out.grad[j] -= g[j];
                }
                break;
            }
            case OpKind::square: {
                Node& src = nodes_[static_cast<std::size_t>(n.in0)];
                for (std::size_t j = 0; j < g.size(); ++j)
                    src.out.grad[j] += 2.0 * src.out.v[j] * g[j];
                break;
            }
            case OpKind::scale: {
                Node& src = nodes_[static_cast<std::size_t>(n.in0)];
                for (std::size_t j = 0; j < g.size(); ++j) src.out.grad[j] += n.factor * g[j];
                break;
            }
            case OpKind::clip: {
                Node& src = nodes_[static_cast<std::size_t>(n.in0)];
                for (std::size_t j = 0; j < g.size(); ++j) {
                    if (src.out.v[j] > n.threshold) src.out.grad[j] += g[j];
                }
                break;
            }
        }
    }
}

}  // namespace symreg
