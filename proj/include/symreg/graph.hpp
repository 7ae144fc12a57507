#pragma once

#include <random>
#include <string>
#include <vector>

#include "symreg/ops.hpp"
#include "symreg/params.hpp"
#include "symreg/tensor.hpp"

namespace symreg {

enum class OpKind {
    input,
    conv3d,
    maxpool3d,
    dense,
    relu,
    dropout,
    flatten,
    add,
    sub,
    square,
    scale,
    clip
};

struct Node {
    OpKind kind;
    int in0 = -1;
    int in1 = -1;
    int weight_id = -1;
    int bias_id = -1;
    int stride = 1;
    int window = 0;
    bool zero_pad = true;
    double rate = 0.0;       // dropout
    double factor = 1.0;     // scale
    double threshold = 0.0;  // clip
    std::string label;

    Tensor out;  // cached forward value; out.grad is dL/dout during backward
    std::vector<int> argmax;    // maxpool
    std::vector<double> mask;   // dropout
};

/// Reverse-mode tape over a fixed topology. Nodes are appended in
/// topological order (inputs before consumers); backward walks the list in
/// reverse and accumulates gradients additively across fan-out.
class ComputeGraph {
  public:
    explicit ComputeGraph(ParameterStore* params) : params_(params) {}

    int add_input(std::vector<int> shape, std::string label = "input");
    int add_conv3d(int in, int weight_id, int stride, bool zero_pad, std::string label = "conv3d");
    int add_maxpool3d(int in, int window, int stride, std::string label = "maxpool3d");
    int add_dense(int in, int weight_id, int bias_id, std::string label = "dense");
    int add_relu(int in);
    int add_dropout(int in, double rate, std::string label = "dropout");
    int add_flatten(int in);
    int add_add(int a, int b);
    int add_sub(int a, int b);
    int add_square(int in);
    int add_scale(int in, double factor);
    int add_clip(int in, double threshold);

    /// Designates the scalar loss node.
    void set_output(int node);
    int output_node() const { return output_; }

    void set_input(int node, Tensor value);
    void set_scalar_input(int node, double value);

    /// Runs the tape in order. With check_finite, every node output is
    /// scanned and a NumericError names the first offending layer.
    void forward(Mode mode, std::mt19937_64* rng = nullptr, bool check_finite = false);

    double output_value() const;
    const Tensor& value(int node) const;

    /// Reverse pass seeded with d(loss)/d(output) = seed. Gradients go to
    /// `sink` when given, otherwise into the parameter store's grad buffers
    /// (accumulating, so callers zero them between steps).
    void backward(double seed = 1.0, GradSink* sink = nullptr);

    ParameterStore& params() { return *params_; }
    const ParameterStore& params() const { return *params_; }
    int node_count() const { return static_cast<int>(nodes_.size()); }

  private:
    int push(Node n);
    const Tensor& in_val(const Node& n, int which) const;

    ParameterStore* params_;
    std::vector<Node> nodes_;
    int output_ = -1;
    bool forward_done_ = false;
};

}  // namespace symreg
