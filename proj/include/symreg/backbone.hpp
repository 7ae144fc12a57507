#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "symreg/graph.hpp"
#include "symreg/patch.hpp"

namespace symreg {

/// VGG-style stack geometry: per stage, `convs_per_stage` 3x3x3 zero-padded
/// stride-1 convolutions (each followed by ReLU) and a 2x2x2 stride-2 max
/// pool; then flatten, dropout, and a linear head to one scalar.
struct BackboneConfig {
    std::array<int, 3> patch_dims{16, 16, 8};
    std::vector<int> channel_plan{8, 16, 32, 64};
    int convs_per_stage = 2;
    double dropout_rate = 0.5;

    static BackboneConfig desk() { return BackboneConfig{}; }
    static BackboneConfig full() {
        BackboneConfig c;
        c.patch_dims = {50, 50, 20};
        c.channel_plan = {64, 128, 256, 512};
        return c;
    }
};

struct LayerShape {
    std::string name;
    std::vector<int> shape;
};

/// Activation shapes for every layer, input through head. Throws ConfigError
/// naming the offending stage if a pool would collapse the spatial extents.
std::vector<LayerShape> shape_ledger(const BackboneConfig& cfg);

int flatten_width(const BackboneConfig& cfg);

/// Trainable parameter count as a pure function of the config.
std::size_t param_count(const BackboneConfig& cfg);

/// The shared CNN regressor F: one 3D patch in, one scalar out.
class Backbone {
  public:
    /// Validates the config and initializes weights (fan-in-scaled uniform,
    /// zero biases) deterministically from the seed.
    static Backbone build(const BackboneConfig& cfg, std::uint64_t seed);

    /// Stage-less variant: flatten -> dense(n,1) over the raw patch, no
    /// dropout, no standardization. Used for optimizer-oracle tests.
    static Backbone linear_head(std::array<int, 3> dims, bool trainable_bias);

    Backbone(Backbone&&) = default;
    Backbone& operator=(Backbone&&) = default;
    Backbone(const Backbone&) = delete;
    Backbone& operator=(const Backbone&) = delete;

    /// Appends this backbone's layer chain to a graph, sharing this
    /// instance's parameters. Returns the scalar output node.
    int append_to(ComputeGraph& g, int input_node) const;

    /// Converts a patch to the network input tensor, standardizing to zero
    /// mean / unit variance when enabled.
    Tensor patch_to_input(const Patch3D& patch) const;

    double predict(const Patch3D& patch, Mode mode, std::mt19937_64* rng = nullptr);

    const BackboneConfig& config() const { return cfg_; }
    ParameterStore& params() { return *params_; }
    const ParameterStore& params() const { return *params_; }
    bool standardize_inputs() const { return standardize_; }

    std::vector<std::vector<double>> snapshot_params() const;
    void restore_params(const std::vector<std::vector<double>>& snap);

  private:
    Backbone() = default;
    void register_params(std::uint64_t seed, bool trainable_bias);

    BackboneConfig cfg_;
    bool has_stages_ = true;
    bool standardize_ = true;
    std::unique_ptr<ParameterStore> params_;
    std::vector<std::vector<int>> conv_weight_ids_;  // [stage][conv]
    int fc_weight_id_ = -1;
    int fc_bias_id_ = -1;

    // lazily built single-input graph reused by predict()
    std::unique_ptr<ComputeGraph> predict_graph_;
    int predict_input_ = -1;
    int predict_output_ = -1;
};

}  // namespace symreg
