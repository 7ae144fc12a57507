#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "symreg/adam.hpp"
#include "symreg/backbone.hpp"
#include "symreg/data.hpp"

namespace symreg {

/// Clip margin and weight of the symmetric loss. `alpha` is a dimensionless
/// fraction of sbr_max; the raw-unit margin is alpha * sbr_max.
struct SymmetricLossConfig {
    double alpha = 0.04;
    double beta = 1.0;
    double sbr_max = 6.84;

    double raw_margin() const { return alpha * sbr_max; }
    void validate() const;
};

struct PredPair {
    double r = 0.0, l = 0.0;
};

/// a if a > alpha_sq else 0; gradient passes only above the threshold.
double clip_value(double a, double alpha_sq);

/// Mean over samples of (y_r - yhat_r)^2 + (y_l - yhat_l)^2.
double loss_reg(std::span<const PredPair> preds, std::span<const PredPair> targets);

/// Mean over samples of clip((yhat_r - yhat_l)^2, raw_margin^2).
double loss_sym(std::span<const PredPair> preds, const SymmetricLossConfig& cfg);

double loss_final(std::span<const PredPair> preds, std::span<const PredPair> targets,
                  const SymmetricLossConfig& cfg);

/// Paired regressor: one shared backbone F evaluates both lateral inputs;
/// right patches are laterally flipped first so both sides present the same
/// input type.
class SymmetricRegressor {
  public:
    explicit SymmetricRegressor(Backbone&& f, bool flip_right = true)
        : f_(std::move(f)), flip_right_(flip_right) {}

    std::pair<double, double> forward_pair(const Patch3D& x_r, const Patch3D& x_l, Mode mode,
                                           std::mt19937_64* rng = nullptr);

    Backbone& backbone() { return f_; }
    const Backbone& backbone() const { return f_; }
    bool flips_right() const { return flip_right_; }

  private:
    Backbone f_;
    bool flip_right_;
};

/// Training graph for one sample pair: two weight-sharing backbone paths
/// plus the loss head reg + beta * clip((r-l)^2, margin^2).
struct PairLossGraph {
    PairLossGraph(const SymmetricRegressor& model, const SymmetricLossConfig& loss);

    ComputeGraph graph;
    int in_xr = -1, in_xl = -1, in_yr = -1, in_yl = -1;
    int out_r = -1, out_l = -1;
    int node_reg = -1, node_sym = -1, node_total = -1;
};

/// Single-sided loss graph: (y - F(x))^2.
struct SingleLossGraph {
    SingleLossGraph(const Backbone& model);

    ComputeGraph graph;
    int in_x = -1, in_y = -1;
    int out_pred = -1, node_total = -1;
};

struct TrainConfig {
    SymmetricLossConfig loss;
    AdamConfig adam;
    int batch = 8;
    int epochs = 30;
    std::uint64_t seed = 1;
};

struct EpochRow {
    int epoch = 0;
    double train_reg = 0, train_sym = 0, train_final = 0;
    double val_reg = 0, val_sym = 0, val_final = 0;
    double val_mae = 0;
};

struct TrainReport {
    std::vector<EpochRow> epochs;
    int best_epoch = -1;
    double best_val_mae = 0;
    std::uint64_t seed = 0;
};

/// Mini-batch training of the paired objective. Per-sample gradients are
/// reduced in index order, so the result is identical for any worker count.
/// On return the model holds the parameters of the best-validation-MAE
/// epoch. Identical seeds reproduce the loss trace exactly.
TrainReport train(SymmetricRegressor& model, const Dataset& ds, const TrainConfig& cfg);

/// Unpaired baseline: one model fitted to a single lateral side.
enum class Side { right, left };
TrainReport train_single(Backbone& model, const Dataset& ds, Side side, const TrainConfig& cfg);

enum class SweepParam { alpha, beta };

struct SweepRow {
    double value = 0;
    double val_mae = 0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    double best_value = 0;
    double best_val_mae = 0;
};

/// One full training run per grid value with a fixed seed; selects the
/// validation-MAE arg-min (ties toward the earlier grid entry).
SweepResult sweep(SweepParam param, const std::vector<double>& grid, const Dataset& ds,
                  const BackboneConfig& backbone_cfg, const TrainConfig& base);

}  // namespace symreg
