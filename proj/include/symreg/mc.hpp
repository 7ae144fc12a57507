#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "symreg/data.hpp"
#include "symreg/metrics.hpp"
#include "symreg/symmetric.hpp"

namespace symreg {

struct McConfig {
    int n = 30;
    double gamma_r = 0.0;
    double gamma_l = 0.0;
    std::uint64_t seed = 0;
    /// Attach gamma_l to the right interval and gamma_r to the left instead
    /// of the straight pairing used by default.
    bool crossed_pairing = false;

    void validate() const;
};

/// Ordered MC dropout prediction pairs (right, left), one per pass.
struct McSamples {
    std::vector<std::pair<double, double>> preds;
    int count() const { return static_cast<int>(preds.size()); }
};

struct McStats {
    double mean_r = 0, mean_l = 0;
    double sd_r = 0, sd_l = 0;  // population SD (1/n inside the radical)
};

struct IntervalResult {
    double y_r_hat = 0, y_l_hat = 0;  // MC means
    double sigma_r = 0, sigma_l = 0;
    double sigma_sym = 0;
    double sigma_r_sym = 0, sigma_l_sym = 0;
};

/// n forward passes with dropout live, fresh mask per pass; mask streams
/// derive from (seed, pass index), so results are deterministic per seed.
McSamples mc_sample(SymmetricRegressor& model, const Patch3D& x_r, const Patch3D& x_l, int n,
                    std::uint64_t seed);

McStats mc_stats(const McSamples& samples);

/// Mean absolute right-left gap across passes.
double sigma_sym(const McSamples& samples);

/// sigma_side^sym = sigma_side + gamma_side * sigma_sym.
IntervalResult combined_intervals(const McStats& stats, double sym, const McConfig& cfg);

IntervalResult predict_with_uncertainty(SymmetricRegressor& model, const Patch3D& x_r,
                                        const Patch3D& x_l, const McConfig& cfg);

/// Per-case MC pass over a dataset split; case i uses stream (seed, i).
std::vector<IntervalResult> intervals_for_split(SymmetricRegressor& model, const Dataset& ds,
                                                Split split, const McConfig& cfg);

struct GammaSweepRow {
    double gamma_r = 0, gamma_l = 0;
    double auc = 0;  // mean of the right/left sharpness-CP AUCs
};

struct GammaCalibration {
    std::vector<GammaSweepRow> rows;  // in evaluation order
    double gamma_r = 0, gamma_l = 0;
    double best_auc = 0;
};

/// Exhaustive (gamma_r, gamma_l) grid search maximizing the mean of the two
/// per-side sharpness-CP AUCs on the given split; ties break toward smaller
/// gamma (by gamma_r + gamma_l, then gamma_r). MC samples are drawn once and
/// reused across the grid.
GammaCalibration calibrate_gamma_full(SymmetricRegressor& model, const Dataset& ds, Split split,
                                      const std::vector<double>& grid, const McConfig& base,
                                      const CurveConfig& curve_cfg);

std::pair<double, double> calibrate_gamma(SymmetricRegressor& model, const Dataset& ds, Split split,
                                          const std::vector<double>& grid, const McConfig& base,
                                          const CurveConfig& curve_cfg);

}  // namespace symreg
