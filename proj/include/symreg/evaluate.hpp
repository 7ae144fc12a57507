#pragma once

#include "symreg/mc.hpp"
#include "symreg/metrics.hpp"

namespace symreg {

struct EvalResult {
    MetricsReport report;
    std::vector<std::size_t> case_indices;  // dataset positions of the split
    std::vector<double> pred_r, pred_l;     // deterministic eval predictions
    std::vector<IntervalResult> intervals;  // per-case MC intervals
};

/// Deterministic predictions feed the error/binary metrics; MC means and the
/// combined sigma^sym widths feed the curve suite.
EvalResult evaluate_all(SymmetricRegressor& model, const Dataset& ds, Split split,
                        const McConfig& mc_cfg, EvalThresholds thresholds,
                        const CurveConfig& curve_cfg);

/// Baseline variant with one single-sided model per side. sigma_sym is 0 by
/// construction (no pairing), so the intervals are plain per-side MC.
EvalResult evaluate_all_unpaired(Backbone& right_model, Backbone& left_model, const Dataset& ds,
                                 Split split, const McConfig& mc_cfg, EvalThresholds thresholds,
                                 const CurveConfig& curve_cfg);

}  // namespace symreg
