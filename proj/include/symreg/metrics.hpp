#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace symreg {

double rmse(std::span<const double> preds, std::span<const double> targets);
double mae(std::span<const double> preds, std::span<const double> targets);

/// Sample correlation; needs length >= 2 and nonzero variance on both sides.
double pearson_r(std::span<const double> a, std::span<const double> b);

/// Binary agreement against a normal/abnormal threshold; abnormal (the
/// positive class) is value < threshold. Class metrics with no class members
/// are reported absent rather than 0.
struct BinarySideMetrics {
    double accuracy = 0;
    std::optional<double> sensitivity;
    std::optional<double> specificity;
};
BinarySideMetrics binary_agreement(std::span<const double> preds, std::span<const double> targets,
                                   double threshold);

/// Fraction of cases with |truth - center| <= k * width.
double coverage_probability(std::span<const double> truths, std::span<const double> centers,
                            std::span<const double> widths, double k);

/// 1 - mean(2 k width)/span, clamped to [0,1].
double sharpness(std::span<const double> widths, double k, double span);

struct CurvePoint {
    double k = 0, cp = 0, sharpness = 0;
};

struct CurveConfig {
    double k_step = 0.05;
    double m_cap = 1024.0;  // hard cap on the interval multiplier
    double span = 6.4;      // width-normalization span (dataset target range)
};

struct CurveResult {
    std::vector<CurvePoint> points;
    double auc = 0;
    bool truncated = false;  // CP never reached 1 below the m cap
    std::optional<double> k_at_95cp;
    std::optional<double> sharpness_at_95cp;
};

/// Walks k = 0, k_step, ... until CP reaches 1 (or the cap), recording
/// (CP, sharpness) points and the trapezoid AUC over CP in [0,1].
CurveResult sharpness_cp_curve(std::span<const double> truths, std::span<const double> centers,
                               std::span<const double> widths, const CurveConfig& cfg);

/// Trapezoid area under (cp, sharpness) points sorted by cp ascending.
double auc_trapezoid(const std::vector<std::pair<double, double>>& cp_sharpness);

struct EvalThresholds {
    double right = 3.401;
    double left = 3.345;
};

struct SideErrors {
    double rmse = 0, mae = 0, pearson = 0;
};

/// Table-3/Table-5 style aggregate: per-side and averaged prediction
/// metrics, binary agreement, and the uncertainty curve suite.
struct MetricsReport {
    SideErrors right, left, avg;
    BinarySideMetrics bin_right, bin_left;
    CurveResult curve_right, curve_left;
    double auc_avg = 0;
    std::optional<double> sharpness95_avg;
};

/// Pure core over in-memory arrays: deterministic predictions feed the error
/// and binary metrics, MC means/widths feed the curves.
MetricsReport compute_metrics_report(std::span<const double> y_r, std::span<const double> y_l,
                                     std::span<const double> pred_r, std::span<const double> pred_l,
                                     std::span<const double> center_r,
                                     std::span<const double> center_l,
                                     std::span<const double> width_r,
                                     std::span<const double> width_l, EvalThresholds thresholds,
                                     const CurveConfig& curve_cfg);

}  // namespace symreg
