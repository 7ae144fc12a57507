#include "symreg/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "symreg/errors.hpp"

namespace symreg {

namespace {

void check_lengths(std::span<const double> a, std::span<const double> b, const char* what) {
    if (a.empty()) throw ConfigError(std::string(what) + ": empty input");
    if (a.size() != b.size())
        throw DimensionError(std::string(what) + ": length mismatch " + std::to_string(a.size()) +
                             " vs " + std::to_string(b.size()));
}

}  // namespace

double rmse(std::span<const double> preds, std::span<const double> targets) {
    check_lengths(preds, targets, "rmse");
    double sum = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const double d = preds[i] - targets[i];
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(preds.size()));
}

double mae(std::span<const double> preds, std::span<const double> targets) {
    check_lengths(preds, targets, "mae");
    double sum = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) sum += std::fabs(preds[i] - targets[i]);
    return sum / static_cast<double>(preds.size());
}

double pearson_r(std::span<const double> a, std::span<const double> b) {
    check_lengths(a, b, "pearson_r");
    if (a.size() < 2) throw ConfigError("pearson_r: need at least 2 points");
    const double n = static_cast<double>(a.size());
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma, db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0)
        throw NumericError("pearson_r: undefined correlation, zero variance input");
    return sab / std::sqrt(saa * sbb);
}

BinarySideMetrics binary_agreement(std::span<const double> preds, std::span<const double> targets,
                                   double threshold) {
    check_lengths(preds, targets, "binary_agreement");
    int tp = 0, tn = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const bool pred_abnormal = preds[i] < threshold;
        const bool true_abnormal = targets[i] < threshold;
        if (pred_abnormal && true_abnormal) ++tp;
        else if (!pred_abnormal && !true_abnormal) ++tn;
        else if (pred_abnormal) ++fp;
        else ++fn;
    }
    BinarySideMetrics m;
    m.accuracy = static_cast<double>(tp + tn) / static_cast<double>(preds.size());
    if (tp + fn > 0) m.sensitivity = static_cast<double>(tp) / static_cast<double>(tp + fn);
    if (tn + fp > 0) m.specificity = static_cast<double>(tn) / static_cast<double>(tn + fp);
    return m;
}

double coverage_probability(std::span<const double> truths, std::span<const double> centers,
                            std::span<const double> widths, double k) {
    check_lengths(truths, centers, "coverage_probability");
    check_lengths(truths, widths, "coverage_probability");
    std::size_t covered = 0;
    for (std::size_t i = 0; i < truths.size(); ++i) {
        if (std::fabs(truths[i] - centers[i]) <= k * widths[i]) ++covered;
    }
    return static_cast<double>(covered) / static_cast<double>(truths.size());
}

double sharpness(std::span<const double> widths, double k, double span) {
    if (!(span > 0.0)) throw ConfigError("sharpness: span must be > 0");
    if (widths.empty()) throw ConfigError("sharpness: empty input");
    double mean_width = 0;
    for (double w : widths) mean_width += 2.0 * k * w;
    mean_width /= static_cast<double>(widths.size());
    return std::clamp(1.0 - mean_width / span, 0.0, 1.0);
}

CurveResult sharpness_cp_curve(std::span<const double> truths, std::span<const double> centers,
                               std::span<const double> widths, const CurveConfig& cfg) {
    if (truths.empty()) throw ConfigError("sharpness_cp_curve: empty input");
    if (!(cfg.k_step > 0.0)) throw ConfigError("sharpness_cp_curve: k_step must be > 0");
    CurveResult result;
    for (std::size_t step = 0;; ++step) {
        const double k = static_cast<double>(step) * cfg.k_step;
        if (k > cfg.m_cap) {
            result.truncated = true;
            break;
        }
        const double cp = coverage_probability(truths, centers, widths, k);
        const double sh = sharpness(widths, k, cfg.span);
        result.points.push_back({k, cp, sh});
        if (!result.k_at_95cp && cp >= 0.95) {
            result.k_at_95cp = k;
            result.sharpness_at_95cp = sh;
        }
        if (cp >= 1.0) break;
    }

    std::vector<std::pair<double, double>> cs;
    cs.reserve(result.points.size() + 1);
    if (!result.points.empty() && result.points.front().cp > 0.0)
        cs.emplace_back(0.0, result.points.front().sharpness);
    for (const auto& p : result.points) cs.emplace_back(p.cp, p.sharpness);
    result.auc = auc_trapezoid(cs);
    return result;
}

double auc_trapezoid(const std::vector<std::pair<double, double>>& cp_sharpness) {
    double auc = 0;
    for (std::size_t i = 0; i + 1 < cp_sharpness.size(); ++i) {
        const auto& [c0, s0] = cp_sharpness[i];
        const auto& [c1, s1] = cp_sharpness[i + 1];
        auc += (c1 - c0) * (s0 + s1) * 0.5;
    }
    return auc;
}

MetricsReport compute_metrics_report(std::span<const double> y_r, std::span<const double> y_l,
                                     std::span<const double> pred_r, std::span<const double> pred_l,
                                     std::span<const double> center_r,
                                     std::span<const double> center_l,
                                     std::span<const double> width_r,
                                     std::span<const double> width_l, EvalThresholds thresholds,
                                     const CurveConfig& curve_cfg) {
    MetricsReport rep;
    rep.right = {rmse(pred_r, y_r), mae(pred_r, y_r), pearson_r(pred_r, y_r)};
    rep.left = {rmse(pred_l, y_l), mae(pred_l, y_l), pearson_r(pred_l, y_l)};
    rep.avg = {(rep.right.rmse + rep.left.rmse) / 2.0, (rep.right.mae + rep.left.mae) / 2.0,
               (rep.right.pearson + rep.left.pearson) / 2.0};
    rep.bin_right = binary_agreement(pred_r, y_r, thresholds.right);
    rep.bin_left = binary_agreement(pred_l, y_l, thresholds.left);
    rep.curve_right = sharpness_cp_curve(y_r, center_r, width_r, curve_cfg);
    rep.curve_left = sharpness_cp_curve(y_l, center_l, width_l, curve_cfg);
    rep.auc_avg = (rep.curve_right.auc + rep.curve_left.auc) / 2.0;
    if (rep.curve_right.sharpness_at_95cp && rep.curve_left.sharpness_at_95cp)
        rep.sharpness95_avg =
            (*rep.curve_right.sharpness_at_95cp + *rep.curve_left.sharpness_at_95cp) / 2.0;
    return rep;
}

}  // namespace symreg
