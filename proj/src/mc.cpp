#include "symreg/mc.hpp"

#include <algorithm>
#include <cmath>

#include "symreg/errors.hpp"
#include "symreg/rng.hpp"

namespace symreg {

void McConfig::validate() const {
    if (n < 2) throw ConfigError("mc: n must be >= 2, got " + std::to_string(n));
    if (gamma_r < 0.0 || gamma_r > 1.0 || gamma_l < 0.0 || gamma_l > 1.0)
        throw ConfigError("mc: gamma weights must lie in [0,1]");
}

McSamples mc_sample(SymmetricRegressor& model, const Patch3D& x_r, const Patch3D& x_l, int n,
                    std::uint64_t seed) {
    if (n < 2) throw ConfigError("mc_sample: n must be >= 2, got " + std::to_string(n));
    McSamples samples;
    samples.preds.reserve(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) {
        auto eng = make_engine(seed, 0x3C, static_cast<std::uint64_t>(t));
        samples.preds.push_back(model.forward_pair(x_r, x_l, Mode::mc, &eng));
    }
    return samples;
}

McStats mc_stats(const McSamples& samples) {
    if (samples.count() < 2) throw ConfigError("mc_stats: need at least 2 samples");
    const double n = static_cast<double>(samples.count());
    McStats st;
    for (const auto& [r, l] : samples.preds) {
        st.mean_r += r;
        st.mean_l += l;
    }
    st.mean_r /= n;
    st.mean_l /= n;
    double vr = 0, vl = 0;
    for (const auto& [r, l] : samples.preds) {
        vr += (r - st.mean_r) * (r - st.mean_r);
        vl += (l - st.mean_l) * (l - st.mean_l);
    }
    st.sd_r = std::sqrt(vr / n);
    st.sd_l = std::sqrt(vl / n);
    return st;
}

double sigma_sym(const McSamples& samples) {
    if (samples.count() < 1) throw ConfigError("sigma_sym: need at least 1 sample");
    double sum = 0;
    for (const auto& [r, l] : samples.preds) sum += std::fabs(r - l);
    return sum / static_cast<double>(samples.count());
}

IntervalResult combined_intervals(const McStats& stats, double sym, const McConfig& cfg) {
    cfg.validate();
    IntervalResult res;
    res.y_r_hat = stats.mean_r;
    res.y_l_hat = stats.mean_l;
    res.sigma_r = stats.sd_r;
    res.sigma_l = stats.sd_l;
    res.sigma_sym = sym;
    const double gr = cfg.crossed_pairing ? cfg.gamma_l : cfg.gamma_r;
    const double gl = cfg.crossed_pairing ? cfg.gamma_r : cfg.gamma_l;
    res.sigma_r_sym = stats.sd_r + gr * sym;
    res.sigma_l_sym = stats.sd_l + gl * sym;
    return res;
}

IntervalResult predict_with_uncertainty(SymmetricRegressor& model, const Patch3D& x_r,
                                        const Patch3D& x_l, const McConfig& cfg) {
    cfg.validate();
    const McSamples samples = mc_sample(model, x_r, x_l, cfg.n, cfg.seed);
    return combined_intervals(mc_stats(samples), sigma_sym(samples), cfg);
}

std::vector<IntervalResult> intervals_for_split(SymmetricRegressor& model, const Dataset& ds,
                                                Split split, const McConfig& cfg) {
    cfg.validate();
    const auto idx = ds.indices_of(split);
    std::vector<IntervalResult> out(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        const PairedSample& s = ds.samples[idx[i]];
        McConfig per_case = cfg;
        per_case.seed = derive_stream(cfg.seed, i);
        out[i] = predict_with_uncertainty(model, s.x_r, s.x_l, per_case);
    }
    return out;
}

GammaCalibration calibrate_gamma_full(SymmetricRegressor& model, const Dataset& ds, Split split,
                                      const std::vector<double>& grid, const McConfig& base,
                                      const CurveConfig& curve_cfg) {
    if (grid.empty()) throw ConfigError("calibrate_gamma: empty grid");
    for (double g : grid) {
        if (g < 0.0 || g > 1.0) throw ConfigError("calibrate_gamma: grid values must lie in [0,1]");
    }
    const auto idx = ds.indices_of(split);
    if (idx.empty()) throw ConfigError("calibrate_gamma: empty split");

    struct CachedCase {
        double y_r, y_l;
        McStats stats;
        double sym;
    };
    std::vector<CachedCase> cases(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        const PairedSample& s = ds.samples[idx[i]];
        const McSamples samples =
            mc_sample(model, s.x_r, s.x_l, base.n, derive_stream(base.seed, i));
        cases[i] = {s.y_r, s.y_l, mc_stats(samples), sigma_sym(samples)};
    }

    std::vector<double> tr(cases.size()), tl(cases.size()), cr(cases.size()), cl(cases.size());
    for (std::size_t i = 0; i < cases.size(); ++i) {
        tr[i] = cases[i].y_r;
        tl[i] = cases[i].y_l;
        cr[i] = cases[i].stats.mean_r;
        cl[i] = cases[i].stats.mean_l;
    }

    // visit pairs by ascending total weight so ties land on the sharpest
    std::vector<std::pair<double, double>> pairs;
    pairs.reserve(grid.size() * grid.size());
    for (double gr : grid) {
        for (double gl : grid) pairs.emplace_back(gr, gl);
    }
    std::stable_sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
        const double sa = a.first + a.second, sb = b.first + b.second;
        if (sa != sb) return sa < sb;
        if (a.first != b.first) return a.first < b.first;
        return a.second < b.second;
    });

    std::vector<double> wr(cases.size()), wl(cases.size());
    GammaCalibration result;
    result.best_auc = -1.0;
    for (const auto& [gr, gl] : pairs) {
        const double egr = base.crossed_pairing ? gl : gr;
        const double egl = base.crossed_pairing ? gr : gl;
        for (std::size_t i = 0; i < cases.size(); ++i) {
            wr[i] = cases[i].stats.sd_r + egr * cases[i].sym;
            wl[i] = cases[i].stats.sd_l + egl * cases[i].sym;
        }
        const double auc_r = sharpness_cp_curve(tr, cr, wr, curve_cfg).auc;
        const double auc_l = sharpness_cp_curve(tl, cl, wl, curve_cfg).auc;
        const double score = (auc_r + auc_l) / 2.0;
        result.rows.push_back({gr, gl, score});
        if (score > result.best_auc) {
            result.best_auc = score;
            result.gamma_r = gr;
            result.gamma_l = gl;
        }
    }
    return result;
}

std::pair<double, double> calibrate_gamma(SymmetricRegressor& model, const Dataset& ds, Split split,
                                          const std::vector<double>& grid, const McConfig& base,
                                          const CurveConfig& curve_cfg) {
    const GammaCalibration cal = calibrate_gamma_full(model, ds, split, grid, base, curve_cfg);
    return {cal.gamma_r, cal.gamma_l};
}

}  // namespace symreg
