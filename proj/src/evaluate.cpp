#include "symreg/evaluate.hpp"

#include "symreg/errors.hpp"
#include "symreg/rng.hpp"

namespace symreg {

namespace {

MetricsReport report_from(const Dataset& ds, const std::vector<std::size_t>& idx,
                          const std::vector<double>& pred_r, const std::vector<double>& pred_l,
                          const std::vector<IntervalResult>& intervals, EvalThresholds thresholds,
                          const CurveConfig& curve_cfg) {
    std::vector<double> y_r(idx.size()), y_l(idx.size());
    std::vector<double> c_r(idx.size()), c_l(idx.size()), w_r(idx.size()), w_l(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        y_r[i] = ds.samples[idx[i]].y_r;
        y_l[i] = ds.samples[idx[i]].y_l;
        c_r[i] = intervals[i].y_r_hat;
        c_l[i] = intervals[i].y_l_hat;
        w_r[i] = intervals[i].sigma_r_sym;
        w_l[i] = intervals[i].sigma_l_sym;
    }
    return compute_metrics_report(y_r, y_l, pred_r, pred_l, c_r, c_l, w_r, w_l, thresholds,
                                  curve_cfg);
}

}  // namespace

EvalResult evaluate_all(SymmetricRegressor& model, const Dataset& ds, Split split,
                        const McConfig& mc_cfg, EvalThresholds thresholds,
                        const CurveConfig& curve_cfg) {
    mc_cfg.validate();
    EvalResult res;
    res.case_indices = ds.indices_of(split);
    if (res.case_indices.empty())
        throw ConfigError(std::string("evaluate: split '") + split_name(split) + "' is empty");

    res.pred_r.resize(res.case_indices.size());
    res.pred_l.resize(res.case_indices.size());
    for (std::size_t i = 0; i < res.case_indices.size(); ++i) {
        const PairedSample& s = ds.samples[res.case_indices[i]];
        const auto [yr, yl] = model.forward_pair(s.x_r, s.x_l, Mode::eval);
        res.pred_r[i] = yr;
        res.pred_l[i] = yl;
    }
    res.intervals = intervals_for_split(model, ds, split, mc_cfg);
    res.report = report_from(ds, res.case_indices, res.pred_r, res.pred_l, res.intervals,
                             thresholds, curve_cfg);
    return res;
}

EvalResult evaluate_all_unpaired(Backbone& right_model, Backbone& left_model, const Dataset& ds,
                                 Split split, const McConfig& mc_cfg, EvalThresholds thresholds,
                                 const CurveConfig& curve_cfg) {
    mc_cfg.validate();
    EvalResult res;
    res.case_indices = ds.indices_of(split);
    if (res.case_indices.empty())
        throw ConfigError(std::string("evaluate: split '") + split_name(split) + "' is empty");

    const std::size_t n_cases = res.case_indices.size();
    res.pred_r.resize(n_cases);
    res.pred_l.resize(n_cases);
    res.intervals.resize(n_cases);
    for (std::size_t i = 0; i < n_cases; ++i) {
        const PairedSample& s = ds.samples[res.case_indices[i]];
        res.pred_r[i] = right_model.predict(s.x_r, Mode::eval);
        res.pred_l[i] = left_model.predict(s.x_l, Mode::eval);

        const std::uint64_t case_seed = derive_stream(mc_cfg.seed, i);
        std::vector<double> rs(static_cast<std::size_t>(mc_cfg.n));
        std::vector<double> ls(static_cast<std::size_t>(mc_cfg.n));
        for (int t = 0; t < mc_cfg.n; ++t) {
            auto eng = make_engine(case_seed, 0x3C, static_cast<std::uint64_t>(t));
            rs[static_cast<std::size_t>(t)] = right_model.predict(s.x_r, Mode::mc, &eng);
            ls[static_cast<std::size_t>(t)] = left_model.predict(s.x_l, Mode::mc, &eng);
        }
        McSamples samples;
        samples.preds.reserve(rs.size());
        for (std::size_t t = 0; t < rs.size(); ++t) samples.preds.emplace_back(rs[t], ls[t]);
        const McStats st = mc_stats(samples);
        IntervalResult& iv = res.intervals[i];
        iv.y_r_hat = st.mean_r;
        iv.y_l_hat = st.mean_l;
        iv.sigma_r = iv.sigma_r_sym = st.sd_r;
        iv.sigma_l = iv.sigma_l_sym = st.sd_l;
        iv.sigma_sym = 0.0;
    }
    res.report = report_from(ds, res.case_indices, res.pred_r, res.pred_l, res.intervals,
                             thresholds, curve_cfg);
    return res;
}

}  // namespace symreg
