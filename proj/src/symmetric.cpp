#include "symreg/symmetric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "symreg/errors.hpp"
#include "symreg/rng.hpp"
#include "symreg/threads.hpp"

namespace symreg {

void SymmetricLossConfig::validate() const {
    if (alpha < 0.0) throw ConfigError("loss: alpha must be >= 0");
    if (beta < 0.0) throw ConfigError("loss: beta must be >= 0");
    if (!(sbr_max > 0.0)) throw ConfigError("loss: sbr_max must be > 0");
}

double clip_value(double a, double alpha_sq) { return a > alpha_sq ? a : 0.0; }

double loss_reg(std::span<const PredPair> preds, std::span<const PredPair> targets) {
    if (preds.empty()) throw ConfigError("loss_reg: empty batch");
    if (preds.size() != targets.size())
        throw DimensionError("loss_reg: " + std::to_string(preds.size()) + " predictions vs " +
                             std::to_string(targets.size()) + " targets");
    double sum = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const double dr = targets[i].r - preds[i].r;
        const double dl = targets[i].l - preds[i].l;
        sum += dr * dr + dl * dl;
    }
    return sum / static_cast<double>(preds.size());
}

double loss_sym(std::span<const PredPair> preds, const SymmetricLossConfig& cfg) {
    cfg.validate();
    if (preds.empty()) return 0.0;
    const double margin_sq = cfg.raw_margin() * cfg.raw_margin();
    double sum = 0.0;
    for (const auto& p : preds) {
        const double d = p.r - p.l;
        sum += clip_value(d * d, margin_sq);
    }
    return sum / static_cast<double>(preds.size());
}

double loss_final(std::span<const PredPair> preds, std::span<const PredPair> targets,
                  const SymmetricLossConfig& cfg) {
    return loss_reg(preds, targets) + cfg.beta * loss_sym(preds, cfg);
}

std::pair<double, double> SymmetricRegressor::forward_pair(const Patch3D& x_r, const Patch3D& x_l,
                                                           Mode mode, std::mt19937_64* rng) {
    double yr, yl;
    try {
        yr = flip_right_ ? f_.predict(lateral_flip(x_r), mode, rng) : f_.predict(x_r, mode, rng);
    } catch (const DimensionError& e) {
        throw DimensionError(std::string("forward_pair, right side: ") + e.what());
    }
    try {
        yl = f_.predict(x_l, mode, rng);
    } catch (const DimensionError& e) {
        throw DimensionError(std::string("forward_pair, left side: ") + e.what());
    }
    return {yr, yl};
}

PairLossGraph::PairLossGraph(const SymmetricRegressor& model, const SymmetricLossConfig& loss)
    : graph(const_cast<ParameterStore*>(&model.backbone().params())) {
    loss.validate();
    const auto& dims = model.backbone().config().patch_dims;
    in_xr = graph.add_input({dims[0], dims[1], dims[2], 1}, "x_r");
    in_xl = graph.add_input({dims[0], dims[1], dims[2], 1}, "x_l");
    in_yr = graph.add_input({1}, "y_r");
    in_yl = graph.add_input({1}, "y_l");
    out_r = model.backbone().append_to(graph, in_xr);
    out_l = model.backbone().append_to(graph, in_xl);

    const int d_r = graph.add_sub(out_r, in_yr);
    const int d_l = graph.add_sub(out_l, in_yl);
    node_reg = graph.add_add(graph.add_square(d_r), graph.add_square(d_l));

    const double margin = loss.raw_margin();
    const int gap = graph.add_sub(out_r, out_l);
    node_sym = graph.add_clip(graph.add_square(gap), margin * margin);
    node_total = graph.add_add(node_reg, graph.add_scale(node_sym, loss.beta));
    graph.set_output(node_total);
}

SingleLossGraph::SingleLossGraph(const Backbone& model)
    : graph(const_cast<ParameterStore*>(&model.params())) {
    const auto& dims = model.config().patch_dims;
    in_x = graph.add_input({dims[0], dims[1], dims[2], 1}, "x");
    in_y = graph.add_input({1}, "y");
    out_pred = model.append_to(graph, in_x);
    node_total = graph.add_square(graph.add_sub(out_pred, in_y));
    graph.set_output(node_total);
}

namespace {

struct SampleLosses {
    double reg = 0, sym = 0, total = 0;
};

void validate_train_config(const TrainConfig& cfg) {
    cfg.loss.validate();
    if (cfg.batch < 1) throw ConfigError("train: batch must be >= 1");
    if (cfg.epochs < 1) throw ConfigError("train: epochs must be >= 1");
}

std::vector<std::size_t> split_or_throw(const Dataset& ds, Split s, const char* what) {
    auto idx = ds.indices_of(s);
    if (idx.empty()) throw ConfigError(std::string("train: empty ") + what + " split");
    return idx;
}

double pooled_mae(std::span<const PredPair> preds, std::span<const PredPair> targets) {
    double sum = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i)
        sum += std::fabs(targets[i].r - preds[i].r) + std::fabs(targets[i].l - preds[i].l);
    return sum / (2.0 * static_cast<double>(preds.size()));
}

}  // namespace

TrainReport train(SymmetricRegressor& model, const Dataset& ds, const TrainConfig& cfg) {
    validate_train_config(cfg);
    auto train_idx = split_or_throw(ds, Split::train, "train");
    const auto val_idx = split_or_throw(ds, Split::val, "validation");
    const std::size_t n_train = train_idx.size();

    ParameterStore& store = model.backbone().params();
    OptimizerState opt(store, cfg.adam);

    const int n_workers = plan_workers(static_cast<std::size_t>(cfg.batch));
    std::vector<PairLossGraph> workers;
    workers.reserve(static_cast<std::size_t>(n_workers));
    for (int w = 0; w < n_workers; ++w) workers.emplace_back(model, cfg.loss);

    std::vector<GradSink> sinks(static_cast<std::size_t>(cfg.batch), GradSink(store));
    GradSink batch_grad(store);
    std::vector<SampleLosses> losses(static_cast<std::size_t>(cfg.batch));

    auto shuffle_eng = make_engine(cfg.seed, 0x51);

    TrainReport report;
    report.seed = cfg.seed;
    report.best_val_mae = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> best_snapshot;

    std::vector<PredPair> val_preds(val_idx.size()), val_targets(val_idx.size());
    for (std::size_t i = 0; i < val_idx.size(); ++i)
        val_targets[i] = {ds.samples[val_idx[i]].y_r, ds.samples[val_idx[i]].y_l};

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(train_idx.begin(), train_idx.end(), shuffle_eng);
        double sum_reg = 0, sum_sym = 0, sum_total = 0;

        for (std::size_t start = 0; start < n_train; start += static_cast<std::size_t>(cfg.batch)) {
            const std::size_t bsz = std::min(static_cast<std::size_t>(cfg.batch), n_train - start);
            parallel_workers(bsz, [&](int w, std::size_t slot) {
                PairLossGraph& pg = workers[static_cast<std::size_t>(w)];
                const PairedSample& s = ds.samples[train_idx[start + slot]];
                pg.graph.set_input(pg.in_xr,
                                   model.backbone().patch_to_input(
                                       model.flips_right() ? lateral_flip(s.x_r) : s.x_r));
                pg.graph.set_input(pg.in_xl, model.backbone().patch_to_input(s.x_l));
                pg.graph.set_scalar_input(pg.in_yr, s.y_r);
                pg.graph.set_scalar_input(pg.in_yl, s.y_l);
                auto eng = make_engine(cfg.seed, 0xD0,
                                       static_cast<std::uint64_t>(epoch) * n_train + start + slot);
                pg.graph.forward(Mode::train, &eng);
                losses[slot] = {pg.graph.value(pg.node_reg).v[0], pg.graph.value(pg.node_sym).v[0],
                                pg.graph.value(pg.node_total).v[0]};
                sinks[slot].zero();
                pg.graph.backward(1.0 / static_cast<double>(bsz), &sinks[slot]);
            });

            double batch_total = 0;
            for (std::size_t slot = 0; slot < bsz; ++slot) {
                sum_reg += losses[slot].reg;
                sum_sym += losses[slot].sym;
                sum_total += losses[slot].total;
                batch_total += losses[slot].total;
            }
            if (!std::isfinite(batch_total))
                throw TrainingError("train: non-finite loss at epoch " + std::to_string(epoch) +
                                    " batch " + std::to_string(start / static_cast<std::size_t>(cfg.batch)));

            batch_grad.zero();
            for (std::size_t slot = 0; slot < bsz; ++slot) batch_grad.accumulate(sinks[slot]);
            batch_grad.store_into(store);
            adam_step(store, opt);
        }

        for (std::size_t i = 0; i < val_idx.size(); ++i) {
            const PairedSample& s = ds.samples[val_idx[i]];
            const auto [yr, yl] = model.forward_pair(s.x_r, s.x_l, Mode::eval);
            val_preds[i] = {yr, yl};
        }
        EpochRow row;
        row.epoch = epoch;
        row.train_reg = sum_reg / static_cast<double>(n_train);
        row.train_sym = sum_sym / static_cast<double>(n_train);
        row.train_final = sum_total / static_cast<double>(n_train);
        row.val_reg = loss_reg(val_preds, val_targets);
        row.val_sym = loss_sym(val_preds, cfg.loss);
        row.val_final = row.val_reg + cfg.loss.beta * row.val_sym;
        row.val_mae = pooled_mae(val_preds, val_targets);
        report.epochs.push_back(row);

        if (row.val_mae < report.best_val_mae) {
            report.best_val_mae = row.val_mae;
            report.best_epoch = epoch;
            best_snapshot = model.backbone().snapshot_params();
        }
    }

    if (!best_snapshot.empty()) model.backbone().restore_params(best_snapshot);
    return report;
}

TrainReport train_single(Backbone& model, const Dataset& ds, Side side, const TrainConfig& cfg) {
    validate_train_config(cfg);
    auto train_idx = split_or_throw(ds, Split::train, "train");
    const auto val_idx = split_or_throw(ds, Split::val, "validation");
    const std::size_t n_train = train_idx.size();

    auto patch_of = [&](const PairedSample& s) -> const Patch3D& {
        return side == Side::right ? s.x_r : s.x_l;
    };
    auto target_of = [&](const PairedSample& s) { return side == Side::right ? s.y_r : s.y_l; };

    ParameterStore& store = model.params();
    OptimizerState opt(store, cfg.adam);

    const int n_workers = plan_workers(static_cast<std::size_t>(cfg.batch));
    std::vector<SingleLossGraph> workers;
    workers.reserve(static_cast<std::size_t>(n_workers));
    for (int w = 0; w < n_workers; ++w) workers.emplace_back(model);

    std::vector<GradSink> sinks(static_cast<std::size_t>(cfg.batch), GradSink(store));
    GradSink batch_grad(store);
    std::vector<double> totals(static_cast<std::size_t>(cfg.batch));

    auto shuffle_eng = make_engine(cfg.seed, 0x51);

    TrainReport report;
    report.seed = cfg.seed;
    report.best_val_mae = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> best_snapshot;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(train_idx.begin(), train_idx.end(), shuffle_eng);
        double sum_total = 0;

        for (std::size_t start = 0; start < n_train; start += static_cast<std::size_t>(cfg.batch)) {
            const std::size_t bsz = std::min(static_cast<std::size_t>(cfg.batch), n_train - start);
            parallel_workers(bsz, [&](int w, std::size_t slot) {
                SingleLossGraph& sg = workers[static_cast<std::size_t>(w)];
                const PairedSample& s = ds.samples[train_idx[start + slot]];
                sg.graph.set_input(sg.in_x, model.patch_to_input(patch_of(s)));
                sg.graph.set_scalar_input(sg.in_y, target_of(s));
                auto eng = make_engine(cfg.seed, 0xD0,
                                       static_cast<std::uint64_t>(epoch) * n_train + start + slot);
                sg.graph.forward(Mode::train, &eng);
                totals[slot] = sg.graph.output_value();
                sinks[slot].zero();
                sg.graph.backward(1.0 / static_cast<double>(bsz), &sinks[slot]);
            });

            double batch_total = 0;
            for (std::size_t slot = 0; slot < bsz; ++slot) {
                sum_total += totals[slot];
                batch_total += totals[slot];
            }
            if (!std::isfinite(batch_total))
                throw TrainingError("train: non-finite loss at epoch " + std::to_string(epoch) +
                                    " batch " + std::to_string(start / static_cast<std::size_t>(cfg.batch)));

            batch_grad.zero();
            for (std::size_t slot = 0; slot < bsz; ++slot) batch_grad.accumulate(sinks[slot]);
            batch_grad.store_into(store);
            adam_step(store, opt);
        }

        double val_se = 0, val_ae = 0;
        for (std::size_t i : val_idx) {
            const PairedSample& s = ds.samples[i];
            const double pred = model.predict(patch_of(s), Mode::eval);
            const double d = target_of(s) - pred;
            val_se += d * d;
            val_ae += std::fabs(d);
        }
        EpochRow row;
        row.epoch = epoch;
        row.train_reg = sum_total / static_cast<double>(n_train);
        row.train_final = row.train_reg;
        row.val_reg = val_se / static_cast<double>(val_idx.size());
        row.val_final = row.val_reg;
        row.val_mae = val_ae / static_cast<double>(val_idx.size());
        report.epochs.push_back(row);

        if (row.val_mae < report.best_val_mae) {
            report.best_val_mae = row.val_mae;
            report.best_epoch = epoch;
            best_snapshot = model.snapshot_params();
        }
    }

    if (!best_snapshot.empty()) model.restore_params(best_snapshot);
    return report;
}

SweepResult sweep(SweepParam param, const std::vector<double>& grid, const Dataset& ds,
                  const BackboneConfig& backbone_cfg, const TrainConfig& base) {
    if (grid.empty()) throw ConfigError("sweep: empty grid");
    SweepResult result;
    result.best_val_mae = std::numeric_limits<double>::infinity();
    for (double value : grid) {
        TrainConfig cfg = base;
        if (param == SweepParam::alpha) cfg.loss.alpha = value;
        else cfg.loss.beta = value;
        SymmetricRegressor model(Backbone::build(backbone_cfg, base.seed));
        const TrainReport rep = train(model, ds, cfg);
        result.rows.push_back({value, rep.best_val_mae});
        if (rep.best_val_mae < result.best_val_mae) {
            result.best_val_mae = rep.best_val_mae;
            result.best_value = value;
        }
    }
    return result;
}

}  // namespace symreg
