#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "symreg/checkpoint.hpp"
#include "symreg/data.hpp"
#include "symreg/errors.hpp"
#include "symreg/evaluate.hpp"
#include "symreg/mc.hpp"
#include "symreg/metrics.hpp"
#include "symreg/report_io.hpp"
#include "symreg/rng.hpp"
#include "symreg/symmetric.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace symreg;

namespace {

// ---------------------------------------------------------------- helpers

void write_text(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw FormatError("cannot open '" + path + "' for writing");
    os << content;
    if (!os) throw FormatError("write failed for '" + path + "'");
}

json load_json_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream is(path);
    if (!is) throw FormatError("cannot open config '" + path + "'");
    try {
        return json::parse(is);
    } catch (const json::exception& e) {
        throw FormatError("config '" + path + "': invalid JSON: " + e.what());
    }
}

// CLI flag > JSON config > built-in default
template <typename T>
void resolve(T& var, const CLI::App* sub, const char* flag, const json& cfg, const char* key) {
    if (sub->count(flag) > 0) return;
    if (cfg.contains(key)) {
        try {
            var = cfg.at(key).get<T>();
        } catch (const json::exception& e) {
            throw ConfigError(std::string("config key '") + key + "': " + e.what());
        }
    }
}

std::array<int, 3> parse_dims(const std::string& text) {
    std::array<int, 3> dims{};
    char sep1 = 0, sep2 = 0;
    std::istringstream is(text);
    if (!(is >> dims[0] >> sep1 >> dims[1] >> sep2 >> dims[2]) || sep1 != 'x' || sep2 != 'x')
        throw ConfigError("expected dims as WxHxD, got '" + text + "'");
    return dims;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::istringstream is(text);
    std::string item;
    while (std::getline(is, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("expected a comma-separated number list, got '" + text + "'");
        }
    }
    if (out.empty()) throw ConfigError("empty list '" + text + "'");
    return out;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    for (double v : parse_double_list(text)) out.push_back(static_cast<int>(v));
    return out;
}

// "lo:hi:n" -> n log-spaced values from lo to hi inclusive
std::vector<double> parse_log_grid(const std::string& text) {
    double lo = 0, hi = 0;
    int n = 0;
    char s1 = 0, s2 = 0;
    std::istringstream is(text);
    if (!(is >> lo >> s1 >> hi >> s2 >> n) || s1 != ':' || s2 != ':' || n < 1 || lo <= 0 || hi <= lo)
        throw ConfigError("expected log grid as lo:hi:n with 0 < lo < hi, got '" + text + "'");
    std::vector<double> out;
    if (n == 1) return {lo};
    for (int i = 0; i < n; ++i)
        out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
    return out;
}

std::string with_infix(const std::string& path, const std::string& infix) {
    const auto dot = path.rfind('.');
    if (dot == std::string::npos || dot == 0) return path + "." + infix;
    return path.substr(0, dot) + "." + infix + path.substr(dot);
}

std::string dims_str(const std::array<int, 3>& d) {
    return std::to_string(d[0]) + "x" + std::to_string(d[1]) + "x" + std::to_string(d[2]);
}

// ---------------------------------------------------------------- gen

struct GenOpts {
    std::string out, config;
    int n = 860;
    std::string dims = "16x16x8";
    double y_min = 0.44, y_max = 6.84;
    double sigma_pair = 0.507;
    double blob_radius = 2.2, blob_contrast = 2.0, blob_jitter = 1.0, noise_sd = 1.4;
    std::uint64_t seed = 42;
    std::string split = "0.70,0.15,0.15";
    std::string split_counts;  // optional "600,130,130"
};

int cmd_gen(const GenOpts& o, const CLI::App* sub) {
    const json cfg = load_json_config(o.config);
    GenOpts r = o;
    resolve(r.n, sub, "--n", cfg, "n");
    resolve(r.dims, sub, "--dims", cfg, "dims");
    resolve(r.y_min, sub, "--y-min", cfg, "y_min");
    resolve(r.y_max, sub, "--y-max", cfg, "y_max");
    resolve(r.sigma_pair, sub, "--sigma-pair", cfg, "sigma_pair");
    resolve(r.blob_radius, sub, "--blob-radius", cfg, "blob_radius");
    resolve(r.blob_contrast, sub, "--blob-contrast", cfg, "blob_contrast");
    resolve(r.blob_jitter, sub, "--blob-jitter", cfg, "blob_jitter_sd");
    resolve(r.noise_sd, sub, "--noise-sd", cfg, "noise_sd");
    resolve(r.seed, sub, "--seed", cfg, "seed");
    resolve(r.split, sub, "--split", cfg, "split");
    resolve(r.split_counts, sub, "--split-counts", cfg, "split_counts");

    GenConfig g;
    g.n_samples = r.n;
    g.dims = parse_dims(r.dims);
    g.y_min = r.y_min;
    g.y_max = r.y_max;
    g.sigma_pair = r.sigma_pair;
    g.blob_radius = r.blob_radius;
    g.blob_contrast = r.blob_contrast;
    g.blob_jitter_sd = r.blob_jitter;
    g.noise_sd = r.noise_sd;
    g.seed = r.seed;

    Dataset ds = gen_dataset(g);
    if (!r.split_counts.empty()) {
        const auto counts = parse_int_list(r.split_counts);
        if (counts.size() != 3) throw ConfigError("--split-counts needs 3 entries");
        assign_split_counts(ds, {counts[0], counts[1], counts[2]}, r.seed);
    } else {
        const auto fr = parse_double_list(r.split);
        if (fr.size() != 3) throw ConfigError("--split needs 3 fractions");
        assign_split(ds, {fr[0], fr[1], fr[2]}, r.seed);
    }
    save_dataset(ds, r.out);

    std::vector<double> yr(ds.size()), yl(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        yr[i] = ds.samples[i].y_r;
        yl[i] = ds.samples[i].y_l;
    }
    std::cout << "generated " << ds.size() << " pairs (" << dims_str(g.dims) << ") -> " << r.out
              << "\n  target correlation " << format_double(pearson_r(yr, yl)) << ", range ["
              << format_double(*std::min_element(yr.begin(), yr.end())) << ", "
              << format_double(*std::max_element(yr.begin(), yr.end())) << "]\n  splits "
              << ds.indices_of(Split::train).size() << "/" << ds.indices_of(Split::val).size()
              << "/" << ds.indices_of(Split::test).size() << " train/val/test\n";

    json prov{{"subcommand", "gen"},
              {"out", r.out},
              {"n", r.n},
              {"dims", r.dims},
              {"y_min", r.y_min},
              {"y_max", r.y_max},
              {"sigma_pair", r.sigma_pair},
              {"blob_radius", r.blob_radius},
              {"blob_contrast", r.blob_contrast},
              {"blob_jitter_sd", r.blob_jitter},
              {"noise_sd", r.noise_sd},
              {"seed", r.seed},
              {"split", r.split},
              {"split_counts", r.split_counts}};
    write_text(r.out + ".provenance.json", prov.dump(2) + "\n");
    return 0;
}

// ---------------------------------------------------------------- train

struct TrainOpts {
    std::string data, out, config, report;
    double alpha = 0.04, beta = 1.0;
    double sbr_max = 0.0;  // 0: use the dataset y_max
    double lr = 1e-4;
    int batch = 8, epochs = 30;
    std::uint64_t seed = 1;
    std::string plan = "8,16,32,64";
    int convs_per_stage = 2;
    double dropout = 0.5;
    bool unpaired = false;
};

BackboneConfig backbone_from(const TrainOpts& r, const Dataset& ds) {
    BackboneConfig bb;
    bb.patch_dims = ds.cfg.dims;
    bb.channel_plan = parse_int_list(r.plan);
    bb.convs_per_stage = r.convs_per_stage;
    bb.dropout_rate = r.dropout;
    return bb;
}

TrainConfig train_config_from(const TrainOpts& r, const Dataset& ds) {
    TrainConfig tc;
    tc.loss.alpha = r.alpha;
    tc.loss.beta = r.beta;
    tc.loss.sbr_max = r.sbr_max > 0.0 ? r.sbr_max : ds.cfg.y_max;
    tc.adam.lr = r.lr;
    tc.batch = r.batch;
    tc.epochs = r.epochs;
    tc.seed = r.seed;
    return tc;
}

TrainOpts resolve_train(const TrainOpts& o, const CLI::App* sub) {
    const json cfg = load_json_config(o.config);
    TrainOpts r = o;
    resolve(r.alpha, sub, "--alpha", cfg, "alpha");
    resolve(r.beta, sub, "--beta", cfg, "beta");
    resolve(r.sbr_max, sub, "--sbr-max", cfg, "sbr_max");
    resolve(r.lr, sub, "--lr", cfg, "lr");
    resolve(r.batch, sub, "--batch", cfg, "batch");
    resolve(r.epochs, sub, "--epochs", cfg, "epochs");
    resolve(r.seed, sub, "--seed", cfg, "seed");
    resolve(r.plan, sub, "--plan", cfg, "plan");
    resolve(r.convs_per_stage, sub, "--convs-per-stage", cfg, "convs_per_stage");
    resolve(r.dropout, sub, "--dropout", cfg, "dropout");
    return r;
}

json train_provenance(const TrainOpts& r, const TrainConfig& tc) {
    return json{{"subcommand", "train"}, {"data", r.data},
                {"out", r.out},          {"alpha", r.alpha},
                {"beta", r.beta},        {"sbr_max", tc.loss.sbr_max},
                {"lr", r.lr},            {"batch", r.batch},
                {"epochs", r.epochs},    {"seed", r.seed},
                {"plan", r.plan},        {"convs_per_stage", r.convs_per_stage},
                {"dropout", r.dropout},  {"unpaired", r.unpaired}};
}

int cmd_train(const TrainOpts& o, const CLI::App* sub) {
    const TrainOpts r = resolve_train(o, sub);
    const Dataset ds = load_dataset(r.data);
    const BackboneConfig bb = backbone_from(r, ds);
    const TrainConfig tc = train_config_from(r, ds);

    if (!r.unpaired) {
        SymmetricRegressor model(Backbone::build(bb, tc.seed));
        const TrainReport rep = train(model, ds, tc);
        save_checkpoint(model.backbone(), r.out);
        write_text(r.report.empty() ? r.out + ".train.csv" : r.report, train_report_csv(rep));
        std::cout << "trained " << r.out << ": best epoch " << rep.best_epoch << ", val MAE "
                  << format_double(rep.best_val_mae) << "\n";
    } else {
        Backbone right = Backbone::build(bb, derive_stream(tc.seed, 0));
        Backbone left = Backbone::build(bb, derive_stream(tc.seed, 1));
        const TrainReport rr = train_single(right, ds, Side::right, tc);
        const TrainReport rl = train_single(left, ds, Side::left, tc);
        const std::string right_out = with_infix(r.out, "right");
        const std::string left_out = with_infix(r.out, "left");
        save_checkpoint(right, right_out);
        save_checkpoint(left, left_out);
        const std::string base = r.report.empty() ? r.out + ".train.csv" : r.report;
        write_text(r.report.empty() ? right_out + ".train.csv" : with_infix(base, "right"),
                   train_report_csv(rr));
        write_text(r.report.empty() ? left_out + ".train.csv" : with_infix(base, "left"),
                   train_report_csv(rl));
        std::cout << "trained unpaired baselines: right val MAE " << format_double(rr.best_val_mae)
                  << ", left val MAE " << format_double(rl.best_val_mae) << "\n";
    }
    write_text(r.out + ".provenance.json", train_provenance(r, tc).dump(2) + "\n");
    return 0;
}

// ---------------------------------------------------------------- eval

struct EvalOpts {
    std::string data, model, model_right, model_left, out_dir, config;
    std::string label = "symmetric";
    double thresh_r = 3.401, thresh_l = 3.345;
    int n_mc = 30;
    std::uint64_t seed = 0;
    double gamma_r = -1.0, gamma_l = -1.0;  // <0: calibrate on the validation split
    std::string gamma_grid = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0";
    bool crossed = false;
};

int cmd_eval(const EvalOpts& o, const CLI::App* sub) {
    const json cfg = load_json_config(o.config);
    EvalOpts r = o;
    resolve(r.thresh_r, sub, "--thresh-r", cfg, "thresh_r");
    resolve(r.thresh_l, sub, "--thresh-l", cfg, "thresh_l");
    resolve(r.n_mc, sub, "--n-mc", cfg, "n_mc");
    resolve(r.seed, sub, "--seed", cfg, "seed");
    resolve(r.gamma_r, sub, "--gamma-r", cfg, "gamma_r");
    resolve(r.gamma_l, sub, "--gamma-l", cfg, "gamma_l");
    resolve(r.gamma_grid, sub, "--gamma-grid", cfg, "gamma_grid");

    const Dataset ds = load_dataset(r.data);
    fs::create_directories(r.out_dir);
    const EvalThresholds thresholds{r.thresh_r, r.thresh_l};
    CurveConfig curve;
    curve.span = ds.y_span();

    McConfig mc;
    mc.n = r.n_mc;
    mc.seed = r.seed;
    mc.crossed_pairing = r.crossed;

    json prov{{"subcommand", "eval"}, {"data", r.data},        {"out_dir", r.out_dir},
              {"label", r.label},     {"thresh_r", r.thresh_r}, {"thresh_l", r.thresh_l},
              {"n_mc", r.n_mc},       {"seed", r.seed}};

    if (!r.model_right.empty() || !r.model_left.empty()) {
        if (r.model_right.empty() || r.model_left.empty())
            throw ConfigError("unpaired eval needs both --model-right and --model-left");
        Backbone right = load_checkpoint(r.model_right);
        Backbone left = load_checkpoint(r.model_left);
        const EvalResult res =
            evaluate_all_unpaired(right, left, ds, Split::test, mc, thresholds, curve);
        write_text(r.out_dir + "/metrics.json", metrics_report_json(res.report));
        write_text(r.out_dir + "/table3.csv", table3_csv({{r.label, res.report}}));
        write_text(r.out_dir + "/table5.csv", table5_csv({{"plain-mc", res.report}}));
        prov["model_right"] = r.model_right;
        prov["model_left"] = r.model_left;
        write_text(r.out_dir + "/provenance.json", prov.dump(2) + "\n");
        std::cout << "eval (unpaired) avg MAE " << format_double(res.report.avg.mae) << ", avg R "
                  << format_double(res.report.avg.pearson) << "\n";
        return 0;
    }

    if (r.model.empty()) throw ConfigError("eval needs --model (or --model-right/--model-left)");
    SymmetricRegressor model(load_checkpoint(r.model));

    double gr = r.gamma_r, gl = r.gamma_l;
    if (gr < 0.0 || gl < 0.0) {
        const auto grid = parse_double_list(r.gamma_grid);
        const auto best = calibrate_gamma(model, ds, Split::val, grid, mc, curve);
        gr = best.first;
        gl = best.second;
        std::cout << "calibrated gamma_r " << format_double(gr) << ", gamma_l "
                  << format_double(gl) << " on the validation split\n";
    }

    McConfig mc_plain = mc;  // gamma 0: plain MC row
    McConfig mc_sym = mc;
    mc_sym.gamma_r = gr;
    mc_sym.gamma_l = gl;

    const EvalResult plain = evaluate_all(model, ds, Split::test, mc_plain, thresholds, curve);
    const EvalResult sym = evaluate_all(model, ds, Split::test, mc_sym, thresholds, curve);

    write_text(r.out_dir + "/metrics.json", metrics_report_json(sym.report));
    write_text(r.out_dir + "/table3.csv", table3_csv({{r.label, sym.report}}));
    write_text(r.out_dir + "/table5.csv",
               table5_csv({{"plain-mc", plain.report}, {"symmetric-mc", sym.report}}));
    prov["model"] = r.model;
    prov["gamma_r"] = gr;
    prov["gamma_l"] = gl;
    prov["gamma_grid"] = r.gamma_grid;
    write_text(r.out_dir + "/provenance.json", prov.dump(2) + "\n");
    std::cout << "eval avg MAE " << format_double(sym.report.avg.mae) << ", avg R "
              << format_double(sym.report.avg.pearson) << ", symmetric-MC AUC "
              << format_double(sym.report.auc_avg) << "\n";
    return 0;
}

// ---------------------------------------------------------------- sweep

struct SweepOpts {
    std::string data, out, config, param, grid_text, log_grid_text, model;
    double alpha = 0.04, beta = 1.0, lr = 1e-4;
    int batch = 8, epochs = 30, n_mc = 30;
    std::uint64_t seed = 1;
    std::string plan = "8,16,32,64";
    int convs_per_stage = 2;
    double dropout = 0.5;
};

int cmd_sweep(const SweepOpts& o, const CLI::App* sub) {
    const json cfg = load_json_config(o.config);
    SweepOpts r = o;
    resolve(r.alpha, sub, "--alpha", cfg, "alpha");
    resolve(r.beta, sub, "--beta", cfg, "beta");
    resolve(r.lr, sub, "--lr", cfg, "lr");
    resolve(r.batch, sub, "--batch", cfg, "batch");
    resolve(r.epochs, sub, "--epochs", cfg, "epochs");
    resolve(r.seed, sub, "--seed", cfg, "seed");
    resolve(r.plan, sub, "--plan", cfg, "plan");
    resolve(r.convs_per_stage, sub, "--convs-per-stage", cfg, "convs_per_stage");
    resolve(r.dropout, sub, "--dropout", cfg, "dropout");
    resolve(r.n_mc, sub, "--n-mc", cfg, "n_mc");

    if (r.grid_text.empty() && r.log_grid_text.empty())
        throw ConfigError("sweep needs --grid or --log-grid");
    const std::vector<double> grid =
        r.grid_text.empty() ? parse_log_grid(r.log_grid_text) : parse_double_list(r.grid_text);

    const Dataset ds = load_dataset(r.data);

    json prov{{"subcommand", "sweep"}, {"data", r.data},   {"out", r.out},
              {"param", r.param},      {"grid", grid},     {"alpha", r.alpha},
              {"beta", r.beta},        {"lr", r.lr},       {"batch", r.batch},
              {"epochs", r.epochs},    {"seed", r.seed},   {"plan", r.plan},
              {"convs_per_stage", r.convs_per_stage},      {"dropout", r.dropout},
              {"n_mc", r.n_mc}};

    if (r.param == "gamma") {
        if (r.model.empty()) throw ConfigError("sweep --param gamma needs --model");
        for (double g : grid) {
            if (g < 0.0 || g > 1.0) throw ConfigError("gamma grid values must lie in [0,1]");
        }
        SymmetricRegressor model(load_checkpoint(r.model));
        McConfig mc;
        mc.n = r.n_mc;
        mc.seed = r.seed;
        CurveConfig curve;
        curve.span = ds.y_span();
        const GammaCalibration cal =
            calibrate_gamma_full(model, ds, Split::val, grid, mc, curve);
        std::ostringstream os;
        os << "gamma_r,gamma_l,val_auc\n";
        for (const auto& row : cal.rows)
            os << format_double(row.gamma_r) << ',' << format_double(row.gamma_l) << ','
               << format_double(row.auc) << '\n';
        write_text(r.out, os.str());
        prov["model"] = r.model;
        write_text(r.out + ".provenance.json", prov.dump(2) + "\n");
        std::cout << "gamma sweep: best (gamma_r, gamma_l) = (" << format_double(cal.gamma_r)
                  << ", " << format_double(cal.gamma_l) << "), val AUC "
                  << format_double(cal.best_auc) << "\n";
        return 0;
    }

    SweepParam param;
    if (r.param == "alpha") param = SweepParam::alpha;
    else if (r.param == "beta") param = SweepParam::beta;
    else throw ConfigError("unknown sweep parameter '" + r.param + "' (alpha, beta, or gamma)");

    TrainOpts to;
    to.alpha = r.alpha;
    to.beta = r.beta;
    to.lr = r.lr;
    to.batch = r.batch;
    to.epochs = r.epochs;
    to.seed = r.seed;
    to.plan = r.plan;
    to.convs_per_stage = r.convs_per_stage;
    to.dropout = r.dropout;
    const BackboneConfig bb = backbone_from(to, ds);
    const TrainConfig tc = train_config_from(to, ds);

    const SweepResult res = sweep(param, grid, ds, bb, tc);
    write_text(r.out, sweep_csv(r.param, res));
    write_text(r.out + ".provenance.json", prov.dump(2) + "\n");
    std::cout << "sweep over " << r.param << ": best value " << format_double(res.best_value)
              << " (val MAE " << format_double(res.best_val_mae) << ")\n";
    return 0;
}

// ---------------------------------------------------------------- uq

struct UqOpts {
    std::string data, model, out_dir, config;
    int n_mc = 30;
    std::uint64_t seed = 0;
    double gamma_r = 0.0, gamma_l = 0.0;
    bool crossed = false;
};

int cmd_uq(const UqOpts& o, const CLI::App* sub) {
    const json cfg = load_json_config(o.config);
    UqOpts r = o;
    resolve(r.n_mc, sub, "--n-mc", cfg, "n_mc");
    resolve(r.seed, sub, "--seed", cfg, "seed");
    resolve(r.gamma_r, sub, "--gamma-r", cfg, "gamma_r");
    resolve(r.gamma_l, sub, "--gamma-l", cfg, "gamma_l");

    const Dataset ds = load_dataset(r.data);
    SymmetricRegressor model(load_checkpoint(r.model));
    fs::create_directories(r.out_dir);

    McConfig mc;
    mc.n = r.n_mc;
    mc.seed = r.seed;
    mc.gamma_r = r.gamma_r;
    mc.gamma_l = r.gamma_l;
    mc.crossed_pairing = r.crossed;

    const auto idx = ds.indices_of(Split::test);
    if (idx.empty()) throw ConfigError("uq: test split is empty");
    const auto intervals = intervals_for_split(model, ds, Split::test, mc);
    write_text(r.out_dir + "/intervals.csv", intervals_csv(ds, idx, intervals));

    CurveConfig curve;
    curve.span = ds.y_span();
    std::vector<double> tr(idx.size()), tl(idx.size()), cr(idx.size()), cl(idx.size()),
        wr(idx.size()), wl(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        tr[i] = ds.samples[idx[i]].y_r;
        tl[i] = ds.samples[idx[i]].y_l;
        cr[i] = intervals[i].y_r_hat;
        cl[i] = intervals[i].y_l_hat;
        wr[i] = intervals[i].sigma_r_sym;
        wl[i] = intervals[i].sigma_l_sym;
    }
    const CurveResult curve_r = sharpness_cp_curve(tr, cr, wr, curve);
    const CurveResult curve_l = sharpness_cp_curve(tl, cl, wl, curve);
    write_text(r.out_dir + "/curve_right.csv", curve_csv(curve_r));
    write_text(r.out_dir + "/curve_left.csv", curve_csv(curve_l));

    auto opt_json = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    json summary{{"auc_right", curve_r.auc},
                 {"auc_left", curve_l.auc},
                 {"auc_avg", (curve_r.auc + curve_l.auc) / 2.0},
                 {"sharpness95_right", opt_json(curve_r.sharpness_at_95cp)},
                 {"sharpness95_left", opt_json(curve_l.sharpness_at_95cp)},
                 {"k95_right", opt_json(curve_r.k_at_95cp)},
                 {"k95_left", opt_json(curve_l.k_at_95cp)},
                 {"truncated_right", curve_r.truncated},
                 {"truncated_left", curve_l.truncated},
                 {"n_cases", idx.size()}};
    write_text(r.out_dir + "/uq_summary.json", summary.dump(2) + "\n");

    json prov{{"subcommand", "uq"},   {"data", r.data},       {"model", r.model},
              {"out_dir", r.out_dir}, {"n_mc", r.n_mc},       {"seed", r.seed},
              {"gamma_r", r.gamma_r}, {"gamma_l", r.gamma_l}, {"crossed", r.crossed}};
    write_text(r.out_dir + "/provenance.json", prov.dump(2) + "\n");
    std::cout << "uq over " << idx.size() << " test cases: avg AUC "
              << format_double((curve_r.auc + curve_l.auc) / 2.0) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"symreg: symmetric paired-input 3D patch regressor "
                 "(SYMREG_THREADS caps internal parallelism)"};
    app.require_subcommand(1);

    GenOpts gen;
    CLI::App* sgen = app.add_subcommand("gen", "generate a synthetic paired dataset");
    sgen->add_option("--out", gen.out, "output dataset path")->required();
    sgen->add_option("--config", gen.config, "JSON config file");
    sgen->add_option("--n", gen.n, "number of sample pairs");
    sgen->add_option("--dims", gen.dims, "patch dims WxHxD");
    sgen->add_option("--y-min", gen.y_min, "target range lower bound");
    sgen->add_option("--y-max", gen.y_max, "target range upper bound");
    sgen->add_option("--sigma-pair", gen.sigma_pair, "right/left target noise SD");
    sgen->add_option("--blob-radius", gen.blob_radius, "blob radius in voxels");
    sgen->add_option("--blob-contrast", gen.blob_contrast, "blob peak contrast at y_max");
    sgen->add_option("--blob-jitter", gen.blob_jitter, "blob center jitter SD in voxels");
    sgen->add_option("--noise-sd", gen.noise_sd, "background noise SD");
    sgen->add_option("--seed", gen.seed, "generator seed");
    sgen->add_option("--split", gen.split, "train,val,test fractions");
    sgen->add_option("--split-counts", gen.split_counts, "exact train,val,test counts");

    TrainOpts tr;
    CLI::App* strain = app.add_subcommand("train", "train the paired regressor");
    strain->add_option("--data", tr.data, "dataset path")->required();
    strain->add_option("--out", tr.out, "checkpoint output path")->required();
    strain->add_option("--config", tr.config, "JSON config file");
    strain->add_option("--report", tr.report, "per-epoch CSV path");
    strain->add_option("--alpha", tr.alpha, "normalized clip margin");
    strain->add_option("--beta", tr.beta, "symmetric-loss weight");
    strain->add_option("--sbr-max", tr.sbr_max, "margin denormalization scale (0: dataset y_max)");
    strain->add_option("--lr", tr.lr, "learning rate");
    strain->add_option("--batch", tr.batch, "mini-batch size");
    strain->add_option("--epochs", tr.epochs, "training epochs");
    strain->add_option("--seed", tr.seed, "training seed");
    strain->add_option("--plan", tr.plan, "channel plan, e.g. 8,16,32,64");
    strain->add_option("--convs-per-stage", tr.convs_per_stage, "convolutions per stage");
    strain->add_option("--dropout", tr.dropout, "dropout rate");
    strain->add_flag("--unpaired", tr.unpaired, "train single-sided baselines instead");

    EvalOpts ev;
    CLI::App* seval = app.add_subcommand("eval", "evaluate on the test split");
    seval->add_option("--data", ev.data, "dataset path")->required();
    seval->add_option("--out-dir", ev.out_dir, "output directory")->required();
    seval->add_option("--model", ev.model, "paired model checkpoint");
    seval->add_option("--model-right", ev.model_right, "unpaired right checkpoint");
    seval->add_option("--model-left", ev.model_left, "unpaired left checkpoint");
    seval->add_option("--config", ev.config, "JSON config file");
    seval->add_option("--label", ev.label, "method label for table rows");
    seval->add_option("--thresh-r", ev.thresh_r, "right binary threshold");
    seval->add_option("--thresh-l", ev.thresh_l, "left binary threshold");
    seval->add_option("--n-mc", ev.n_mc, "MC dropout passes");
    seval->add_option("--seed", ev.seed, "MC seed");
    seval->add_option("--gamma-r", ev.gamma_r, "right hint weight (<0: calibrate)");
    seval->add_option("--gamma-l", ev.gamma_l, "left hint weight (<0: calibrate)");
    seval->add_option("--gamma-grid", ev.gamma_grid, "calibration grid");
    seval->add_flag("--crossed-gamma", ev.crossed, "use the crossed gamma-to-side pairing");

    SweepOpts sw;
    CLI::App* ssweep = app.add_subcommand("sweep", "hyperparameter sweep");
    ssweep->add_option("--data", sw.data, "dataset path")->required();
    ssweep->add_option("--out", sw.out, "sweep CSV path")->required();
    ssweep->add_option("--param", sw.param, "alpha, beta, or gamma")->required();
    ssweep->add_option("--grid", sw.grid_text, "comma-separated grid");
    ssweep->add_option("--log-grid", sw.log_grid_text, "log grid lo:hi:n");
    ssweep->add_option("--config", sw.config, "JSON config file");
    ssweep->add_option("--model", sw.model, "model checkpoint (gamma sweep)");
    ssweep->add_option("--alpha", sw.alpha, "fixed clip margin");
    ssweep->add_option("--beta", sw.beta, "fixed symmetric-loss weight");
    ssweep->add_option("--lr", sw.lr, "learning rate");
    ssweep->add_option("--batch", sw.batch, "mini-batch size");
    ssweep->add_option("--epochs", sw.epochs, "training epochs");
    ssweep->add_option("--seed", sw.seed, "fixed seed for every grid run");
    ssweep->add_option("--plan", sw.plan, "channel plan");
    ssweep->add_option("--convs-per-stage", sw.convs_per_stage, "convolutions per stage");
    ssweep->add_option("--dropout", sw.dropout, "dropout rate");
    ssweep->add_option("--n-mc", sw.n_mc, "MC passes (gamma sweep)");

    UqOpts uq;
    CLI::App* suq = app.add_subcommand("uq", "per-case prediction intervals and curves");
    suq->add_option("--data", uq.data, "dataset path")->required();
    suq->add_option("--model", uq.model, "model checkpoint")->required();
    suq->add_option("--out-dir", uq.out_dir, "output directory")->required();
    suq->add_option("--config", uq.config, "JSON config file");
    suq->add_option("--n-mc", uq.n_mc, "MC dropout passes");
    suq->add_option("--seed", uq.seed, "MC seed");
    suq->add_option("--gamma-r", uq.gamma_r, "right hint weight");
    suq->add_option("--gamma-l", uq.gamma_l, "left hint weight");
    suq->add_flag("--crossed-gamma", uq.crossed, "use the crossed gamma-to-side pairing");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (sgen->parsed()) return cmd_gen(gen, sgen);
        if (strain->parsed()) return cmd_train(tr, strain);
        if (seval->parsed()) return cmd_eval(ev, seval);
        if (ssweep->parsed()) return cmd_sweep(sw, ssweep);
        if (suq->parsed()) return cmd_uq(uq, suq);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DimensionError& e) {
        std::cerr << "dimension error: " << e.what() << "\n";
        return 2;
    } catch (const TrainingError& e) {
        std::cerr << "training error: " << e.what() << "\n";
        return 3;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const FormatError& e) {
        std::cerr << "format error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
