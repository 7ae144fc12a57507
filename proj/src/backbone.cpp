#include "symreg/backbone.hpp"

#include <cmath>

#include "symreg/errors.hpp"
#include "symreg/rng.hpp"

namespace symreg {

namespace {

constexpr int kKernel = 3;
constexpr int kPoolWindow = 2;
constexpr int kPoolStride = 2;

void validate_config(const BackboneConfig& cfg) {
    for (int e : cfg.patch_dims) {
        if (e < 1) throw ConfigError("backbone: patch dims must be positive");
    }
    if (cfg.channel_plan.empty()) throw ConfigError("backbone: channel plan must be non-empty");
    for (int c : cfg.channel_plan) {
        if (c < 1) throw ConfigError("backbone: channel plan widths must be positive");
    }
    if (cfg.convs_per_stage < 1) throw ConfigError("backbone: convs_per_stage must be >= 1");
    if (cfg.dropout_rate < 0.0 || cfg.dropout_rate >= 1.0)
        throw ConfigError("backbone: dropout rate must be in [0,1)");
}

int pooled_extent(int e) {
    if (e < kPoolWindow) return 1;
    return (e - kPoolWindow) / kPoolStride + 1;
}

}  // namespace

std::vector<LayerShape> shape_ledger(const BackboneConfig& cfg) {
    validate_config(cfg);
    std::vector<LayerShape> ledger;
    int w = cfg.patch_dims[0], h = cfg.patch_dims[1], d = cfg.patch_dims[2];
    ledger.push_back({"input", {w, h, d, 1}});
    for (std::size_t s = 0; s < cfg.channel_plan.size(); ++s) {
        const int ch = cfg.channel_plan[s];
        for (int c = 0; c < cfg.convs_per_stage; ++c) {
            ledger.push_back({"conv" + std::to_string(s + 1) + "-" + std::to_string(c + 1),
                              {w, h, d, ch}});
        }
        if (kPoolWindow > w && kPoolWindow > h && kPoolWindow > d)
            throw ConfigError("backbone: pooling at stage " + std::to_string(s + 1) +
                              " would collapse spatial extents " + shape_str({w, h, d}));
        w = pooled_extent(w);
        h = pooled_extent(h);
        d = pooled_extent(d);
        ledger.push_back({"pool" + std::to_string(s + 1), {w, h, d, ch}});
    }
    const int flat = w * h * d * cfg.channel_plan.back();
    ledger.push_back({"flatten", {flat}});
    ledger.push_back({"fc", {1}});
    return ledger;
}

int flatten_width(const BackboneConfig& cfg) {
    const auto ledger = shape_ledger(cfg);
    return ledger[ledger.size() - 2].shape[0];
}

std::size_t param_count(const BackboneConfig& cfg) {
    validate_config(cfg);
    std::size_t n = 0;
    int cin = 1;
    for (int ch : cfg.channel_plan) {
        for (int c = 0; c < cfg.convs_per_stage; ++c) {
            n += static_cast<std::size_t>(kKernel * kKernel * kKernel) *
                 static_cast<std::size_t>(cin) * static_cast<std::size_t>(ch);
            cin = ch;
        }
    }
    n += static_cast<std::size_t>(flatten_width(cfg)) + 1;  // head weights + bias
    return n;
}

void Backbone::register_params(std::uint64_t seed, bool trainable_bias) {
    auto engine = make_engine(seed, 0x1417);
    auto init_tensor = [&](Tensor& t, int fan_in) {
        const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
        std::uniform_real_distribution<double> u(-bound, bound);
        for (auto& x : t.v) x = u(engine);
    };

    params_ = std::make_unique<ParameterStore>();
    conv_weight_ids_.clear();
    int cin = 1;
    if (has_stages_) {
        for (std::size_t s = 0; s < cfg_.channel_plan.size(); ++s) {
            const int ch = cfg_.channel_plan[s];
            std::vector<int> stage_ids;
            for (int c = 0; c < cfg_.convs_per_stage; ++c) {
                Tensor w({kKernel, kKernel, kKernel, cin, ch});
                init_tensor(w, kKernel * kKernel * kKernel * cin);
                stage_ids.push_back(params_->add(
                    "conv" + std::to_string(s + 1) + "-" + std::to_string(c + 1) + ".w",
                    std::move(w)));
                cin = ch;
            }
            conv_weight_ids_.push_back(std::move(stage_ids));
        }
    }
    const int flat = has_stages_ ? flatten_width(cfg_)
                                 : cfg_.patch_dims[0] * cfg_.patch_dims[1] * cfg_.patch_dims[2];
    Tensor fw({flat, 1});
    init_tensor(fw, flat);
    fc_weight_id_ = params_->add("fc.w", std::move(fw));
    fc_bias_id_ = params_->add("fc.b", Tensor({1}), trainable_bias);
}

Backbone Backbone::build(const BackboneConfig& cfg, std::uint64_t seed) {
    validate_config(cfg);
    shape_ledger(cfg);  // rejects collapsing stages
    Backbone b;
    b.cfg_ = cfg;
    b.has_stages_ = true;
    b.standardize_ = true;
    b.register_params(seed, true);
    return b;
}

Backbone Backbone::linear_head(std::array<int, 3> dims, bool trainable_bias) {
    Backbone b;
    b.cfg_.patch_dims = dims;
    b.cfg_.channel_plan.clear();
    b.cfg_.dropout_rate = 0.0;
    b.has_stages_ = false;
    b.standardize_ = false;
    b.register_params(0, trainable_bias);
    return b;
}

int Backbone::append_to(ComputeGraph& g, int input_node) const {
    int node = input_node;
    if (has_stages_) {
        for (std::size_t s = 0; s < cfg_.channel_plan.size(); ++s) {
            for (int c = 0; c < cfg_.convs_per_stage; ++c) {
                const std::string name =
                    "conv" + std::to_string(s + 1) + "-" + std::to_string(c + 1);
                node = g.add_conv3d(node, conv_weight_ids_[s][static_cast<std::size_t>(c)], 1,
                                    true, name);
                node = g.add_relu(node);
            }
            node = g.add_maxpool3d(node, kPoolWindow, kPoolStride,
                                   "pool" + std::to_string(s + 1));
        }
    }
    node = g.add_flatten(node);
    if (cfg_.dropout_rate > 0.0) node = g.add_dropout(node, cfg_.dropout_rate);
    node = g.add_dense(node, fc_weight_id_, fc_bias_id_, "fc");
    return node;
}

Tensor Backbone::patch_to_input(const Patch3D& patch) const {
    const int W = cfg_.patch_dims[0], H = cfg_.patch_dims[1], D = cfg_.patch_dims[2];
    if (patch.w != W || patch.h != H || patch.d != D)
        throw DimensionError("backbone: patch " + shape_str({patch.w, patch.h, patch.d}) +
                             " does not match configured dims " + shape_str({W, H, D}));
    Tensor t({W, H, D, 1});
    double mean = 0.0, sd = 1.0;
    if (standardize_) {
        double sum = 0.0, sq = 0.0;
        for (float x : patch.voxels) {
            sum += x;
            sq += static_cast<double>(x) * x;
        }
        const double n = static_cast<double>(patch.size());
        mean = sum / n;
        const double var = std::max(sq / n - mean * mean, 0.0);
        sd = std::max(std::sqrt(var), 1e-12);
    }
    for (int x = 0; x < W; ++x) {
        for (int y = 0; y < H; ++y) {
            for (int z = 0; z < D; ++z) {
                const double raw = patch.at(x, y, z);
                t.v[static_cast<std::size_t>((x * H + y) * D + z)] =
                    standardize_ ? (raw - mean) / sd : raw;
            }
        }
    }
    return t;
}

double Backbone::predict(const Patch3D& patch, Mode mode, std::mt19937_64* rng) {
    if (!predict_graph_) {
        predict_graph_ = std::make_unique<ComputeGraph>(params_.get());
        predict_input_ = predict_graph_->add_input(
            {cfg_.patch_dims[0], cfg_.patch_dims[1], cfg_.patch_dims[2], 1}, "patch");
        predict_output_ = append_to(*predict_graph_, predict_input_);
        predict_graph_->set_output(predict_output_);
    }
    predict_graph_->set_input(predict_input_, patch_to_input(patch));
    predict_graph_->forward(mode, rng, /*check_finite=*/true);
    return predict_graph_->output_value();
}

std::vector<std::vector<double>> Backbone::snapshot_params() const {
    std::vector<std::vector<double>> snap;
    snap.reserve(static_cast<std::size_t>(params_->count()));
    for (const auto& p : params_->all()) snap.push_back(p.value.v);
    return snap;
}

void Backbone::restore_params(const std::vector<std::vector<double>>& snap) {
    if (static_cast<int>(snap.size()) != params_->count())
        throw StateError("restore_params: snapshot layout mismatch");
    for (int i = 0; i < params_->count(); ++i) params_->at(i).value.v = snap[static_cast<std::size_t>(i)];
}

}  // namespace symreg
