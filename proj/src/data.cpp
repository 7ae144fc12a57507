#include "symreg/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "binio.hpp"
#include "symreg/errors.hpp"
#include "symreg/rng.hpp"

namespace symreg {

namespace {

constexpr char kMagic[] = "SYMREGD1";
using json = nlohmann::json;

void validate_gen_config(const GenConfig& cfg) {
    if (cfg.n_samples < 1) throw ConfigError("gen: n_samples must be >= 1");
    for (int e : cfg.dims) {
        if (e < 1) throw ConfigError("gen: dims must be positive");
    }
    if (!(cfg.y_max > cfg.y_min)) throw ConfigError("gen: y range must be non-empty");
    if (cfg.sigma_pair < 0.0) throw ConfigError("gen: sigma_pair must be >= 0");
    if (cfg.blob_radius <= 0.0) throw ConfigError("gen: blob_radius must be > 0");
    if (cfg.blob_jitter_sd < 0.0) throw ConfigError("gen: blob_jitter_sd must be >= 0");
    if (cfg.noise_sd < 0.0) throw ConfigError("gen: noise_sd must be >= 0");
}

// Renders a canonical-frame patch for target y: background noise plus the
// blob, peak contrast affine in y, center jittered per rendering.
Patch3D render_patch(const GenConfig& cfg, double y, std::mt19937_64& eng) {
    Patch3D p(cfg.dims[0], cfg.dims[1], cfg.dims[2]);
    auto c = blob_center(cfg);
    if (cfg.blob_jitter_sd > 0.0) {
        std::normal_distribution<double> jitter(0.0, cfg.blob_jitter_sd);
        for (auto& coord : c) coord += jitter(eng);
    }
    const double peak = cfg.blob_contrast * (y - cfg.y_min) / (cfg.y_max - cfg.y_min);
    const double inv2r2 = 1.0 / (2.0 * cfg.blob_radius * cfg.blob_radius);
    std::normal_distribution<double> noise(0.0, cfg.noise_sd);
    for (int z = 0; z < p.d; ++z) {
        for (int yv = 0; yv < p.h; ++yv) {
            for (int x = 0; x < p.w; ++x) {
                const double dx = x - c[0], dy = yv - c[1], dz = z - c[2];
                const double blob = peak * std::exp(-(dx * dx + dy * dy + dz * dz) * inv2r2);
                p.at(x, yv, z) = static_cast<float>(blob + (cfg.noise_sd > 0.0 ? noise(eng) : 0.0));
            }
        }
    }
    return p;
}

json gen_config_to_json(const GenConfig& cfg) {
    return json{{"n_samples", cfg.n_samples}, {"dims", cfg.dims},
                {"y_min", cfg.y_min},         {"y_max", cfg.y_max},
                {"sigma_pair", cfg.sigma_pair}, {"blob_radius", cfg.blob_radius},
                {"blob_contrast", cfg.blob_contrast}, {"blob_jitter_sd", cfg.blob_jitter_sd},
                {"noise_sd", cfg.noise_sd},
                {"seed", cfg.seed}};
}

GenConfig gen_config_from_json(const json& j) {
    GenConfig cfg;
    cfg.n_samples = j.at("n_samples").get<int>();
    const auto dims = j.at("dims").get<std::vector<int>>();
    if (dims.size() != 3) throw FormatError("dataset: dims must have 3 entries");
    cfg.dims = {dims[0], dims[1], dims[2]};
    cfg.y_min = j.at("y_min").get<double>();
    cfg.y_max = j.at("y_max").get<double>();
    cfg.sigma_pair = j.at("sigma_pair").get<double>();
    cfg.blob_radius = j.at("blob_radius").get<double>();
    cfg.blob_contrast = j.at("blob_contrast").get<double>();
    cfg.blob_jitter_sd = j.at("blob_jitter_sd").get<double>();
    cfg.noise_sd = j.at("noise_sd").get<double>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    return cfg;
}

}  // namespace

const char* split_name(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::val: return "val";
        case Split::test: return "test";
    }
    return "?";
}

std::vector<std::size_t> Dataset::indices_of(Split s) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < split.size(); ++i) {
        if (split[i] == s) out.push_back(i);
    }
    return out;
}

std::array<double, 3> blob_center(const GenConfig& cfg) {
    // fixed lateral offset at 70% of W so the mirrored side is distinct
    return {0.7 * (cfg.dims[0] - 1), 0.5 * (cfg.dims[1] - 1), 0.5 * (cfg.dims[2] - 1)};
}

Dataset gen_dataset(const GenConfig& cfg) {
    validate_gen_config(cfg);
    Dataset ds;
    ds.cfg = cfg;
    ds.samples.resize(static_cast<std::size_t>(cfg.n_samples));
    ds.split.assign(static_cast<std::size_t>(cfg.n_samples), Split::train);

    for (std::size_t i = 0; i < ds.samples.size(); ++i) {
        auto eng = make_engine(cfg.seed, i);
        std::uniform_real_distribution<double> sev(cfg.y_min, cfg.y_max);
        std::normal_distribution<double> pair_noise(0.0, cfg.sigma_pair);
        const double s = sev(eng);
        const double er = cfg.sigma_pair > 0.0 ? pair_noise(eng) : 0.0;
        const double el = cfg.sigma_pair > 0.0 ? pair_noise(eng) : 0.0;
        PairedSample& ps = ds.samples[i];
        ps.y_r = std::clamp(s + er, cfg.y_min, cfg.y_max);
        ps.y_l = std::clamp(s + el, cfg.y_min, cfg.y_max);
        ps.x_l = render_patch(cfg, ps.y_l, eng);
        ps.x_r = lateral_flip(render_patch(cfg, ps.y_r, eng));
    }
    return ds;
}

void assign_split_counts(Dataset& ds, std::array<int, 3> counts, std::uint64_t seed) {
    const int n = static_cast<int>(ds.size());
    if (counts[0] + counts[1] + counts[2] != n)
        throw ConfigError("split: counts sum to " +
                          std::to_string(counts[0] + counts[1] + counts[2]) + ", dataset has " +
                          std::to_string(n));
    for (int c : counts) {
        if (c < 0) throw ConfigError("split: counts must be >= 0");
    }
    std::vector<std::size_t> idx(ds.size());
    std::iota(idx.begin(), idx.end(), 0);
    auto eng = make_engine(seed, 0x5b17);
    std::shuffle(idx.begin(), idx.end(), eng);
    ds.split.assign(ds.size(), Split::train);
    std::size_t at = 0;
    for (int s = 0; s < 3; ++s) {
        for (int c = 0; c < counts[s]; ++c) ds.split[idx[at++]] = static_cast<Split>(s);
    }
}

void assign_split(Dataset& ds, std::array<double, 3> fractions, std::uint64_t seed) {
    const double sum = fractions[0] + fractions[1] + fractions[2];
    if (std::fabs(sum - 1.0) > 1e-9)
        throw ConfigError("split: fractions sum to " + std::to_string(sum) + ", expected 1");
    const int n = static_cast<int>(ds.size());
    std::array<int, 3> counts{};
    std::array<double, 3> rem{};
    int assigned = 0;
    for (int s = 0; s < 3; ++s) {
        const double exact = fractions[static_cast<std::size_t>(s)] * n;
        counts[static_cast<std::size_t>(s)] = static_cast<int>(std::floor(exact));
        rem[static_cast<std::size_t>(s)] = exact - std::floor(exact);
        assigned += counts[static_cast<std::size_t>(s)];
    }
    // largest remainder, ties to the lower split index
    while (assigned < n) {
        int best = 0;
        for (int s = 1; s < 3; ++s) {
            if (rem[static_cast<std::size_t>(s)] > rem[static_cast<std::size_t>(best)] + 1e-12) best = s;
        }
        counts[static_cast<std::size_t>(best)] += 1;
        rem[static_cast<std::size_t>(best)] = -1.0;
        assigned += 1;
    }
    assign_split_counts(ds, counts, seed);
}

void save_dataset(const Dataset& ds, const std::string& path) {
    json header;
    header["count"] = ds.size();
    header["dims"] = ds.cfg.dims;
    header["y_range"] = {ds.cfg.y_min, ds.cfg.y_max};
    header["gen_config"] = gen_config_to_json(ds.cfg);
    json split = json::array();
    for (Split s : ds.split) split.push_back(split_name(s));
    header["split"] = split;
    header["layout"] = {{"voxels", "float32-le, per sample x_r then x_l, W fastest"},
                        {"targets", "float64-le, per sample y_r then y_l"}};
    const std::string head = header.dump();

    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw FormatError("dataset: cannot open '" + path + "' for writing");
    os.write(kMagic, 8);
    binio::put_u64(os, head.size());
    os.write(head.data(), static_cast<std::streamsize>(head.size()));
    for (const auto& s : ds.samples) {
        for (float v : s.x_r.voxels) binio::put_f32(os, v);
        for (float v : s.x_l.voxels) binio::put_f32(os, v);
    }
    for (const auto& s : ds.samples) {
        binio::put_f64(os, s.y_r);
        binio::put_f64(os, s.y_l);
    }
    if (!os) throw FormatError("dataset: write failed for '" + path + "'");
}

Dataset load_dataset(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw FormatError("dataset: cannot open '" + path + "'");
    binio::Reader r(is, "dataset '" + path + "'");
    r.expect_magic(kMagic);
    const std::uint64_t head_len = r.u64("header length");
    std::string head(head_len, '\0');
    r.bytes(head.data(), head_len, "JSON header");

    json header;
    try {
        header = json::parse(head);
    } catch (const json::exception& e) {
        throw FormatError("dataset '" + path + "': invalid JSON header: " + e.what());
    }

    Dataset ds;
    std::size_t count = 0;
    try {
        count = header.at("count").get<std::size_t>();
        ds.cfg = gen_config_from_json(header.at("gen_config"));
        const auto dims = header.at("dims").get<std::vector<int>>();
        if (dims.size() != 3 || dims[0] != ds.cfg.dims[0] || dims[1] != ds.cfg.dims[1] ||
            dims[2] != ds.cfg.dims[2])
            throw FormatError("dataset '" + path + "': dims disagree with generator config");
        const auto& split = header.at("split");
        if (split.size() != count)
            throw FormatError("dataset '" + path + "': header count " + std::to_string(count) +
                              " != split length " + std::to_string(split.size()));
        ds.split.reserve(count);
        for (const auto& s : split) {
            const std::string name = s.get<std::string>();
            if (name == "train") ds.split.push_back(Split::train);
            else if (name == "val") ds.split.push_back(Split::val);
            else if (name == "test") ds.split.push_back(Split::test);
            else throw FormatError("dataset '" + path + "': unknown split label '" + name + "'");
        }
    } catch (const json::exception& e) {
        throw FormatError("dataset '" + path + "': bad header: " + e.what());
    }

    const int W = ds.cfg.dims[0], H = ds.cfg.dims[1], D = ds.cfg.dims[2];
    ds.samples.resize(count);
    for (auto& s : ds.samples) {
        s.x_r = Patch3D(W, H, D);
        s.x_l = Patch3D(W, H, D);
        for (auto& v : s.x_r.voxels) v = r.f32("voxels");
        for (auto& v : s.x_l.voxels) v = r.f32("voxels");
    }
    for (auto& s : ds.samples) {
        s.y_r = r.f64("targets");
        s.y_l = r.f64("targets");
    }
    r.expect_eof();
    return ds;
}

}  // namespace symreg
