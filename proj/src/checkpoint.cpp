#include "symreg/checkpoint.hpp"

#include <fstream>

#include <json.hpp>

#include "binio.hpp"
#include "symreg/errors.hpp"

namespace symreg {

namespace {

constexpr char kMagic[] = "SYMREGM1";

using json = nlohmann::json;

json config_to_json(const BackboneConfig& cfg) {
    return json{{"patch_dims", cfg.patch_dims},
                {"channel_plan", cfg.channel_plan},
                {"convs_per_stage", cfg.convs_per_stage},
                {"dropout_rate", cfg.dropout_rate}};
}

BackboneConfig config_from_json(const json& j) {
    BackboneConfig cfg;
    const auto dims = j.at("patch_dims").get<std::vector<int>>();
    if (dims.size() != 3) throw FormatError("checkpoint: patch_dims must have 3 entries");
    cfg.patch_dims = {dims[0], dims[1], dims[2]};
    cfg.channel_plan = j.at("channel_plan").get<std::vector<int>>();
    cfg.convs_per_stage = j.at("convs_per_stage").get<int>();
    cfg.dropout_rate = j.at("dropout_rate").get<double>();
    return cfg;
}

}  // namespace

void save_checkpoint(const Backbone& model, const std::string& path) {
    json header;
    header["config"] = config_to_json(model.config());
    json manifest = json::array();
    for (const auto& p : model.params().all())
        manifest.push_back(json{{"name", p.name}, {"shape", p.value.shape}});
    header["params"] = manifest;
    const std::string head = header.dump();

    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw FormatError("checkpoint: cannot open '" + path + "' for writing");
    os.write(kMagic, 8);
    binio::put_u64(os, head.size());
    os.write(head.data(), static_cast<std::streamsize>(head.size()));
    for (const auto& p : model.params().all()) {
        for (double v : p.value.v) binio::put_f32(os, static_cast<float>(v));
    }
    if (!os) throw FormatError("checkpoint: write failed for '" + path + "'");
}

Backbone load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw FormatError("checkpoint: cannot open '" + path + "'");
    binio::Reader r(is, "checkpoint '" + path + "'");
    r.expect_magic(kMagic);
    const std::uint64_t head_len = r.u64("header length");
    std::string head(head_len, '\0');
    r.bytes(head.data(), head_len, "JSON header");

    json header;
    try {
        header = json::parse(head);
    } catch (const json::exception& e) {
        throw FormatError("checkpoint '" + path + "': invalid JSON header: " + e.what());
    }

    Backbone model = [&] {
        try {
            return Backbone::build(config_from_json(header.at("config")), 0);
        } catch (const json::exception& e) {
            throw FormatError("checkpoint '" + path + "': bad config: " + e.what());
        }
    }();

    const auto& manifest = header.at("params");
    if (static_cast<int>(manifest.size()) != model.params().count())
        throw FormatError("checkpoint '" + path + "': manifest lists " +
                          std::to_string(manifest.size()) + " parameters, architecture has " +
                          std::to_string(model.params().count()));
    for (int i = 0; i < model.params().count(); ++i) {
        auto& p = model.params().at(i);
        const auto& entry = manifest[static_cast<std::size_t>(i)];
        if (entry.at("name").get<std::string>() != p.name ||
            entry.at("shape").get<std::vector<int>>() != p.value.shape)
            throw FormatError("checkpoint '" + path + "': manifest entry " + std::to_string(i) +
                              " does not match architecture parameter '" + p.name + "' " +
                              shape_str(p.value.shape));
        for (std::size_t j = 0; j < p.value.size(); ++j)
            p.value.v[j] = static_cast<double>(r.f32(p.name.c_str()));
    }
    r.expect_eof();
    return model;
}

}  // namespace symreg
