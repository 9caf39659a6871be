#include "oocpipe/manifest.hpp"

#include <fstream>

#include "oocpipe/error.hpp"

namespace oocpipe {

using nlohmann::json;

static json output_to_json(const ManifestOutput& o) {
    return json{{"dataset", o.dataset}, {"path", o.path}, {"intermediate", o.intermediate}};
}

static ManifestOutput output_from_json(const json& j) {
    ManifestOutput o;
    o.dataset = j.at("dataset").get<std::string>();
    o.path = j.at("path").get<std::string>();
    o.intermediate = j.value("intermediate", false);
    return o;
}

json RunManifest::to_json() const {
    json plugins_json = json::array();
    for (const auto& rec : plugins) {
        json outs = json::array();
        for (const auto& o : rec.outputs) outs.push_back(output_to_json(o));
        plugins_json.push_back(json{{"index", rec.index},
                                    {"name", rec.plugin_name},
                                    {"parameters", rec.parameters},
                                    {"outputs", outs}});
    }
    json finals = json::array();
    for (const auto& o : final_outputs) finals.push_back(output_to_json(o));
    json j{{"run_id", run_id},
           {"inputs", input_paths},
           {"plugins", plugins_json},
           {"final_outputs", finals}};
    if (error) j["error"] = *error;
    return j;
}

RunManifest RunManifest::from_json(const json& j) {
    RunManifest m;
    m.run_id = j.at("run_id").get<std::string>();
    m.input_paths = j.at("inputs").get<std::vector<std::string>>();
    for (const auto& rec : j.at("plugins")) {
        ManifestPluginRecord r;
        r.index = rec.at("index").get<int>();
        r.plugin_name = rec.at("name").get<std::string>();
        r.parameters = rec.at("parameters");
        for (const auto& o : rec.at("outputs")) r.outputs.push_back(output_from_json(o));
        m.plugins.push_back(std::move(r));
    }
    for (const auto& o : j.at("final_outputs")) m.final_outputs.push_back(output_from_json(o));
    if (j.contains("error")) m.error = j.at("error").get<std::string>();
    return m;
}

std::filesystem::path write_manifest(const RunManifest& manifest,
                                     const std::filesystem::path& output_dir) {
    if (manifest.plugins.empty())
        throw Error(Errc::invalid_inputs, "a run manifest needs at least one plugin record");
    auto check_exists = [](const std::string& p) {
        if (!std::filesystem::exists(p))
            throw Error(Errc::io_failure, "manifest references missing file '" + p + "'");
    };
    for (const auto& rec : manifest.plugins)
        for (const auto& o : rec.outputs) check_exists(o.path);
    for (const auto& o : manifest.final_outputs) check_exists(o.path);

    std::filesystem::create_directories(output_dir);
    const auto path = output_dir / "manifest.json";
    std::ofstream out(path);
    if (!out) throw Error(Errc::io_failure, "cannot write '" + path.string() + "'");
    out << manifest.to_json().dump(2) << "\n";
    return path;
}

RunManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::io_failure, "cannot read '" + path.string() + "'");
    json j;
    in >> j;
    return RunManifest::from_json(j);
}

}  // namespace oocpipe
