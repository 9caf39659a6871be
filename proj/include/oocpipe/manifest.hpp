#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace oocpipe {

// The run-level document linking every file a run produced: inputs, one
// record per process-list entry with the containers it created, and the
// datasets still alive when the chain finished.
struct ManifestOutput {
    std::string dataset;
    std::string path;
    bool intermediate = false;
};

struct ManifestPluginRecord {
    int index = 0;
    std::string plugin_name;
    nlohmann::json parameters = nlohmann::json::object();
    std::vector<ManifestOutput> outputs;
};

struct RunManifest {
    std::string run_id;
    std::vector<std::string> input_paths;
    std::vector<ManifestPluginRecord> plugins;
    std::vector<ManifestOutput> final_outputs;
    std::optional<std::string> error;  // present when the chain aborted

    nlohmann::json to_json() const;
    static RunManifest from_json(const nlohmann::json& j);
};

// Writes <output_dir>/manifest.json. Every container path referenced by the
// manifest must exist on disk; a run with no plugin records is rejected.
std::filesystem::path write_manifest(const RunManifest& manifest,
                                     const std::filesystem::path& output_dir);

RunManifest read_manifest(const std::filesystem::path& path);

}  // namespace oocpipe
