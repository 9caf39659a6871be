#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "oocpipe/error.hpp"

namespace oocpipe {

using Params = nlohmann::json;

// One entry of a process list: a plugin name plus its parameters. Dataset
// wiring lives in the regular parameters "in_datasets" / "out_datasets".
struct PluginEntry {
    int index = 0;  // 1-based position
    std::string name;
    bool active = true;
    Params params = Params::object();

    std::vector<std::string> in_datasets() const;
    std::vector<std::string> out_datasets() const;
};

struct ProcessList {
    std::vector<PluginEntry> plugins;

    // Restores contiguous 1-based indices after edits.
    void reindex();

    nlohmann::json to_json() const;
    static ProcessList from_json(const nlohmann::json& j);

    void save(const std::filesystem::path& path) const;
    static ProcessList load(const std::filesystem::path& path);
};

}  // namespace oocpipe
