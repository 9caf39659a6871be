#include "oocpipe/process_list.hpp"

#include <fstream>

namespace oocpipe {

using nlohmann::json;

static std::vector<std::string> name_list(const Params& params, const char* key) {
    std::vector<std::string> out;
    if (!params.contains(key)) return out;
    const auto& v = params.at(key);
    if (v.is_string()) {
        out.push_back(v.get<std::string>());
        return out;
    }
    if (!v.is_array()) return out;
    for (const auto& e : v)
        if (e.is_string()) out.push_back(e.get<std::string>());
    return out;
}

std::vector<std::string> PluginEntry::in_datasets() const { return name_list(params, "in_datasets"); }
std::vector<std::string> PluginEntry::out_datasets() const { return name_list(params, "out_datasets"); }

void ProcessList::reindex() {
    for (size_t i = 0; i < plugins.size(); ++i) plugins[i].index = static_cast<int>(i) + 1;
}

json ProcessList::to_json() const {
    json entries = json::array();
    for (const auto& p : plugins)
        entries.push_back(json{{"index", p.index},
                               {"name", p.name},
                               {"active", p.active},
                               {"params", p.params}});
    return json{{"plugins", entries}};
}

ProcessList ProcessList::from_json(const json& j) {
    ProcessList list;
    for (const auto& e : j.at("plugins")) {
        PluginEntry p;
        p.index = e.value("index", 0);
        p.name = e.at("name").get<std::string>();
        p.active = e.value("active", true);
        p.params = e.value("params", Params::object());
        list.plugins.push_back(std::move(p));
    }
    list.reindex();
    return list;
}

void ProcessList::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw Error(Errc::io_failure, "cannot write '" + path.string() + "'");
    out << to_json().dump(2) << "\n";
}

ProcessList ProcessList::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::io_failure, "cannot read '" + path.string() + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error(Errc::io_failure, "malformed process list: " + std::string(e.what()));
    }
    return from_json(j);
}

}  // namespace oocpipe
