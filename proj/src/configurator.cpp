#include "oocpipe/configurator.hpp"

#include <sstream>

namespace oocpipe::config {

using nlohmann::json;

namespace {

PluginEntry& entry_at(ProcessList& list, int index) {
    if (index < 1 || index > static_cast<int>(list.plugins.size()))
        throw Error(Errc::bad_index, "no entry with index " + std::to_string(index));
    return list.plugins[index - 1];
}

}  // namespace

void new_list(const std::filesystem::path& file) { ProcessList{}.save(file); }

void add_plugin(const std::filesystem::path& file, const std::string& plugin_name,
                const PluginRegistry& registry) {
    auto list = ProcessList::load(file);
    const PluginSpec& spec = registry.spec(plugin_name);  // UnknownPlugin
    PluginEntry entry;
    entry.name = plugin_name;
    entry.params = spec.with_defaults(Params::object());
    list.plugins.push_back(std::move(entry));
    list.reindex();
    list.save(file);
}

void remove_plugin(const std::filesystem::path& file, int index) {
    auto list = ProcessList::load(file);
    entry_at(list, index);
    list.plugins.erase(list.plugins.begin() + (index - 1));
    list.reindex();
    list.save(file);
}

void move_plugin(const std::filesystem::path& file, int from, int to) {
    auto list = ProcessList::load(file);
    entry_at(list, from);
    entry_at(list, to);
    PluginEntry moved = std::move(list.plugins[from - 1]);
    list.plugins.erase(list.plugins.begin() + (from - 1));
    list.plugins.insert(list.plugins.begin() + (to - 1), std::move(moved));
    list.reindex();
    list.save(file);
}

void set_param(const std::filesystem::path& file, int index, const std::string& param,
               const std::string& value, const PluginRegistry& registry) {
    auto list = ProcessList::load(file);
    auto& entry = entry_at(list, index);
    if (registry.contains(entry.name)) {
        const PluginSpec& spec = registry.spec(entry.name);
        if (!spec.params.empty() && !spec.find_param(param))
            throw Error(Errc::unknown_param,
                        "'" + entry.name + "' has no parameter '" + param + "'");
    }
    json parsed;
    try {
        parsed = json::parse(value);
    } catch (const json::exception&) {
        parsed = value;  // plain string
    }
    entry.params[param] = parsed;
    list.save(file);
}

std::string show(const std::filesystem::path& file) {
    auto list = ProcessList::load(file);
    std::ostringstream out;
    if (list.plugins.empty()) {
        out << "(empty process list)\n";
        return out.str();
    }
    for (const auto& p : list.plugins) {
        out << p.index << ": " << p.name << (p.active ? "" : " [inactive]") << "\n";
        for (auto it = p.params.begin(); it != p.params.end(); ++it)
            out << "    " << it.key() << " = " << it.value().dump() << "\n";
    }
    return out.str();
}

}  // namespace oocpipe::config
