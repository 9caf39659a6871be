#include "oocpipe/plugin.hpp"

namespace oocpipe {

const ParamSpec* PluginSpec::find_param(const std::string& pname) const {
    for (const auto& p : params)
        if (p.name == pname) return &p;
    return nullptr;
}

Params PluginSpec::with_defaults(const Params& given) const {
    Params merged = Params::object();
    for (const auto& p : params) merged[p.name] = p.default_value;
    for (auto it = given.begin(); it != given.end(); ++it) merged[it.key()] = it.value();
    return merged;
}

PluginRegistry& PluginRegistry::instance() {
    static PluginRegistry registry = [] {
        PluginRegistry r;
        register_builtin_plugins(r);
        return r;
    }();
    return registry;
}

void PluginRegistry::add_loader(PluginSpec spec,
                                std::function<std::unique_ptr<LoaderPlugin>()> make) {
    spec.kind = PluginKind::Loader;
    auto name = spec.name;
    entries_[name] = Entry{std::move(spec), std::move(make), nullptr, nullptr};
}

void PluginRegistry::add_saver(PluginSpec spec,
                               std::function<std::unique_ptr<SaverPlugin>()> make) {
    spec.kind = PluginKind::Saver;
    auto name = spec.name;
    entries_[name] = Entry{std::move(spec), nullptr, std::move(make), nullptr};
}

void PluginRegistry::add_processing(PluginSpec spec,
                                    std::function<std::unique_ptr<ProcessingPlugin>()> make) {
    spec.kind = PluginKind::Processing;
    auto name = spec.name;
    entries_[name] = Entry{std::move(spec), nullptr, nullptr, std::move(make)};
}

bool PluginRegistry::contains(const std::string& name) const { return entries_.count(name) > 0; }

const PluginRegistry::Entry& PluginRegistry::entry(const std::string& name) const {
    auto it = entries_.find(name);
    if (it == entries_.end())
        throw Error(Errc::unknown_plugin, "no plugin named '" + name + "'");
    return it->second;
}

const PluginSpec& PluginRegistry::spec(const std::string& name) const { return entry(name).spec; }

std::vector<std::string> PluginRegistry::names() const {
    std::vector<std::string> out;
    for (const auto& [name, e] : entries_) out.push_back(name);
    return out;
}

std::unique_ptr<LoaderPlugin> PluginRegistry::make_loader(const std::string& name) const {
    const auto& e = entry(name);
    if (!e.loader) throw Error(Errc::unknown_plugin, "'" + name + "' is not a loader");
    return e.loader();
}

std::unique_ptr<SaverPlugin> PluginRegistry::make_saver(const std::string& name) const {
    const auto& e = entry(name);
    if (!e.saver) throw Error(Errc::unknown_plugin, "'" + name + "' is not a saver");
    return e.saver();
}

std::unique_ptr<ProcessingPlugin> PluginRegistry::make_processing(const std::string& name) const {
    const auto& e = entry(name);
    if (!e.processing)
        throw Error(Errc::unknown_plugin, "'" + name + "' is not a processing plugin");
    return e.processing();
}

}  // namespace oocpipe
