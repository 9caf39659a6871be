#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "oocpipe/block.hpp"
#include "oocpipe/container.hpp"
#include "oocpipe/data_model.hpp"
#include "oocpipe/process_list.hpp"

namespace oocpipe {

enum class Driver { Cpu, Accelerator };
enum class PluginKind { Loader, Saver, Processing };

// One declared parameter, used by the configurator to seed defaults and
// validate `set` commands.
struct ParamSpec {
    std::string name;
    std::string type;  // "int", "number", "string", "bool", "string[]", "json"
    nlohmann::json default_value;
    std::string help;
};

struct PluginSpec {
    std::string name;
    PluginKind kind = PluginKind::Processing;
    int nr_in_datasets = 0;
    int nr_out_datasets = 0;
    Driver driver = Driver::Cpu;
    std::vector<ParamSpec> params;

    const ParamSpec* find_param(const std::string& pname) const;
    // Entry parameters with unset values filled from the declared defaults.
    Params with_defaults(const Params& given) const;
};

// What the pre-run list check knows about a dataset before any data exists:
// its name and the patterns it will carry.
struct SymbolicDataset {
    std::string name;
    std::vector<std::string> pattern_names;
};

// A processing plugin's symbolic requirements, derived from parameters
// alone: the pattern each in view will request, and the patterns each out
// dataset will expose (nullopt = inherited from the first input).
struct SymbolicPlan {
    std::vector<std::string> in_patterns;
    std::vector<std::optional<std::vector<std::string>>> out_patterns;
};

// An output dataset declared during setup, plus the pattern and batch size
// the plugin will write it with.
struct OutDataset {
    DatasetDescriptor descriptor;
    std::string write_pattern;
    uint64_t frames_per_call = 1;
};

struct PluginSetup {
    std::vector<PluginDatasetView> in_views;  // one per in dataset, same order
    std::vector<OutDataset> outputs;
};

struct ProcessCall {
    int worker = 0;
    uint64_t start_ordinal = 0;
    uint64_t frames = 0;
};

// Processing plugins are instantiated once per run and shared by all
// workers: process() runs concurrently and must not mutate the instance.
// State computed in setup()/pre_process() is immutable afterwards.
class ProcessingPlugin {
  public:
    virtual ~ProcessingPlugin() = default;
    virtual const PluginSpec& spec() const = 0;
    virtual SymbolicPlan symbolic_plan(const Params& params) const = 0;
    virtual PluginSetup setup(const Params& params,
                              const std::vector<DatasetDescriptor>& in_datasets) = 0;
    virtual void pre_process() {}
    virtual void process(const ProcessCall& call, const std::vector<FrameBlock>& in,
                         std::vector<FrameBlock>& out) const = 0;
    virtual void post_process() {}
};

struct LoadedDataset {
    DatasetDescriptor descriptor;
    std::shared_ptr<Container> container;
};

// Loaders register dataset descriptors; raw loaders open existing containers
// without touching chunk payloads, generators materialize their data under
// scratch_dir. data_path is the positional input assigned to this loader (a
// "path" parameter takes precedence when both are given).
class LoaderPlugin {
  public:
    virtual ~LoaderPlugin() = default;
    virtual const PluginSpec& spec() const = 0;
    virtual std::vector<SymbolicDataset> declared_datasets(
        const Params& params, const std::optional<std::string>& data_path) const = 0;
    virtual std::vector<LoadedDataset> load(const Params& params,
                                            const std::optional<std::string>& data_path,
                                            const std::filesystem::path& scratch_dir,
                                            uint64_t budget_bytes) = 0;
};

// Savers own container creation for every output dataset of the chain.
class SaverPlugin {
  public:
    virtual ~SaverPlugin() = default;
    virtual const PluginSpec& spec() const = 0;
    virtual std::shared_ptr<Container> create(const std::filesystem::path& path,
                                              const DatasetDescriptor& descriptor,
                                              std::span<const uint64_t> chunk_shape) = 0;
};

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------

class PluginRegistry {
  public:
    // Global registry with the built-in plugin pack pre-registered.
    static PluginRegistry& instance();

    void add_loader(PluginSpec spec, std::function<std::unique_ptr<LoaderPlugin>()> make);
    void add_saver(PluginSpec spec, std::function<std::unique_ptr<SaverPlugin>()> make);
    void add_processing(PluginSpec spec, std::function<std::unique_ptr<ProcessingPlugin>()> make);

    bool contains(const std::string& name) const;
    const PluginSpec& spec(const std::string& name) const;  // throws UnknownPlugin
    std::vector<std::string> names() const;

    std::unique_ptr<LoaderPlugin> make_loader(const std::string& name) const;
    std::unique_ptr<SaverPlugin> make_saver(const std::string& name) const;
    std::unique_ptr<ProcessingPlugin> make_processing(const std::string& name) const;

  private:
    struct Entry {
        PluginSpec spec;
        std::function<std::unique_ptr<LoaderPlugin>()> loader;
        std::function<std::unique_ptr<SaverPlugin>()> saver;
        std::function<std::unique_ptr<ProcessingPlugin>()> processing;
    };
    const Entry& entry(const std::string& name) const;

    std::map<std::string, Entry> entries_;
};

// Registers the built-in plugin pack; idempotent.
void register_builtin_plugins(PluginRegistry& registry);

}  // namespace oocpipe
