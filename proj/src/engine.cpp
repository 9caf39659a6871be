#include "oocpipe/engine.hpp"

#include <algorithm>
#include <chrono>
#include <thread>

namespace oocpipe {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Partitioning and gating
// ---------------------------------------------------------------------------

Partition partition_frames(uint64_t frame_count, int n_workers) {
    if (n_workers < 1) throw Error(Errc::invalid_inputs, "n_workers must be positive");
    Partition p;
    const uint64_t k = static_cast<uint64_t>(n_workers);
    const uint64_t base = frame_count / k;
    const uint64_t rem = frame_count % k;
    uint64_t cursor = 0;
    for (uint64_t w = 0; w < k; ++w) {
        const uint64_t size = base + (w < rem ? 1 : 0);
        p.ranges.push_back({cursor, cursor + size});
        cursor += size;
    }
    p.frames_per_worker = (frame_count + k - 1) / k;
    return p;
}

std::vector<int> gate_workers(Driver driver, int n_workers, int n_accelerators) {
    if (n_workers < 1) throw Error(Errc::invalid_inputs, "n_workers must be positive");
    int active = n_workers;
    if (driver == Driver::Accelerator) {
        if (n_accelerators < 1)
            throw Error(Errc::no_accelerators, "accelerator plugin with no accelerators");
        active = std::min(n_workers, n_accelerators);
    }
    std::vector<int> workers(active);
    for (int w = 0; w < active; ++w) workers[w] = w;
    return workers;
}

// ---------------------------------------------------------------------------
// Process-list validation
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> merged_in_datasets(const PluginSpec& spec, const PluginEntry& entry) {
    PluginEntry tmp;
    tmp.params = spec.with_defaults(entry.params);
    return tmp.in_datasets();
}

std::vector<std::string> merged_out_datasets(const PluginSpec& spec, const PluginEntry& entry) {
    PluginEntry tmp;
    tmp.params = spec.with_defaults(entry.params);
    return tmp.out_datasets();
}

// Pattern table tracked per symbolic dataset; nullopt marks "unknown,
// accept anything" (used after an unknown plugin muddies the walk).
using SymbolicTable = std::map<std::string, std::optional<std::set<std::string>>>;

// Positional input assigned to a loader entry: the k-th active loader gets
// the k-th data path.
std::optional<std::string> loader_data_path(const ProcessList& list,
                                            const PluginRegistry& registry,
                                            const PluginEntry& target,
                                            const std::vector<std::string>& data_paths) {
    size_t ordinal = 0;
    for (const auto& entry : list.plugins) {
        if (!entry.active || !registry.contains(entry.name)) continue;
        if (registry.spec(entry.name).kind != PluginKind::Loader) continue;
        if (&entry == &target)
            return ordinal < data_paths.size() ? std::optional(data_paths[ordinal])
                                               : std::nullopt;
        ++ordinal;
    }
    return std::nullopt;
}

}  // namespace

CheckReport check_plugin_list(const ProcessList& list,
                              const std::map<int, std::vector<SymbolicDataset>>& loader_declared,
                              const PluginRegistry& registry) {
    CheckReport report;
    SymbolicTable available;
    bool seen_non_loader = false;
    int loader_count = 0;
    const PluginEntry* last_active = nullptr;
    for (const auto& entry : list.plugins)
        if (entry.active) last_active = &entry;

    for (const auto& entry : list.plugins) {
        if (!entry.active) continue;

        if (!registry.contains(entry.name)) {
            report.push_back({entry.index, "unknown-plugin",
                              "no plugin named '" + entry.name + "'"});
            // Keep the walk alive: whatever this entry claims to output
            // exists with unknown patterns.
            for (const auto& out : entry.out_datasets()) available[out] = std::nullopt;
            seen_non_loader = true;
            continue;
        }
        const PluginSpec& spec = registry.spec(entry.name);

        if (spec.kind == PluginKind::Loader) {
            if (seen_non_loader)
                report.push_back({entry.index, "loader-order",
                                  "loader '" + entry.name +
                                      "' must precede every processing plugin"});
            ++loader_count;
            auto it = loader_declared.find(entry.index);
            if (it == loader_declared.end()) continue;
            for (const auto& ds : it->second) {
                if (available.count(ds.name))
                    report.push_back({entry.index, "duplicate-dataset",
                                      "dataset '" + ds.name + "' already exists"});
                available[ds.name] =
                    std::set<std::string>(ds.pattern_names.begin(), ds.pattern_names.end());
            }
            continue;
        }

        if (spec.kind == PluginKind::Saver) {
            seen_non_loader = true;
            if (&entry != last_active)
                report.push_back({entry.index, "saver-order",
                                  "saver '" + entry.name + "' must be the last entry"});
            continue;
        }

        // Processing plugin.
        seen_non_loader = true;
        const auto ins = merged_in_datasets(spec, entry);
        const auto outs = merged_out_datasets(spec, entry);
        if (static_cast<int>(ins.size()) != spec.nr_in_datasets)
            report.push_back({entry.index, "count-mismatch",
                              "'" + entry.name + "' requires " +
                                  std::to_string(spec.nr_in_datasets) + " in_datasets, " +
                                  std::to_string(ins.size()) + " given"});
        if (static_cast<int>(outs.size()) != spec.nr_out_datasets)
            report.push_back({entry.index, "count-mismatch",
                              "'" + entry.name + "' requires " +
                                  std::to_string(spec.nr_out_datasets) + " out_datasets, " +
                                  std::to_string(outs.size()) + " given"});

        SymbolicPlan plan;
        try {
            plan = registry.make_processing(entry.name)->symbolic_plan(
                spec.with_defaults(entry.params));
        } catch (const std::exception& e) {
            report.push_back({entry.index, "bad-params", e.what()});
            for (const auto& out : outs) available[out] = std::nullopt;
            continue;
        }

        for (size_t i = 0; i < ins.size(); ++i) {
            auto it = available.find(ins[i]);
            if (it == available.end()) {
                report.push_back({entry.index, "unknown-dataset",
                                  "in_dataset '" + ins[i] +
                                      "' has no match in the available datasets"});
                continue;
            }
            if (i < plan.in_patterns.size() && it->second.has_value() &&
                !it->second->count(plan.in_patterns[i]))
                report.push_back({entry.index, "missing-pattern",
                                  "dataset '" + ins[i] + "' has no pattern '" +
                                      plan.in_patterns[i] + "'"});
        }

        // Inherited pattern set comes from the first input.
        std::optional<std::set<std::string>> inherited;
        if (!ins.empty()) {
            auto it = available.find(ins[0]);
            if (it != available.end()) inherited = it->second;
        }
        for (size_t k = 0; k < outs.size(); ++k) {
            if (k < plan.out_patterns.size() && plan.out_patterns[k].has_value()) {
                available[outs[k]] = std::set<std::string>(plan.out_patterns[k]->begin(),
                                                           plan.out_patterns[k]->end());
            } else {
                available[outs[k]] = inherited;
            }
        }
    }

    if (loader_count == 0)
        report.push_back({0, "loader-missing", "a process list starts with at least one loader"});
    if (!last_active || !registry.contains(last_active->name) ||
        registry.spec(last_active->name).kind != PluginKind::Saver)
        report.push_back({last_active ? last_active->index : 0, "saver-missing",
                          "a process list ends with a saver"});
    return report;
}

CheckReport check_plugin_list(const ProcessList& list, const PluginRegistry& registry,
                              const std::vector<std::string>& data_paths) {
    std::map<int, std::vector<SymbolicDataset>> declared;
    CheckReport pre;
    for (const auto& entry : list.plugins) {
        if (!entry.active || !registry.contains(entry.name)) continue;
        const PluginSpec& spec = registry.spec(entry.name);
        if (spec.kind != PluginKind::Loader) continue;
        try {
            declared[entry.index] = registry.make_loader(entry.name)->declared_datasets(
                spec.with_defaults(entry.params),
                loader_data_path(list, registry, entry, data_paths));
        } catch (const std::exception& e) {
            pre.push_back({entry.index, "bad-params", e.what()});
        }
    }
    auto report = check_plugin_list(list, declared, registry);
    report.insert(report.begin(), pre.begin(), pre.end());
    return report;
}

std::vector<std::set<std::string>> symbolic_available_sets(
    const ProcessList& list, const PluginRegistry& registry,
    const std::vector<std::string>& data_paths) {
    std::vector<std::set<std::string>> snapshots;
    std::set<std::string> available;
    for (const auto& entry : list.plugins) {
        if (!entry.active) continue;
        const PluginSpec& spec = registry.spec(entry.name);
        if (spec.kind == PluginKind::Loader) {
            for (const auto& ds : registry.make_loader(entry.name)->declared_datasets(
                     spec.with_defaults(entry.params),
                     loader_data_path(list, registry, entry, data_paths)))
                available.insert(ds.name);
        } else if (spec.kind == PluginKind::Processing) {
            for (const auto& out : merged_out_datasets(spec, entry)) available.insert(out);
        }
        snapshots.push_back(available);
    }
    return snapshots;
}

// ---------------------------------------------------------------------------
// RunContext
// ---------------------------------------------------------------------------

RunContext::RunContext(RunOptions options)
    : options_(std::move(options)), start_(std::chrono::steady_clock::now()) {
    if (options_.n_workers < 1)
        throw Error(Errc::invalid_inputs, "n_workers must be positive");
}

void RunContext::add_dataset(const std::string& name, LoadedDataset dataset) {
    if (datasets_.count(name))
        throw Error(Errc::invalid_inputs, "dataset '" + name + "' already registered");
    datasets_[name] = std::move(dataset);
}

void RunContext::replace_dataset(const std::string& name, LoadedDataset replacement) {
    auto it = datasets_.find(name);
    if (it == datasets_.end())
        throw Error(Errc::unknown_dataset, "cannot replace unknown dataset '" + name + "'");
    // The superseded container stays on disk as an intermediate; dropping the
    // handle closes the file.
    it->second = std::move(replacement);
}

void RunContext::publish_dataset(const std::string& name, LoadedDataset dataset) {
    if (datasets_.count(name))
        replace_dataset(name, std::move(dataset));
    else
        add_dataset(name, std::move(dataset));
}

bool RunContext::has_dataset(const std::string& name) const { return datasets_.count(name) > 0; }

const LoadedDataset& RunContext::dataset(const std::string& name) const {
    auto it = datasets_.find(name);
    if (it == datasets_.end())
        throw Error(Errc::unknown_dataset, "no dataset named '" + name + "'");
    return it->second;
}

std::set<std::string> RunContext::dataset_names() const {
    std::set<std::string> names;
    for (const auto& [name, ds] : datasets_) names.insert(name);
    return names;
}

void RunContext::track_container(const std::shared_ptr<Container>& c) {
    all_containers_.push_back(c);
}

StorageStats RunContext::total_stats() const {
    StorageStats total;
    for (const auto& c : all_containers_) {
        const auto s = c->stats();
        total.chunks_read += s.chunks_read;
        total.chunks_written += s.chunks_written;
    }
    return total;
}

uint64_t RunContext::now_us() const {
    return std::chrono::duration_cast<std::chrono::microseconds>(
               std::chrono::steady_clock::now() - start_)
        .count();
}

// ---------------------------------------------------------------------------
// Chain execution
// ---------------------------------------------------------------------------

namespace {

std::string fresh_run_id() {
    const auto ticks = std::chrono::system_clock::now().time_since_epoch().count();
    return "run-" + std::to_string(static_cast<uint64_t>(ticks));
}

// Names an entry will publish into the available set, without running it.
std::vector<std::string> published_names(const PluginRegistry& registry, const ProcessList& list,
                                         const PluginEntry& entry,
                                         const std::vector<std::string>& data_paths) {
    if (!registry.contains(entry.name)) return {};
    const PluginSpec& spec = registry.spec(entry.name);
    if (spec.kind == PluginKind::Loader) {
        std::vector<std::string> names;
        for (const auto& ds : registry.make_loader(entry.name)->declared_datasets(
                 spec.with_defaults(entry.params),
                 loader_data_path(list, registry, entry, data_paths)))
            names.push_back(ds.name);
        return names;
    }
    if (spec.kind == PluginKind::Processing) return merged_out_datasets(spec, entry);
    return {};
}

bool replaced_later(const PluginRegistry& registry, const ProcessList& list, size_t pos,
                    const std::string& name, const std::vector<std::string>& data_paths) {
    for (size_t j = pos + 1; j < list.plugins.size(); ++j) {
        if (!list.plugins[j].active) continue;
        for (const auto& n : published_names(registry, list, list.plugins[j], data_paths))
            if (n == name) return true;
    }
    return false;
}

struct TimedScope {
    RunContext& ctx;
    uint64_t t0;
    explicit TimedScope(RunContext& c) : ctx(c), t0(c.now_us()) {}
    LogEvent event(int worker, int index, const std::string& name, Phase phase,
                   uint64_t frames = 0) const {
        const uint64_t now = ctx.now_us();
        return LogEvent{t0, worker, index, name, phase, frames, now - t0};
    }
};

// Reads one batch for a view; a view whose frame count divides the driving
// count is broadcast by ordinal modulo.
FrameBlock read_view(const Container& container, const PluginDatasetView& view,
                     uint64_t driving_count, uint64_t start, uint64_t count) {
    const uint64_t own = frame_count(container.descriptor(), view.pattern_name);
    std::span<const uint64_t> pads(view.padding);
    if (own == driving_count) return container.read_frames(view.pattern_name, start, count, pads);
    if (driving_count % own != 0)
        throw Error(Errc::shape_mismatch,
                    "dataset '" + view.dataset_name + "' exposes " + std::to_string(own) +
                        " frames; cannot broadcast to " + std::to_string(driving_count));
    FrameBlock out;
    for (uint64_t j = 0; j < count; ++j) {
        FrameBlock one = container.read_frames(view.pattern_name, (start + j) % own, 1, pads);
        if (j == 0) {
            out = std::move(one);
            out.values.reserve(out.frame_elems() * count);
        } else {
            out.values.insert(out.values.end(), one.values.begin(), one.values.end());
        }
    }
    out.frames = count;
    return out;
}

struct OutBinding {
    OutDataset decl;
    std::shared_ptr<Container> container;
    Pattern write_pattern;
    std::vector<uint64_t> window;  // unpadded frame window
};

void execute_processing(RunContext& ctx, const PluginRegistry& registry, SaverPlugin& saver,
                        const ProcessList& list, size_t pos, const PluginEntry& entry,
                        RunManifest& manifest) {
    const PluginSpec& spec = registry.spec(entry.name);
    const Params params = spec.with_defaults(entry.params);
    auto plugin = registry.make_processing(entry.name);

    TimedScope setup_scope(ctx);

    const auto ins = merged_in_datasets(spec, entry);
    std::vector<DatasetDescriptor> in_descs;
    std::vector<std::shared_ptr<Container>> in_handles;
    for (const auto& name : ins) {
        const auto& ds = ctx.dataset(name);
        in_descs.push_back(ds.descriptor);
        in_handles.push_back(ds.container);
    }

    PluginSetup setup = plugin->setup(params, in_descs);
    if (setup.in_views.size() != ins.size())
        throw Error(Errc::plugin_failure,
                    "'" + entry.name + "' bound " + std::to_string(setup.in_views.size()) +
                        " views for " + std::to_string(ins.size()) + " in_datasets");
    for (size_t i = 0; i < ins.size(); ++i) {
        setup.in_views[i].dataset_name = ins[i];
        setup.in_views[i].validate_against(in_descs[i]);
    }

    // Same pattern name bound to several datasets in one plugin must agree on
    // the number of core dimensions.
    std::map<std::string, size_t> core_ranks;
    auto note_core_rank = [&](const DatasetDescriptor& d, const std::string& pattern_name) {
        const size_t rank = d.pattern(pattern_name).core_dims.size();
        auto [it, inserted] = core_ranks.try_emplace(pattern_name, rank);
        if (!inserted && it->second != rank)
            throw Error(Errc::ndims_mismatch,
                        "pattern '" + pattern_name + "' binds datasets with " +
                            std::to_string(it->second) + " and " + std::to_string(rank) +
                            " core dimensions");
    };
    for (size_t i = 0; i < ins.size(); ++i) note_core_rank(in_descs[i], setup.in_views[i].pattern_name);
    for (const auto& out : setup.outputs) note_core_rank(out.descriptor, out.write_pattern);

    const auto& view0 = setup.in_views[0];
    const uint64_t driving = frame_count(in_descs[0], view0.pattern_name);
    for (size_t i = 1; i < ins.size(); ++i) {
        const uint64_t own = frame_count(in_descs[i], setup.in_views[i].pattern_name);
        if (own != driving && (own == 0 || driving % own != 0))
            throw Error(Errc::shape_mismatch,
                        "in_dataset '" + ins[i] + "' frame count " + std::to_string(own) +
                            " incompatible with " + std::to_string(driving));
    }

    // Create one container per output, chunked for its now/next pattern pair.
    ManifestPluginRecord rec{entry.index, entry.name, params, {}};
    std::vector<OutBinding> outs;
    for (const auto& out : setup.outputs) {
        out.descriptor.validate();
        const Pattern& now = out.descriptor.pattern(out.write_pattern);
        if (frame_count(out.descriptor, out.write_pattern) != driving)
            throw Error(Errc::plugin_failure,
                        "output '" + out.descriptor.name + "' yields " +
                            std::to_string(frame_count(out.descriptor, out.write_pattern)) +
                            " frames for " + std::to_string(driving) + " input frames");

        // The next consumer's pattern, discovered by forward scan; the
        // producing pattern doubles as "next" for final outputs.
        Pattern next = now;
        for (size_t j = pos + 1; j < list.plugins.size(); ++j) {
            const auto& later = list.plugins[j];
            if (!later.active || !registry.contains(later.name)) continue;
            const PluginSpec& later_spec = registry.spec(later.name);
            if (later_spec.kind != PluginKind::Processing) continue;
            const auto later_ins = merged_in_datasets(later_spec, later);
            auto hit = std::find(later_ins.begin(), later_ins.end(), out.descriptor.name);
            if (hit == later_ins.end()) continue;
            const size_t arg = hit - later_ins.begin();
            const auto plan = registry.make_processing(later.name)->symbolic_plan(
                later_spec.with_defaults(later.params));
            if (arg < plan.in_patterns.size()) {
                auto it = out.descriptor.patterns.find(plan.in_patterns[arg]);
                if (it != out.descriptor.patterns.end()) next = it->second;
            }
            break;
        }

        auto inputs = OptimizerInputs::make(out.descriptor.shape,
                                            dtype_bytes(out.descriptor.dtype), now, next,
                                            out.frames_per_call, ctx.options().n_workers,
                                            ctx.options().budget_bytes);
        ChunkPlan plan = optimize_chunks(inputs);
        if (ctx.options().chunk_mode == ChunkMode::TransposedWorst) {
            std::reverse(plan.chunk_shape.begin(), plan.chunk_shape.end());
            for (size_t d = 0; d < plan.chunk_shape.size(); ++d)
                plan.chunk_shape[d] =
                    std::clamp<uint64_t>(plan.chunk_shape[d], 1, out.descriptor.shape[d]);
        }

        const bool intermediate =
            replaced_later(registry, list, pos, out.descriptor.name, ctx.options().data_paths);
        const fs::path dir = intermediate && ctx.options().intermediate_dir
                                 ? *ctx.options().intermediate_dir
                                 : ctx.options().output_dir;
        const fs::path path =
            dir / ("p" + std::to_string(entry.index) + "_" + out.descriptor.name + ".cnt");

        OutBinding binding;
        binding.decl = out;
        binding.container = saver.create(path, out.descriptor, plan.chunk_shape);
        binding.write_pattern = now;
        binding.window.resize(out.descriptor.ndims());
        for (size_t d = 0; d < out.descriptor.ndims(); ++d)
            binding.window[d] = now.is_core(d) ? out.descriptor.shape[d] : 1;
        ctx.track_container(binding.container);
        rec.outputs.push_back({out.descriptor.name, path.string(), intermediate});
        outs.push_back(std::move(binding));
    }
    ctx.log().append(setup_scope.event(0, entry.index, entry.name, Phase::Setup));

    {
        TimedScope pre_scope(ctx);
        plugin->pre_process();
        ctx.log().append(pre_scope.event(0, entry.index, entry.name, Phase::Pre));
    }

    const auto active = gate_workers(spec.driver, ctx.options().n_workers,
                                     ctx.options().n_accelerators);
    const Partition partition = partition_frames(driving, static_cast<int>(active.size()));

    std::mutex error_mutex;
    std::exception_ptr first_error;
    auto worker_body = [&](int worker, FrameRange range) {
        try {
            const uint64_t m = std::max<uint64_t>(1, view0.frames_per_call);
            for (uint64_t s = range.begin; s < range.end; s += m) {
                const uint64_t cnt = std::min(m, range.end - s);
                TimedScope process_scope(ctx);
                std::vector<FrameBlock> in_blocks;
                in_blocks.reserve(ins.size());
                for (size_t i = 0; i < ins.size(); ++i)
                    in_blocks.push_back(
                        read_view(*in_handles[i], setup.in_views[i], driving, s, cnt));
                std::vector<FrameBlock> out_blocks;
                out_blocks.reserve(outs.size());
                for (const auto& out : outs)
                    out_blocks.push_back(FrameBlock::zeros(cnt, out.window));

                plugin->process(ProcessCall{worker, s, cnt}, in_blocks, out_blocks);
                ctx.log().append(
                    process_scope.event(worker, entry.index, entry.name, Phase::Process, cnt));

                TimedScope write_scope(ctx);
                for (size_t k = 0; k < outs.size(); ++k)
                    outs[k].container->write_frames(outs[k].write_pattern, s, out_blocks[k]);
                ctx.log().append(
                    write_scope.event(worker, entry.index, entry.name, Phase::Write, cnt));
            }
        } catch (...) {
            std::lock_guard<std::mutex> guard(error_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    };

    // Workers start after setup/pre (start barrier) and are all joined
    // before post runs (end barrier).
    std::vector<std::thread> threads;
    for (size_t w = 0; w < active.size(); ++w)
        threads.emplace_back(worker_body, active[w], partition.ranges[w]);
    for (auto& t : threads) t.join();
    if (first_error) {
        try {
            std::rethrow_exception(first_error);
        } catch (const std::exception& e) {
            throw Error(Errc::plugin_failure, "plugin " + std::to_string(entry.index) + " ('" +
                                                  entry.name + "') failed: " + e.what());
        }
    }

    {
        TimedScope post_scope(ctx);
        plugin->post_process();
        ctx.log().append(post_scope.event(0, entry.index, entry.name, Phase::Post));
    }

    // Outputs become the available datasets; name collisions replace their
    // predecessor.
    for (auto& out : outs)
        ctx.publish_dataset(out.decl.descriptor.name,
                            LoadedDataset{out.decl.descriptor, out.container});
    manifest.plugins.push_back(std::move(rec));
}

}  // namespace

RunResult run_chain(const ProcessList& list, const RunOptions& options) {
    auto& registry = PluginRegistry::instance();
    {
        const auto report = check_plugin_list(list, registry, options.data_paths);
        if (!report.empty())
            throw Error(Errc::invalid_inputs,
                        "process list failed validation: [" + report.front().code + "] " +
                            report.front().message);
    }

    fs::create_directories(options.output_dir);
    if (options.intermediate_dir) fs::create_directories(*options.intermediate_dir);

    RunContext ctx(options);
    RunResult result;
    RunManifest& manifest = result.manifest;
    manifest.run_id = fresh_run_id();
    manifest.input_paths = options.data_paths;

    // The saver is instantiated right after the loaders and retained for the
    // whole chain; every output container is created through it.
    std::unique_ptr<SaverPlugin> saver;
    const PluginEntry* saver_entry = nullptr;
    for (const auto& e : list.plugins)
        if (e.active && registry.contains(e.name) &&
            registry.spec(e.name).kind == PluginKind::Saver)
            saver_entry = &e;

    try {
        size_t loader_ordinal = 0;
        for (size_t pos = 0; pos < list.plugins.size(); ++pos) {
            const auto& entry = list.plugins[pos];
            if (!entry.active) continue;
            const PluginSpec& spec = registry.spec(entry.name);

            if (spec.kind != PluginKind::Loader && !saver && saver_entry) {
                TimedScope saver_scope(ctx);
                saver = registry.make_saver(saver_entry->name);
                ctx.log().append(saver_scope.event(0, saver_entry->index, saver_entry->name,
                                                   Phase::Setup));
            }

            try {
                if (spec.kind == PluginKind::Loader) {
                    TimedScope load_scope(ctx);
                    const Params params = spec.with_defaults(entry.params);
                    auto loader = registry.make_loader(entry.name);
                    std::optional<std::string> data_path;
                    if (loader_ordinal < options.data_paths.size())
                        data_path = options.data_paths[loader_ordinal];
                    ++loader_ordinal;
                    const fs::path scratch =
                        options.intermediate_dir ? *options.intermediate_dir : options.output_dir;
                    ManifestPluginRecord rec{entry.index, entry.name, params, {}};
                    for (auto& ds : loader->load(params, data_path, scratch,
                                                 options.budget_bytes)) {
                        const std::string name = ds.descriptor.name;
                        ctx.track_container(ds.container);
                        rec.outputs.push_back(
                            {name, ds.container->path().string(),
                             replaced_later(registry, list, pos, name, options.data_paths)});
                        ctx.add_dataset(name, std::move(ds));
                    }
                    manifest.plugins.push_back(std::move(rec));
                    ctx.log().append(load_scope.event(0, entry.index, entry.name, Phase::Load));
                } else if (spec.kind == PluginKind::Saver) {
                    manifest.plugins.push_back(ManifestPluginRecord{
                        entry.index, entry.name, spec.with_defaults(entry.params), {}});
                } else {
                    if (!saver)
                        throw Error(Errc::plugin_failure, "no saver available for outputs");
                    execute_processing(ctx, registry, *saver, list, pos, entry, manifest);
                }
            } catch (const Error& e) {
                if (e.code() == Errc::plugin_failure) throw;
                throw Error(Errc::plugin_failure, "plugin " + std::to_string(entry.index) +
                                                      " ('" + entry.name + "'): " + e.what());
            } catch (const std::exception& e) {
                throw Error(Errc::plugin_failure, "plugin " + std::to_string(entry.index) +
                                                      " ('" + entry.name + "'): " + e.what());
            }
            result.available_after.push_back(ctx.dataset_names());
        }

        for (const auto& name : ctx.dataset_names())
            manifest.final_outputs.push_back(
                {name, ctx.dataset(name).container->path().string(), false});
    } catch (const Error& e) {
        manifest.error = e.what();
        try {
            if (!manifest.plugins.empty()) write_manifest(manifest, options.output_dir);
        } catch (...) {
        }
        throw;
    }

    result.totals = ctx.total_stats();
    result.manifest_path = write_manifest(manifest, options.output_dir);
    if (options.log_path) ctx.log().write_file(*options.log_path);
    result.events = ctx.log().events();
    return result;
}

}  // namespace oocpipe
