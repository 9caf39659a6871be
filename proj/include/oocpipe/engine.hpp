#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "oocpipe/chunk_optimizer.hpp"
#include "oocpipe/container.hpp"
#include "oocpipe/event_log.hpp"
#include "oocpipe/manifest.hpp"
#include "oocpipe/plugin.hpp"
#include "oocpipe/process_list.hpp"

namespace oocpipe {

// ---------------------------------------------------------------------------
// Worker partitioning and driver gating
// ---------------------------------------------------------------------------

struct FrameRange {
    uint64_t begin = 0;
    uint64_t end = 0;
    uint64_t size() const { return end - begin; }
};

struct Partition {
    std::vector<FrameRange> ranges;     // one per worker, contiguous, sizes differ by <= 1
    uint64_t frames_per_worker = 1;     // f_p = ceil(frame_count / n_workers)
};

Partition partition_frames(uint64_t frame_count, int n_workers);

// Worker ids allowed to execute a plugin: all of them for CPU plugins, the
// first min(n_workers, n_accelerators) for accelerator plugins.
std::vector<int> gate_workers(Driver driver, int n_workers, int n_accelerators);

// ---------------------------------------------------------------------------
// Process-list validation
// ---------------------------------------------------------------------------

struct CheckEntry {
    int plugin_index = 0;
    std::string code;  // "unknown-plugin", "count-mismatch", "unknown-dataset",
                       // "missing-pattern", "loader-order", "saver-missing"
    std::string message;
};
using CheckReport = std::vector<CheckEntry>;

// Symbolically walks the chain without touching data: tracks the available
// dataset names (and their declared patterns) through loader creation and
// out-dataset replacement, reporting every inconsistency it finds. The
// loader_declared map carries, per loader entry index, the datasets that
// loader will create.
CheckReport check_plugin_list(const ProcessList& list,
                              const std::map<int, std::vector<SymbolicDataset>>& loader_declared,
                              const PluginRegistry& registry);

// Convenience wrapper deriving loader declarations from the registry;
// data_paths are assigned to loaders positionally, as during a run.
CheckReport check_plugin_list(const ProcessList& list, const PluginRegistry& registry,
                              const std::vector<std::string>& data_paths = {});

// The available-name evolution the symbolic walk predicts: one snapshot per
// active entry, taken after the entry completes.
std::vector<std::set<std::string>> symbolic_available_sets(
    const ProcessList& list, const PluginRegistry& registry,
    const std::vector<std::string>& data_paths = {});

// ---------------------------------------------------------------------------
// Run context and chain execution
// ---------------------------------------------------------------------------

enum class ChunkMode {
    Optimized,        // optimize_chunks on the (now, next) pattern pair
    TransposedWorst,  // the optimized plan reversed: deliberately misaligned
};

struct RunOptions {
    std::vector<std::string> data_paths;
    std::filesystem::path output_dir;
    std::optional<std::filesystem::path> intermediate_dir;
    int n_workers = 1;
    int n_accelerators = 0;
    uint64_t budget_bytes = 1'000'000;
    std::optional<std::filesystem::path> log_path;
    ChunkMode chunk_mode = ChunkMode::Optimized;
};

// The engine's live dataset table plus everything shared across plugins
// during one run.
class RunContext {
  public:
    explicit RunContext(RunOptions options);

    const RunOptions& options() const { return options_; }

    // Registers a brand-new dataset; the name must be free.
    void add_dataset(const std::string& name, LoadedDataset dataset);
    // Swaps a fully-written replacement in for an existing dataset of the
    // same name; the old container is closed but stays on disk.
    void replace_dataset(const std::string& name, LoadedDataset replacement);
    void publish_dataset(const std::string& name, LoadedDataset dataset);

    bool has_dataset(const std::string& name) const;
    const LoadedDataset& dataset(const std::string& name) const;  // UnknownDataset
    std::set<std::string> dataset_names() const;

    // Every container this run has created or opened, for whole-run I/O
    // accounting.
    void track_container(const std::shared_ptr<Container>& c);
    StorageStats total_stats() const;

    EventLog& log() { return log_; }
    uint64_t now_us() const;

  private:
    RunOptions options_;
    std::map<std::string, LoadedDataset> datasets_;
    std::vector<std::shared_ptr<Container>> all_containers_;
    EventLog log_;
    std::chrono::steady_clock::time_point start_;
};

struct RunResult {
    RunManifest manifest;
    std::filesystem::path manifest_path;
    StorageStats totals;
    std::vector<LogEvent> events;
    // Available-name snapshots after each active entry, in execution order.
    std::vector<std::set<std::string>> available_after;
};

// Executes a validated chain: loaders register datasets, the saver creates
// every output container (chunked by the optimizer on the producing and
// next-consuming patterns), each processing plugin runs its lifecycle over
// partitioned frames, and the manifest links everything at the end. Throws
// Error(PluginFailure) when a plugin aborts; the manifest on disk then
// records the progress so far.
RunResult run_chain(const ProcessList& list, const RunOptions& options);

}  // namespace oocpipe
