#pragma once

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

namespace oocpipe {

// Lifecycle phases, in order. Loaders emit `load`; processing plugins emit
// setup, pre, then process/write per batch (process covers fetching the
// batch plus the plugin hook), and post once after the end barrier.
enum class Phase : uint8_t { Load, Setup, Pre, Process, Write, Post };

const char* phase_name(Phase p);
Phase phase_from_name(const std::string& name);  // throws MalformedLog

struct LogEvent {
    uint64_t timestamp_us = 0;  // since run start
    int worker = 0;
    int plugin_index = 0;
    std::string plugin_name;
    Phase phase = Phase::Process;
    uint64_t frames = 0;
    uint64_t duration_us = 0;
};

// Tab-separated, one event per line, fields in declaration order.
std::string format_event(const LogEvent& e);
LogEvent parse_event(const std::string& line);  // throws MalformedLog

// Append-only, serialized sink shared by all workers.
class EventLog {
  public:
    void append(LogEvent e);
    std::vector<LogEvent> events() const;
    void write_file(const std::filesystem::path& path) const;

    static std::vector<LogEvent> read_file(const std::filesystem::path& path);

  private:
    mutable std::mutex mutex_;
    std::vector<LogEvent> events_;
};

// Checks that, per (worker, plugin), phases advance in lifecycle order; the
// only backward step allowed is write -> process (the batch loop), and post
// may appear at most once. On failure returns false and reports the first
// offending event's position (0-based) in `offending`.
bool lifecycle_ordered(const std::vector<LogEvent>& events, size_t* offending = nullptr);

}  // namespace oocpipe
