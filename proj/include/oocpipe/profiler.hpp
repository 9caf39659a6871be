#pragma once

#include <string>
#include <vector>

#include "oocpipe/event_log.hpp"

namespace oocpipe {

struct ProfileRow {
    int worker = 0;
    int plugin_index = 0;
    std::string plugin_name;
    Phase phase = Phase::Process;
    uint64_t start_us = 0;
    uint64_t duration_us = 0;
};

// Parses and validates a run log: rows are grouped per worker and
// time-ordered; lifecycle violations raise MalformedLog naming the line.
std::vector<ProfileRow> parse_profile(const std::vector<LogEvent>& events);

// One lane per worker, per-plugin spans scaled to the total runtime, with
// per-plugin/phase duration totals underneath.
std::string render_profile_text(const std::vector<ProfileRow>& rows, size_t lane_width = 72);

// Machine form: one CSV row per event.
std::string render_profile_csv(const std::vector<ProfileRow>& rows);

}  // namespace oocpipe
