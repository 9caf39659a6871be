#include "oocpipe/event_log.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "oocpipe/error.hpp"

namespace oocpipe {

const char* phase_name(Phase p) {
    switch (p) {
        case Phase::Load: return "load";
        case Phase::Setup: return "setup";
        case Phase::Pre: return "pre";
        case Phase::Process: return "process";
        case Phase::Write: return "write";
        case Phase::Post: return "post";
    }
    return "?";
}

Phase phase_from_name(const std::string& name) {
    for (Phase p : {Phase::Load, Phase::Setup, Phase::Pre, Phase::Process, Phase::Write,
                    Phase::Post})
        if (name == phase_name(p)) return p;
    throw Error(Errc::malformed_log, "unknown phase '" + name + "'");
}

std::string format_event(const LogEvent& e) {
    std::ostringstream out;
    out << e.timestamp_us << '\t' << e.worker << '\t' << e.plugin_index << '\t' << e.plugin_name
        << '\t' << phase_name(e.phase) << '\t' << e.frames << '\t' << e.duration_us;
    return out.str();
}

LogEvent parse_event(const std::string& line) {
    std::vector<std::string> fields;
    size_t pos = 0;
    while (true) {
        size_t tab = line.find('\t', pos);
        fields.push_back(line.substr(pos, tab == std::string::npos ? tab : tab - pos));
        if (tab == std::string::npos) break;
        pos = tab + 1;
    }
    if (fields.size() != 7)
        throw Error(Errc::malformed_log,
                    "expected 7 tab-separated fields, got " + std::to_string(fields.size()));
    LogEvent e;
    try {
        e.timestamp_us = std::stoull(fields[0]);
        e.worker = std::stoi(fields[1]);
        e.plugin_index = std::stoi(fields[2]);
        e.plugin_name = fields[3];
        e.phase = phase_from_name(fields[4]);
        e.frames = std::stoull(fields[5]);
        e.duration_us = std::stoull(fields[6]);
    } catch (const std::logic_error&) {
        throw Error(Errc::malformed_log, "non-numeric field in '" + line + "'");
    }
    return e;
}

void EventLog::append(LogEvent e) {
    std::lock_guard<std::mutex> guard(mutex_);
    events_.push_back(std::move(e));
}

std::vector<LogEvent> EventLog::events() const {
    std::lock_guard<std::mutex> guard(mutex_);
    return events_;
}

void EventLog::write_file(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw Error(Errc::io_failure, "cannot write '" + path.string() + "'");
    for (const auto& e : events()) out << format_event(e) << "\n";
}

std::vector<LogEvent> EventLog::read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::io_failure, "cannot read '" + path.string() + "'");
    std::vector<LogEvent> events;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        events.push_back(parse_event(line));
    }
    return events;
}

bool lifecycle_ordered(const std::vector<LogEvent>& events, size_t* offending) {
    struct State {
        int last_rank = -1;
        int posts = 0;
    };
    std::map<std::pair<int, int>, State> states;  // (worker, plugin index)
    for (size_t i = 0; i < events.size(); ++i) {
        const auto& e = events[i];
        auto& st = states[{e.worker, e.plugin_index}];
        const int rank = static_cast<int>(e.phase);
        const bool loop_back =
            st.last_rank == static_cast<int>(Phase::Write) && e.phase == Phase::Process;
        if ((rank < st.last_rank && !loop_back) || st.posts > 0) {
            if (offending) *offending = i;
            return false;
        }
        if (e.phase == Phase::Post) ++st.posts;
        st.last_rank = rank;
    }
    return true;
}

}  // namespace oocpipe
