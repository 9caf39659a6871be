#include "oocpipe/profiler.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "oocpipe/error.hpp"

namespace oocpipe {

std::vector<ProfileRow> parse_profile(const std::vector<LogEvent>& events) {
    size_t offending = 0;
    if (!lifecycle_ordered(events, &offending))
        throw Error(Errc::malformed_log,
                    "out-of-order lifecycle at line " + std::to_string(offending + 1) + ": " +
                        format_event(events[offending]));
    std::vector<ProfileRow> rows;
    rows.reserve(events.size());
    for (const auto& e : events)
        rows.push_back({e.worker, e.plugin_index, e.plugin_name, e.phase, e.timestamp_us,
                        e.duration_us});
    std::stable_sort(rows.begin(), rows.end(), [](const ProfileRow& a, const ProfileRow& b) {
        if (a.worker != b.worker) return a.worker < b.worker;
        return a.start_us < b.start_us;
    });
    return rows;
}

std::string render_profile_text(const std::vector<ProfileRow>& rows, size_t lane_width) {
    std::ostringstream out;
    if (rows.empty()) {
        out << "no events\n";
        return out.str();
    }
    uint64_t total = 1;
    for (const auto& r : rows) total = std::max(total, r.start_us + r.duration_us);

    std::map<int, std::string> lanes;
    for (const auto& r : rows) {
        auto [it, inserted] = lanes.try_emplace(r.worker, std::string(lane_width, '.'));
        auto& lane = it->second;
        size_t lo = size_t(double(r.start_us) / double(total) * double(lane_width));
        size_t hi = size_t(double(r.start_us + r.duration_us) / double(total) *
                           double(lane_width));
        lo = std::min(lo, lane_width - 1);
        hi = std::min(std::max(hi, lo + 1), lane_width);
        const char mark = char('0' + r.plugin_index % 10);
        for (size_t i = lo; i < hi; ++i) lane[i] = mark;
    }
    out << "total " << total << " us; lanes marked by plugin index\n";
    for (const auto& [worker, lane] : lanes) out << "w" << worker << " |" << lane << "|\n";

    // Per worker/plugin/phase totals.
    std::map<std::tuple<int, int, std::string, Phase>, uint64_t> totals;
    for (const auto& r : rows) totals[{r.worker, r.plugin_index, r.plugin_name, r.phase}] +=
        r.duration_us;
    for (const auto& [key, us] : totals) {
        const auto& [worker, index, name, phase] = key;
        out << "  w" << worker << " p" << index << " " << name << " " << phase_name(phase) << " "
            << us << " us\n";
    }
    return out.str();
}

std::string render_profile_csv(const std::vector<ProfileRow>& rows) {
    std::ostringstream out;
    out << "worker,plugin_index,plugin_name,phase,start_us,duration_us\n";
    for (const auto& r : rows)
        out << r.worker << ',' << r.plugin_index << ',' << r.plugin_name << ','
            << phase_name(r.phase) << ',' << r.start_us << ',' << r.duration_us << "\n";
    return out.str();
}

}  // namespace oocpipe
