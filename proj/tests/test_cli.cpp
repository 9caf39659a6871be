#include <doctest.h>

#include <sstream>

#include "oocpipe/configurator.hpp"
#include "oocpipe/event_log.hpp"
#include "oocpipe/profiler.hpp"
#include "test_common.hpp"
#include "test_support.hpp"

using namespace oocpipe;
using testsup::TempDir;
using testsup::thrown_code;

namespace {

LogEvent ev(uint64_t ts, int worker, int index, const char* name, Phase phase, uint64_t frames,
            uint64_t dur) {
    return LogEvent{ts, worker, index, name, phase, frames, dur};
}

}  // namespace

TEST_CASE("log lines round-trip through format and parse") {
    const LogEvent e = ev(1234, 2, 3, "minus_log", Phase::Write, 8, 567);
    const auto line = format_event(e);
    CHECK(line == "1234\t2\t3\tminus_log\twrite\t8\t567");
    const auto back = parse_event(line);
    CHECK(back.timestamp_us == 1234);
    CHECK(back.worker == 2);
    CHECK(back.plugin_index == 3);
    CHECK(back.plugin_name == "minus_log");
    CHECK(back.phase == Phase::Write);
    CHECK(back.frames == 8);
    CHECK(back.duration_us == 567);
}

TEST_CASE("malformed lines are rejected") {
    CHECK(thrown_code([] { parse_event("1\t2\t3"); }) == Errc::malformed_log);
    CHECK(thrown_code([] { parse_event("x\t2\t3\tp\tload\t0\t1"); }) == Errc::malformed_log);
    CHECK(thrown_code([] { parse_event("1\t2\t3\tp\tbogus\t0\t1"); }) == Errc::malformed_log);
}

TEST_CASE("lifecycle validation accepts batch loops and rejects reversals") {
    std::vector<LogEvent> good{
        ev(0, 0, 2, "p", Phase::Setup, 0, 1), ev(1, 0, 2, "p", Phase::Pre, 0, 1),
        ev(2, 0, 2, "p", Phase::Process, 2, 1), ev(3, 0, 2, "p", Phase::Write, 2, 1),
        ev(4, 0, 2, "p", Phase::Process, 2, 1), ev(5, 0, 2, "p", Phase::Write, 2, 1),
        ev(6, 0, 2, "p", Phase::Post, 0, 1),
    };
    CHECK(lifecycle_ordered(good));

    std::vector<LogEvent> bad{
        ev(0, 0, 2, "p", Phase::Process, 1, 1),
        ev(1, 0, 2, "p", Phase::Setup, 0, 1),  // setup after process
    };
    size_t offending = 0;
    CHECK_FALSE(lifecycle_ordered(bad, &offending));
    CHECK(offending == 1);

    std::vector<LogEvent> double_post{
        ev(0, 0, 2, "p", Phase::Post, 0, 1),
        ev(1, 0, 2, "p", Phase::Post, 0, 1),
    };
    CHECK_FALSE(lifecycle_ordered(double_post));
}

TEST_CASE("profiler csv totals equal the input sums") {
    std::vector<LogEvent> events{
        ev(0, 0, 1, "loader", Phase::Load, 0, 100),
        ev(100, 0, 2, "p", Phase::Setup, 0, 50),
        ev(150, 0, 2, "p", Phase::Process, 4, 200),
        ev(350, 0, 2, "p", Phase::Write, 4, 75),
        ev(150, 1, 2, "p", Phase::Process, 4, 220),
        ev(370, 1, 2, "p", Phase::Write, 4, 80),
    };
    auto rows = parse_profile(events);
    REQUIRE(rows.size() == events.size());

    uint64_t process_total = 0;
    std::stringstream csv(render_profile_csv(rows));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "worker,plugin_index,plugin_name,phase,start_us,duration_us");
    while (std::getline(csv, line)) {
        if (line.find(",process,") != std::string::npos)
            process_total += std::stoull(line.substr(line.rfind(',') + 1));
    }
    CHECK(process_total == 420);

    // Rows per worker are time-ordered.
    for (size_t i = 1; i < rows.size(); ++i)
        if (rows[i].worker == rows[i - 1].worker) CHECK(rows[i].start_us >= rows[i - 1].start_us);
}

TEST_CASE("profiler rejects out-of-order logs naming the line") {
    std::vector<LogEvent> events{
        ev(0, 0, 2, "p", Phase::Write, 1, 10),
        ev(1, 0, 2, "p", Phase::Pre, 0, 10),
    };
    try {
        parse_profile(events);
        FAIL("expected MalformedLog");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::malformed_log);
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("profiler renders empty input as no events") {
    CHECK(render_profile_text({}) == "no events\n");
}

TEST_CASE("configurator edits round-trip through the file") {
    TempDir tmp("config");
    const auto file = tmp / "list.json";
    auto& registry = PluginRegistry::instance();

    config::new_list(file);
    CHECK(ProcessList::load(file).plugins.empty());

    config::add_plugin(file, "synthetic_tomo_loader", registry);
    config::add_plugin(file, "minus_log", registry);
    config::add_plugin(file, "container_saver", registry);
    auto list = ProcessList::load(file);
    REQUIRE(list.plugins.size() == 3);
    CHECK(list.plugins[1].name == "minus_log");
    CHECK(list.plugins[1].index == 2);
    // Defaults came from the schema.
    CHECK(list.plugins[1].params.at("pattern") == "SINOGRAM");

    config::set_param(file, 2, "in_datasets", "[\"tomo\"]", registry);
    config::set_param(file, 2, "frames", "4", registry);
    list = ProcessList::load(file);
    CHECK(list.plugins[1].params.at("frames") == 4);
    CHECK(list.plugins[1].params.at("in_datasets") == nlohmann::json::array({"tomo"}));

    const auto shown = config::show(file);
    CHECK(shown.find("2: minus_log") != std::string::npos);
    CHECK(shown.find("frames = 4") != std::string::npos);

    config::add_plugin(file, "median_filter_3x3", registry);
    config::move_plugin(file, 4, 3);
    list = ProcessList::load(file);
    CHECK(list.plugins[2].name == "median_filter_3x3");
    CHECK(list.plugins[3].name == "container_saver");
    CHECK(list.plugins[3].index == 4);

    config::remove_plugin(file, 3);
    list = ProcessList::load(file);
    REQUIRE(list.plugins.size() == 3);
    CHECK(list.plugins[2].name == "container_saver");
    CHECK(list.plugins[2].index == 3);
}

TEST_CASE("configurator rejects unknown plugins, bad indices and unknown params") {
    TempDir tmp("config_err");
    const auto file = tmp / "list.json";
    auto& registry = PluginRegistry::instance();
    config::new_list(file);
    CHECK(thrown_code([&] { config::add_plugin(file, "warp_drive", registry); }) ==
          Errc::unknown_plugin);
    config::add_plugin(file, "minus_log", registry);
    CHECK(thrown_code([&] { config::remove_plugin(file, 7); }) == Errc::bad_index);
    CHECK(thrown_code([&] { config::set_param(file, 1, "gamma", "2", registry); }) ==
          Errc::unknown_param);
}
