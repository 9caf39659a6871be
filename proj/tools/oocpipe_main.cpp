#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include "oocpipe/configurator.hpp"
#include "oocpipe/engine.hpp"
#include "oocpipe/profiler.hpp"

using namespace oocpipe;

namespace {

std::vector<uint64_t> parse_extents(const std::string& csv) {
    std::vector<uint64_t> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoull(item));
    return out;
}

// "core=2,1;slice=0" -> Pattern
Pattern parse_pattern(const std::string& text, const std::string& name) {
    Pattern p;
    p.name = name;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ';')) {
        const auto eq = part.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = part.substr(0, eq);
        std::vector<size_t> dims;
        for (uint64_t v : parse_extents(part.substr(eq + 1))) dims.push_back(size_t(v));
        if (key == "core")
            p.core_dims = dims;
        else if (key == "slice")
            p.slice_dims = dims;
        else
            throw Error(Errc::invalid_inputs, "pattern parts are core=... and slice=...");
    }
    return p;
}

int cmd_run(const std::vector<std::string>& args, int workers, int accelerators,
            const std::string& inter_dir, uint64_t cache_bytes, const std::string& log_file) {
    if (args.size() < 2) {
        std::cerr << "usage: run <data-path>... <process-list> <output-dir>\n";
        return 1;
    }
    RunOptions options;
    options.data_paths.assign(args.begin(), args.end() - 2);
    const std::string list_path = args[args.size() - 2];
    options.output_dir = args.back();
    options.n_workers = workers;
    options.n_accelerators = accelerators;
    options.budget_bytes = cache_bytes;
    if (!inter_dir.empty()) options.intermediate_dir = inter_dir;
    if (!log_file.empty()) options.log_path = log_file;

    const auto list = ProcessList::load(list_path);
    const auto report =
        check_plugin_list(list, PluginRegistry::instance(), options.data_paths);
    if (!report.empty()) {
        std::cerr << "process list check failed:\n";
        for (const auto& e : report)
            std::cerr << "  plugin " << e.plugin_index << " [" << e.code << "] " << e.message
                      << "\n";
        return 2;
    }
    try {
        const auto result = run_chain(list, options);
        std::cout << result.manifest_path.string() << "\n";
        return 0;
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return e.code() == Errc::plugin_failure ? 3 : 1;
    }
}

int cmd_profile(const std::string& log_file, const std::string& format) {
    const auto events = EventLog::read_file(log_file);
    if (events.empty()) {
        std::cout << "no events\n";
        return 0;
    }
    const auto rows = parse_profile(events);
    std::cout << (format == "csv" ? render_profile_csv(rows) : render_profile_text(rows));
    return 0;
}

int cmd_chunks_explain(const std::string& shape_csv, const std::string& dtype_name,
                       const std::string& now_text, const std::string& next_text, uint64_t f,
                       int workers, uint64_t cache_bytes) {
    const auto shape = parse_extents(shape_csv);
    const DType dtype = dtype_from_name(dtype_name);
    const Pattern now = parse_pattern(now_text, "now");
    const Pattern next = next_text.empty() ? now : parse_pattern(next_text, "next");
    const auto inputs =
        OptimizerInputs::make(shape, dtype_bytes(dtype), now, next, f, workers, cache_bytes);

    const auto plans = initial_values(inputs);
    std::cout << "dim  extent  class        c0      beta_u  step  adjustable\n";
    for (size_t d = 0; d < plans.size(); ++d) {
        const auto& p = plans[d];
        std::printf("%-4zu %-7llu %-12s %-7llu %-7llu %-5llu %s\n", d,
                    (unsigned long long)shape[d], dim_class_name(p.cls),
                    (unsigned long long)p.start, (unsigned long long)p.upper,
                    (unsigned long long)p.step, p.adjustable ? "yes" : "no");
    }
    const bool increasing = [&] {
        unsigned __int128 bytes = inputs.element_bytes;
        for (size_t d = 0; d < plans.size(); ++d)
            bytes *= std::min<uint64_t>(plans[d].start, shape[d]);
        return bytes <= inputs.budget_bytes;
    }();
    std::cout << (increasing ? "increase" : "decrease") << " order:";
    for (size_t d : visit_order(now, next, increasing)) std::cout << " " << d;
    std::cout << "\n";

    const auto plan = optimize_chunks(inputs);
    std::cout << "chunk shape:";
    for (uint64_t e : plan.chunk_shape) std::cout << " " << e;
    std::cout << "\nchunk bytes: " << plan.chunk_bytes << " (budget " << inputs.budget_bytes
              << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"out-of-core chunked pipeline runner"};
    app.require_subcommand(1);

    // --- config ---
    auto* config_cmd = app.add_subcommand("config", "edit process lists");
    config_cmd->require_subcommand(1);
    std::string cfg_file, cfg_plugin, cfg_param, cfg_value;
    int cfg_index = 0, cfg_to = 0;

    auto* c_new = config_cmd->add_subcommand("new", "create an empty list");
    c_new->add_option("file", cfg_file)->required();
    auto* c_add = config_cmd->add_subcommand("add", "append a plugin with default parameters");
    c_add->add_option("file", cfg_file)->required();
    c_add->add_option("plugin", cfg_plugin)->required();
    auto* c_remove = config_cmd->add_subcommand("remove", "remove the entry at an index");
    c_remove->add_option("file", cfg_file)->required();
    c_remove->add_option("index", cfg_index)->required();
    auto* c_move = config_cmd->add_subcommand("move", "move an entry to a new position");
    c_move->add_option("file", cfg_file)->required();
    c_move->add_option("from", cfg_index)->required();
    c_move->add_option("to", cfg_to)->required();
    auto* c_set = config_cmd->add_subcommand("set", "set one parameter of an entry");
    c_set->add_option("file", cfg_file)->required();
    c_set->add_option("index", cfg_index)->required();
    c_set->add_option("param", cfg_param)->required();
    c_set->add_option("value", cfg_value)->required();
    auto* c_show = config_cmd->add_subcommand("show", "print the list");
    c_show->add_option("file", cfg_file)->required();

    // --- run ---
    auto* run_cmd = app.add_subcommand("run", "execute a processing chain");
    std::vector<std::string> run_args;
    int workers = 1, accelerators = 0;
    std::string inter_dir, log_file;
    uint64_t cache_bytes = 1'000'000;
    run_cmd->add_option("args", run_args, "<data-path>... <process-list> <output-dir>");
    run_cmd->add_option("--workers", workers, "worker count")->check(CLI::PositiveNumber);
    run_cmd->add_option("--accelerators", accelerators, "accelerator count");
    run_cmd->add_option("--inter-dir", inter_dir, "directory for intermediate containers");
    run_cmd->add_option("--cache-bytes", cache_bytes, "chunk byte budget M");
    run_cmd->add_option("--log", log_file, "write the event log here");

    // --- profile ---
    auto* profile_cmd = app.add_subcommand("profile", "render an event log");
    std::string profile_log, profile_format = "text";
    profile_cmd->add_option("log", profile_log)->required();
    profile_cmd->add_option("--format", profile_format)
        ->check(CLI::IsMember({"text", "csv"}));

    // --- chunks ---
    auto* chunks_cmd = app.add_subcommand("chunks", "chunk-shape utilities");
    chunks_cmd->require_subcommand(1);
    auto* explain_cmd = chunks_cmd->add_subcommand("explain", "show the optimizer's choice");
    std::string ce_shape, ce_dtype = "f32", ce_now, ce_next;
    uint64_t ce_f = 1, ce_cache = 1'000'000;
    int ce_workers = 1;
    explain_cmd->add_option("--shape", ce_shape, "extents, e.g. 180,128,160")->required();
    explain_cmd->add_option("--dtype", ce_dtype, "u16|f32|f64");
    explain_cmd->add_option("--now", ce_now, "writing pattern, e.g. core=2,1;slice=0")->required();
    explain_cmd->add_option("--next", ce_next, "next consumer's pattern (defaults to --now)");
    explain_cmd->add_option("--f", ce_f, "frames per call");
    explain_cmd->add_option("--workers", ce_workers, "worker count");
    explain_cmd->add_option("--cache-bytes", ce_cache, "chunk byte budget M");

    CLI11_PARSE(app, argc, argv);

    try {
        auto& registry = PluginRegistry::instance();
        if (c_new->parsed()) {
            config::new_list(cfg_file);
        } else if (c_add->parsed()) {
            config::add_plugin(cfg_file, cfg_plugin, registry);
        } else if (c_remove->parsed()) {
            config::remove_plugin(cfg_file, cfg_index);
        } else if (c_move->parsed()) {
            config::move_plugin(cfg_file, cfg_index, cfg_to);
        } else if (c_set->parsed()) {
            config::set_param(cfg_file, cfg_index, cfg_param, cfg_value, registry);
        } else if (c_show->parsed()) {
            std::cout << config::show(cfg_file);
        } else if (run_cmd->parsed()) {
            return cmd_run(run_args, workers, accelerators, inter_dir, cache_bytes, log_file);
        } else if (profile_cmd->parsed()) {
            return cmd_profile(profile_log, profile_format);
        } else if (explain_cmd->parsed()) {
            return cmd_chunks_explain(ce_shape, ce_dtype, ce_now, ce_next, ce_f, ce_workers,
                                      ce_cache);
        }
        return 0;
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return e.code() == Errc::plugin_failure ? 3 : 1;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
}
