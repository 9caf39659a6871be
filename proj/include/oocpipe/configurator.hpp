#pragma once

#include <filesystem>
#include <string>

#include "oocpipe/plugin.hpp"
#include "oocpipe/process_list.hpp"

namespace oocpipe {

// Non-interactive process-list editing; every command rewrites the file,
// which is the single source of truth.
namespace config {

void new_list(const std::filesystem::path& file);

// Appends the plugin with its declared parameter defaults.
void add_plugin(const std::filesystem::path& file, const std::string& plugin_name,
                const PluginRegistry& registry);

// 1-based index; remaining entries are re-indexed contiguously.
void remove_plugin(const std::filesystem::path& file, int index);

// Moves the entry at `from` to position `to` (both 1-based).
void move_plugin(const std::filesystem::path& file, int from, int to);

// Sets one parameter; the value string is parsed as JSON when possible and
// kept as a plain string otherwise. Unknown names are rejected for plugins
// that declare a schema.
void set_param(const std::filesystem::path& file, int index, const std::string& param,
               const std::string& value, const PluginRegistry& registry);

std::string show(const std::filesystem::path& file);

}  // namespace config

}  // namespace oocpipe
