#pragma once

#include <stdexcept>
#include <string>

namespace oocpipe {

// Every failure the library reports carries one of these codes so callers
// (and tests) can dispatch on the condition instead of parsing messages.
enum class Errc {
    // data model
    overlapping_dims,
    missing_dims,
    dim_out_of_range,
    unknown_pattern,
    ordinal_out_of_range,
    ndims_mismatch,
    // storage
    invalid_chunk_shape,
    io_failure,
    shape_mismatch,
    bad_magic,
    unsupported_version,
    // optimizer
    too_large,
    invalid_inputs,
    // engine
    unknown_dataset,
    unknown_plugin,
    no_accelerators,
    plugin_failure,
    // plugins
    invalid_spec,
    angles_mismatch,
    // cli
    bad_index,
    unknown_param,
    malformed_log,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    Errc code() const { return code_; }

  private:
    Errc code_;
};

}  // namespace oocpipe
