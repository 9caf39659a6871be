#pragma once

#include <optional>
#include <utility>

#include "oocpipe/error.hpp"

namespace testsup {

// Runs f and reports the library error code it threw, if any.
template <typename F>
std::optional<oocpipe::Errc> thrown_code(F&& f) {
    try {
        std::forward<F>(f)();
    } catch (const oocpipe::Error& e) {
        return e.code();
    }
    return std::nullopt;
}

}  // namespace testsup
