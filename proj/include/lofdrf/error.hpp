#pragma once

#include <stdexcept>
#include <string>

namespace lofdrf {

// Bad user input: missing files, malformed data, out-of-range parameters.
// The CLI maps this to exit code 2.
struct InputError : std::runtime_error {
  explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// Internal failures: unwritable outputs, broken invariants mid-run.
// The CLI maps this (and any other exception) to exit code 3.
struct RuntimeError : std::runtime_error {
  explicit RuntimeError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace lofdrf
