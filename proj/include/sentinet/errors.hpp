#pragma once
#include <stdexcept>
#include <string>

namespace sentinet {

// Bad user input: malformed JSON/CSV, invalid fields, missing files.
// The CLI maps this to exit code 1.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Failure while executing a well-formed request (search found nothing,
// retry budget exhausted, output not writable). CLI exit code 2.
struct RunError : std::runtime_error {
  explicit RunError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace sentinet
