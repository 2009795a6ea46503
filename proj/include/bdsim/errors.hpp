#ifndef BDSIM_ERRORS_HPP
#define BDSIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bdsim {

// Exit codes used by the CLI: 0 success, 2 config error, 3 validation
// error, 4 runtime failure.

// Bad user-supplied configuration (flags, search spaces, experiment files).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Data that parses but violates a domain invariant, or does not parse at all.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Filesystem-level failure, always carries the offending path.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace bdsim

#endif
