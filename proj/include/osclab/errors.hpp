#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace osclab {

struct RangeError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

struct StructuralError : std::logic_error {
    using std::logic_error::logic_error;
};

// Thrown when a computation would exceed the sample budget.
struct ResourceError : std::runtime_error {
    ResourceError(const std::string& what, std::uint64_t required, std::uint64_t budget)
        : std::runtime_error(what + " (required " + std::to_string(required) + ", budget " +
                             std::to_string(budget) + ")"),
          required(required), budget(budget) {}
    std::uint64_t required;
    std::uint64_t budget;
};

// Manifest problems; `path` is the dotted field path.
struct ConfigError : std::runtime_error {
    ConfigError(const std::string& path, const std::string& msg)
        : std::runtime_error(path.empty() ? msg : path + ": " + msg), path(path) {}
    std::string path;
};

}  // namespace osclab
