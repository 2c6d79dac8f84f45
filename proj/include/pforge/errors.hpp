#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pforge {

// Config / input-file problems. CLI maps this to exit code 1.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Geometric preconditions violated (degenerate polygon, anchor not interior, ...).
struct GeometryError : std::runtime_error {
    explicit GeometryError(const std::string& what) : std::runtime_error(what) {}
};

// Evaluation outside an operation's domain (e.g. frustum query inside the bottom body).
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// Gradient descent left the safety box.
struct DivergenceError : std::runtime_error {
    explicit DivergenceError(const std::string& what) : std::runtime_error(what) {}
};

// Penalty construction failed (broken nestedness, tangency, level assignment).
// CLI maps this to exit code 4.
struct BuildError : std::runtime_error {
    explicit BuildError(const std::string& what) : std::runtime_error(what) {}
};

// Path grouping is not strictly decreasing; carries the offending point indices.
struct GroupingError : std::runtime_error {
    std::vector<int> offending;
    GroupingError(const std::string& what, std::vector<int> idx)
        : std::runtime_error(what), offending(std::move(idx)) {}
};

}  // namespace pforge
