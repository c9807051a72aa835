#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fkd {

/// Input that violates a documented contract: malformed files, invalid
/// instances, orderings or decompositions that do not match the graph.
class InvalidInput : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Syntax errors carry the 1-based line number of the offending line.
class ParseError : public InvalidInput {
public:
    ParseError(std::size_t line, const std::string& what)
        : InvalidInput("line " + std::to_string(line) + ": " + what), line_(line)
    {
    }

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A configured resource limit (profile-set size, enumeration size, search
/// nodes) was hit. The computation is abandoned rather than degraded.
class ResourceLimit : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace fkd
