#pragma once

#include <stdexcept>
#include <string>

namespace ilscsl {

// Bad caller-supplied values: indices out of range, malformed flags, empty data.
struct InputError : std::runtime_error {
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// A table or enumeration would exceed a hard size limit.
struct CapacityError : std::runtime_error {
    explicit CapacityError(const std::string& msg) : std::runtime_error(msg) {}
};

// A structure violates an invariant it promised to keep (cyclic required set,
// CPT rows that do not sum to one, constraint bounds with K not inside C).
struct ConsistencyError : std::runtime_error {
    explicit ConsistencyError(const std::string& msg) : std::runtime_error(msg) {}
};

// The active constraint set admits no DAG under the current search limits,
// e.g. more required parents than the parent-set cap allows.
struct InfeasibleError : std::runtime_error {
    explicit InfeasibleError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed textual input. Position is 1-based; col 0 means "whole line".
struct ParseError : std::runtime_error {
    int line;
    int col;
    ParseError(const std::string& msg, int line_, int col_ = 0)
        : std::runtime_error("line " + std::to_string(line_) +
                             (col_ > 0 ? ", col " + std::to_string(col_) : std::string()) +
                             ": " + msg),
          line(line_), col(col_) {}
};

// The verdict provider failed for good: transport or auth errors that
// survived every retry, or a replay cache miss.
struct OracleError : std::runtime_error {
    explicit OracleError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace ilscsl
