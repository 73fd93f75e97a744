#pragma once

#include <string>
#include <vector>

#include "ilscsl/dataset.hpp"

namespace ilscsl {

struct BifFile {
    GroundTruthNetwork net;
    std::string network_name;
    std::vector<std::string> warnings;  // ignored property lines, one note each
};

// Parser for the classic textual Bayesian-network interchange format:
// a network block, discrete variable blocks, and one probability block per
// variable with either an unconditional `table` line or one parenthesized
// state row per parent configuration. Line comments start with //; property
// lines are skipped with a warning. Probability rows must sum to one within
// 1e-6 and are renormalized exactly. Malformed input raises ParseError with
// a position; a cyclic structure raises ConsistencyError.
BifFile load_bif(const std::string& text);
BifFile load_bif_file(const std::string& path);

// Inverse of load_bif, per-row conditional format, parents in ascending
// index order. load_bif(to_bif(net)) reproduces the network exactly up to
// probability formatting.
std::string to_bif(const GroundTruthNetwork& net, const std::string& network_name);

}  // namespace ilscsl
