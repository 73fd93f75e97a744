#pragma once

#include <map>
#include <string>
#include <vector>

#include "ilscsl/dag.hpp"
#include "ilscsl/supervision.hpp"

namespace ilscsl {

// One `parent -> child` line per edge, names resolved, sorted like
// Dag::edges(). The inverse accepts blank lines and # comments and rejects
// unknown names, duplicates, and cycles.
std::string dag_to_text(const Dag& g, const std::vector<std::string>& names);
Dag dag_from_text(const std::string& text, const std::vector<std::string>& names);

// `key = value` lines, # comments, surrounding whitespace trimmed from both
// sides. Duplicate keys and lines without '=' raise ParseError.
std::map<std::string, std::string> parse_key_value_config(const std::string& text);

// A JSON object mapping variable names to description sentences. Unknown
// names raise InputError; variables absent from the object get an empty
// description.
std::vector<std::string> descriptions_from_json(const std::string& text,
                                                const std::vector<std::string>& names);

// Complete run history as pretty-printed JSON: per iteration the learned
// edges, score, audit verdicts, and constraints added; then the termination
// reason, final edges, and the accumulated constraint set. When a reference
// DAG is given each iteration also carries structural metrics against it.
std::string trace_to_json(const RunTrace& trace, const std::vector<std::string>& names,
                          const Dag* reference = nullptr);

const char* termination_name(Termination t);
const char* verdict_source_name(VerdictSource s);

}  // namespace ilscsl
