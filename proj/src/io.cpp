#include "ilscsl/io.hpp"

#include <sstream>

#include <json.hpp>

#include "ilscsl/errors.hpp"
#include "ilscsl/evaluation.hpp"

namespace ilscsl {

using nlohmann::json;

namespace {

std::string strip(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

int index_of(const std::vector<std::string>& names, const std::string& name, int line) {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return static_cast<int>(i);
    throw ParseError("unknown variable '" + name + "'", line);
}

}  // namespace

std::string dag_to_text(const Dag& g, const std::vector<std::string>& names) {
    if (static_cast<int>(names.size()) != g.n())
        throw InputError("dag_to_text: name count does not match variable count");
    std::string out;
    for (const auto& [i, j] : g.edges()) out += names[i] + " -> " + names[j] + "\n";
    return out;
}

Dag dag_from_text(const std::string& text, const std::vector<std::string>& names) {
    const int n = static_cast<int>(names.size());
    std::vector<Edge> edges;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = raw;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line = line.substr(0, hash);
        line = strip(line);
        if (line.empty()) continue;
        const auto arrow = line.find("->");
        if (arrow == std::string::npos) throw ParseError("expected 'parent -> child'", lineno);
        const std::string from = strip(line.substr(0, arrow));
        const std::string to = strip(line.substr(arrow + 2));
        if (from.empty() || to.empty())
            throw ParseError("expected 'parent -> child'", lineno);
        const Edge e{index_of(names, from, lineno), index_of(names, to, lineno)};
        for (const auto& prev : edges)
            if (prev == e) throw ParseError("duplicate edge", lineno);
        edges.push_back(e);
    }
    return Dag::from_edges(n, edges);
}

std::map<std::string, std::string> parse_key_value_config(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = raw;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line = line.substr(0, hash);
        if (strip(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("expected 'key = value'", lineno);
        const std::string key = strip(line.substr(0, eq));
        const std::string value = strip(line.substr(eq + 1));
        if (key.empty()) throw ParseError("empty key", lineno);
        if (!out.emplace(key, value).second)
            throw ParseError("duplicate key '" + key + "'", lineno);
    }
    return out;
}

std::vector<std::string> descriptions_from_json(const std::string& text,
                                                const std::vector<std::string>& names) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object())
        throw InputError("descriptions: expected a JSON object of name to text");
    std::vector<std::string> out(names.size());
    for (const auto& [key, value] : doc.items()) {
        if (!value.is_string())
            throw InputError("descriptions: value for '" + key + "' is not a string");
        bool known = false;
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (names[i] == key) {
                out[i] = value.get<std::string>();
                known = true;
                break;
            }
        }
        if (!known) throw InputError("descriptions: unknown variable '" + key + "'");
    }
    return out;
}

const char* termination_name(Termination t) {
    switch (t) {
        case Termination::Fixpoint: return "fixpoint";
        case Termination::MaxIters: return "max_iters";
        case Termination::InfeasibleConstraints: return "infeasible_constraints";
    }
    return "unknown";
}

const char* verdict_source_name(VerdictSource s) {
    switch (s) {
        case VerdictSource::LLM: return "llm";
        case VerdictSource::Truth: return "truth";
        case VerdictSource::Noisy: return "noisy";
        case VerdictSource::Cache: return "cache";
    }
    return "unknown";
}

namespace {

json edges_json(const Dag& g, const std::vector<std::string>& names) {
    json out = json::array();
    for (const auto& [i, j] : g.edges()) out.push_back({names[i], names[j]});
    return out;
}

json constraint_json(const EdgeConstraint& c, const std::vector<std::string>& names) {
    return {{"kind", c.polarity == Polarity::Required ? "required" : "forbidden"},
            {"from", names[c.from]},
            {"to", names[c.to]}};
}

}  // namespace

std::string trace_to_json(const RunTrace& trace, const std::vector<std::string>& names,
                          const Dag* reference) {
    json doc;
    doc["iterations"] = json::array();
    for (std::size_t k = 0; k < trace.iterations.size(); ++k) {
        const auto& rec = trace.iterations[k];
        json it;
        it["iteration"] = k;
        it["score"] = rec.score;
        it["edges"] = edges_json(rec.dag, names);
        it["audits"] = json::array();
        for (const auto& a : rec.audits)
            it["audits"].push_back({{"from", names[a.edge.first]},
                                    {"to", names[a.edge.second]},
                                    {"verdict", std::string(1, a.verdict)},
                                    {"source", verdict_source_name(a.source)}});
        it["new_constraints"] = json::array();
        for (const auto& c : rec.new_constraints)
            it["new_constraints"].push_back(constraint_json(c, names));
        if (reference && reference->edge_count() > 0) {
            const MetricsSnapshot m = compute_metrics(rec.dag, *reference);
            it["metrics"] = {{"shd", m.shd},
                             {"scaled_shd", m.scaled_shd},
                             {"tpr", m.tpr},
                             {"extra", m.extra},
                             {"missing", m.missing},
                             {"reversed", m.reversed}};
        }
        doc["iterations"].push_back(std::move(it));
    }
    doc["terminated_by"] = termination_name(trace.terminated_by);
    if (!trace.iterations.empty())
        doc["final_edges"] = edges_json(trace.final_dag(), names);
    json req = json::array(), forb = json::array();
    for (const auto& [i, j] : trace.constraints.required())
        req.push_back({names[i], names[j]});
    for (const auto& [i, j] : trace.constraints.forbidden())
        forb.push_back({names[i], names[j]});
    doc["constraints"] = {{"required", std::move(req)}, {"forbidden", std::move(forb)}};
    return doc.dump(2) + "\n";
}

}  // namespace ilscsl
