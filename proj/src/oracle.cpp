#include "ilscsl/oracle.hpp"

#include <fstream>
#include <random>

#include <httplib.h>
#include <json.hpp>

#include "ilscsl/errors.hpp"
#include "ilscsl/util.hpp"

namespace ilscsl {

using nlohmann::json;

PairRelation classify_pair(const Dag& truth, int i, int j) {
    if (i < 0 || j < 0 || i >= truth.n() || j >= truth.n() || i == j)
        throw InputError("classify_pair: bad node pair");
    if (truth.has_edge(i, j)) return PairRelation::DirectForward;
    if (truth.has_edge(j, i)) return PairRelation::DirectReverse;
    if (truth.reachable(i, j)) return PairRelation::PathForward;
    if (truth.reachable(j, i)) return PairRelation::PathReverse;
    return PairRelation::Unconnected;
}

void NoiseProfile::validate() const {
    auto in01 = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!in01(acc_direct) || !in01(rev_direct) || !in01(acc_indirect) || !in01(rev_indirect) ||
        !in01(acc_nocause))
        throw InputError("NoiseProfile: probabilities must lie in [0,1]");
    if (acc_direct + rev_direct > 1.0 + 1e-12 || acc_indirect + rev_indirect > 1.0 + 1e-12)
        throw InputError("NoiseProfile: acc + rev must not exceed 1");
}

OracleVerdict TruthOracle::query(const OracleQuery& q) {
    switch (classify_pair(net_.dag(), q.i, q.j)) {
        case PairRelation::DirectForward:
        case PairRelation::PathForward:
            return {'A', {}, VerdictSource::Truth};
        case PairRelation::DirectReverse:
        case PairRelation::PathReverse:
            return {'B', {}, VerdictSource::Truth};
        case PairRelation::Unconnected:
            return {'C', {}, VerdictSource::Truth};
    }
    throw OracleError("truth oracle: unreachable");
}

NoisyOracle::NoisyOracle(const GroundTruthNetwork& net, const NoiseProfile& profile,
                         std::uint64_t seed)
    : net_(net), profile_(profile), seed_(seed) {
    profile_.validate();
}

OracleVerdict NoisyOracle::query(const OracleQuery& q) {
    const PairRelation rel = classify_pair(net_.dag(), q.i, q.j);
    const std::uint64_t salt =
        static_cast<std::uint64_t>(q.i) * 0x10001ULL + static_cast<std::uint64_t>(q.j);
    std::mt19937_64 rng(derive_seed(seed_, salt));
    const double u = uniform01(rng);

    char v = 'C';
    switch (rel) {
        case PairRelation::DirectForward:
            v = u < profile_.acc_direct ? 'A'
                : u < profile_.acc_direct + profile_.rev_direct ? 'B' : 'C';
            break;
        case PairRelation::DirectReverse:
            v = u < profile_.acc_direct ? 'B'
                : u < profile_.acc_direct + profile_.rev_direct ? 'A' : 'C';
            break;
        case PairRelation::PathForward:
            v = u < profile_.acc_indirect ? 'A'
                : u < profile_.acc_indirect + profile_.rev_indirect ? 'B' : 'C';
            break;
        case PairRelation::PathReverse:
            v = u < profile_.acc_indirect ? 'B'
                : u < profile_.acc_indirect + profile_.rev_indirect ? 'A' : 'C';
            break;
        case PairRelation::Unconnected:
            v = u < profile_.acc_nocause ? 'C'
                : u < profile_.acc_nocause + (1.0 - profile_.acc_nocause) / 2.0 ? 'A' : 'B';
            break;
    }
    return {v, {}, VerdictSource::Noisy};
}

std::string build_prompt(const std::string& field, const std::string& name_i,
                         const std::string& desc_i, const std::string& name_j,
                         const std::string& desc_j) {
    std::string p;
    p += "You are an expert on " + field + ". There are two factors:" + name_i + ":" + desc_i +
         "," + name_j + ":" + desc_j + ".\n";
    p += "Which cause-and-effect relationship is more likely for following causal statements "
         "for V1 and V2?\n";
    p += "A.changing V1 causes a change in V2.\n";
    p += "B.changing V2 causes a change in V1.\n";
    p += "C.changes in V1 and in V2 are not correlated.\n";
    p += "D.uncertain.\n";
    p += "Provide your final answer within the tags <Answer>A/B/C/D</Answer>.\n";
    p += "Analyze the statement:" + name_i + " " + name_j + ".";
    return p;
}

std::optional<char> parse_verdict(const std::string& raw) {
    static const std::string open = "<Answer>";
    static const std::string close = "</Answer>";
    // The last well-formed span is the answer; an earlier span (a quoted
    // instruction, a revised choice) never overrides it.
    std::optional<std::string> body;
    std::size_t at = 0;
    for (;;) {
        const std::size_t a = raw.find(open, at);
        if (a == std::string::npos) break;
        const std::size_t b = raw.find(close, a + open.size());
        if (b == std::string::npos) break;  // unterminated span: not well-formed
        body = raw.substr(a + open.size(), b - a - open.size());
        at = b + close.size();
    }
    if (!body) return std::nullopt;
    const std::size_t first = body->find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return std::nullopt;
    const std::size_t last = body->find_last_not_of(" \t\r\n");
    const std::string trimmed = body->substr(first, last - first + 1);
    if (trimmed.size() != 1 || !verdict_valid(trimmed[0])) return std::nullopt;
    return trimmed[0];
}

LlmOracle::LlmOracle(EndpointConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.base_url.empty()) throw InputError("LlmOracle: base_url is required");
    if (cfg_.model.empty()) throw InputError("LlmOracle: model is required");
    if (cfg_.retries < 0) throw InputError("LlmOracle: retries must be >= 0");
}

namespace {

// The assistant text from a chat-completions style reply; accepts the couple
// of common shapes so any schema-compatible endpoint works.
std::optional<std::string> extract_reply_text(const std::string& body) {
    json doc = json::parse(body, nullptr, false);
    if (doc.is_discarded()) return std::nullopt;
    try {
        if (doc.contains("choices") && doc["choices"].is_array() && !doc["choices"].empty()) {
            const auto& c0 = doc["choices"][0];
            if (c0.contains("message") && c0["message"].contains("content"))
                return c0["message"]["content"].get<std::string>();
            if (c0.contains("text")) return c0["text"].get<std::string>();
        }
        if (doc.contains("content") && doc["content"].is_string())
            return doc["content"].get<std::string>();
        if (doc.contains("text") && doc["text"].is_string())
            return doc["text"].get<std::string>();
    } catch (const json::exception&) {
        return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace

OracleVerdict LlmOracle::query(const OracleQuery& q) {
    const json payload = {
        {"model", cfg_.model},
        {"messages", json::array({json{{"role", "user"}, {"content", q.prompt}}})},
        {"temperature", 0},
    };
    const std::string body = payload.dump();

    httplib::Client client(cfg_.base_url);
    client.set_connection_timeout(cfg_.timeout_s);
    client.set_read_timeout(cfg_.timeout_s);
    httplib::Headers headers;
    if (!cfg_.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg_.api_key);

    std::string last_text;
    std::string last_error;
    bool got_text = false;
    for (int attempt = 0; attempt <= cfg_.retries; ++attempt) {
        auto res = client.Post(cfg_.path, headers, body, "application/json");
        if (!res) {
            last_error = "transport failure: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status < 200 || res->status >= 300) {
            last_error = "endpoint returned status " + std::to_string(res->status);
            continue;
        }
        const auto text = extract_reply_text(res->body);
        if (!text) {
            last_error = "reply held no assistant text";
            continue;
        }
        got_text = true;
        last_text = *text;
        if (const auto v = parse_verdict(*text))
            return {*v, *text, VerdictSource::LLM};
        last_error = "no verdict tag in reply";
    }
    if (!got_text) throw OracleError("llm oracle: " + last_error);
    // The endpoint answered but never produced a verdict: uncertain by convention.
    return {'D', last_text, VerdictSource::LLM};
}

namespace {

OracleVerdict verdict_from_record(const json& rec) {
    const std::string v = rec.at("verdict").get<std::string>();
    if (v.size() != 1 || !verdict_valid(v[0]))
        throw InputError("oracle cache: bad verdict '" + v + "'");
    OracleVerdict out;
    out.value = v[0];
    out.raw = rec.value("raw", std::string());
    out.source = VerdictSource::Cache;
    return out;
}

}  // namespace

std::map<std::string, OracleVerdict> load_oracle_cache(const std::string& path) {
    std::map<std::string, OracleVerdict> out;
    std::ifstream in(path);
    if (!in) return out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json rec = json::parse(line, nullptr, false);
        if (rec.is_discarded() || !rec.contains("key") || !rec.contains("verdict"))
            throw ParseError("malformed oracle cache record", lineno);
        out[rec["key"].get<std::string>()] = verdict_from_record(rec);
    }
    return out;
}

std::string CachedOracle::cache_key(const OracleQuery& q) {
    return q.dataset + "|" + q.name_i + "|" + q.name_j + "|" + to_hex(fnv1a64(q.prompt));
}

CachedOracle::CachedOracle(std::shared_ptr<Oracle> inner, std::string cache_path)
    : inner_(std::move(inner)), path_(std::move(cache_path)) {
    if (!inner_) throw InputError("CachedOracle: inner oracle is required");
    entries_ = load_oracle_cache(path_);
}

OracleVerdict CachedOracle::query(const OracleQuery& q) {
    const std::string key = cache_key(q);
    if (auto it = entries_.find(key); it != entries_.end()) return it->second;

    const OracleVerdict fresh = inner_->query(q);
    const json rec = {
        {"key", key},
        {"verdict", std::string(1, fresh.value)},
        {"raw", fresh.raw},
        {"ts", utc_timestamp()},
    };
    std::ofstream out(path_, std::ios::app);
    if (!out) throw InputError("CachedOracle: cannot append to " + path_);
    out << rec.dump() << '\n';
    out.flush();
    if (!out) throw InputError("CachedOracle: write failed: " + path_);

    // A repeat of this query in the same process is a cache hit too.
    entries_[key] = {fresh.value, fresh.raw, VerdictSource::Cache};
    return fresh;
}

ReplayOracle::ReplayOracle(const std::string& cache_path)
    : entries_(load_oracle_cache(cache_path)) {}

OracleVerdict ReplayOracle::query(const OracleQuery& q) {
    const std::string key = CachedOracle::cache_key(q);
    auto it = entries_.find(key);
    if (it == entries_.end())
        throw OracleError("replay oracle: no recorded verdict for " + key);
    return it->second;
}

}  // namespace ilscsl
