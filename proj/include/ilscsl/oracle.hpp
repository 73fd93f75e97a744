#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "ilscsl/dag.hpp"
#include "ilscsl/dataset.hpp"

namespace ilscsl {

// Verdict letters. A: the first factor causes the second. B: the second
// causes the first. C: the two are not correlated. D: uncertain.
inline bool verdict_valid(char v) { return v == 'A' || v == 'B' || v == 'C' || v == 'D'; }

// Which component produced the verdict. A letter parsed out of a live
// endpoint reply is LLM, as is the uncertain fallback after parse retries;
// anything served from a cache file (or a replay of one) is Cache.
enum class VerdictSource { LLM, Truth, Noisy, Cache };

struct OracleVerdict {
    char value = 'D';
    std::string raw;  // unparsed provider reply, empty for synthetic oracles
    VerdictSource source = VerdictSource::Cache;
};

// One causal question: the ordered variable pair (i, j) of a learned edge
// plus the naming needed for prompts and cache keys.
struct OracleQuery {
    std::string dataset;  // dataset name, part of the cache key
    int i = -1;
    int j = -1;
    std::string name_i;
    std::string name_j;
    std::string prompt;
};

class Oracle {
public:
    virtual ~Oracle() = default;
    virtual OracleVerdict query(const OracleQuery& q) = 0;
};

// How an ordered pair (i, j) relates to a reference DAG.
enum class PairRelation {
    DirectForward,   // edge i -> j
    DirectReverse,   // edge j -> i
    PathForward,     // no edge, but a directed path i ~> j
    PathReverse,     // no edge, but a directed path j ~> i
    Unconnected,     // no directed path either way
};

PairRelation classify_pair(const Dag& truth, int i, int j);

// Verdict accuracy profile for the synthetic noisy oracle. On pairs joined by
// a direct edge the answer follows the edge with probability acc_direct, is
// reversed with rev_direct, and is "uncorrelated" otherwise; indirect paths
// use the _indirect pair the same way; unconnected pairs are answered
// correctly with acc_nocause and otherwise blamed on either direction evenly.
struct NoiseProfile {
    double acc_direct = 1.0;
    double rev_direct = 0.0;
    double acc_indirect = 1.0;
    double rev_indirect = 0.0;
    double acc_nocause = 1.0;

    void validate() const;
    static NoiseProfile all_accurate() { return {}; }
};

// Answers from the ground-truth structure, never wrong, never uncertain.
class TruthOracle : public Oracle {
public:
    explicit TruthOracle(const GroundTruthNetwork& net) : net_(net) {}
    OracleVerdict query(const OracleQuery& q) override;

private:
    const GroundTruthNetwork& net_;
};

// Truth oracle with calibrated error rates. The random stream for a pair is
// derived from (seed, i, j), so a verdict depends only on the pair, not on
// query order, and repeated queries agree.
class NoisyOracle : public Oracle {
public:
    NoisyOracle(const GroundTruthNetwork& net, const NoiseProfile& profile, std::uint64_t seed);
    OracleVerdict query(const OracleQuery& q) override;

private:
    const GroundTruthNetwork& net_;
    NoiseProfile profile_;
    std::uint64_t seed_;
};

struct EndpointConfig {
    std::string base_url;  // scheme://host[:port]
    std::string path = "/v1/chat/completions";
    std::string model;
    std::string api_key;
    int timeout_s = 60;
    int retries = 2;  // extra attempts after the first, for both failure kinds
};

// Live language-model oracle speaking the chat-completions shape: POST
// {model, messages:[{role:"user", content: prompt}], temperature: 0}. A reply
// that cannot be parsed into a verdict is retried and finally recorded as D;
// transport or auth failures that survive every retry raise OracleError.
class LlmOracle : public Oracle {
public:
    explicit LlmOracle(EndpointConfig cfg);
    OracleVerdict query(const OracleQuery& q) override;

private:
    EndpointConfig cfg_;
};

// Append-only verdict cache over any inner oracle. Records are JSON lines
// (key, verdict, raw, timestamp) flushed as written, so an aborted run keeps
// everything answered so far. A key found in the file is served from it and
// never reaches the inner oracle again.
class CachedOracle : public Oracle {
public:
    CachedOracle(std::shared_ptr<Oracle> inner, std::string cache_path);
    OracleVerdict query(const OracleQuery& q) override;

    static std::string cache_key(const OracleQuery& q);

private:
    std::shared_ptr<Oracle> inner_;
    std::string path_;
    std::map<std::string, OracleVerdict> entries_;
};

// Serves only recorded verdicts; a miss is an OracleError.
class ReplayOracle : public Oracle {
public:
    explicit ReplayOracle(const std::string& cache_path);
    OracleVerdict query(const OracleQuery& q) override;

private:
    std::map<std::string, OracleVerdict> entries_;
};

// Reads every record of a cache file; later records win duplicate keys.
// Tolerates a missing file (empty cache) but not a malformed line.
std::map<std::string, OracleVerdict> load_oracle_cache(const std::string& path);

// The fixed question template. field: the expert domain; each factor is a
// (name, description) pair.
std::string build_prompt(const std::string& field, const std::string& name_i,
                         const std::string& desc_i, const std::string& name_j,
                         const std::string& desc_j);

// The verdict letter inside the last well-formed <Answer>...</Answer> span,
// whitespace trimmed. Empty when no span holds a single letter A-D.
std::optional<char> parse_verdict(const std::string& raw);

}  // namespace ilscsl
