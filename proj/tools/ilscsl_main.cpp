#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ilscsl/bif.hpp"
#include "ilscsl/constraints.hpp"
#include "ilscsl/dataset.hpp"
#include "ilscsl/errors.hpp"
#include "ilscsl/evaluation.hpp"
#include "ilscsl/io.hpp"
#include "ilscsl/oracle.hpp"
#include "ilscsl/scoring.hpp"
#include "ilscsl/search.hpp"
#include "ilscsl/supervision.hpp"
#include "ilscsl/util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ilscsl;

namespace {

constexpr const char* kVersion = "0.1.0";

int usage_error(const std::string& msg) {
    std::cerr << "error: " << msg << "\n";
    return 2;
}

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

struct RunOptions {
    std::string data;
    std::string network;
    std::string oracle = "truth";
    std::string search = "hc";
    std::string score = "bdeu";
    std::string mode = "hard";
    std::string out;
    std::string cache;
    std::string endpoint;
    std::string descriptions;
    std::string field = "the domain of the dataset";
    std::string name;
    std::vector<double> noise;
    std::uint64_t seed = 0;
    double ess = 1.0;
    double prior_prob = 0.99999;
    int max_iters = 10;
    int restarts = 20;
    int max_parents = -1;  // -1: no cap flag given
};

// Column order of the CSV mapped onto the network's variable order, so the
// learned graph and the truth DAG share one index space.
DiscreteDataset reorder_to_network(const DiscreteDataset& d,
                                   const std::vector<std::string>& csv_names,
                                   const GroundTruthNetwork& net) {
    const int n = net.n();
    if (static_cast<int>(csv_names.size()) != n)
        throw InputError("data lists " + std::to_string(csv_names.size()) +
                         " variables, network has " + std::to_string(n));
    std::vector<int> source(n);  // source[k] = csv column holding net variable k
    for (int k = 0; k < n; ++k) {
        int found = -1;
        for (int c = 0; c < n; ++c)
            if (csv_names[c] == net.names()[k]) {
                found = c;
                break;
            }
        if (found < 0)
            throw InputError("network variable '" + net.names()[k] + "' missing from data");
        source[k] = found;
    }
    std::vector<int> cards(n);
    for (int k = 0; k < n; ++k) {
        cards[k] = d.card(source[k]);
        if (cards[k] > net.card(k))
            throw InputError("data exceeds cardinality of network variable '" +
                             net.names()[k] + "'");
        cards[k] = net.card(k);
    }
    std::vector<int> values(static_cast<std::size_t>(d.m()) * n);
    for (int r = 0; r < d.m(); ++r)
        for (int k = 0; k < n; ++k)
            values[static_cast<std::size_t>(r) * n + k] = d.value(r, source[k]);
    return DiscreteDataset(std::move(cards), std::move(values));
}

json config_json(const RunOptions& o) {
    json cfg = {
        {"data", o.data},         {"network", o.network},
        {"oracle", o.oracle},     {"search", o.search},
        {"score", o.score},       {"mode", o.mode},
        {"out", o.out},           {"cache", o.cache},
        {"endpoint", o.endpoint}, {"descriptions", o.descriptions},
        {"field", o.field},       {"name", o.name},
        {"seed", o.seed},         {"ess", o.ess},
        {"prior_prob", o.prior_prob},
        {"max_iters", o.max_iters},
        {"restarts", o.restarts},
    };
    if (o.max_parents >= 0)
        cfg["max_parents"] = o.max_parents;
    else
        cfg["max_parents"] = nullptr;
    if (!o.noise.empty()) cfg["noise"] = o.noise;
    return cfg;
}

json digests_json(const RunOptions& o) {
    json d = json::object();
    for (const auto& [label, path] :
         std::initializer_list<std::pair<const char*, const std::string&>>{
             {"data", o.data},
             {"network", o.network},
             {"cache", o.cache},
             {"endpoint", o.endpoint},
             {"descriptions", o.descriptions}})
        if (!path.empty()) d[label] = file_digest_hex(path);
    return d;
}

void write_manifest(const RunOptions& o, const std::string& started,
                    const std::string& finished) {
    json m = {
        {"version", kVersion},
        {"command", "run"},
        {"config", config_json(o)},
        {"inputs", digests_json(o)},
        {"seed", o.seed},
        {"table_format", 1},
        {"timestamps", {{"started", started}, {"finished", finished}}},
    };
    write_file((fs::path(o.out) / "manifest.json").string(), m.dump(2) + "\n");
}

void write_metrics_tsv(const RunTrace& trace, const Dag* truth, const std::string& path) {
    std::string out = "iteration\tedges\tscore\taudits\tnew_constraints";
    const bool with_truth = truth && truth->edge_count() > 0;
    if (with_truth) out += "\tshd\tscaled_shd\ttpr";
    out += "\n";
    char buf[256];
    for (std::size_t k = 0; k < trace.iterations.size(); ++k) {
        const auto& rec = trace.iterations[k];
        std::snprintf(buf, sizeof buf, "%zu\t%d\t%.6f\t%zu\t%zu", k, rec.dag.edge_count(),
                      rec.score, rec.audits.size(), rec.new_constraints.size());
        out += buf;
        if (with_truth) {
            const MetricsSnapshot m = compute_metrics(rec.dag, *truth);
            std::snprintf(buf, sizeof buf, "\t%d\t%.6f\t%.6f", m.shd, m.scaled_shd, m.tpr);
            out += buf;
        }
        out += "\n";
    }
    write_file(path, out);
}

void print_iteration_summaries(const RunTrace& trace, const Dag* truth) {
    const bool with_truth = truth && truth->edge_count() > 0;
    for (std::size_t k = 0; k < trace.iterations.size(); ++k) {
        const auto& rec = trace.iterations[k];
        std::printf("iteration %zu: %d edges, %zu audited, %zu new constraints", k,
                    rec.dag.edge_count(), rec.audits.size(), rec.new_constraints.size());
        if (with_truth) {
            const MetricsSnapshot m = compute_metrics(rec.dag, *truth);
            std::printf(", shd %d, scaled shd %.3f, tpr %.3f", m.shd, m.scaled_shd, m.tpr);
        }
        std::printf("\n");
    }
    std::printf("terminated: %s after %zu iteration%s\n",
                termination_name(trace.terminated_by), trace.iterations.size(),
                trace.iterations.size() == 1 ? "" : "s");
}

void write_run_outputs(const RunOptions& o, const RunTrace& trace,
                       const std::vector<std::string>& names, const Dag* truth,
                       const std::string& started) {
    const fs::path out(o.out);
    write_manifest(o, started, utc_timestamp());
    write_file((out / "trace.json").string(), trace_to_json(trace, names, truth));
    if (!trace.iterations.empty())
        write_file((out / "final.dag").string(), dag_to_text(trace.final_dag(), names));
    write_metrics_tsv(trace, truth, (out / "metrics.tsv").string());
}

int cmd_run(const RunOptions& opt) {
    RunOptions o = opt;
    const std::string started = utc_timestamp();

    if (o.data.empty()) return usage_error("run needs --data");
    if (o.out.empty()) return usage_error("run needs --out");
    const bool needs_net = o.oracle == "truth" || o.oracle == "noisy";
    if (needs_net && o.network.empty())
        return usage_error("--oracle " + o.oracle + " needs --network");
    if (o.oracle == "replay" && o.cache.empty()) return usage_error("--oracle replay needs --cache");
    if (!o.noise.empty() && o.noise.size() != 5)
        return usage_error("--noise takes 5 values: acc_direct rev_direct acc_indirect "
                           "rev_indirect acc_nocause");
    if (o.name.empty()) o.name = stem_of(o.data);

    try {
        // Dataset, with cardinalities from the sidecar when present, else
        // from the network.
        std::map<std::string, int> overrides;
        const std::string sidecar = o.data + ".meta";
        const bool have_sidecar = fs::exists(sidecar);
        if (have_sidecar) overrides = parse_cardinality_sidecar(read_file(sidecar));

        std::optional<BifFile> bif;
        if (!o.network.empty()) {
            bif = load_bif_file(o.network);
            for (const auto& w : bif->warnings) std::cerr << o.network << ": " << w << "\n";
        }

        LoadedData loaded = load_csv_file(o.data, overrides);
        std::vector<std::string> names = loaded.names;
        std::optional<DiscreteDataset> data;
        const Dag* truth = nullptr;
        if (bif) {
            data = reorder_to_network(loaded.data, loaded.names, bif->net);
            names = bif->net.names();
            truth = &bif->net.dag();
        } else {
            data = std::move(loaded.data);
        }

        SupervisionMeta meta;
        meta.dataset_name = o.name;
        meta.field_text = o.field;
        meta.names = names;
        if (!o.descriptions.empty())
            meta.descriptions = descriptions_from_json(read_file(o.descriptions), names);

        ScoreConfig cfg;
        if (o.score == "bdeu")
            cfg.kind = ScoreKind::BDeu;
        else if (o.score == "bic")
            cfg.kind = ScoreKind::BIC;
        else
            return usage_error("--score must be bdeu or bic");
        cfg.ess = o.ess;
        cfg.prior_prob = o.prior_prob;
        if (o.max_parents >= 0) cfg.max_parents = o.max_parents;
        cfg.validate();

        SupervisionConfig sup;
        sup.max_iters = o.max_iters;
        if (o.search == "hc")
            sup.method = SearchMethod::HillClimb;
        else if (o.search == "ordering")
            sup.method = SearchMethod::OrderingSearch;
        else
            return usage_error("--search must be hc or ordering");
        if (o.mode == "hard")
            sup.mode = ConstraintMode::Hard;
        else if (o.mode == "soft")
            sup.mode = ConstraintMode::Soft;
        else
            return usage_error("--mode must be hard or soft");
        sup.search.restarts = o.restarts;
        sup.search.seed = o.seed;
        sup.validate();

        std::shared_ptr<Oracle> base;
        if (o.oracle == "truth") {
            base = std::make_shared<TruthOracle>(bif->net);
        } else if (o.oracle == "noisy") {
            NoiseProfile profile;
            if (!o.noise.empty()) {
                profile.acc_direct = o.noise[0];
                profile.rev_direct = o.noise[1];
                profile.acc_indirect = o.noise[2];
                profile.rev_indirect = o.noise[3];
                profile.acc_nocause = o.noise[4];
            }
            base = std::make_shared<NoisyOracle>(bif->net, profile, o.seed);
        } else if (o.oracle == "replay") {
            base = std::make_shared<ReplayOracle>(o.cache);
        } else if (o.oracle == "llm") {
            if (o.endpoint.empty()) return usage_error("--oracle llm needs --endpoint");
            const char* key = std::getenv("ILS_CSL_API_KEY");
            if (!key || !*key)
                return usage_error("--oracle llm needs the ILS_CSL_API_KEY environment "
                                   "variable");
            const auto kv = parse_key_value_config(read_file(o.endpoint));
            EndpointConfig ec;
            for (const auto& [k, v] : kv) {
                if (k == "base_url")
                    ec.base_url = v;
                else if (k == "path")
                    ec.path = v;
                else if (k == "model")
                    ec.model = v;
                else if (k == "timeout_s")
                    ec.timeout_s = std::stoi(v);
                else if (k == "retries")
                    ec.retries = std::stoi(v);
                else
                    return usage_error("endpoint config: unknown key '" + k + "'");
            }
            ec.api_key = key;
            base = std::make_shared<LlmOracle>(std::move(ec));
        } else {
            return usage_error("--oracle must be llm, truth, noisy, or replay");
        }

        fs::create_directories(o.out);
        CachedOracle oracle(base, (fs::path(o.out) / "oracle.cache").string());

        ScoreEngine engine(*data, cfg);
        try {
            const RunTrace trace = run_ils_csl(engine, meta, oracle, sup);
            write_run_outputs(o, trace, names, truth, started);
            print_iteration_summaries(trace, truth);
            return 0;
        } catch (const SupervisionAborted& e) {
            write_run_outputs(o, e.partial(), names, truth, started);
            std::cerr << "error: oracle failed mid-run: " << e.what()
                      << " (partial trace written)\n";
            return 3;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

struct SampleOptions {
    std::string network;
    std::string out;
    int m = 0;
    std::uint64_t seed = 0;
};

int cmd_sample(const SampleOptions& o) {
    if (o.network.empty()) return usage_error("sample needs --network");
    if (o.out.empty()) return usage_error("sample needs --out");
    if (o.m < 1) return usage_error("--m must be >= 1");
    try {
        const BifFile bif = load_bif_file(o.network);
        for (const auto& w : bif.warnings) std::cerr << o.network << ": " << w << "\n";
        const DiscreteDataset d = forward_sample(bif.net, o.m, o.seed);
        const std::string csv = to_csv(d, bif.net.names());
        if (const auto dir = fs::path(o.out).parent_path(); !dir.empty())
            fs::create_directories(dir);
        write_file(o.out, csv);
        write_file(o.out + ".meta", to_cardinality_sidecar(bif.net.names(), d.cards()));
        std::printf("wrote %d rows x %d variables to %s (digest %s)\n", d.m(), d.n(),
                    o.out.c_str(), to_hex(fnv1a64(csv)).c_str());
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

struct EstimateOptions {
    int n = 0;
    StructuralParams sp = default_structural_params();
    ErrorRates er;
};

int cmd_estimate(const EstimateOptions& o) {
    if (o.n < 2) return usage_error("--n must be >= 2");
    try {
        const ErrorEstimate e = estimate_error_counts(o.n, o.sp, o.er);
        const double pairs = static_cast<double>(o.n) * (o.n - 1) / 2.0;
        std::printf("n = %d\n", o.n);
        std::printf("%-14s %12.6f   closed-form approximation 0.10 n       = %12.6f\n",
                    "e_ours_upper", e.e_ours_upper, 0.10 * o.n);
        std::printf("%-14s %12.6f   closed-form approximation 0.36 C(n,2)  = %12.6f\n",
                    "e_full", e.e_full, 0.36 * pairs);
        std::printf("%-14s %12.6f   closed-form approximation 1/(1.8(n-1)) = %12.6f\n",
                    "ratio", e.ratio, 1.0 / (1.8 * (o.n - 1)));
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"iterative, externally supervised causal structure learning"};
    app.require_subcommand(1);

    RunOptions run;
    CLI::App* run_cmd = app.add_subcommand("run", "learn a structure under oracle supervision");
    run_cmd->add_option("--data", run.data, "observations CSV (a .meta sidecar is honored)");
    run_cmd->add_option("--network", run.network, "ground-truth network in BIF format");
    run_cmd->add_option("--oracle", run.oracle, "llm|truth|noisy|replay");
    run_cmd->add_option("--search", run.search, "hc|ordering");
    run_cmd->add_option("--score", run.score, "bdeu|bic");
    run_cmd->add_option("--mode", run.mode, "hard|soft");
    run_cmd->add_option("--out", run.out, "output directory");
    run_cmd->add_option("--cache", run.cache, "recorded verdicts to replay");
    run_cmd->add_option("--endpoint", run.endpoint, "endpoint config file (key = value)");
    run_cmd->add_option("--descriptions", run.descriptions, "variable descriptions JSON");
    run_cmd->add_option("--field", run.field, "expert domain named in prompts");
    run_cmd->add_option("--name", run.name, "dataset name (default: data file stem)");
    run_cmd->add_option("--noise", run.noise,
                        "acc_direct rev_direct acc_indirect rev_indirect acc_nocause")
        ->expected(5);
    run_cmd->add_option("--seed", run.seed, "random seed");
    run_cmd->add_option("--ess", run.ess, "equivalent sample size for bdeu");
    run_cmd->add_option("--prior-prob", run.prior_prob, "soft-constraint confidence");
    run_cmd->add_option("--max-iters", run.max_iters, "supervision iteration cap");
    run_cmd->add_option("--restarts", run.restarts, "search restarts");
    run_cmd->add_option("--max-parents", run.max_parents, "parent-set cap");

    SampleOptions sample;
    CLI::App* sample_cmd = app.add_subcommand("sample", "forward-sample a network to CSV");
    sample_cmd->add_option("--network", sample.network, "network in BIF format");
    sample_cmd->add_option("--m", sample.m, "row count");
    sample_cmd->add_option("--seed", sample.seed, "random seed");
    sample_cmd->add_option("--out", sample.out, "CSV path to write");

    EstimateOptions est;
    CLI::App* est_cmd =
        app.add_subcommand("estimate", "expected erroneous-constraint counts");
    est_cmd->add_option("--n", est.n, "variable count");
    est_cmd->add_option("--p-e", est.er.p_e, "error rate on unconnected pairs");
    est_cmd->add_option("--p-r", est.er.p_r, "reversal rate on path-connected pairs");
    est_cmd->add_option("--p-r-d", est.er.p_r_d, "reversal rate on direct edges");
    est_cmd->add_option("--p-m-d", est.er.p_m_d, "miss rate on direct edges");
    est_cmd->add_option("--p-c", est.er.p_c, "correct rate on path-connected pairs");
    est_cmd->add_option("--gamma1", est.sp.gamma1, "unconnected-pair fraction of the truth");
    est_cmd->add_option("--gamma2", est.sp.gamma2, "learned edges per variable");
    est_cmd->add_option("--z1", est.sp.z1, "correct learned-edge fraction");
    est_cmd->add_option("--z2", est.sp.z2, "reversed learned-edge fraction");
    est_cmd->add_option("--z3", est.sp.z3, "extra learned-edge fraction");
    est_cmd->add_option("--p-r-given-e", est.sp.p_r_given_e,
                        "reverse-path fraction among extra edges");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (run_cmd->parsed()) return cmd_run(run);
    if (sample_cmd->parsed()) return cmd_sample(sample);
    if (est_cmd->parsed()) return cmd_estimate(est);
    return usage_error("no subcommand given");
}
