// icrank: demonstration-guided list-wise reranking pipeline.
//
//   icrank index-queries --query-log log.tsv --out index.json
//   icrank make-examples --config toy.conf --out examples.jsonl
//   icrank rerank        --config toy.conf --examples examples.jsonl --out reranked.run
//   icrank evaluate      --config toy.conf reranked.run [--compare other.run]
//   icrank mmr           --config toy.conf --out mmr.run [--sweep]
//   icrank cluster       --config toy.conf --out clusters.tsv
//
// Exit codes: 0 success, 1 usage, 2 data error, 3 transport error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>

#include <CLI11.hpp>

#include "icrank/error.hpp"
#include "icrank/http_client.hpp"
#include "icrank/mock_clients.hpp"
#include "icrank/pipeline.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitTransport = 3;

std::unique_ptr<icrank::LlmClient> make_client(const icrank::PipelineConfig& config, const icrank::Log& log) {
    if (config.llm == "identity") {
        return std::make_unique<icrank::IdentityClient>();
    }
    if (config.llm == "reverse") {
        return std::make_unique<icrank::ReverseClient>();
    }
    if (config.llm == "garbage") {
        return std::make_unique<icrank::GarbageClient>(config.seed);
    }
    if (config.llm == "oracle") {
        return std::make_unique<icrank::OracleClient>(icrank::qrels_oracle(config));
    }
    if (config.llm == "http") {
        const char* key = std::getenv(config.api_key_env.c_str());
        if (key == nullptr || *key == '\0') {
            log.warn("environment variable " + config.api_key_env + " is not set; sending no Authorization header");
        }
        return std::make_unique<icrank::HttpLlmClient>(config.endpoint, key ? key : "");
    }
    throw icrank::Error(icrank::ErrorCode::InvalidArgument, config.llm,
                        "llm must be one of http, identity, reverse, garbage, oracle");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Demonstration-guided multi-objective list-wise reranking"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "Flat key = value configuration file")->check(CLI::ExistingFile);

    // Every configuration key is also a flag; flags override the file.
    std::map<std::string, std::string> overrides;
    std::map<std::string, CLI::Option*> override_opts;
    for (const auto& key : icrank::PipelineConfig::keys()) {
        override_opts[key] = app.add_option("--" + key, overrides[key], "configuration: " + key)->group("Configuration");
    }

    auto* index_cmd = app.add_subcommand("index-queries", "Build the BM25 index over a query log");
    std::string out_path;
    index_cmd->add_option("--out", out_path, "Index file to write")->required();

    auto* examples_cmd = app.add_subcommand("make-examples", "Build one demonstration per test query");
    examples_cmd->add_option("--out", out_path, "Examples JSONL to write")->required();

    auto* rerank_cmd = app.add_subcommand("rerank", "Sliding-window LLM reranking of the first-stage run");
    std::string examples_path;
    std::string transcript_path;
    rerank_cmd->add_option("--out", out_path, "Run file to write")->required();
    rerank_cmd->add_option("--examples", examples_path, "Examples JSONL (mode icl)");
    rerank_cmd->add_option("--transcript", transcript_path, "JSONL log of every LLM call");

    auto* eval_cmd = app.add_subcommand("evaluate", "nDCG / alpha-nDCG / AWRF / M1 for a run file");
    std::string eval_run;
    std::string compare_path;
    std::string json_path;
    eval_cmd->add_option("run_file", eval_run, "Run file to evaluate")->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--compare", compare_path, "Second run for paired t-tests")->check(CLI::ExistingFile);
    eval_cmd->add_option("--json", json_path, "Also write the report as JSON");
    eval_cmd->add_option("--out", out_path, "TSV report path (default stdout)");

    auto* mmr_cmd = app.add_subcommand("mmr", "Maximal marginal relevance baseline");
    bool sweep = false;
    mmr_cmd->add_option("--out", out_path, "Run file to write (prefix with --sweep)")->required();
    mmr_cmd->add_flag("--sweep", sweep, "Write one run per lambda in 0.0, 0.1, ..., 1.0");

    auto* cluster_cmd = app.add_subcommand("cluster", "Topic clusters of each query's top documents");
    cluster_cmd->add_option("--out", out_path, "Cluster TSV to write")->required();

    for (auto* sub : {index_cmd, examples_cmd, rerank_cmd, eval_cmd, mmr_cmd, cluster_cmd}) {
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    const icrank::Log log{&std::cerr};
    icrank::PipelineConfig config;
    try {
        if (!config_path.empty()) {
            icrank::load_config_file(config_path, config);
        }
        for (const auto& [key, opt] : override_opts) {
            if (opt->count() > 0) {
                config.set(key, overrides[key]);
            }
        }
        config.validate();
    } catch (const icrank::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.code() == icrank::ErrorCode::Io ? kExitData : kExitUsage;
    }

    try {
        if (index_cmd->parsed()) {
            if (config.query_log.empty()) {
                std::cerr << "error: --query-log is required\n";
                return kExitUsage;
            }
            const auto s = icrank::cmd_index_queries(config.query_log, out_path, {config.bm25_k1, config.bm25_b}, log);
            std::cout << "N\t" << s.num_queries << "\nvocabulary\t" << s.vocabulary << '\n';
        } else if (examples_cmd->parsed()) {
            icrank::cmd_make_examples(config, out_path, log);
        } else if (rerank_cmd->parsed()) {
            auto client = make_client(config, log);
            std::optional<std::filesystem::path> ex;
            if (!examples_path.empty()) {
                ex = examples_path;
            }
            std::optional<std::filesystem::path> tr;
            if (!transcript_path.empty()) {
                tr = transcript_path;
            }
            const auto summary = icrank::cmd_rerank(config, *client, ex, out_path, tr, log);
            if (!summary.failed_queries.empty()) {
                std::cerr << "queries that kept first-stage order:";
                for (const auto& q : summary.failed_queries) {
                    std::cerr << ' ' << q;
                }
                std::cerr << '\n';
                if (summary.failed_queries.size() == summary.runs.size()) {
                    return kExitTransport;
                }
            }
        } else if (eval_cmd->parsed()) {
            std::optional<std::filesystem::path> cmp;
            if (!compare_path.empty()) {
                cmp = compare_path;
            }
            std::optional<std::filesystem::path> js;
            if (!json_path.empty()) {
                js = json_path;
            }
            if (out_path.empty()) {
                icrank::cmd_evaluate(config, eval_run, cmp, std::cout, js, log);
            } else {
                std::ofstream tsv(out_path, std::ios::binary);
                if (!tsv) {
                    throw icrank::Error(icrank::ErrorCode::Io, out_path, "cannot open for writing");
                }
                icrank::cmd_evaluate(config, eval_run, cmp, tsv, js, log);
            }
        } else if (mmr_cmd->parsed()) {
            icrank::cmd_mmr(config, out_path, sweep, log);
        } else if (cluster_cmd->parsed()) {
            icrank::cmd_cluster(config, out_path, log);
        }
    } catch (const icrank::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        if (icrank::is_transport_error(e.code())) {
            return kExitTransport;
        }
        return e.code() == icrank::ErrorCode::InvalidArgument ? kExitUsage : kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
    return 0;
}
