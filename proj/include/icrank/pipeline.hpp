#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "icrank/baselines.hpp"
#include "icrank/example_builder.hpp"
#include "icrank/io.hpp"
#include "icrank/llm_rerank.hpp"
#include "icrank/metrics.hpp"
#include "icrank/mock_clients.hpp"
#include "icrank/query_log.hpp"
#include "icrank/topic_cluster.hpp"

namespace icrank {

enum class Objective { Fairness, Diversity, RelevanceOnly };

std::string_view to_string(Objective objective) noexcept;
Objective parse_objective(std::string_view name);

/// Flat key/value configuration. Keys match the CLI long flags (with '-').
struct PipelineConfig {
    // inputs
    std::filesystem::path corpus;
    std::filesystem::path queries;
    std::filesystem::path query_log;
    std::filesystem::path index;
    std::filesystem::path run;
    std::filesystem::path qrels;
    std::filesystem::path subtopics;
    std::filesystem::path attributes;
    std::filesystem::path clusters;
    std::filesystem::path static_example;

    Objective objective = Objective::Fairness;
    ExampleStrategy strategy = ExampleStrategy::Target;
    ExampleOrdering ordering = ExampleOrdering::RandomSeeded;
    PromptMode mode = PromptMode::Icl;

    std::size_t window = 20;
    std::size_t stride = 10;
    std::size_t depth = 100;
    std::size_t max_words = 300;
    std::size_t cutoff = kDefaultCutoff;
    std::size_t workers = 4;
    std::size_t similar_k = 1;
    bool exclude_exact_text = true;

    double epsilon = kDefaultEpsilon;
    double cluster_threshold = 0.9;
    double mmr_lambda = 0.5;
    double bm25_k1 = 0.9;
    double bm25_b = 0.4;
    /// Explicit fairness target; otherwise derived from qrels.
    std::optional<std::vector<double>> target;
    std::vector<std::string> attribute_labels;

    std::string llm = "http";  // http | identity | reverse | garbage | oracle
    std::string endpoint = "https://api.openai.com/v1/chat/completions";
    std::string model = "gpt-4o-mini";
    std::string api_key_env = "OPENAI_API_KEY";
    double temperature = 0.0;
    std::uint64_t seed = 42;
    std::string run_tag = "icrank";

    /// Applies one `key = value` setting. Throws InvalidArgument for unknown keys
    /// or unparsable values.
    void set(const std::string& key, const std::string& value);
    /// Throws InvalidArgument unless window >= stride >= 1, depth >= window, epsilon > 0.
    void validate() const;

    static std::vector<std::string> keys();
};

/// Reads `key = value` lines; '#' starts a comment. Relative paths are resolved
/// against the file's directory.
void load_config_file(const std::filesystem::path& path, PipelineConfig& config);

/// Where progress and warnings go.
struct Log {
    std::ostream* out = nullptr;
    void warn(const std::string& message) const;
    void info(const std::string& message) const;
};

struct IndexSummary {
    std::size_t num_queries = 0;
    std::size_t vocabulary = 0;
};

IndexSummary cmd_index_queries(const std::filesystem::path& log_path, const std::filesystem::path& out_path,
                               Bm25Params params, const Log& log = {});

struct MakeExamplesSummary {
    std::vector<ExampleRecord> examples;
    std::vector<std::string> skipped;
};

MakeExamplesSummary cmd_make_examples(const PipelineConfig& config, const std::filesystem::path& out_path,
                                      const Log& log = {});

struct RerankSummary {
    RunSet runs;
    std::vector<std::string> failed_queries;  // fell back to first-stage order
    std::size_t llm_calls = 0;
    std::size_t repaired_windows = 0;
};

/// Needs `examples_path` when mode is Icl (checked before any work).
RerankSummary cmd_rerank(const PipelineConfig& config, LlmClient& client,
                         const std::optional<std::filesystem::path>& examples_path,
                         const std::filesystem::path& out_run,
                         const std::optional<std::filesystem::path>& transcript_path, const Log& log = {});

struct EvaluateResult {
    MetricReport report;
    std::size_t unknown_queries = 0;
    /// metric -> paired t-test against the comparison run (when given)
    std::map<std::string, std::optional<TTestResult>> comparison;
};

EvaluateResult evaluate_runs(const PipelineConfig& config, const RunSet& runs, const Qrels& qrels,
                             const RunSet* compare, const Log& log = {});

EvaluateResult cmd_evaluate(const PipelineConfig& config, const std::filesystem::path& run_path,
                            const std::optional<std::filesystem::path>& compare_path, std::ostream& tsv_out,
                            const std::optional<std::filesystem::path>& json_out, const Log& log = {});

/// One output file, or 11 (lambda = 0.0, 0.1, ..., 1.0) named `<out>.lambda<value>` with `sweep`.
std::vector<std::filesystem::path> cmd_mmr(const PipelineConfig& config, const std::filesystem::path& out_run,
                                           bool sweep, const Log& log = {});

std::vector<ClusterAssignment> cmd_cluster(const PipelineConfig& config, const std::filesystem::path& out_path,
                                           const Log& log = {});

/// Relevance oracle over the configured qrels (query text is mapped back via the
/// queries file, passage text via the corpus with the configured truncation).
OracleClient::Relevance qrels_oracle(const PipelineConfig& config);

} // namespace icrank
