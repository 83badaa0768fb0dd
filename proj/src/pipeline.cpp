#include "icrank/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <exception>
#include <fstream>
#include <ostream>
#include <sstream>
#include <memory>
#include <mutex>
#include <thread>

#include "icrank/error.hpp"
#include "icrank/topic_cluster.hpp"

namespace icrank {

std::string_view to_string(Objective objective) noexcept {
    switch (objective) {
    case Objective::Fairness: return "fairness";
    case Objective::Diversity: return "diversity";
    case Objective::RelevanceOnly: return "relevance";
    }
    return "fairness";
}

Objective parse_objective(std::string_view name) {
    for (auto o : {Objective::Fairness, Objective::Diversity, Objective::RelevanceOnly}) {
        if (to_string(o) == name) {
            return o;
        }
    }
    throw Error(ErrorCode::InvalidArgument, std::string(name), "unknown objective");
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

double to_double(const std::string& key, const std::string& value) {
    double v = 0.0;
    const auto* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, v);
    if (ec != std::errc{} || ptr != end) {
        throw Error(ErrorCode::InvalidArgument, key, "expected a number, got '" + value + "'");
    }
    return v;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& value) {
    std::uint64_t v = 0;
    const auto* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, v);
    if (ec != std::errc{} || ptr != end) {
        throw Error(ErrorCode::InvalidArgument, key, "expected a non-negative integer, got '" + value + "'");
    }
    return v;
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") {
        return true;
    }
    if (value == "false" || value == "0" || value == "no") {
        return false;
    }
    throw Error(ErrorCode::InvalidArgument, key, "expected true/false, got '" + value + "'");
}

} // namespace

std::vector<std::string> PipelineConfig::keys() {
    return {"corpus",       "queries",   "query-log",        "index",       "run",         "qrels",
            "subtopics",    "attributes", "clusters",        "static-example", "objective", "strategy",
            "ordering",     "mode",      "window",           "stride",      "depth",       "max-words",
            "cutoff",       "workers",   "similar-k",        "exclude-exact-text", "epsilon", "cluster-threshold",
            "mmr-lambda",   "bm25-k1",   "bm25-b",           "target",      "attribute-labels", "llm",
            "endpoint",     "model",     "api-key-env",      "temperature", "seed",        "run-tag"};
}

void PipelineConfig::set(const std::string& key, const std::string& raw) {
    const std::string value = trim(raw);
    if (key == "corpus") corpus = value;
    else if (key == "queries") queries = value;
    else if (key == "query-log") query_log = value;
    else if (key == "index") index = value;
    else if (key == "run") run = value;
    else if (key == "qrels") qrels = value;
    else if (key == "subtopics") subtopics = value;
    else if (key == "attributes") attributes = value;
    else if (key == "clusters") clusters = value;
    else if (key == "static-example") static_example = value;
    else if (key == "objective") objective = parse_objective(value);
    else if (key == "strategy") strategy = parse_strategy(value);
    else if (key == "ordering") ordering = parse_ordering(value);
    else if (key == "mode") mode = parse_prompt_mode(value);
    else if (key == "window") window = to_unsigned(key, value);
    else if (key == "stride") stride = to_unsigned(key, value);
    else if (key == "depth") depth = to_unsigned(key, value);
    else if (key == "max-words") max_words = to_unsigned(key, value);
    else if (key == "cutoff") cutoff = to_unsigned(key, value);
    else if (key == "workers") workers = to_unsigned(key, value);
    else if (key == "similar-k") similar_k = to_unsigned(key, value);
    else if (key == "exclude-exact-text") exclude_exact_text = to_bool(key, value);
    else if (key == "epsilon") epsilon = to_double(key, value);
    else if (key == "cluster-threshold") cluster_threshold = to_double(key, value);
    else if (key == "mmr-lambda") mmr_lambda = to_double(key, value);
    else if (key == "bm25-k1") bm25_k1 = to_double(key, value);
    else if (key == "bm25-b") bm25_b = to_double(key, value);
    else if (key == "target") {
        std::vector<double> probs;
        for (const auto& item : split_list(value)) {
            probs.push_back(to_double(key, item));
        }
        CategoricalDistribution check(probs);
        target = std::move(probs);
    }
    else if (key == "attribute-labels") attribute_labels = split_list(value);
    else if (key == "llm") llm = value;
    else if (key == "endpoint") endpoint = value;
    else if (key == "model") model = value;
    else if (key == "api-key-env") api_key_env = value;
    else if (key == "temperature") temperature = to_double(key, value);
    else if (key == "seed") seed = to_unsigned(key, value);
    else if (key == "run-tag") run_tag = value;
    else throw Error(ErrorCode::InvalidArgument, key, "unknown configuration key");
}

void PipelineConfig::validate() const {
    if (stride < 1 || window < stride) {
        throw Error(ErrorCode::InvalidArgument, "window/stride", "require window >= stride >= 1");
    }
    if (depth < window) {
        throw Error(ErrorCode::InvalidArgument, "depth", "require depth >= window");
    }
    if (!(epsilon > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "epsilon", "require epsilon > 0");
    }
    if (!(mmr_lambda >= 0.0 && mmr_lambda <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "mmr-lambda", "require 0 <= lambda <= 1");
    }
    if (!(cluster_threshold > 0.0 && cluster_threshold <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "cluster-threshold", "require 0 < threshold <= 1");
    }
    if (temperature < 0.0) {
        throw Error(ErrorCode::InvalidArgument, "temperature", "require temperature >= 0");
    }
    if (cutoff < 1 || similar_k < 1) {
        throw Error(ErrorCode::InvalidArgument, "cutoff/similar-k", "must be >= 1");
    }
}

void load_config_file(const std::filesystem::path& path, PipelineConfig& config) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, path.string(), "cannot open config");
    }
    static const std::vector<std::string> path_keys = {"corpus",     "queries",  "query-log", "index",
                                                      "run",        "qrels",    "subtopics", "attributes",
                                                      "clusters",   "static-example"};
    const auto base = path.parent_path();
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.resize(hash);
        }
        line = trim(line);
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorCode::Parse, path.string() + ":" + std::to_string(lineno), "expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (std::find(path_keys.begin(), path_keys.end(), key) != path_keys.end() && !value.empty() &&
            std::filesystem::path(value).is_relative()) {
            value = (base / value).lexically_normal().string();
        }
        try {
            config.set(key, value);
        } catch (const Error& e) {
            throw Error(ErrorCode::Parse, path.string() + ":" + std::to_string(lineno), e.what());
        }
    }
}

void Log::warn(const std::string& message) const {
    if (out) {
        *out << "warning: " << message << '\n';
    }
}

void Log::info(const std::string& message) const {
    if (out) {
        *out << message << '\n';
    }
}

namespace {

/// Runs fn(i) for i in [0, n) on up to `workers` threads; rethrows the first failure.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                while (true) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= n) {
                        return;
                    }
                    try {
                        fn(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) {
                            failure = std::current_exception();
                        }
                        next.store(n);
                        return;
                    }
                }
            });
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

void require_path(const std::filesystem::path& p, const char* key) {
    if (p.empty()) {
        throw Error(ErrorCode::InvalidArgument, key, "required input not configured");
    }
}

// Attribute proportions of the query's relevant, attributed documents.
std::optional<CategoricalDistribution> qrels_target(const Qrels& qrels, const std::string& query_id,
                                                    const AttributeTable& attrs) {
    const auto* grades = qrels.grades(query_id);
    if (!grades) {
        return std::nullopt;
    }
    std::vector<Document> relevant;
    for (const auto& [doc, grade] : *grades) {
        auto it = attrs.values.find(doc);
        if (grade > 0 && it != attrs.values.end()) {
            relevant.push_back({doc, {}, it->second});
        }
    }
    if (relevant.empty()) {
        return std::nullopt;
    }
    return target_distribution(relevant, attrs.schema);
}

QueryLogIndex load_index(const PipelineConfig& config) {
    if (!config.index.empty()) {
        return QueryLogIndex::load(config.index);
    }
    require_path(config.query_log, "query-log");
    const auto log_queries = read_queries(config.query_log);
    return QueryLogIndex::build(log_queries, {config.bm25_k1, config.bm25_b});
}

// Scores a ranking by position the same way the sliding-window output does.
RankedList rank_scored(const RankedList& list, std::size_t depth, const std::string& tag) {
    const std::size_t d = std::min(depth, list.size());
    std::vector<RankedEntry> entries;
    entries.reserve(list.size());
    for (std::size_t p = 0; p < list.size(); ++p) {
        entries.push_back({list[p].doc_id, static_cast<double>(d) - static_cast<double>(p)});
    }
    return RankedList::canonicalize(list.query_id(), std::move(entries), tag);
}

RankedList with_tag(const RankedList& list, const std::string& tag) {
    return RankedList::canonicalize(list.query_id(), list.entries(), tag);
}

ClusterAssignment cluster_top(const RankedList& list, const Corpus& corpus, std::size_t depth, double threshold) {
    std::vector<Document> docs;
    for (std::size_t i = 0; i < std::min(depth, list.size()); ++i) {
        auto it = corpus.find(list[i].doc_id);
        if (it == corpus.end()) {
            throw Error(ErrorCode::UnknownDocument, list[i].doc_id);
        }
        docs.push_back(it->second);
    }
    auto assignment = agglomerative_cluster(docs, threshold);
    assignment.query_id = list.query_id();
    return assignment;
}

} // namespace

IndexSummary cmd_index_queries(const std::filesystem::path& log_path, const std::filesystem::path& out_path,
                               Bm25Params params, const Log& log) {
    const auto queries = read_queries(log_path);
    const auto index = QueryLogIndex::build(queries, params);
    if (index.size() == 0) {
        log.warn("query log " + log_path.string() + " is empty; index has no entries");
    }
    index.save(out_path);
    log.info("indexed " + std::to_string(index.size()) + " queries, vocabulary " +
             std::to_string(index.vocabulary_size()));
    return {index.size(), index.vocabulary_size()};
}

MakeExamplesSummary cmd_make_examples(const PipelineConfig& config, const std::filesystem::path& out_path,
                                      const Log& log) {
    config.validate();
    require_path(config.queries, "queries");
    require_path(config.run, "run");
    require_path(config.corpus, "corpus");

    const bool needs_target = config.strategy == ExampleStrategy::Target ||
                              config.strategy == ExampleStrategy::Adversarial ||
                              config.strategy == ExampleStrategy::Uniform;
    if (needs_target && config.objective == Objective::RelevanceOnly) {
        throw Error(ErrorCode::InvalidArgument, "strategy",
                    std::string(to_string(config.strategy)) + " needs a fairness or diversity objective");
    }

    std::optional<IclExample> static_example;
    if (config.strategy == ExampleStrategy::Static) {
        require_path(config.static_example, "static-example");
        static_example = read_example_file(config.static_example);
    }

    const auto index = load_index(config);
    const auto queries = read_queries(config.queries);
    const auto runs = read_run(config.run);
    Corpus corpus = read_corpus(config.corpus);

    std::optional<AttributeTable> attrs;
    std::optional<Qrels> qrels;
    std::map<std::string, ClusterAssignment> cached_clusters;
    if (needs_target && config.objective == Objective::Fairness) {
        require_path(config.attributes, "attributes");
        attrs = read_attributes(config.attributes, config.attribute_labels);
        attach_attributes(corpus, *attrs);
        if (config.target && config.target->size() != static_cast<std::size_t>(attrs->schema.k())) {
            throw Error(ErrorCode::InvalidArgument, "target", "length differs from the number of attribute labels");
        }
        if (!config.target && !config.qrels.empty()) {
            qrels = read_qrels(config.qrels);
        }
    }
    if (needs_target && config.objective == Objective::Diversity && !config.clusters.empty()) {
        cached_clusters = read_cluster_cache(config.clusters);
    }

    std::vector<std::optional<ExampleRecord>> results(queries.size());
    std::vector<std::string> warnings(queries.size());

    parallel_for(queries.size(), config.workers, [&](std::size_t qi) {
        const Query& test = queries[qi];
        ExampleOptions options;
        options.strategy = config.strategy;
        options.ordering = config.ordering;
        options.window = config.window;
        options.epsilon = config.epsilon;
        options.static_example = static_example;
        SeededRng rng(derive_seed(config.seed, test.query_id));

        if (config.strategy == ExampleStrategy::Static) {
            results[qi] = ExampleRecord{test.query_id, build_example(test, RankedList{}, corpus, options, rng)};
            return;
        }

        const auto similar = index.similar_queries(test, config.similar_k, config.exclude_exact_text);
        if (similar.empty()) {
            warnings[qi] = test.query_id + ": no similar query in the log, skipped";
            return;
        }
        const Query& example_query = similar.front().query;
        auto run_it = runs.find(example_query.query_id);
        if (run_it == runs.end()) {
            warnings[qi] = test.query_id + ": no first-stage run for example query " + example_query.query_id +
                           ", skipped";
            return;
        }
        const RankedList& retrieved = run_it->second;

        const Corpus* docs = &corpus;
        Corpus clustered;
        if (needs_target && config.objective == Objective::Fairness) {
            if (config.target) {
                options.target = CategoricalDistribution(*config.target);
            } else if (qrels) {
                options.target = qrels_target(*qrels, test.query_id, *attrs);
            }
            if (!options.target) {
                options.target = uniform_distribution(attrs->schema);
                warnings[qi] = test.query_id + ": no relevant attributed documents in qrels, using a uniform target";
            }
        } else if (needs_target && config.objective == Objective::Diversity) {
            ClusterAssignment assignment;
            if (auto c = cached_clusters.find(example_query.query_id); c != cached_clusters.end()) {
                assignment = c->second;
            } else {
                assignment = cluster_top(retrieved, corpus, config.depth, config.cluster_threshold);
            }
            for (std::size_t i = 0; i < std::min(config.depth, retrieved.size()); ++i) {
                auto it = corpus.find(retrieved[i].doc_id);
                if (it == corpus.end()) {
                    continue;
                }
                Document d = it->second;
                if (auto l = assignment.labels.find(d.doc_id); l != assignment.labels.end()) {
                    d.attribute = l->second;
                }
                clustered.emplace(d.doc_id, std::move(d));
            }
            docs = &clustered;
            // Uniform over the clusters present in the example window.
            std::vector<Document> window_docs;
            for (std::size_t i = 0; i < std::min(config.window, retrieved.size()); ++i) {
                if (auto it = clustered.find(retrieved[i].doc_id); it != clustered.end()) {
                    window_docs.push_back(it->second);
                }
            }
            try {
                options.target = present_groups_uniform(
                    window_docs, static_cast<std::size_t>(std::max(assignment.num_clusters, 1)));
            } catch (const Error& e) {
                warnings[qi] = test.query_id + ": " + e.what() + ", skipped";
                return;
            }
        }

        try {
            results[qi] = ExampleRecord{test.query_id, build_example(example_query, retrieved, *docs, options, rng)};
        } catch (const Error& e) {
            if (e.code() == ErrorCode::TooFewDocuments || e.code() == ErrorCode::MissingAttribute ||
                e.code() == ErrorCode::UnknownDocument) {
                warnings[qi] = test.query_id + ": " + e.what() + ", skipped";
                return;
            }
            throw;
        }
    });

    MakeExamplesSummary summary;
    for (std::size_t qi = 0; qi < queries.size(); ++qi) {
        if (!warnings[qi].empty()) {
            log.warn(warnings[qi]);
        }
        if (results[qi]) {
            summary.examples.push_back(std::move(*results[qi]));
        } else {
            summary.skipped.push_back(queries[qi].query_id);
        }
    }
    write_examples(out_path, summary.examples);
    log.info("wrote " + std::to_string(summary.examples.size()) + " examples (" +
             std::to_string(summary.skipped.size()) + " skipped)");
    return summary;
}

RerankSummary cmd_rerank(const PipelineConfig& config, LlmClient& client,
                         const std::optional<std::filesystem::path>& examples_path,
                         const std::filesystem::path& out_run,
                         const std::optional<std::filesystem::path>& transcript_path, const Log& log) {
    config.validate();
    if (config.mode == PromptMode::Icl) {
        if (!examples_path || examples_path->empty()) {
            throw Error(ErrorCode::InvalidArgument, "examples", "mode icl requires an examples file");
        }
        if (!std::filesystem::exists(*examples_path)) {
            throw Error(ErrorCode::Io, examples_path->string(), "examples file not found");
        }
    }
    require_path(config.queries, "queries");
    require_path(config.run, "run");
    require_path(config.corpus, "corpus");

    std::map<std::string, IclExample> examples;
    if (config.mode == PromptMode::Icl) {
        for (auto& rec : read_examples(*examples_path)) {
            examples.insert_or_assign(rec.test_query_id, std::move(rec.example));
        }
    }
    const auto queries = read_queries(config.queries);
    const auto runs = read_run(config.run);
    const Corpus corpus = read_corpus(config.corpus);

    std::vector<const Query*> work;
    for (const auto& q : queries) {
        if (runs.contains(q.query_id)) {
            work.push_back(&q);
        } else {
            log.warn(q.query_id + ": no first-stage run, skipped");
        }
    }

    SlidingWindowOptions options;
    options.mode = config.mode;
    options.pao_objective =
        config.objective == Objective::Diversity ? PaoObjective::Diversity : PaoObjective::Fairness;
    options.window = config.window;
    options.stride = config.stride;
    options.depth = config.depth;
    options.max_words = config.max_words;
    options.generation = {config.model, config.temperature, static_cast<std::int64_t>(config.seed)};

    struct Outcome {
        std::optional<RankedList> list;
        std::vector<TranscriptRecord> transcript;
        std::string warning;
        bool failed = false;
    };
    std::vector<Outcome> outcomes(work.size());

    parallel_for(work.size(), config.workers, [&](std::size_t wi) {
        const Query& q = *work[wi];
        const RankedList& first_stage = runs.at(q.query_id);
        auto& outcome = outcomes[wi];
        std::optional<IclExample> example;
        SlidingWindowOptions opts = options;
        if (config.mode == PromptMode::Icl) {
            if (auto it = examples.find(q.query_id); it != examples.end()) {
                example = it->second;
            } else {
                opts.mode = PromptMode::ZeroShot;
                outcome.warning = q.query_id + ": no example, reranked zero-shot";
            }
        }
        try {
            outcome.list = sliding_window_rerank(
                client, first_stage, q.text, corpus, example, opts,
                [&](const TranscriptRecord& r) { outcome.transcript.push_back(r); });
            outcome.list = with_tag(*outcome.list, config.run_tag);
        } catch (const Error& e) {
            if (!is_transport_error(e.code())) {
                throw;
            }
            outcome.failed = true;
            outcome.warning = q.query_id + ": " + e.what() + "; kept first-stage order";
            outcome.list = rank_scored(first_stage, config.depth, config.run_tag);
        }
    });

    RerankSummary summary;
    std::vector<TranscriptRecord> transcript;
    for (std::size_t wi = 0; wi < work.size(); ++wi) {
        auto& o = outcomes[wi];
        if (!o.warning.empty()) {
            log.warn(o.warning);
        }
        if (o.failed) {
            summary.failed_queries.push_back(work[wi]->query_id);
        }
        for (auto& r : o.transcript) {
            ++summary.llm_calls;
            summary.repaired_windows += r.repaired ? 1 : 0;
            transcript.push_back(std::move(r));
        }
        summary.runs.emplace(work[wi]->query_id, std::move(*o.list));
    }
    write_run(out_run, summary.runs);
    if (transcript_path) {
        write_transcript(*transcript_path, transcript);
    }
    log.info("reranked " + std::to_string(summary.runs.size()) + " queries with " +
             std::to_string(summary.llm_calls) + " LLM calls (" + std::to_string(summary.repaired_windows) +
             " repaired, " + std::to_string(summary.failed_queries.size()) + " queries fell back)");
    return summary;
}

EvaluateResult evaluate_runs(const PipelineConfig& config, const RunSet& runs, const Qrels& qrels_in,
                             const RunSet* compare, const Log& log) {
    const std::size_t cutoff = config.cutoff;
    const std::string suffix = std::to_string(cutoff);
    Qrels qrels = qrels_in;

    std::optional<AttributeTable> attrs;
    std::map<std::string, ClusterAssignment> clusters;
    if (config.objective == Objective::Fairness && !config.attributes.empty()) {
        attrs = read_attributes(config.attributes, config.attribute_labels);
    }
    if (config.objective == Objective::Diversity) {
        if (!config.subtopics.empty()) {
            read_subtopic_qrels(config.subtopics, qrels);
        }
        if (!config.clusters.empty()) {
            clusters = read_cluster_cache(config.clusters);
            if (!qrels.has_subtopics()) {
                // Relevant documents cover the topic cluster they fall in.
                for (const auto& [qid, a] : clusters) {
                    for (const auto& [doc, label] : a.labels) {
                        if (qrels.grade(qid, doc) > 0) {
                            qrels.add_subtopic(qid, doc, "cluster_" + std::to_string(label));
                        }
                    }
                }
            }
        }
    }

    auto score = [&](const RunSet& set, EvaluateResult& result, bool warn) {
        for (const auto& [qid, list] : set) {
            if (!qrels.has_query(qid)) {
                ++result.unknown_queries;
                continue;
            }
            const double ndcg = ndcg_at(list, qrels, cutoff);
            result.report.add(qid, "ndcg_cut_" + suffix, ndcg);
            if (attrs) {
                std::optional<CategoricalDistribution> target;
                if (config.target) {
                    target = CategoricalDistribution(*config.target);
                } else {
                    target = qrels_target(qrels, qid, *attrs);
                }
                if (!target) {
                    if (warn) {
                        log.warn(qid + ": no relevant attributed documents, AWRF skipped");
                    }
                } else {
                    try {
                        const double fair = awrf(list, attrs->values, *target, cutoff);
                        result.report.add(qid, "awrf_" + suffix, fair);
                        result.report.add(qid, "m1_" + suffix, ndcg * fair);
                    } catch (const Error& e) {
                        if (warn) {
                            log.warn(qid + ": " + e.what() + ", AWRF skipped");
                        }
                    }
                }
            }
            if (config.objective == Objective::Diversity) {
                if (qrels.has_subtopics()) {
                    result.report.add(qid, "alpha_ndcg_cut_" + suffix, alpha_ndcg_at(list, qrels, 1.0, cutoff));
                }
                if (auto c = clusters.find(qid); c != clusters.end() && c->second.num_clusters > 0) {
                    std::unordered_map<std::string, AttributeValue> labels(c->second.labels.begin(),
                                                                           c->second.labels.end());
                    try {
                        result.report.add(
                            qid, "awrf_" + suffix,
                            awrf(list, labels, uniform_distribution(static_cast<std::size_t>(c->second.num_clusters)),
                                 cutoff));
                    } catch (const Error& e) {
                        if (warn) {
                            log.warn(qid + ": " + e.what() + ", AWRF skipped");
                        }
                    }
                }
            }
        }
        result.report.finalize();
    };

    EvaluateResult result;
    score(runs, result, true);
    if (result.unknown_queries > 0) {
        log.warn(std::to_string(result.unknown_queries) + " run queries have no judgments and were skipped");
    }
    if (compare) {
        EvaluateResult other;
        score(*compare, other, false);
        for (const auto& [metric, mean] : result.report.means) {
            std::vector<double> a;
            std::vector<double> b;
            for (const auto& [qid, values] : result.report.per_query) {
                auto mine = values.find(metric);
                auto theirs_q = other.report.per_query.find(qid);
                if (mine == values.end() || theirs_q == other.report.per_query.end()) {
                    continue;
                }
                auto theirs = theirs_q->second.find(metric);
                if (theirs == theirs_q->second.end()) {
                    continue;
                }
                a.push_back(mine->second);
                b.push_back(theirs->second);
            }
            std::optional<TTestResult> t;
            if (a.size() >= 2) {
                try {
                    t = paired_t_test(a, b);
                } catch (const Error& e) {
                    log.warn(metric + ": " + e.what());
                }
            }
            result.comparison[metric] = t;
        }
    }
    return result;
}

EvaluateResult cmd_evaluate(const PipelineConfig& config, const std::filesystem::path& run_path,
                            const std::optional<std::filesystem::path>& compare_path, std::ostream& tsv_out,
                            const std::optional<std::filesystem::path>& json_out, const Log& log) {
    config.validate();
    require_path(config.qrels, "qrels");
    const auto runs = read_run(run_path);
    const auto qrels = read_qrels(config.qrels);
    std::optional<RunSet> compare;
    if (compare_path) {
        compare = read_run(*compare_path);
    }
    auto result = evaluate_runs(config, runs, qrels, compare ? &*compare : nullptr, log);

    write_report_tsv(tsv_out, result.report);
    auto j = report_to_json(result.report);
    for (const auto& [metric, t] : result.comparison) {
        char buf[96];
        if (t) {
            std::snprintf(buf, sizeof(buf), "%.6f\t%.6f", t->t, t->p);
            j["comparison"][metric] = {{"t", t->t}, {"p", t->p}, {"df", t->df}};
        } else {
            std::snprintf(buf, sizeof(buf), "nan\tnan");
            j["comparison"][metric] = nullptr;
        }
        tsv_out << "ttest:" << metric << "\tall\t" << buf << '\n';
    }
    if (json_out) {
        std::ofstream out(*json_out, std::ios::binary);
        if (!out) {
            throw Error(ErrorCode::Io, json_out->string(), "cannot open for writing");
        }
        out << j.dump(2) << '\n';
    }
    return result;
}

std::vector<std::filesystem::path> cmd_mmr(const PipelineConfig& config, const std::filesystem::path& out_run,
                                           bool sweep, const Log& log) {
    require_path(config.run, "run");
    require_path(config.corpus, "corpus");
    const auto runs = read_run(config.run);
    const auto corpus = read_corpus(config.corpus);

    std::vector<std::pair<double, std::filesystem::path>> jobs;
    if (sweep) {
        for (int i = 0; i <= 10; ++i) {
            char buf[16];
            std::snprintf(buf, sizeof(buf), "%.1f", i / 10.0);
            jobs.emplace_back(i / 10.0, out_run.string() + ".lambda" + buf);
        }
    } else {
        jobs.emplace_back(config.mmr_lambda, out_run);
    }
    std::vector<std::filesystem::path> written;
    for (const auto& [lambda, path] : jobs) {
        RunSet out;
        for (const auto& [qid, list] : runs) {
            MmrConfig cfg{lambda, config.depth, MmrSimilarity::JaccardTokens};
            out.emplace(qid, with_tag(mmr_rerank(list, corpus, cfg), "mmr"));
        }
        write_run(path, out);
        written.push_back(path);
    }
    log.info("wrote " + std::to_string(written.size()) + " MMR run file(s)");
    return written;
}

std::vector<ClusterAssignment> cmd_cluster(const PipelineConfig& config, const std::filesystem::path& out_path,
                                           const Log& log) {
    require_path(config.run, "run");
    require_path(config.corpus, "corpus");
    const auto runs = read_run(config.run);
    const auto corpus = read_corpus(config.corpus);
    std::vector<const RankedList*> lists;
    for (const auto& [qid, list] : runs) {
        if (!list.empty()) {
            lists.push_back(&list);
        }
    }
    std::vector<ClusterAssignment> out(lists.size());
    parallel_for(lists.size(), config.workers, [&](std::size_t i) {
        out[i] = cluster_top(*lists[i], corpus, config.depth, config.cluster_threshold);
    });
    write_cluster_cache(out_path, out);
    log.info("clustered " + std::to_string(out.size()) + " queries");
    return out;
}

OracleClient::Relevance qrels_oracle(const PipelineConfig& config) {
    require_path(config.qrels, "qrels");
    require_path(config.queries, "queries");
    require_path(config.corpus, "corpus");
    auto qrels = std::make_shared<Qrels>(read_qrels(config.qrels));
    auto by_text = std::make_shared<std::map<std::string, std::string>>();
    for (const auto& q : read_queries(config.queries)) {
        by_text->emplace(q.text, q.query_id);
    }
    auto docs_by_text = std::make_shared<std::map<std::string, std::vector<std::string>>>();
    for (const auto& [id, doc] : read_corpus(config.corpus)) {
        (*docs_by_text)[truncate_words(doc.text, config.max_words)].push_back(id);
    }
    return [qrels, by_text, docs_by_text](const std::string& query, const std::string& passage) {
        auto q = by_text->find(query);
        auto d = docs_by_text->find(passage);
        if (q == by_text->end() || d == docs_by_text->end()) {
            return 0.0;
        }
        int best = 0;
        for (const auto& id : d->second) {
            best = std::max(best, qrels->grade(q->second, id));
        }
        return static_cast<double>(best);
    };
}

} // namespace icrank
