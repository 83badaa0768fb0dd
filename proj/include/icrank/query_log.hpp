#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "icrank/core.hpp"

namespace icrank {

/// Lowercases ASCII letters and splits on runs of non-alphanumeric bytes.
/// Bytes >= 0x80 count as alphanumeric so UTF-8 words survive intact.
std::vector<std::string> tokenize(std::string_view text);

struct Posting {
    std::size_t query;  // index into the index's query table
    std::uint32_t tf;
};

struct ScoredQuery {
    Query query;
    double score = 0.0;
};

struct Bm25Params {
    double k1 = 0.9;
    double b = 0.4;
};

/// BM25 inverted index over a query log, used to find the logged query most
/// similar to a test query.
class QueryLogIndex {
public:
    /// Throws DuplicateQueryId.
    static QueryLogIndex build(std::span<const Query> queries, Bm25Params params = {});

    std::size_t size() const noexcept { return queries_.size(); }
    std::size_t vocabulary_size() const noexcept { return postings_.size(); }
    double average_length() const noexcept { return avg_len_; }
    const Bm25Params& params() const noexcept { return params_; }
    const std::vector<Query>& queries() const noexcept { return queries_; }
    std::size_t length(std::size_t query) const { return lengths_.at(query); }
    const std::vector<Posting>* postings(const std::string& term) const;

    /// Inverse document frequency ln((N - df + 0.5) / (df + 0.5) + 1).
    double idf(const std::string& term) const;

    /// Top-k log queries by BM25 score against the probe's distinct terms.
    /// Only queries sharing at least one term are returned; ties by query_id.
    /// With `exclude_exact_text`, log queries whose token sequence equals the
    /// probe's are skipped.
    std::vector<ScoredQuery> similar_queries(const Query& probe, std::size_t k,
                                             bool exclude_exact_text = true) const;

    void save(const std::filesystem::path& path) const;
    static QueryLogIndex load(const std::filesystem::path& path);

private:
    Bm25Params params_;
    std::vector<Query> queries_;
    std::vector<std::size_t> lengths_;
    std::vector<std::vector<std::string>> tokens_;
    std::map<std::string, std::vector<Posting>> postings_;
    double avg_len_ = 0.0;
};

} // namespace icrank
