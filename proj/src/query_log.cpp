#include "icrank/query_log.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <unordered_set>

#include <json.hpp>

#include "icrank/error.hpp"

namespace icrank {

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        const bool word = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
        if (word) {
            current.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : ch);
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) {
        tokens.push_back(std::move(current));
    }
    return tokens;
}

QueryLogIndex QueryLogIndex::build(std::span<const Query> queries, Bm25Params params) {
    QueryLogIndex index;
    index.params_ = params;
    std::unordered_set<std::string_view> ids;
    for (const auto& q : queries) {
        if (q.query_id.empty()) {
            throw Error(ErrorCode::InvalidArgument, q.text, "empty query_id");
        }
        if (!ids.insert(q.query_id).second) {
            throw Error(ErrorCode::DuplicateQueryId, q.query_id);
        }
    }
    index.queries_.assign(queries.begin(), queries.end());
    double total = 0.0;
    for (std::size_t qi = 0; qi < index.queries_.size(); ++qi) {
        auto tokens = tokenize(index.queries_[qi].text);
        std::map<std::string, std::uint32_t> tf;
        for (const auto& t : tokens) {
            ++tf[t];
        }
        for (const auto& [term, count] : tf) {
            index.postings_[term].push_back({qi, count});
        }
        index.lengths_.push_back(tokens.size());
        total += static_cast<double>(tokens.size());
        index.tokens_.push_back(std::move(tokens));
    }
    index.avg_len_ = index.queries_.empty() ? 0.0 : total / static_cast<double>(index.queries_.size());
    return index;
}

const std::vector<Posting>* QueryLogIndex::postings(const std::string& term) const {
    auto it = postings_.find(term);
    return it == postings_.end() ? nullptr : &it->second;
}

double QueryLogIndex::idf(const std::string& term) const {
    const auto* list = postings(term);
    const double df = list ? static_cast<double>(list->size()) : 0.0;
    const auto n = static_cast<double>(queries_.size());
    return std::log((n - df + 0.5) / (df + 0.5) + 1.0);
}

std::vector<ScoredQuery> QueryLogIndex::similar_queries(const Query& probe, std::size_t k,
                                                        bool exclude_exact_text) const {
    if (k == 0) {
        throw Error(ErrorCode::InvalidArgument, probe.query_id, "k must be >= 1");
    }
    const auto probe_tokens = tokenize(probe.text);
    const std::set<std::string> terms(probe_tokens.begin(), probe_tokens.end());

    std::unordered_map<std::size_t, double> scores;
    for (const auto& term : terms) {
        const auto* list = postings(term);
        if (!list) {
            continue;
        }
        const double w = idf(term);
        for (const auto& p : *list) {
            const double len_ratio = avg_len_ > 0.0 ? static_cast<double>(lengths_[p.query]) / avg_len_ : 0.0;
            const double tf = p.tf;
            const double norm = params_.k1 * (1.0 - params_.b + params_.b * len_ratio);
            scores[p.query] += w * tf * (params_.k1 + 1.0) / (tf + norm);
        }
    }

    std::vector<ScoredQuery> hits;
    hits.reserve(scores.size());
    for (const auto& [qi, score] : scores) {
        if (exclude_exact_text && tokens_[qi] == probe_tokens) {
            continue;
        }
        hits.push_back({queries_[qi], score});
    }
    std::sort(hits.begin(), hits.end(), [](const ScoredQuery& a, const ScoredQuery& b) {
        if (a.score != b.score) {
            return a.score > b.score;
        }
        return a.query.query_id < b.query.query_id;
    });
    if (hits.size() > k) {
        hits.resize(k);
    }
    return hits;
}

// The serialized form stores the raw log plus parameters; postings are rebuilt on
// load, which is linear and keeps the file format trivially stable.
void QueryLogIndex::save(const std::filesystem::path& path) const {
    nlohmann::json j;
    j["format"] = "icrank-query-index/1";
    j["k1"] = params_.k1;
    j["b"] = params_.b;
    j["num_queries"] = queries_.size();
    j["vocabulary_size"] = postings_.size();
    j["average_length"] = avg_len_;
    auto& qs = j["queries"] = nlohmann::json::array();
    for (const auto& q : queries_) {
        qs.push_back({{"query_id", q.query_id}, {"text", q.text}});
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::Io, path.string(), "cannot open for writing");
    }
    out << j.dump() << '\n';
}

QueryLogIndex QueryLogIndex::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, path.string(), "cannot open");
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Parse, path.string(), e.what());
    }
    if (j.value("format", "") != "icrank-query-index/1") {
        throw Error(ErrorCode::Parse, path.string(), "not a query index file");
    }
    std::vector<Query> queries;
    for (const auto& q : j.at("queries")) {
        queries.push_back({q.at("query_id").get<std::string>(), q.at("text").get<std::string>()});
    }
    return build(queries, {j.at("k1").get<double>(), j.at("b").get<double>()});
}

} // namespace icrank
