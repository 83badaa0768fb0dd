#include "icrank/topic_cluster.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "icrank/error.hpp"
#include "icrank/query_log.hpp"

namespace icrank {

TokenSet token_set(const Document& doc) {
    auto tokens = tokenize(doc.text);
    return {tokens.begin(), tokens.end()};
}

double jaccard_distance(const TokenSet& a, const TokenSet& b) {
    if (a.empty() && b.empty()) {
        return 0.0;
    }
    std::size_t common = 0;
    for (const auto& t : a) {
        common += b.count(t);
    }
    const std::size_t uni = a.size() + b.size() - common;
    return 1.0 - static_cast<double>(common) / static_cast<double>(uni);
}

double jaccard_distance(const Document& a, const Document& b) {
    return jaccard_distance(token_set(a), token_set(b));
}

ClusterAssignment agglomerative_cluster(std::span<const Document> docs, double threshold) {
    if (docs.empty()) {
        throw Error(ErrorCode::InvalidArgument, "", "cannot cluster an empty document list");
    }
    if (!(threshold > 0.0 && threshold <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, std::to_string(threshold), "threshold must be in (0, 1]");
    }
    const std::size_t n = docs.size();
    std::vector<TokenSet> sets;
    sets.reserve(n);
    for (const auto& d : docs) {
        sets.push_back(token_set(d));
    }

    // Cluster c is identified by its smallest member position; dist is kept
    // up to date with the complete-linkage (max) update rule.
    std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            dist[i][j] = dist[j][i] = jaccard_distance(sets[i], sets[j]);
        }
    }
    std::vector<bool> alive(n, true);
    std::vector<std::size_t> owner(n);
    for (std::size_t i = 0; i < n; ++i) {
        owner[i] = i;
    }

    ClusterAssignment out;
    while (true) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = n;
        std::size_t bj = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (!alive[i]) {
                continue;
            }
            for (std::size_t j = i + 1; j < n; ++j) {
                if (alive[j] && dist[i][j] < best) {
                    best = dist[i][j];
                    bi = i;
                    bj = j;
                }
            }
        }
        if (bi == n || best > threshold) {
            break;
        }
        out.merge_distances.push_back(best);
        alive[bj] = false;
        for (std::size_t m = 0; m < n; ++m) {
            if (owner[m] == bj) {
                owner[m] = bi;
            }
        }
        for (std::size_t c = 0; c < n; ++c) {
            if (alive[c] && c != bi) {
                dist[bi][c] = dist[c][bi] = std::max(dist[bi][c], dist[bj][c]);
            }
        }
    }

    // owner[] points at the smallest member, so scanning in order numbers
    // clusters by first appearance.
    std::vector<int> label_of(n, -1);
    int next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        auto& lbl = label_of[owner[i]];
        if (lbl < 0) {
            lbl = next++;
        }
        out.labels[docs[i].doc_id] = lbl;
    }
    out.num_clusters = next;
    return out;
}

std::pair<std::vector<Document>, AttributeSchema> labels_to_attributes(const ClusterAssignment& assignment,
                                                                       std::span<const Document> docs) {
    std::vector<Document> out;
    out.reserve(docs.size());
    for (const auto& d : docs) {
        auto it = assignment.labels.find(d.doc_id);
        if (it == assignment.labels.end()) {
            throw Error(ErrorCode::UnlabeledDocument, d.doc_id);
        }
        Document copy = d;
        copy.attribute = it->second;
        out.push_back(std::move(copy));
    }
    std::vector<std::string> names;
    for (int c = 0; c < std::max(assignment.num_clusters, 1); ++c) {
        names.push_back("cluster_" + std::to_string(c));
    }
    return {std::move(out), AttributeSchema("topic", std::move(names))};
}

void write_cluster_cache(const std::filesystem::path& path, std::span<const ClusterAssignment> assignments) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::Io, path.string(), "cannot open for writing");
    }
    for (const auto& a : assignments) {
        // Emit in cluster order, then doc_id, for stable files.
        std::vector<std::pair<int, std::string>> rows;
        for (const auto& [doc, lbl] : a.labels) {
            rows.emplace_back(lbl, doc);
        }
        std::sort(rows.begin(), rows.end());
        for (const auto& [lbl, doc] : rows) {
            out << a.query_id << '\t' << doc << '\t' << lbl << '\n';
        }
    }
}

std::map<std::string, ClusterAssignment> read_cluster_cache(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, path.string(), "cannot open");
    }
    std::map<std::string, ClusterAssignment> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        std::istringstream fields(line);
        std::string qid;
        std::string doc;
        std::string lbl;
        if (!std::getline(fields, qid, '\t') || !std::getline(fields, doc, '\t') || !std::getline(fields, lbl)) {
            throw Error(ErrorCode::Parse, path.string() + ":" + std::to_string(lineno), "expected 3 fields");
        }
        int label = 0;
        try {
            label = std::stoi(lbl);
        } catch (const std::exception&) {
            throw Error(ErrorCode::Parse, path.string() + ":" + std::to_string(lineno), "bad cluster id");
        }
        if (label < 0) {
            throw Error(ErrorCode::Parse, path.string() + ":" + std::to_string(lineno), "negative cluster id");
        }
        auto& a = out[qid];
        a.query_id = qid;
        a.labels[doc] = label;
        a.num_clusters = std::max(a.num_clusters, label + 1);
    }
    return out;
}

} // namespace icrank
