#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "icrank/core.hpp"

namespace icrank {

inline constexpr double kDefaultClusterThreshold = 0.9;

using TokenSet = std::set<std::string>;

TokenSet token_set(const Document& doc);
double jaccard_distance(const TokenSet& a, const TokenSet& b);

/// 1 - |A ∩ B| / |A ∪ B| over the documents' token sets; 0 for two empty sets.
double jaccard_distance(const Document& a, const Document& b);

struct ClusterAssignment {
    std::string query_id;
    std::map<std::string, int> labels;
    int num_clusters = 0;
    /// Complete-linkage distance of every merge, in merge order.
    std::vector<double> merge_distances;
};

/// Complete-linkage agglomerative clustering over Jaccard distance. Clusters are
/// merged while the closest pair is within `threshold`. Labels are numbered by
/// the first appearance of a member in `docs`.
ClusterAssignment agglomerative_cluster(std::span<const Document> docs, double threshold = kDefaultClusterThreshold);

/// Copies `docs` with attribute = cluster label. Throws UnlabeledDocument.
std::pair<std::vector<Document>, AttributeSchema> labels_to_attributes(const ClusterAssignment& assignment,
                                                                       std::span<const Document> docs);

/// TSV cache: query_id<TAB>doc_id<TAB>cluster, one line per document.
void write_cluster_cache(const std::filesystem::path& path, std::span<const ClusterAssignment> assignments);
std::map<std::string, ClusterAssignment> read_cluster_cache(const std::filesystem::path& path);

} // namespace icrank
