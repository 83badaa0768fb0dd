#pragma once

#include "icrank/core.hpp"

namespace icrank {

enum class MmrSimilarity { JaccardTokens };

struct MmrConfig {
    double lambda = 0.5;  // weight on relevance
    std::size_t depth = 100;
    MmrSimilarity similarity = MmrSimilarity::JaccardTokens;
};

/// Maximal marginal relevance over the top `depth` documents: picks, one at a
/// time, argmax lambda * rel(d) - (1 - lambda) * max_s sim(d, s), with rel the
/// min-max normalized first-stage score. Output is truncated to depth and carries
/// synthetic rank scores.
RankedList mmr_rerank(const RankedList& first_stage, const Corpus& corpus, const MmrConfig& cfg);

} // namespace icrank
