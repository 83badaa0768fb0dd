#include "icrank/baselines.hpp"

#include <algorithm>
#include <limits>

#include "icrank/error.hpp"
#include "icrank/topic_cluster.hpp"

namespace icrank {

RankedList mmr_rerank(const RankedList& first_stage, const Corpus& corpus, const MmrConfig& cfg) {
    if (!(cfg.lambda >= 0.0 && cfg.lambda <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, std::to_string(cfg.lambda), "MMR lambda must be in [0, 1]");
    }
    const std::size_t n = std::min(cfg.depth, first_stage.size());
    std::vector<const Document*> docs(n);
    std::vector<TokenSet> tokens(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto it = corpus.find(first_stage[i].doc_id);
        if (it == corpus.end()) {
            throw Error(ErrorCode::UnknownDocument, first_stage[i].doc_id);
        }
        docs[i] = &it->second;
        tokens[i] = token_set(it->second);
    }

    std::vector<double> rel(n, 1.0);
    if (n > 0) {
        const double hi = first_stage[0].score;
        const double lo = first_stage[n - 1].score;
        if (hi > lo) {
            for (std::size_t i = 0; i < n; ++i) {
                rel[i] = (first_stage[i].score - lo) / (hi - lo);
            }
        }
    }

    // max_sim[i]: largest similarity between candidate i and anything selected so far.
    std::vector<double> max_sim(n, 0.0);
    std::vector<bool> taken(n, false);
    std::vector<std::string> order;
    order.reserve(n);
    for (std::size_t step = 0; step < n; ++step) {
        std::size_t best = n;
        double best_value = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            if (taken[i]) {
                continue;
            }
            const double value = step == 0 ? rel[i] : cfg.lambda * rel[i] - (1.0 - cfg.lambda) * max_sim[i];
            if (value > best_value) {
                best_value = value;
                best = i;
            }
        }
        // The first pick is always the top first-stage document.
        if (step == 0) {
            best = 0;
        }
        taken[best] = true;
        order.push_back(docs[best]->doc_id);
        for (std::size_t i = 0; i < n; ++i) {
            if (!taken[i]) {
                max_sim[i] = std::max(max_sim[i], 1.0 - jaccard_distance(tokens[i], tokens[best]));
            }
        }
    }
    return RankedList::from_order(first_stage.query_id(), order, first_stage.tag().empty() ? "mmr" : first_stage.tag());
}

} // namespace icrank
