#include "icrank/example_builder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_map>

#include "icrank/error.hpp"

namespace icrank {

std::size_t GroupQueues::remaining() const {
    std::size_t n = 0;
    for (std::size_t g = 0; g < queues.size(); ++g) {
        n += queues[g].size() - cursors[g];
    }
    return n;
}

GroupQueues partition_by_attribute(std::span<const Document> docs, const AttributeSchema& schema) {
    GroupQueues out;
    const auto k = static_cast<std::size_t>(schema.k());
    out.queues.resize(k);
    out.cursors.assign(k, 0);
    for (std::size_t i = 0; i < docs.size(); ++i) {
        const auto& doc = docs[i];
        if (!doc.attribute) {
            throw Error(ErrorCode::MissingAttribute, doc.doc_id);
        }
        if (*doc.attribute < 0 || *doc.attribute >= schema.k()) {
            throw Error(ErrorCode::InvalidArgument, doc.doc_id, "attribute outside schema range");
        }
        out.queues[static_cast<std::size_t>(*doc.attribute)].push_back({doc, i});
    }
    return out;
}

namespace {

bool kl_less(double a, double b) {
    return a < b && (b - a) > kKlTieTolerance * std::max({1.0, std::abs(a), std::abs(b)});
}

} // namespace

std::vector<GreedyStep> greedy_rerank_trace(GroupQueues queues, const CategoricalDistribution& target,
                                            double epsilon) {
    if (target.k() != queues.k()) {
        throw Error(ErrorCode::InvalidArgument, "", "target length differs from number of groups");
    }
    std::vector<GreedyStep> out;
    out.reserve(queues.remaining());
    GroupCounts counts(queues.k());

    while (true) {
        std::optional<std::size_t> best_group;
        double best_kl = 0.0;
        for (std::size_t g = 0; g < queues.k(); ++g) {
            if (queues.cursors[g] >= queues.queues[g].size()) {
                continue;
            }
            const double kl = smoothed_kl(target, counts.plus(static_cast<AttributeValue>(g)), epsilon);
            if (!best_group) {
                best_group = g;
                best_kl = kl;
                continue;
            }
            const auto& cand = queues.queues[g][queues.cursors[g]];
            const auto& incumbent = queues.queues[*best_group][queues.cursors[*best_group]];
            const bool better = kl_less(kl, best_kl) ||
                                (!kl_less(best_kl, kl) &&
                                 (cand.rank < incumbent.rank ||
                                  (cand.rank == incumbent.rank && cand.doc.doc_id < incumbent.doc.doc_id)));
            if (better) {
                best_group = g;
                best_kl = kl;
            }
        }
        if (!best_group) {
            break;
        }
        const std::size_t g = *best_group;
        counts.add(static_cast<AttributeValue>(g));
        out.push_back({queues.queues[g][queues.cursors[g]].doc, best_kl});
        ++queues.cursors[g];
    }
    return out;
}

std::vector<Document> greedy_rerank(GroupQueues queues, const CategoricalDistribution& target,
                                    double epsilon) {
    auto steps = greedy_rerank_trace(std::move(queues), target, epsilon);
    std::vector<Document> out;
    out.reserve(steps.size());
    for (auto& s : steps) {
        out.push_back(std::move(s.doc));
    }
    return out;
}

std::string_view to_string(ExampleStrategy s) noexcept {
    switch (s) {
    case ExampleStrategy::Target: return "target";
    case ExampleStrategy::Adversarial: return "adversarial";
    case ExampleStrategy::Uniform: return "uniform";
    case ExampleStrategy::Relevant: return "relevant";
    case ExampleStrategy::Static: return "static";
    }
    return "target";
}

ExampleStrategy parse_strategy(std::string_view name) {
    for (auto s : {ExampleStrategy::Target, ExampleStrategy::Adversarial, ExampleStrategy::Uniform,
                   ExampleStrategy::Relevant, ExampleStrategy::Static}) {
        if (to_string(s) == name) {
            return s;
        }
    }
    throw Error(ErrorCode::InvalidArgument, std::string(name), "unknown example strategy");
}

std::string_view to_string(ExampleOrdering o) noexcept {
    return o == ExampleOrdering::RandomSeeded ? "random" : "first-stage";
}

ExampleOrdering parse_ordering(std::string_view name) {
    if (name == "random") {
        return ExampleOrdering::RandomSeeded;
    }
    if (name == "first-stage") {
        return ExampleOrdering::FirstStage;
    }
    throw Error(ErrorCode::InvalidArgument, std::string(name), "unknown example ordering");
}

std::vector<Document> IclExample::ordered_documents() const {
    std::vector<Document> out;
    out.reserve(target_order.size());
    for (int idx : target_order) {
        out.push_back(documents.at(static_cast<std::size_t>(idx - 1)));
    }
    return out;
}

void IclExample::validate() const {
    std::vector<bool> seen(documents.size(), false);
    if (target_order.size() != documents.size()) {
        throw Error(ErrorCode::InvalidArgument, example_query.query_id,
                    "target_order length differs from document count");
    }
    for (int idx : target_order) {
        if (idx < 1 || static_cast<std::size_t>(idx) > documents.size() ||
            seen[static_cast<std::size_t>(idx - 1)]) {
            throw Error(ErrorCode::InvalidArgument, example_query.query_id,
                        "target_order is not a permutation");
        }
        seen[static_cast<std::size_t>(idx - 1)] = true;
    }
}

IclExample truncate_example(const IclExample& example, std::size_t n) {
    if (n >= example.documents.size()) {
        return example;
    }
    IclExample out;
    out.example_query = example.example_query;
    out.strategy = example.strategy;
    out.documents.assign(example.documents.begin(), example.documents.begin() + static_cast<long>(n));
    for (int idx : example.target_order) {
        if (static_cast<std::size_t>(idx) <= n) {
            out.target_order.push_back(idx);
        }
    }
    return out;
}

CategoricalDistribution present_groups_uniform(std::span<const Document> docs, std::size_t k) {
    std::vector<bool> present(k, false);
    std::size_t n_present = 0;
    for (const auto& d : docs) {
        if (!d.attribute) {
            throw Error(ErrorCode::MissingAttribute, d.doc_id);
        }
        const auto g = static_cast<std::size_t>(*d.attribute);
        if (g >= k) {
            throw Error(ErrorCode::InvalidArgument, d.doc_id, "attribute outside target range");
        }
        if (!present[g]) {
            present[g] = true;
            ++n_present;
        }
    }
    std::vector<double> probs(k, 0.0);
    for (std::size_t g = 0; g < k; ++g) {
        if (present[g]) {
            probs[g] = 1.0 / static_cast<double>(n_present);
        }
    }
    return CategoricalDistribution(std::move(probs));
}

IclExample build_example(const Query& example_query, const RankedList& retrieved, const Corpus& corpus,
                         const ExampleOptions& options, SeededRng& rng) {
    if (options.strategy == ExampleStrategy::Static) {
        if (!options.static_example) {
            throw Error(ErrorCode::MissingTarget, "static", "Static strategy needs a configured example");
        }
        options.static_example->validate();
        return *options.static_example;
    }
    if (options.window == 0) {
        throw Error(ErrorCode::InvalidArgument, "window", "window must be >= 1");
    }
    if (retrieved.size() < options.window) {
        throw Error(ErrorCode::TooFewDocuments, example_query.query_id,
                    "found " + std::to_string(retrieved.size()) + ", needed " +
                        std::to_string(options.window));
    }

    // Top-m documents in first-stage order.
    std::vector<Document> top;
    top.reserve(options.window);
    for (std::size_t i = 0; i < options.window; ++i) {
        auto it = corpus.find(retrieved[i].doc_id);
        if (it == corpus.end()) {
            throw Error(ErrorCode::UnknownDocument, retrieved[i].doc_id);
        }
        top.push_back(it->second);
    }

    std::vector<Document> sequence;
    switch (options.strategy) {
    case ExampleStrategy::Relevant:
        sequence = top;
        break;
    case ExampleStrategy::Target:
    case ExampleStrategy::Adversarial:
    case ExampleStrategy::Uniform: {
        if (!options.target) {
            throw Error(ErrorCode::MissingTarget, example_query.query_id);
        }
        const std::size_t k = options.target->k();
        CategoricalDistribution target = *options.target;
        if (options.strategy == ExampleStrategy::Adversarial) {
            target = adversarial_distribution(target);
        } else if (options.strategy == ExampleStrategy::Uniform) {
            target = present_groups_uniform(top, k);
        }
        sequence = greedy_rerank(partition_by_attribute(top, AttributeSchema::anonymous(static_cast<int>(k))),
                                 target, options.epsilon);
        break;
    }
    case ExampleStrategy::Static:
        break;
    }

    IclExample example;
    example.example_query = example_query;
    example.strategy = options.strategy;
    example.documents = top;
    if (options.ordering == ExampleOrdering::RandomSeeded) {
        rng.shuffle(std::span<Document>(example.documents));
    }
    std::unordered_map<std::string, int> position;
    for (std::size_t i = 0; i < example.documents.size(); ++i) {
        position.emplace(example.documents[i].doc_id, static_cast<int>(i) + 1);
    }
    example.target_order.reserve(sequence.size());
    for (const auto& d : sequence) {
        example.target_order.push_back(position.at(d.doc_id));
    }
    return example;
}

} // namespace icrank
