#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "icrank/core.hpp"
#include "icrank/distribution.hpp"

namespace icrank {

/// A document waiting in a group queue. `rank` is its 0-based position in the
/// first-stage list and doubles as the score tie-breaker (lower rank = higher score).
struct QueuedDocument {
    Document doc;
    std::size_t rank = 0;
};

/// The first-stage list split into one queue per attribute value, each queue
/// keeping the input's relative order, plus a read cursor per queue.
struct GroupQueues {
    std::vector<std::vector<QueuedDocument>> queues;
    std::vector<std::size_t> cursors;

    std::size_t k() const noexcept { return queues.size(); }
    std::size_t remaining() const;
};

/// `docs` must already be in descending first-stage score order.
GroupQueues partition_by_attribute(std::span<const Document> docs, const AttributeSchema& schema);

struct GreedyStep {
    Document doc;
    /// KL to the target of the prefix ending with this document.
    double kl = 0.0;
};

/// Repeatedly appends the queue head whose addition brings the prefix's attribute
/// distribution closest (smoothed KL) to `target`. Ties go to the higher-scored
/// document, then the smaller doc_id. Exhausted queues drop out.
std::vector<GreedyStep> greedy_rerank_trace(GroupQueues queues, const CategoricalDistribution& target,
                                            double epsilon = kDefaultEpsilon);

std::vector<Document> greedy_rerank(GroupQueues queues, const CategoricalDistribution& target,
                                    double epsilon = kDefaultEpsilon);

/// Relative tolerance under which two KL values count as tied.
inline constexpr double kKlTieTolerance = 1e-12;

/// Uniform over the attribute values that occur among `docs` (k entries, absent
/// values get 0). Throws MissingAttribute.
CategoricalDistribution present_groups_uniform(std::span<const Document> docs, std::size_t k);

enum class ExampleStrategy { Target, Adversarial, Uniform, Relevant, Static };
enum class ExampleOrdering { RandomSeeded, FirstStage };

std::string_view to_string(ExampleStrategy s) noexcept;
ExampleStrategy parse_strategy(std::string_view name);
std::string_view to_string(ExampleOrdering o) noexcept;
ExampleOrdering parse_ordering(std::string_view name);

/// A demonstration: the example query, its documents in prompt order, and the
/// ordering the prompt shows as the answer (1-based indices into `documents`).
struct IclExample {
    Query example_query;
    std::vector<Document> documents;
    std::vector<int> target_order;
    ExampleStrategy strategy = ExampleStrategy::Target;

    /// Documents rearranged into `target_order`.
    std::vector<Document> ordered_documents() const;

    /// Throws InvalidArgument unless target_order is a permutation of 1..n.
    void validate() const;

    friend bool operator==(const IclExample&, const IclExample&) = default;
};

/// Keeps the first `n` prompt documents and the target order restricted to them.
IclExample truncate_example(const IclExample& example, std::size_t n);

struct ExampleOptions {
    ExampleStrategy strategy = ExampleStrategy::Target;
    /// Required by Target / Adversarial / Uniform (Uniform only uses its k).
    std::optional<CategoricalDistribution> target;
    ExampleOrdering ordering = ExampleOrdering::RandomSeeded;
    std::size_t window = 20;
    double epsilon = kDefaultEpsilon;
    /// Returned verbatim by the Static strategy.
    std::optional<IclExample> static_example;
};

/// Builds the demonstration for one example query from its first-stage list.
/// Throws TooFewDocuments, MissingTarget, UnknownDocument, MissingAttribute.
IclExample build_example(const Query& example_query, const RankedList& retrieved, const Corpus& corpus,
                         const ExampleOptions& options, SeededRng& rng);

} // namespace icrank
