#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "icrank/core.hpp"

namespace icrank {

inline constexpr double kDefaultEpsilon = 1e-3;

/// Probability vector over the k values of an attribute. Components are
/// non-negative and sum to 1 within 1e-9.
class CategoricalDistribution {
public:
    explicit CategoricalDistribution(std::vector<double> probs);

    std::size_t k() const noexcept { return probs_.size(); }
    double operator[](std::size_t i) const { return probs_[i]; }
    const std::vector<double>& probs() const noexcept { return probs_; }

    friend bool operator==(const CategoricalDistribution&, const CategoricalDistribution&) = default;

private:
    std::vector<double> probs_;
};

/// Per-group document counts of a ranking prefix.
class GroupCounts {
public:
    explicit GroupCounts(std::size_t k) : counts_(k, 0) {}

    std::size_t k() const noexcept { return counts_.size(); }
    std::size_t operator[](std::size_t i) const { return counts_[i]; }
    std::size_t total() const noexcept { return total_; }
    const std::vector<std::size_t>& counts() const noexcept { return counts_; }

    void add(AttributeValue value);
    GroupCounts plus(AttributeValue value) const;

    friend bool operator==(const GroupCounts&, const GroupCounts&) = default;

private:
    std::vector<std::size_t> counts_;
    std::size_t total_ = 0;
};

/// Proportion of relevant documents holding each attribute value.
/// Throws EmptyRelevantSet / MissingAttribute.
CategoricalDistribution target_distribution(std::span<const Document> relevant,
                                            const AttributeSchema& schema);

CategoricalDistribution uniform_distribution(const AttributeSchema& schema);
CategoricalDistribution uniform_distribution(std::size_t k);

/// Rank-reversal permutation of the components: the group holding the largest
/// probability receives the smallest, the second-largest the second-smallest, etc.
/// Equal components are ranked by group index.
CategoricalDistribution adversarial_distribution(const CategoricalDistribution& target);

/// Attribute counts of `prefix`. Throws MissingAttribute.
GroupCounts prefix_distribution(std::span<const Document> prefix, const AttributeSchema& schema);

/// KL(target || p) in nats with p_i = (c_i + eps) / (total + k * eps).
/// Zero-probability target components contribute nothing.
double smoothed_kl(const CategoricalDistribution& target, const GroupCounts& counts,
                   double epsilon = kDefaultEpsilon);

} // namespace icrank
