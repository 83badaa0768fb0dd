#include "icrank/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "icrank/error.hpp"

namespace icrank {

CategoricalDistribution::CategoricalDistribution(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) {
        throw Error(ErrorCode::InvalidArgument, "", "distribution needs k >= 1");
    }
    double sum = 0.0;
    for (double p : probs_) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
            throw Error(ErrorCode::InvalidArgument, std::to_string(p), "negative or non-finite probability");
        }
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw Error(ErrorCode::InvalidArgument, std::to_string(sum), "probabilities must sum to 1");
    }
}

void GroupCounts::add(AttributeValue value) {
    if (value < 0 || static_cast<std::size_t>(value) >= counts_.size()) {
        throw Error(ErrorCode::InvalidArgument, std::to_string(value), "attribute out of range");
    }
    ++counts_[static_cast<std::size_t>(value)];
    ++total_;
}

GroupCounts GroupCounts::plus(AttributeValue value) const {
    GroupCounts next = *this;
    next.add(value);
    return next;
}

namespace {

AttributeValue require_attribute(const Document& doc, const AttributeSchema& schema) {
    if (!doc.attribute) {
        throw Error(ErrorCode::MissingAttribute, doc.doc_id);
    }
    if (*doc.attribute < 0 || *doc.attribute >= schema.k()) {
        throw Error(ErrorCode::InvalidArgument, doc.doc_id, "attribute outside schema range");
    }
    return *doc.attribute;
}

} // namespace

CategoricalDistribution target_distribution(std::span<const Document> relevant,
                                            const AttributeSchema& schema) {
    if (relevant.empty()) {
        throw Error(ErrorCode::EmptyRelevantSet, "");
    }
    const GroupCounts counts = prefix_distribution(relevant, schema);
    std::vector<double> probs(counts.k());
    const auto n = static_cast<double>(counts.total());
    for (std::size_t i = 0; i < probs.size(); ++i) {
        probs[i] = static_cast<double>(counts[i]) / n;
    }
    return CategoricalDistribution(std::move(probs));
}

CategoricalDistribution uniform_distribution(const AttributeSchema& schema) {
    return uniform_distribution(static_cast<std::size_t>(schema.k()));
}

CategoricalDistribution uniform_distribution(std::size_t k) {
    if (k == 0) {
        throw Error(ErrorCode::InvalidArgument, "", "uniform distribution needs k >= 1");
    }
    return CategoricalDistribution(std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

CategoricalDistribution adversarial_distribution(const CategoricalDistribution& target) {
    const std::size_t k = target.k();
    std::vector<std::size_t> by_prob(k);
    std::iota(by_prob.begin(), by_prob.end(), 0);
    std::stable_sort(by_prob.begin(), by_prob.end(),
                     [&](std::size_t a, std::size_t b) { return target[a] < target[b]; });
    std::vector<double> flipped(k);
    for (std::size_t r = 0; r < k; ++r) {
        flipped[by_prob[r]] = target[by_prob[k - 1 - r]];
    }
    return CategoricalDistribution(std::move(flipped));
}

GroupCounts prefix_distribution(std::span<const Document> prefix, const AttributeSchema& schema) {
    GroupCounts counts(static_cast<std::size_t>(schema.k()));
    for (const auto& doc : prefix) {
        counts.add(require_attribute(doc, schema));
    }
    return counts;
}

double smoothed_kl(const CategoricalDistribution& target, const GroupCounts& counts, double epsilon) {
    if (!(epsilon > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, std::to_string(epsilon), "epsilon must be > 0");
    }
    if (target.k() != counts.k()) {
        throw Error(ErrorCode::InvalidArgument, "", "target and counts disagree on k");
    }
    const double denom = static_cast<double>(counts.total()) + static_cast<double>(counts.k()) * epsilon;
    double kl = 0.0;
    for (std::size_t i = 0; i < target.k(); ++i) {
        if (target[i] <= 0.0) {
            continue;
        }
        const double p = (static_cast<double>(counts[i]) + epsilon) / denom;
        kl += target[i] * std::log(target[i] / p);
    }
    // Rounding can push an exact match a hair below zero.
    return std::max(kl, 0.0);
}

} // namespace icrank
