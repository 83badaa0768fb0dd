#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>

#include "icrank/core.hpp"
#include "icrank/distribution.hpp"

namespace icrank {

/// Graded judgments plus optional subtopic coverage per (query, doc).
class Qrels {
public:
    using Grades = std::map<std::string, int>;
    using Coverage = std::map<std::string, std::set<std::string>>;

    void set_grade(const std::string& query_id, const std::string& doc_id, int grade);
    void add_subtopic(const std::string& query_id, const std::string& doc_id, const std::string& subtopic);

    /// 0 for unjudged documents.
    int grade(const std::string& query_id, const std::string& doc_id) const;
    bool has_query(const std::string& query_id) const { return grades_.contains(query_id); }
    const Grades* grades(const std::string& query_id) const;
    bool has_subtopics() const noexcept { return has_subtopics_; }
    /// Empty coverage for queries without subtopic data.
    const Coverage& coverage(const std::string& query_id) const;
    const std::map<std::string, Grades>& all() const noexcept { return grades_; }

private:
    std::map<std::string, Grades> grades_;
    std::map<std::string, Coverage> coverage_;
    bool has_subtopics_ = false;
};

inline constexpr std::size_t kDefaultCutoff = 10;

/// Linear-gain nDCG; 0 when the query has no positive judgments.
double ndcg_at(const RankedList& run, const Qrels& qrels, std::size_t cutoff = kDefaultCutoff);

/// alpha-nDCG with the ideal ranking built greedily (ties by doc_id).
/// Throws MissingSubtopics if the qrels carry no subtopic data at all.
double alpha_ndcg_at(const RankedList& run, const Qrels& qrels, double alpha = 1.0,
                     std::size_t cutoff = kDefaultCutoff);

/// Position-discounted share of attention each group receives in the top `cutoff`.
std::vector<double> exposure(const RankedList& run, const std::unordered_map<std::string, AttributeValue>& doc_attrs,
                             std::size_t k, std::size_t cutoff = kDefaultCutoff);

/// Jensen-Shannon divergence in bits.
double jensen_shannon(std::span<const double> p, std::span<const double> q);

/// 1 - JS(exposure, target). Throws MissingAttribute for unlabeled top documents.
double awrf(const RankedList& run, const std::unordered_map<std::string, AttributeValue>& doc_attrs,
            const CategoricalDistribution& target, std::size_t cutoff = kDefaultCutoff);

double m1(const RankedList& run, const Qrels& qrels,
          const std::unordered_map<std::string, AttributeValue>& doc_attrs, const CategoricalDistribution& target,
          std::size_t cutoff = kDefaultCutoff);

struct TTestResult {
    double t = 0.0;
    double p = 1.0;
    std::size_t df = 0;
};

/// Two-sided paired t-test. Identical samples give t = 0, p = 1; constant
/// non-zero differences throw DegenerateVariance.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

struct MetricReport {
    std::map<std::string, std::map<std::string, double>> per_query;
    std::map<std::string, double> means;

    void add(const std::string& query_id, const std::string& metric, double value);
    /// Recomputes `means` over the queries that carry each metric.
    void finalize();
};

} // namespace icrank
