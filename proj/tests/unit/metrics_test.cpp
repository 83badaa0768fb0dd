#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>

#include "icrank/error.hpp"
#include "icrank/metrics.hpp"
#include "oracles.hpp"

namespace icrank {
namespace {

RankedList run_of(std::vector<std::string> ids, const std::string& qid = "q") {
    return RankedList::from_order(qid, ids);
}

TEST(Ndcg, WorkedExample) {
    Qrels qrels;
    qrels.set_grade("q", "b", 1);
    EXPECT_NEAR(ndcg_at(run_of({"a", "b", "c"}), qrels, 10), 0.6309297535714575, 1e-12);
    EXPECT_DOUBLE_EQ(ndcg_at(run_of({"b", "a"}), qrels, 10), 1.0);
}

TEST(Ndcg, GradedAndCutoff) {
    Qrels qrels;
    qrels.set_grade("q", "a", 2);
    qrels.set_grade("q", "b", 1);
    qrels.set_grade("q", "c", 0);
    const auto run = run_of({"c", "b", "a"});
    const double dcg = 1 / std::log2(3.0) + 2 / std::log2(4.0);
    const double idcg = 2 + 1 / std::log2(3.0);
    EXPECT_NEAR(ndcg_at(run, qrels, 10), dcg / idcg, 1e-12);
    EXPECT_DOUBLE_EQ(ndcg_at(run, qrels, 1), 0.0);
    EXPECT_THROW(ndcg_at(run, qrels, 0), Error);
}

TEST(Ndcg, NoRelevantDocuments) {
    Qrels qrels;
    qrels.set_grade("q", "a", 0);
    EXPECT_EQ(ndcg_at(run_of({"a"}), qrels), 0.0);
    EXPECT_EQ(ndcg_at(run_of({"a"}, "other"), qrels), 0.0);
    EXPECT_THROW(qrels.set_grade("q", "a", -1), Error);
}

TEST(AlphaNdcg, TwoSubtopics) {
    Qrels qrels;
    qrels.add_subtopic("q", "d1", "a");
    qrels.add_subtopic("q", "d2", "a");
    qrels.add_subtopic("q", "d3", "b");
    const double l3 = std::log2(3.0);
    const double dcg = 1 + 0.5 / l3 + 1 / 2.0;
    const double idcg = 1 + 1 / l3 + 0.5 / 2.0;
    EXPECT_NEAR(alpha_ndcg_at(run_of({"d1", "d2", "d3"}), qrels, 0.5), dcg / idcg, 1e-12);
    EXPECT_NEAR(alpha_ndcg_at(run_of({"d1", "d3", "d2"}), qrels, 0.5), 1.0, 1e-12);
}

TEST(AlphaNdcg, SingleSubtopicAlphaOne) {
    // Only the first covering document earns gain.
    Qrels qrels;
    for (const char* d : {"b", "c", "e"}) {
        qrels.add_subtopic("q", d, "s");
    }
    EXPECT_NEAR(alpha_ndcg_at(run_of({"a", "d", "b", "c"}), qrels, 1.0), 1 / std::log2(4.0), 1e-12);
    EXPECT_NEAR(alpha_ndcg_at(run_of({"c", "a"}), qrels, 1.0), 1.0, 1e-12);
}

TEST(AlphaNdcg, AlphaZeroEqualsBinaryNdcg) {
    Qrels qrels;
    for (const char* d : {"b", "c", "e"}) {
        qrels.add_subtopic("q", d, "s");
        qrels.set_grade("q", d, 1);
    }
    const auto run = run_of({"a", "d", "b", "c", "e"});
    EXPECT_EQ(alpha_ndcg_at(run, qrels, 0.0), ndcg_at(run, qrels));
}

TEST(AlphaNdcg, Errors) {
    Qrels plain;
    plain.set_grade("q", "a", 1);
    try {
        alpha_ndcg_at(run_of({"a"}), plain);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MissingSubtopics);
    }
    Qrels qrels;
    qrels.add_subtopic("q", "a", "s");
    EXPECT_THROW(alpha_ndcg_at(run_of({"a"}), qrels, 1.5), Error);
    EXPECT_EQ(alpha_ndcg_at(run_of({"a"}, "other"), qrels), 0.0);
}

const std::unordered_map<std::string, AttributeValue> kAttrs{{"m1", 0}, {"m2", 0}, {"f1", 1}, {"f2", 1}};

TEST(Exposure, TwoPositions) {
    const auto e = exposure(run_of({"m1", "f1"}), kAttrs, 2, 2);
    const double a0 = 1.0 / (1.0 + 1.0 / std::log2(3.0));
    EXPECT_NEAR(e[0], a0, 1e-12);
    EXPECT_NEAR(e[1], 1 - a0, 1e-12);
    EXPECT_NEAR(e[0], 0.613147, 1e-6);
}

TEST(Awrf, WorkedExample) {
    const CategoricalDistribution target({0.5, 0.5});
    const double value = awrf(run_of({"m1", "f1"}), kAttrs, target, 2);
    EXPECT_NEAR(value, oracle::awrf({0, 1}, {0.5, 0.5}, 2), 1e-12);
    EXPECT_NEAR(value, 0.990623950506712, 1e-12);
}

TEST(Awrf, PerfectAndWorst) {
    const auto one_group = awrf(run_of({"m1", "m2"}), kAttrs, CategoricalDistribution({1.0, 0.0}));
    EXPECT_DOUBLE_EQ(one_group, 1.0);
    const auto opposite = awrf(run_of({"m1", "m2"}), kAttrs, CategoricalDistribution({0.0, 1.0}));
    EXPECT_NEAR(opposite, 0.0, 1e-12);
}

TEST(Awrf, EmptyRunAndMissingAttribute) {
    EXPECT_EQ(awrf(RankedList::from_order("q", std::vector<std::string>{}), kAttrs, uniform_distribution(2)), 0.0);
    try {
        awrf(run_of({"m1", "zz"}), kAttrs, uniform_distribution(2));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MissingAttribute);
    }
}

TEST(JensenShannon, Bounds) {
    const std::vector<double> p{1.0, 0.0};
    const std::vector<double> q{0.0, 1.0};
    EXPECT_DOUBLE_EQ(jensen_shannon(p, q), 1.0);
    EXPECT_DOUBLE_EQ(jensen_shannon(p, p), 0.0);
    EXPECT_THROW(jensen_shannon(p, std::vector<double>{1.0}), Error);
}

TEST(M1, ProductOfComponents) {
    Qrels qrels;
    qrels.set_grade("q", "f1", 1);
    const auto run = run_of({"m1", "f1"});
    const CategoricalDistribution t({0.5, 0.5});
    EXPECT_NEAR(m1(run, qrels, kAttrs, t, 2), ndcg_at(run, qrels, 2) * awrf(run, kAttrs, t, 2), 1e-15);
    EXPECT_NEAR(m1(run, qrels, kAttrs, t, 2), 0.6309297535714575 * 0.990623950506712, 1e-12);
}

TEST(TTest, ReferenceValue) {
    const std::vector<double> a{2, 4, 6, 8, 10};
    const std::vector<double> b{1, 2, 3, 4, 5};
    const auto r = paired_t_test(a, b);
    EXPECT_NEAR(r.t, 4.242640687119285, 1e-12);
    EXPECT_NEAR(r.p, 0.013235599563682695, 1e-9);
    EXPECT_EQ(r.df, 4u);
    const auto flipped = paired_t_test(b, a);
    EXPECT_NEAR(flipped.t, -r.t, 1e-12);
    EXPECT_NEAR(flipped.p, r.p, 1e-15);
}

TEST(TTest, OneDegreeOfFreedomClosedForm) {
    // With df = 1 the t distribution is Cauchy: p = 1 - (2 / pi) atan(|t|).
    const std::vector<double> a{1, 3};
    const std::vector<double> b{0, 0};
    const auto r = paired_t_test(a, b);
    EXPECT_NEAR(r.t, 2.0, 1e-12);
    EXPECT_NEAR(r.p, 1 - 2 / std::numbers::pi * std::atan(2.0), 1e-12);
}

TEST(TTest, Degenerate) {
    const std::vector<double> a{0.3, 0.5, 0.7};
    const auto same = paired_t_test(a, a);
    EXPECT_EQ(same.t, 0.0);
    EXPECT_EQ(same.p, 1.0);
    const std::vector<double> shifted{0.4, 0.6, 0.8};
    try {
        paired_t_test(shifted, a);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DegenerateVariance);
    }
    EXPECT_THROW(paired_t_test(std::vector<double>{1}, std::vector<double>{2}), Error);
    EXPECT_THROW(paired_t_test(a, std::vector<double>{1, 2}), Error);
}

TEST(MetricReport, Means) {
    MetricReport r;
    r.add("q1", "ndcg_cut_10", 0.5);
    r.add("q2", "ndcg_cut_10", 1.0);
    r.add("q1", "awrf_10", 0.25);
    r.finalize();
    EXPECT_DOUBLE_EQ(r.means.at("ndcg_cut_10"), 0.75);
    EXPECT_DOUBLE_EQ(r.means.at("awrf_10"), 0.25);
}

TEST(MetricsProperty, MatchBruteForceOverPermutations) {
    const std::vector<std::string> ids{"m1", "m2", "f1", "f2"};
    Qrels qrels;
    qrels.set_grade("q", "m1", 2);
    qrels.set_grade("q", "f2", 1);
    std::vector<std::string> order = ids;
    std::sort(order.begin(), order.end());
    do {
        const auto run = run_of(order);
        std::vector<double> gains;
        std::vector<int> groups;
        for (const auto& d : order) {
            gains.push_back(qrels.grade("q", d));
            groups.push_back(kAttrs.at(d));
        }
        for (std::size_t cutoff : {1u, 2u, 3u, 10u}) {
            EXPECT_NEAR(ndcg_at(run, qrels, cutoff), oracle::ndcg(gains, {2, 1}, cutoff), 1e-12);
            EXPECT_NEAR(awrf(run, kAttrs, CategoricalDistribution({0.7, 0.3}), cutoff),
                        oracle::awrf(groups, {0.7, 0.3}, cutoff), 1e-12);
        }
    } while (std::next_permutation(order.begin(), order.end()));
}

TEST(MetricsProperty, AffineScoreTransformKeepsValues) {
    Qrels qrels;
    qrels.set_grade("q", "a", 2);
    qrels.set_grade("q", "c", 1);
    qrels.add_subtopic("q", "a", "s1");
    qrels.add_subtopic("q", "c", "s2");
    qrels.add_subtopic("q", "d", "s1");
    const std::vector<RankedEntry> base{{"a", 0.3}, {"b", 1.7}, {"c", -0.4}, {"d", 0.9}};
    std::vector<RankedEntry> moved = base;
    for (auto& e : moved) {
        e.score = 3.5 * e.score + 11.0;
    }
    const auto r1 = RankedList::canonicalize("q", base);
    const auto r2 = RankedList::canonicalize("q", moved);
    EXPECT_DOUBLE_EQ(ndcg_at(r1, qrels), ndcg_at(r2, qrels));
    EXPECT_DOUBLE_EQ(alpha_ndcg_at(r1, qrels), alpha_ndcg_at(r2, qrels));
}

TEST(MetricsProperty, RepeatedSubtopicAboveNewOneNeverHelps) {
    // d1, d2 cover s1; d3 covers s2; d4 covers nothing.
    Qrels qrels;
    qrels.add_subtopic("q", "d1", "s1");
    qrels.add_subtopic("q", "d2", "s1");
    qrels.add_subtopic("q", "d3", "s2");
    const std::map<std::string, std::string> topic{{"d1", "s1"}, {"d2", "s1"}, {"d3", "s2"}};
    std::vector<std::string> order{"d1", "d2", "d3", "d4"};
    int checked = 0;
    do {
        // Find the second s1 document and an uncovered s2 document below it.
        std::size_t first = 4, second = 4, fresh = 4;
        for (std::size_t i = 0; i < order.size(); ++i) {
            const auto it = topic.find(order[i]);
            if (it == topic.end()) {
                continue;
            }
            if (it->second == "s1") {
                (first == 4 ? first : second) = i;
            } else {
                fresh = i;
            }
        }
        if (!(first < fresh && fresh < second)) {
            continue;
        }
        std::vector<std::string> swapped = order;
        std::swap(swapped[fresh], swapped[second]);
        EXPECT_LE(alpha_ndcg_at(run_of(swapped), qrels, 1.0), alpha_ndcg_at(run_of(order), qrels, 1.0) + 1e-12);
        ++checked;
    } while (std::next_permutation(order.begin(), order.end()));
    EXPECT_GT(checked, 0);
}

} // namespace
} // namespace icrank
