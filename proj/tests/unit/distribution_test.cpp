#include <gtest/gtest.h>

#include <cmath>

#include "icrank/distribution.hpp"
#include "icrank/error.hpp"

namespace icrank {
namespace {

const AttributeSchema kGender("gender", {"M", "F"});

Document doc(const std::string& id, std::optional<int> attr) { return {id, "", attr}; }

std::vector<Document> docs_with(const std::vector<int>& attrs) {
    std::vector<Document> out;
    for (std::size_t i = 0; i < attrs.size(); ++i) {
        out.push_back(doc("D" + std::to_string(i + 1), attrs[i]));
    }
    return out;
}

TEST(TargetDistribution, SixMaleFourFemale) {
    const auto t = target_distribution(docs_with({0, 0, 0, 0, 0, 0, 1, 1, 1, 1}), kGender);
    EXPECT_DOUBLE_EQ(t[0], 0.6);
    EXPECT_DOUBLE_EQ(t[1], 0.4);
}

TEST(TargetDistribution, PointMass) {
    const auto t = target_distribution(docs_with(std::vector<int>(10, 0)), kGender);
    EXPECT_EQ(t.probs(), (std::vector<double>{1.0, 0.0}));
}

TEST(TargetDistribution, Errors) {
    try {
        target_distribution({}, kGender);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyRelevantSet);
    }
    std::vector<Document> docs{doc("a", 0), doc("b", std::nullopt)};
    try {
        target_distribution(docs, kGender);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MissingAttribute);
        EXPECT_EQ(e.subject(), "b");
    }
}

TEST(TargetDistribution, AlwaysSumsToOne) {
    SeededRng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const int k = 1 + static_cast<int>(rng.below(6));
        std::vector<int> attrs(1 + rng.below(40));
        for (auto& a : attrs) {
            a = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
        }
        const auto t = target_distribution(docs_with(attrs), AttributeSchema::anonymous(k));
        double sum = 0.0;
        for (double p : t.probs()) {
            sum += p;
        }
        EXPECT_NEAR(sum, 1.0, 1e-12);
    }
}

TEST(CategoricalDistribution, RejectsInvalid) {
    EXPECT_THROW(CategoricalDistribution({0.5, 0.6}), Error);
    EXPECT_THROW(CategoricalDistribution({-0.1, 1.1}), Error);
    EXPECT_THROW(CategoricalDistribution({}), Error);
}

TEST(UniformDistribution, Values) {
    EXPECT_EQ(uniform_distribution(2).probs(), (std::vector<double>{0.5, 0.5}));
    EXPECT_EQ(uniform_distribution(1).probs(), (std::vector<double>{1.0}));
    EXPECT_EQ(uniform_distribution(4).probs(), (std::vector<double>(4, 0.25)));
    EXPECT_EQ(uniform_distribution(kGender).k(), 2u);
}

TEST(AdversarialDistribution, SwapsBinary) {
    EXPECT_EQ(adversarial_distribution(CategoricalDistribution({0.6, 0.4})).probs(),
              (std::vector<double>{0.4, 0.6}));
}

TEST(AdversarialDistribution, UniformIsFixedPoint) {
    EXPECT_EQ(adversarial_distribution(uniform_distribution(4)), uniform_distribution(4));
}

TEST(AdversarialDistribution, RankReversalForThree) {
    EXPECT_EQ(adversarial_distribution(CategoricalDistribution({0.5, 0.3, 0.2})).probs(),
              (std::vector<double>{0.2, 0.3, 0.5}));
    // Largest and smallest trade places regardless of position.
    EXPECT_EQ(adversarial_distribution(CategoricalDistribution({0.3, 0.5, 0.2})).probs(),
              (std::vector<double>{0.3, 0.2, 0.5}));
}

TEST(AdversarialDistribution, InvolutionOnDistinctValues) {
    SeededRng rng(11);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t k = 1 + rng.below(6);
        std::vector<double> w(k);
        double sum = 0.0;
        for (auto& x : w) {
            x = 0.01 + rng.uniform();
            sum += x;
        }
        for (auto& x : w) {
            x /= sum;
        }
        // Renormalization may leave a 1-ulp drift; compare elementwise.
        const CategoricalDistribution t(w);
        const auto back = adversarial_distribution(adversarial_distribution(t));
        for (std::size_t i = 0; i < k; ++i) {
            EXPECT_EQ(back[i], t[i]);
        }
    }
}

TEST(PrefixDistribution, Counts) {
    EXPECT_EQ(prefix_distribution(docs_with({0, 0}), kGender).counts(), (std::vector<std::size_t>{2, 0}));
    EXPECT_EQ(prefix_distribution(docs_with({0, 1}), kGender).counts(), (std::vector<std::size_t>{1, 1}));
    const auto empty = prefix_distribution({}, kGender);
    EXPECT_EQ(empty.counts(), (std::vector<std::size_t>{0, 0}));
    EXPECT_EQ(empty.total(), 0u);
    EXPECT_THROW(prefix_distribution(std::vector<Document>{doc("x", std::nullopt)}, kGender), Error);
}

TEST(PrefixDistribution, IsAdditive) {
    SeededRng rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<int> attrs(rng.below(10));
        for (auto& a : attrs) {
            a = static_cast<int>(rng.below(2));
        }
        const int extra = static_cast<int>(rng.below(2));
        auto extended = attrs;
        extended.push_back(extra);
        EXPECT_EQ(prefix_distribution(docs_with(extended), kGender),
                  prefix_distribution(docs_with(attrs), kGender).plus(extra));
    }
}

// Independent evaluation of the smoothed KL in long double.
long double reference_kl(const std::vector<long double>& t, const std::vector<long double>& c, long double eps) {
    long double n = 0;
    for (auto x : c) {
        n += x;
    }
    long double kl = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] > 0) {
            kl += t[i] * std::log(t[i] * (n + eps * t.size()) / (c[i] + eps));
        }
    }
    return kl;
}

GroupCounts counts_of(std::initializer_list<int> groups, std::size_t k) {
    GroupCounts c(k);
    for (int g : groups) {
        c.add(g);
    }
    return c;
}

TEST(SmoothedKl, HandComputedValue) {
    const CategoricalDistribution t({0.6, 0.4});
    const double kl = smoothed_kl(t, counts_of({0, 1}, 2), 1e-3);
    EXPECT_NEAR(kl, 0.6 * std::log(1.2) + 0.4 * std::log(0.8), 1e-12);
    EXPECT_NEAR(kl, 0.0201, 1e-3);
}

TEST(SmoothedKl, ZeroForMatchingDistribution) {
    for (double eps : {1e-6, 1e-3, 0.5}) {
        EXPECT_NEAR(smoothed_kl(uniform_distribution(2), counts_of({0, 1}, 2), eps), 0.0, 1e-9);
    }
}

TEST(SmoothedKl, BalancedPrefixIsCloserThanSkewed) {
    const CategoricalDistribution t({0.6, 0.4});
    EXPECT_GT(smoothed_kl(t, counts_of({0, 0}, 2)), smoothed_kl(t, counts_of({0, 1}, 2)));
}

TEST(SmoothedKl, MatchesReferenceAndIsNonNegative) {
    SeededRng rng(17);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t k = 1 + rng.below(5);
        std::vector<double> w(k);
        double sum = 0;
        for (auto& x : w) {
            x = rng.below(4) == 0 ? 0.0 : rng.uniform();
            sum += x;
        }
        if (sum == 0) {
            w[0] = sum = 1.0;
        }
        for (auto& x : w) {
            x /= sum;
        }
        GroupCounts c(k);
        const auto n = 1 + rng.below(20);
        for (std::uint64_t i = 0; i < n; ++i) {
            c.add(static_cast<int>(rng.below(k)));
        }
        const double eps = 1e-3;
        const double kl = smoothed_kl(CategoricalDistribution(w), c, eps);
        std::vector<long double> tl(w.begin(), w.end());
        std::vector<long double> cl(c.counts().begin(), c.counts().end());
        EXPECT_GE(kl, 0.0);
        EXPECT_NEAR(kl, static_cast<double>(reference_kl(tl, cl, eps)), 1e-9);
    }
}

TEST(SmoothedKl, RejectsBadInput) {
    EXPECT_THROW(smoothed_kl(uniform_distribution(2), counts_of({0}, 2), 0.0), Error);
    EXPECT_THROW(smoothed_kl(uniform_distribution(3), counts_of({0}, 2)), Error);
}

} // namespace
} // namespace icrank
