#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "icrank/core.hpp"
#include "icrank/error.hpp"

namespace icrank {
namespace {

std::vector<std::string> ids(const RankedList& list) { return list.doc_ids(); }

TEST(Canonicalize, SortsByDescendingScore) {
    auto list = RankedList::canonicalize("q", {{"b", 1.0}, {"a", 2.0}});
    EXPECT_EQ(ids(list), (std::vector<std::string>{"a", "b"}));
}

TEST(Canonicalize, BreaksTiesByDocId) {
    auto list = RankedList::canonicalize("q", {{"b", 1.0}, {"a", 1.0}});
    EXPECT_EQ(ids(list), (std::vector<std::string>{"a", "b"}));
}

TEST(Canonicalize, RejectsDuplicates) {
    try {
        RankedList::canonicalize("q", {{"a", 1.0}, {"a", 2.0}});
        FAIL() << "expected DuplicateDocId";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DuplicateDocId);
        EXPECT_EQ(e.subject(), "a");
    }
}

TEST(Canonicalize, IsIdempotent) {
    SeededRng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<RankedEntry> entries;
        const auto n = rng.below(12);
        for (std::uint64_t i = 0; i < n; ++i) {
            // Small score range forces plenty of ties.
            entries.push_back({"d" + std::to_string(i), static_cast<double>(rng.below(3))});
        }
        rng.shuffle(std::span<RankedEntry>(entries));
        const auto once = RankedList::canonicalize("q", entries, "t");
        const auto twice = RankedList::canonicalize("q", once.entries(), "t");
        EXPECT_EQ(once, twice);
    }
}

TEST(RankedList, FromOrderKeepsOrder) {
    const std::vector<std::string> order{"z", "a", "m"};
    EXPECT_EQ(ids(RankedList::from_order("q", order)), order);
}

TEST(AttributeSchema, ValidatesLabels) {
    EXPECT_THROW(AttributeSchema("g", {}), Error);
    EXPECT_THROW(AttributeSchema("g", {"M", "M"}), Error);
    AttributeSchema s("gender", {"M", "F"});
    EXPECT_EQ(s.k(), 2);
    EXPECT_EQ(s.find("F"), 1);
    EXPECT_FALSE(s.find("X"));
    EXPECT_EQ(s.label(0), "M");
}

TEST(SeededRng, MatchesReferenceStream) {
    // xoshiro256** seeded via splitmix64(42); values from an independent Python model.
    SeededRng rng(42);
    EXPECT_EQ(rng.next(), 0x15780b2e0c2ec716ULL);
    EXPECT_EQ(rng.next(), 0x6104d9866d113a7eULL);
    EXPECT_EQ(rng.next(), 0xae17533239e499a1ULL);
}

TEST(SeededRng, BelowStaysInRange) {
    SeededRng rng(1);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 1000; ++i) {
        const auto v = rng.below(5);
        ASSERT_LT(v, 5u);
        seen.insert(v);
    }
    EXPECT_EQ(seen.size(), 5u);
    EXPECT_THROW(rng.below(0), Error);
}

TEST(Shuffle, EmptyListStaysEmpty) {
    SeededRng rng(42);
    EXPECT_TRUE(shuffle(RankedList{}, rng).empty());
}

RankedList five() {
    return RankedList::canonicalize("q", {{"a", 5}, {"b", 4}, {"c", 3}, {"d", 2}, {"e", 1}});
}

TEST(Shuffle, DeterministicForSeed) {
    SeededRng r1(42);
    SeededRng r2(42);
    EXPECT_EQ(shuffle(five(), r1), shuffle(five(), r2));
}

TEST(Shuffle, DifferentSeedsDiffer) {
    SeededRng gen(99);
    int differing = 0;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<RankedEntry> entries;
        for (int i = 0; i < 5; ++i) {
            entries.push_back({"d" + std::to_string(gen.below(1000000)) + "_" + std::to_string(i), gen.uniform()});
        }
        const auto list = RankedList::canonicalize("q", entries);
        SeededRng s1(1);
        SeededRng s2(2);
        differing += shuffle(list, s1) != shuffle(list, s2) ? 1 : 0;
    }
    EXPECT_GE(differing, 1);
}

TEST(Shuffle, PreservesEntriesWithScores) {
    SeededRng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const auto list = five();
        auto shuffled = shuffle(list, rng);
        auto sorted = shuffled;
        std::sort(sorted.begin(), sorted.end(), [](auto& a, auto& b) { return a.score > b.score; });
        EXPECT_EQ(sorted, list.entries());
    }
}

TEST(DeriveSeed, StableAndKeyed) {
    EXPECT_EQ(derive_seed(42, "t1"), derive_seed(42, "t1"));
    EXPECT_NE(derive_seed(42, "t1"), derive_seed(42, "t2"));
    EXPECT_NE(derive_seed(42, "t1"), derive_seed(43, "t1"));
}

} // namespace
} // namespace icrank
