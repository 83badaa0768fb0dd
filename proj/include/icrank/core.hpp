#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace icrank {

/// Dense attribute value in [0, k) of the governing AttributeSchema.
using AttributeValue = int;

struct Document {
    std::string doc_id;
    std::string text;
    std::optional<AttributeValue> attribute;

    friend bool operator==(const Document&, const Document&) = default;
};

using Corpus = std::unordered_map<std::string, Document>;

/// Maps dense attribute values to human-readable labels ("M", "F", "cluster_3", ...).
class AttributeSchema {
public:
    AttributeSchema(std::string name, std::vector<std::string> value_labels);

    static AttributeSchema anonymous(int k);

    const std::string& name() const noexcept { return name_; }
    int k() const noexcept { return static_cast<int>(labels_.size()); }
    const std::vector<std::string>& value_labels() const noexcept { return labels_; }
    const std::string& label(AttributeValue value) const;
    std::optional<AttributeValue> find(const std::string& label) const;

private:
    std::string name_;
    std::vector<std::string> labels_;
};

struct Query {
    std::string query_id;
    std::string text;

    friend bool operator==(const Query&, const Query&) = default;
};

struct RankedEntry {
    std::string doc_id;
    double score = 0.0;

    friend bool operator==(const RankedEntry&, const RankedEntry&) = default;
};

/// One query's ranking in canonical form: descending score, ties by ascending doc_id.
class RankedList {
public:
    RankedList() = default;

    /// Throws DuplicateDocId if a doc_id repeats.
    static RankedList canonicalize(std::string query_id, std::vector<RankedEntry> entries,
                                   std::string tag = {});

    /// Assigns synthetic descending scores (n, n-1, ..., 1) so that canonical order
    /// equals the given order.
    static RankedList from_order(std::string query_id, std::span<const std::string> doc_ids,
                                 std::string tag = {});

    const std::string& query_id() const noexcept { return query_id_; }
    const std::string& tag() const noexcept { return tag_; }
    const std::vector<RankedEntry>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    const RankedEntry& operator[](std::size_t i) const { return entries_[i]; }

    std::vector<std::string> doc_ids() const;

    friend bool operator==(const RankedList&, const RankedList&) = default;

private:
    std::string query_id_;
    std::vector<RankedEntry> entries_;
    std::string tag_;
};

/// xoshiro256** seeded through splitmix64. Output sequence is fixed for a seed on
/// every platform (no reliance on std:: distributions, whose algorithms vary).
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed);

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t next();
    /// Uniform integer in [0, bound); bound must be > 0.
    std::uint64_t below(std::uint64_t bound);
    /// Uniform real in [0, 1).
    double uniform();

    /// Fisher-Yates, walking from the back.
    template <typename T>
    void shuffle(std::span<T> items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::uint64_t seed_;
    std::uint64_t state_[4];
};

/// Derives an independent stream for a named sub-task (e.g. one per query).
std::uint64_t derive_seed(std::uint64_t seed, std::string_view key);

/// The list's entries in shuffled order; scores travel with their doc_ids.
std::vector<RankedEntry> shuffle(const RankedList& list, SeededRng& rng);

} // namespace icrank
