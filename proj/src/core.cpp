#include "icrank/core.hpp"

#include <algorithm>
#include <unordered_set>

#include "icrank/error.hpp"

namespace icrank {

AttributeSchema::AttributeSchema(std::string name, std::vector<std::string> value_labels)
    : name_(std::move(name)), labels_(std::move(value_labels)) {
    if (labels_.empty()) {
        throw Error(ErrorCode::InvalidArgument, name_, "attribute schema needs k >= 1");
    }
    std::unordered_set<std::string> seen;
    for (const auto& label : labels_) {
        if (!seen.insert(label).second) {
            throw Error(ErrorCode::InvalidArgument, label, "duplicate attribute label");
        }
    }
}

AttributeSchema AttributeSchema::anonymous(int k) {
    if (k < 1) {
        throw Error(ErrorCode::InvalidArgument, "", "attribute schema needs k >= 1");
    }
    std::vector<std::string> labels;
    for (int i = 0; i < k; ++i) {
        labels.push_back(std::to_string(i));
    }
    return AttributeSchema("attribute", std::move(labels));
}

const std::string& AttributeSchema::label(AttributeValue value) const {
    if (value < 0 || value >= k()) {
        throw Error(ErrorCode::InvalidArgument, std::to_string(value), "attribute out of range");
    }
    return labels_[static_cast<std::size_t>(value)];
}

std::optional<AttributeValue> AttributeSchema::find(const std::string& label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) {
        return std::nullopt;
    }
    return static_cast<AttributeValue>(it - labels_.begin());
}

RankedList RankedList::canonicalize(std::string query_id, std::vector<RankedEntry> entries,
                                    std::string tag) {
    std::unordered_set<std::string_view> seen;
    for (const auto& e : entries) {
        if (!seen.insert(e.doc_id).second) {
            throw Error(ErrorCode::DuplicateDocId, e.doc_id);
        }
    }
    std::sort(entries.begin(), entries.end(), [](const RankedEntry& a, const RankedEntry& b) {
        if (a.score != b.score) {
            return a.score > b.score;
        }
        return a.doc_id < b.doc_id;
    });
    RankedList list;
    list.query_id_ = std::move(query_id);
    list.entries_ = std::move(entries);
    list.tag_ = std::move(tag);
    return list;
}

RankedList RankedList::from_order(std::string query_id, std::span<const std::string> doc_ids,
                                  std::string tag) {
    std::vector<RankedEntry> entries;
    entries.reserve(doc_ids.size());
    const auto n = static_cast<double>(doc_ids.size());
    for (std::size_t i = 0; i < doc_ids.size(); ++i) {
        entries.push_back({doc_ids[i], n - static_cast<double>(i)});
    }
    return canonicalize(std::move(query_id), std::move(entries), std::move(tag));
}

std::vector<std::string> RankedList::doc_ids() const {
    std::vector<std::string> ids;
    ids.reserve(entries_.size());
    for (const auto& e : entries_) {
        ids.push_back(e.doc_id);
    }
    return ids;
}

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

} // namespace

SeededRng::SeededRng(std::uint64_t seed) : seed_(seed) {
    std::uint64_t sm = seed;
    for (auto& s : state_) {
        s = splitmix64(sm);
    }
}

std::uint64_t SeededRng::next() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

std::uint64_t SeededRng::below(std::uint64_t bound) {
    if (bound == 0) {
        throw Error(ErrorCode::InvalidArgument, "", "SeededRng::below(0)");
    }
    // Rejection sampling on the top of the range keeps the draw unbiased.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x = next();
    while (x >= limit) {
        x = next();
    }
    return x % bound;
}

double SeededRng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::uint64_t derive_seed(std::uint64_t seed, std::string_view key) {
    // FNV-1a over the key, mixed with the seed.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : key) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::uint64_t x = seed ^ h;
    return splitmix64(x);
}

std::vector<RankedEntry> shuffle(const RankedList& list, SeededRng& rng) {
    std::vector<RankedEntry> out = list.entries();
    rng.shuffle(std::span<RankedEntry>(out));
    return out;
}

} // namespace icrank
