#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "icrank/core.hpp"
#include "icrank/llm_rerank.hpp"

namespace icrank {

/// The test query and passage texts of a rendered prompt's final (test) block.
struct PromptWindow {
    std::string query;
    std::vector<std::string> passages;
};

PromptWindow parse_prompt_window(std::string_view prompt);

/// Answers with the window's own order, "[1] > [2] > ... > [m]".
class IdentityClient final : public LlmClient {
public:
    LlmResponse complete(const LlmRequest& request) override;
};

/// Answers "[m] > ... > [1]".
class ReverseClient final : public LlmClient {
public:
    LlmResponse complete(const LlmRequest& request) override;
};

/// Emits malformed output: out-of-range and repeated identifiers mixed with
/// prose, or no brackets at all. Never a valid permutation. The reply is a
/// function of (seed, prompt).
class GarbageClient final : public LlmClient {
public:
    explicit GarbageClient(std::uint64_t seed) : seed_(seed) {}
    LlmResponse complete(const LlmRequest& request) override;

private:
    std::uint64_t seed_;
};

/// Sorts passages by a hidden relevance function of (query text, passage text);
/// equal relevance keeps window order.
class OracleClient final : public LlmClient {
public:
    using Relevance = std::function<double(const std::string& query, const std::string& passage)>;
    explicit OracleClient(Relevance relevance) : relevance_(std::move(relevance)) {}
    LlmResponse complete(const LlmRequest& request) override;

private:
    Relevance relevance_;
};

} // namespace icrank
