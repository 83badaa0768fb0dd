#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "icrank/core.hpp"
#include "icrank/example_builder.hpp"

namespace icrank {

inline constexpr std::string_view kPromptHeader =
    "You are RankGPT, an intelligent assistant that can rank passages based on their relevancy to the query.";

enum class PromptMode { ZeroShot, Icl, Pao };
enum class PaoObjective { Fairness, Diversity };

std::string_view to_string(PromptMode mode) noexcept;
PromptMode parse_prompt_mode(std::string_view name);
std::string_view to_string(PaoObjective objective) noexcept;

/// The sentence that replaces the relevance instruction under Pao mode.
std::string_view pao_instruction(PaoObjective objective) noexcept;

struct PromptSpec {
    PromptMode mode = PromptMode::ZeroShot;
    PaoObjective pao_objective = PaoObjective::Fairness;
    std::optional<IclExample> example;
    /// Passage texts in window order; passage i is shown as "[i+1]".
    std::vector<std::string> window_docs;
    std::string test_query;
    /// Passages are cut to this many whitespace-separated words (0 = no limit).
    /// Whitespace runs are always collapsed to one space.
    std::size_t max_words = 300;
};

std::string truncate_words(std::string_view text, std::size_t max_words);

/// "[2] > [3] > [1]"
std::string format_permutation(std::span<const int> order);

/// Renders the list-wise ranking prompt. Throws InvalidArgument when Icl mode
/// lacks an example.
std::string render_prompt(const PromptSpec& spec);

struct Permutation {
    std::vector<int> order;  // 1-based
    bool repaired = false;
    std::string raw;
};

/// Reads bracketed integers in order, drops out-of-range values and repeats,
/// then appends missing indices ascending. Never fails.
Permutation parse_permutation(std::string_view raw, int m);

struct ChatMessage {
    std::string role;
    std::string content;
};

struct LlmRequest {
    std::string model;
    std::vector<ChatMessage> messages;
    double temperature = 0.0;
    std::int64_t seed = 42;
};

struct LlmResponse {
    std::string text;
    std::optional<std::string> usage;  // raw usage JSON when the server sends one
};

/// A chat-completion backend. Implementations must tolerate concurrent calls.
class LlmClient {
public:
    virtual ~LlmClient() = default;
    virtual LlmResponse complete(const LlmRequest& request) = 0;
};

struct GenerationSettings {
    std::string model = "gpt-4o-mini";
    double temperature = 0.0;
    std::int64_t seed = 42;
};

/// Renders, sends one user message, parses the reply into a permutation of the window.
Permutation rerank_window(LlmClient& client, const PromptSpec& spec, const GenerationSettings& settings = {});

struct TranscriptRecord {
    std::string query_id;
    std::size_t window_start = 0;
    std::string prompt;
    std::string raw_response;
    bool repaired = false;
};

using TranscriptSink = std::function<void(const TranscriptRecord&)>;

struct SlidingWindowOptions {
    PromptMode mode = PromptMode::ZeroShot;
    PaoObjective pao_objective = PaoObjective::Fairness;
    std::size_t window = 20;
    std::size_t stride = 10;
    std::size_t depth = 100;
    std::size_t max_words = 300;
    GenerationSettings generation;
};

/// Start offsets of the windows visited, bottom of the list first.
std::vector<std::size_t> window_starts(std::size_t depth, std::size_t window, std::size_t stride);

/// Reranks the top `depth` of `first_stage` window by window from the bottom up.
/// Depth is clamped to the list length. Output scores are synthetic ranks, so the
/// canonical order equals the reranked order; the tail below depth keeps its
/// first-stage order. Transport errors are rethrown with query/window context.
RankedList sliding_window_rerank(LlmClient& client, const RankedList& first_stage, const std::string& query_text,
                                 const Corpus& corpus, const std::optional<IclExample>& example,
                                 const SlidingWindowOptions& options, const TranscriptSink& sink = {});

} // namespace icrank
