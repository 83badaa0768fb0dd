#include "icrank/llm_rerank.hpp"

#include <algorithm>
#include <cctype>
#include <limits>

#include "icrank/error.hpp"

namespace icrank {

std::string_view to_string(PromptMode mode) noexcept {
    switch (mode) {
    case PromptMode::ZeroShot: return "zero-shot";
    case PromptMode::Icl: return "icl";
    case PromptMode::Pao: return "pao";
    }
    return "zero-shot";
}

PromptMode parse_prompt_mode(std::string_view name) {
    for (auto m : {PromptMode::ZeroShot, PromptMode::Icl, PromptMode::Pao}) {
        if (to_string(m) == name) {
            return m;
        }
    }
    throw Error(ErrorCode::InvalidArgument, std::string(name), "unknown prompt mode");
}

std::string_view to_string(PaoObjective objective) noexcept {
    return objective == PaoObjective::Fairness ? "fairness" : "diversity";
}

std::string_view pao_instruction(PaoObjective objective) noexcept {
    if (objective == PaoObjective::Fairness) {
        return "Rank the passages based on their fairness, ensuring that ranked results do not discriminate "
               "against certain individuals, groups, or entities.";
    }
    return "Rank the passages based on their topical diversity, ensuring that ranked results contribute to "
           "different topics uniformly.";
}

std::string truncate_words(std::string_view text, std::size_t max_words) {
    std::string out;
    std::size_t words = 0;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) {
            ++i;
        }
        if (i == text.size()) {
            break;
        }
        if (max_words != 0 && words == max_words) {
            break;
        }
        const std::size_t start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) {
            ++i;
        }
        if (words > 0) {
            out.push_back(' ');
        }
        out.append(text.substr(start, i - start));
        ++words;
    }
    return out;
}

std::string format_permutation(std::span<const int> order) {
    std::string out;
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (i > 0) {
            out += " > ";
        }
        out += "[" + std::to_string(order[i]) + "]";
    }
    return out;
}

namespace {

// Passage text is flattened to one line so the numbering stays unambiguous.
std::string passage_line(std::size_t index, std::string_view text, std::size_t max_words) {
    return "[" + std::to_string(index) + "] " + truncate_words(text, max_words) + "\n";
}

} // namespace

std::string render_prompt(const PromptSpec& spec) {
    std::string out{kPromptHeader};
    out += "\n\n";

    if (spec.mode == PromptMode::Icl) {
        if (!spec.example) {
            throw Error(ErrorCode::InvalidArgument, "", "Icl prompt requires an example");
        }
        const auto& ex = *spec.example;
        const auto m = std::to_string(ex.documents.size());
        out += "I will provide you with " + m +
               " passages, each indicated by number identifier [ ]. As an example, the first " + m +
               " passages are ranked based on their relevance to query: " + ex.example_query.text + "\n";
        for (std::size_t i = 0; i < ex.documents.size(); ++i) {
            out += passage_line(i + 1, ex.documents[i].text, spec.max_words);
        }
        out += "The " + m + " passages above are ranked based on their relevance to the search query.\n";
        out += "Output: " + format_permutation(ex.target_order) + "\n\n";
    }

    const auto m = std::to_string(spec.window_docs.size());
    out += "Rank the passages based on their relevance to query: " + spec.test_query + "\n";
    for (std::size_t i = 0; i < spec.window_docs.size(); ++i) {
        out += passage_line(i + 1, spec.window_docs[i], spec.max_words);
    }
    if (spec.mode == PromptMode::Pao) {
        out += pao_instruction(spec.pao_objective);
    } else {
        out += "Rank the " + m + " passages above based on their relevance to the search query.";
    }
    out += " The passages should be listed in descending order using identifiers. The most relevant passages "
           "should be listed first. The output format should be [ ] > [ ], e.g., [1] > [2].";
    return out;
}

Permutation parse_permutation(std::string_view raw, int m) {
    if (m < 1) {
        throw Error(ErrorCode::InvalidArgument, std::to_string(m), "window size must be >= 1");
    }
    Permutation perm;
    perm.raw = std::string(raw);
    std::vector<bool> seen(static_cast<std::size_t>(m) + 1, false);

    std::size_t i = 0;
    while (i < raw.size()) {
        if (raw[i] != '[') {
            ++i;
            continue;
        }
        std::size_t j = i + 1;
        while (j < raw.size() && raw[j] == ' ') {
            ++j;
        }
        const std::size_t digits_start = j;
        long long value = 0;
        bool overflow = false;
        while (j < raw.size() && std::isdigit(static_cast<unsigned char>(raw[j]))) {
            if (value > std::numeric_limits<int>::max()) {
                overflow = true;
            } else {
                value = value * 10 + (raw[j] - '0');
            }
            ++j;
        }
        const bool has_digits = j > digits_start;
        while (j < raw.size() && raw[j] == ' ') {
            ++j;
        }
        if (!has_digits || j >= raw.size() || raw[j] != ']') {
            ++i;
            continue;
        }
        i = j + 1;
        if (overflow || value < 1 || value > m) {
            perm.repaired = true;
            continue;
        }
        if (seen[static_cast<std::size_t>(value)]) {
            perm.repaired = true;
            continue;
        }
        seen[static_cast<std::size_t>(value)] = true;
        perm.order.push_back(static_cast<int>(value));
    }
    for (int idx = 1; idx <= m; ++idx) {
        if (!seen[static_cast<std::size_t>(idx)]) {
            perm.order.push_back(idx);
            perm.repaired = true;
        }
    }
    return perm;
}

Permutation rerank_window(LlmClient& client, const PromptSpec& spec, const GenerationSettings& settings) {
    LlmRequest request;
    request.model = settings.model;
    request.temperature = settings.temperature;
    request.seed = settings.seed;
    request.messages.push_back({"user", render_prompt(spec)});
    const LlmResponse response = client.complete(request);
    return parse_permutation(response.text, static_cast<int>(spec.window_docs.size()));
}

std::vector<std::size_t> window_starts(std::size_t depth, std::size_t window, std::size_t stride) {
    if (window == 0 || stride == 0 || stride > window) {
        throw Error(ErrorCode::InvalidArgument, "", "require window >= stride >= 1");
    }
    if (depth <= window) {
        return {0};
    }
    std::vector<std::size_t> starts;
    std::size_t start = depth - window;
    while (true) {
        starts.push_back(start);
        if (start == 0) {
            break;
        }
        start = start > stride ? start - stride : 0;
    }
    return starts;
}

RankedList sliding_window_rerank(LlmClient& client, const RankedList& first_stage, const std::string& query_text,
                                 const Corpus& corpus, const std::optional<IclExample>& example,
                                 const SlidingWindowOptions& options, const TranscriptSink& sink) {
    if (options.mode == PromptMode::Icl && !example) {
        throw Error(ErrorCode::MissingTarget, first_stage.query_id(), "Icl mode requires an example");
    }
    std::vector<std::string> order = first_stage.doc_ids();
    const std::size_t depth = std::min(options.depth, order.size());

    std::optional<IclExample> window_example;
    if (example) {
        window_example = truncate_example(*example, std::min(options.window, depth));
    }

    for (std::size_t start : window_starts(depth, options.window, options.stride)) {
        const std::size_t end = std::min(start + options.window, depth);
        const std::size_t len = end - start;
        if (len < 2) {
            continue;
        }
        PromptSpec spec;
        spec.mode = options.mode;
        spec.pao_objective = options.pao_objective;
        spec.test_query = query_text;
        spec.max_words = options.max_words;
        if (options.mode == PromptMode::Icl) {
            spec.example = window_example;
        }
        spec.window_docs.reserve(len);
        for (std::size_t i = start; i < end; ++i) {
            auto it = corpus.find(order[i]);
            if (it == corpus.end()) {
                throw Error(ErrorCode::UnknownDocument, order[i]);
            }
            spec.window_docs.push_back(it->second.text);
        }

        LlmRequest request;
        request.model = options.generation.model;
        request.temperature = options.generation.temperature;
        request.seed = options.generation.seed;
        request.messages.push_back({"user", render_prompt(spec)});
        LlmResponse response;
        try {
            response = client.complete(request);
        } catch (const Error& e) {
            throw Error(e.code(), first_stage.query_id() + "@" + std::to_string(start), e.what());
        }
        Permutation perm = parse_permutation(response.text, static_cast<int>(len));
        if (sink) {
            sink({first_stage.query_id(), start, request.messages.front().content, response.text, perm.repaired});
        }

        std::vector<std::string> reordered;
        reordered.reserve(len);
        for (int idx : perm.order) {
            reordered.push_back(order[start + static_cast<std::size_t>(idx - 1)]);
        }
        std::copy(reordered.begin(), reordered.end(), order.begin() + static_cast<long>(start));
    }

    // Block scores run depth..1, the tail continues 0, -1, ... so canonical order is preserved.
    std::vector<RankedEntry> entries;
    entries.reserve(order.size());
    for (std::size_t p = 0; p < order.size(); ++p) {
        entries.push_back({order[p], static_cast<double>(depth) - static_cast<double>(p)});
    }
    return RankedList::canonicalize(first_stage.query_id(), std::move(entries), first_stage.tag());
}

} // namespace icrank
