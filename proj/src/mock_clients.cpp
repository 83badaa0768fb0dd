#include "icrank/mock_clients.hpp"

#include <algorithm>
#include <numeric>

#include "icrank/error.hpp"

namespace icrank {

PromptWindow parse_prompt_window(std::string_view prompt) {
    static constexpr std::string_view marker = "Rank the passages based on their relevance to query: ";
    const auto pos = prompt.rfind(marker);
    if (pos == std::string_view::npos) {
        throw Error(ErrorCode::InvalidArgument, "", "prompt has no test block");
    }
    PromptWindow window;
    std::size_t i = pos + marker.size();
    auto eol = prompt.find('\n', i);
    window.query = std::string(prompt.substr(i, eol - i));
    i = eol == std::string_view::npos ? prompt.size() : eol + 1;
    while (i < prompt.size()) {
        eol = prompt.find('\n', i);
        const auto line = prompt.substr(i, eol == std::string_view::npos ? std::string_view::npos : eol - i);
        const std::string expect = "[" + std::to_string(window.passages.size() + 1) + "] ";
        if (line.substr(0, expect.size()) != expect) {
            break;
        }
        window.passages.emplace_back(line.substr(expect.size()));
        if (eol == std::string_view::npos) {
            break;
        }
        i = eol + 1;
    }
    return window;
}

namespace {

std::size_t window_size(const LlmRequest& request) {
    if (request.messages.empty()) {
        return 0;
    }
    return parse_prompt_window(request.messages.back().content).passages.size();
}

} // namespace

LlmResponse IdentityClient::complete(const LlmRequest& request) {
    std::vector<int> order(window_size(request));
    std::iota(order.begin(), order.end(), 1);
    return {format_permutation(order), std::nullopt};
}

LlmResponse ReverseClient::complete(const LlmRequest& request) {
    std::vector<int> order(window_size(request));
    std::iota(order.rbegin(), order.rend(), 1);
    return {format_permutation(order), std::nullopt};
}

LlmResponse GarbageClient::complete(const LlmRequest& request) {
    const auto m = static_cast<std::uint64_t>(window_size(request));
    // Seeded from the prompt so the reply does not depend on call order.
    SeededRng rng(derive_seed(seed_, request.messages.empty() ? "" : request.messages.back().content));
    switch (rng.below(4)) {
    case 0:
        return {"I cannot rank these passages.", std::nullopt};
    case 1: {
        // Repeats the first identifier it draws.
        std::string out;
        const auto first = 1 + rng.below(std::max<std::uint64_t>(m, 1));
        out = "[" + std::to_string(first) + "] > [" + std::to_string(first) + "]";
        for (std::uint64_t i = 0, n = rng.below(m + 1); i < n; ++i) {
            out += " > [" + std::to_string(1 + rng.below(m + 3)) + "]";
        }
        return {out, std::nullopt};
    }
    case 2: {
        std::string out = "[0]";
        for (std::uint64_t i = 0, n = rng.below(2 * m + 1); i < n; ++i) {
            out += " > [" + std::to_string(rng.below(3 * m + 5)) + "]";
        }
        return {out, std::nullopt};
    }
    default:
        return {"[" + std::to_string(m + 1 + rng.below(1000)) + "] ] [ > [x] [99999999999999999999]",
                std::nullopt};
    }
}

LlmResponse OracleClient::complete(const LlmRequest& request) {
    const auto window = parse_prompt_window(request.messages.back().content);
    std::vector<int> order(window.passages.size());
    std::iota(order.begin(), order.end(), 1);
    std::vector<double> rel;
    rel.reserve(window.passages.size());
    for (const auto& p : window.passages) {
        rel.push_back(relevance_(window.query, p));
    }
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return rel[static_cast<std::size_t>(a - 1)] > rel[static_cast<std::size_t>(b - 1)];
    });
    return {format_permutation(order), std::nullopt};
}

} // namespace icrank
