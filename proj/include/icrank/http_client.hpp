#pragma once

#include <chrono>
#include <string>

#include <json.hpp>

#include "icrank/llm_rerank.hpp"

namespace icrank {

struct RetryPolicy {
    int attempts = 3;
    std::chrono::milliseconds initial_backoff{1000};
};

/// OpenAI-compatible chat-completions body: {model, messages, temperature, seed}.
nlohmann::json chat_request_body(const LlmRequest& request);

/// First choice's message content. Throws MalformedResponse.
LlmResponse parse_chat_response(const std::string& body);

/// Client for an OpenAI-compatible `/v1/chat/completions` endpoint. Retries
/// transport failures, 429 and 5xx with doubling backoff; 401/403 raise AuthError
/// immediately. Safe to share across threads (a connection is opened per call).
class HttpLlmClient final : public LlmClient {
public:
    HttpLlmClient(std::string endpoint, std::string api_key, RetryPolicy retry = {},
                  std::chrono::seconds timeout = std::chrono::seconds(120));

    LlmResponse complete(const LlmRequest& request) override;

private:
    std::string origin_;  // scheme://host[:port]
    std::string path_;
    std::string api_key_;
    RetryPolicy retry_;
    std::chrono::seconds timeout_;
};

} // namespace icrank
