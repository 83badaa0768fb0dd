#include "icrank/http_client.hpp"

#include <thread>

#include <httplib.h>

#include "icrank/error.hpp"

namespace icrank {

nlohmann::json chat_request_body(const LlmRequest& request) {
    nlohmann::json messages = nlohmann::json::array();
    for (const auto& m : request.messages) {
        messages.push_back({{"role", m.role}, {"content", m.content}});
    }
    return {{"model", request.model},
            {"messages", std::move(messages)},
            {"temperature", request.temperature},
            {"seed", request.seed}};
}

LlmResponse parse_chat_response(const std::string& body) {
    try {
        const auto j = nlohmann::json::parse(body);
        LlmResponse response;
        response.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
        if (j.contains("usage")) {
            response.usage = j["usage"].dump();
        }
        return response;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MalformedResponse, "", e.what());
    }
}

HttpLlmClient::HttpLlmClient(std::string endpoint, std::string api_key, RetryPolicy retry,
                             std::chrono::seconds timeout)
    : api_key_(std::move(api_key)), retry_(retry), timeout_(timeout) {
    const auto scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos) {
        throw Error(ErrorCode::InvalidArgument, endpoint, "endpoint must be an http(s) URL");
    }
    const auto path_start = endpoint.find('/', scheme_end + 3);
    origin_ = endpoint.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/v1/chat/completions" : endpoint.substr(path_start);
    if (retry_.attempts < 1) {
        retry_.attempts = 1;
    }
}

LlmResponse HttpLlmClient::complete(const LlmRequest& request) {
    const std::string body = chat_request_body(request).dump();
    httplib::Headers headers;
    if (!api_key_.empty()) {
        headers.emplace("Authorization", "Bearer " + api_key_);
    }

    auto backoff = retry_.initial_backoff;
    std::string last_failure;
    for (int attempt = 1; attempt <= retry_.attempts; ++attempt) {
        httplib::Client cli(origin_);
        cli.set_connection_timeout(timeout_);
        cli.set_read_timeout(timeout_);
        cli.set_write_timeout(timeout_);
        auto res = cli.Post(path_, headers, body, "application/json");
        if (!res) {
            last_failure = httplib::to_string(res.error());
        } else if (res->status == 401 || res->status == 403) {
            throw Error(ErrorCode::Auth, origin_, "HTTP " + std::to_string(res->status));
        } else if (res->status >= 200 && res->status < 300) {
            return parse_chat_response(res->body);
        } else if (res->status == 429 || res->status >= 500) {
            last_failure = "HTTP " + std::to_string(res->status);
        } else {
            throw Error(ErrorCode::Transport, origin_, "HTTP " + std::to_string(res->status) + ": " + res->body);
        }
        if (attempt < retry_.attempts) {
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
        }
    }
    throw Error(ErrorCode::Transport, origin_,
                "giving up after " + std::to_string(retry_.attempts) + " attempts: " + last_failure);
}

} // namespace icrank
