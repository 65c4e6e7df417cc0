#pragma once

#include <chrono>
#include <string>

#include "delta/gateway.hpp"

namespace delta {

/// OpenAI-compatible chat-completions client. POSTs to
/// {base_url}/v1/chat/completions with a bearer token; one protocol serves
/// hosted GPT endpoints and locally served models alike.
class HttpBackend : public Backend {
public:
    struct Options {
        std::string base_url;  // e.g. "https://api.openai.com" or "http://127.0.0.1:8089"
        std::string api_key;   // usually from DELTA_API_KEY
        RetryPolicy retry;
        std::chrono::seconds timeout{120};
    };

    explicit HttpBackend(Options options);

    /// Retries rate limits (429), server errors (>= 500) and transport
    /// failures per the policy. 401/403 raise auth_error immediately; a 200
    /// with an unusable body raises protocol_error.
    std::string complete(const ChatRequest& request) override;

    /// Serializes a request to the wire JSON (exposed for tests).
    static std::string request_body(const ChatRequest& request);

private:
    Options options_;
    std::string host_;
    std::string path_prefix_;
    bool tls_ = false;
};

}  // namespace delta
