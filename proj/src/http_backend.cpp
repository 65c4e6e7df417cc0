#include "delta/http_backend.hpp"

#include <nlohmann/json.hpp>
#include <thread>

#include "delta/errors.hpp"

// TLS so that hosted https endpoints work out of the box.
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

namespace delta {

using nlohmann::json;

namespace {

// Splits "scheme://host[:port]/optional/prefix" into client target and path prefix.
void split_base_url(const std::string& base_url, std::string& host_part, std::string& prefix) {
    std::string rest = base_url;
    std::size_t scheme_end = rest.find("://");
    std::size_t host_begin = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    std::size_t slash = rest.find('/', host_begin);
    if (slash == std::string::npos) {
        host_part = rest;
        prefix.clear();
    } else {
        host_part = rest.substr(0, slash);
        prefix = rest.substr(slash);
        while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    }
}

}  // namespace

HttpBackend::HttpBackend(Options options) : options_(std::move(options)) {
    if (options_.base_url.empty()) throw config_error("http backend needs a base_url");
    if (options_.retry.max_attempts < 1) throw config_error("retry max_attempts must be >= 1");
    split_base_url(options_.base_url, host_, path_prefix_);
    tls_ = options_.base_url.rfind("https://", 0) == 0;
}

std::string HttpBackend::request_body(const ChatRequest& request) {
    json body;
    body["model"] = request.model;
    body["max_tokens"] = request.max_new_tokens;
    body["temperature"] = request.temperature;
    json messages = json::array();
    for (const auto& message : request.messages)
        messages.push_back({{"role", role_name(message.role)}, {"content", message.content}});
    body["messages"] = std::move(messages);
    return body.dump();
}

std::string HttpBackend::complete(const ChatRequest& request) {
    request.validate();
    const std::string body = request_body(request);
    const std::string path = path_prefix_ + "/v1/chat/completions";

    httplib::Client client(host_);
    client.set_connection_timeout(options_.timeout.count(), 0);
    client.set_read_timeout(options_.timeout.count(), 0);
    client.set_write_timeout(options_.timeout.count(), 0);
    httplib::Headers headers;
    if (!options_.api_key.empty())
        headers.emplace("Authorization", "Bearer " + options_.api_key);

    std::string last_failure = "no attempt made";
    auto backoff = options_.retry.initial_backoff;
    for (int attempt = 1; attempt <= options_.retry.max_attempts; ++attempt) {
        if (attempt > 1) {
            std::this_thread::sleep_for(backoff);
            backoff = std::chrono::milliseconds(static_cast<long long>(
                static_cast<double>(backoff.count()) * options_.retry.multiplier));
        }
        auto res = client.Post(path, headers, body, "application/json");
        if (!res) {
            last_failure = "transport failure: " + httplib::to_string(res.error());
            continue;  // retryable
        }
        if (res->status == 401 || res->status == 403)
            throw auth_error("authentication failed (HTTP " + std::to_string(res->status) + ")");
        if (res->status == 429 || res->status == 408 || res->status >= 500) {
            last_failure = "HTTP " + std::to_string(res->status);
            continue;  // retryable
        }
        if (res->status != 200)
            throw transport_error("chat completion failed with HTTP " +
                                  std::to_string(res->status) + ": " + res->body);

        json parsed = json::parse(res->body, nullptr, false);
        if (parsed.is_discarded() || !parsed.contains("choices") || !parsed["choices"].is_array() ||
            parsed["choices"].empty() || !parsed["choices"][0].contains("message") ||
            !parsed["choices"][0]["message"].contains("content") ||
            !parsed["choices"][0]["message"]["content"].is_string())
            throw protocol_error("malformed chat completion body: " + res->body);
        return parsed["choices"][0]["message"]["content"].get<std::string>();
    }
    throw transport_error("retry policy exhausted after " +
                          std::to_string(options_.retry.max_attempts) +
                          " attempts; last failure: " + last_failure);
}

}  // namespace delta
