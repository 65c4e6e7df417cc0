#include "delta/scripted_backend.hpp"

#include <nlohmann/json.hpp>

#include "delta/errors.hpp"

namespace delta {

using nlohmann::json;

void ScriptedBackend::enqueue(const std::string& tag, std::string reply) {
    std::lock_guard lock(mutex_);
    queues_[tag].push_back(Entry{std::move(reply), std::nullopt});
}

void ScriptedBackend::enqueue_expect(const std::string& tag, std::string reply,
                                     std::string expect_substring) {
    std::lock_guard lock(mutex_);
    queues_[tag].push_back(Entry{std::move(reply), std::move(expect_substring)});
}

void ScriptedBackend::load_script_json(const std::string& text) {
    json spec = json::parse(text, nullptr, false);
    if (spec.is_discarded() || !spec.is_object())
        throw input_error("script file is not a JSON object");
    for (auto& [tag, replies] : spec.items()) {
        if (!replies.is_array()) throw input_error("script entry for \"" + tag + "\" must be an array");
        for (const auto& reply : replies) {
            if (reply.is_string()) {
                enqueue(tag, reply.get<std::string>());
            } else if (reply.is_object() && reply.contains("text")) {
                if (reply.contains("expect"))
                    enqueue_expect(tag, reply["text"].get<std::string>(),
                                   reply["expect"].get<std::string>());
                else
                    enqueue(tag, reply["text"].get<std::string>());
            } else {
                throw input_error("script reply for \"" + tag +
                                  "\" must be a string or {text[, expect]}");
            }
        }
    }
}

std::string ScriptedBackend::complete(const ChatRequest& request) {
    request.validate();
    std::lock_guard lock(mutex_);
    calls_.push_back(request);
    auto it = queues_.find(request.tag);
    if (it == queues_.end() || it->second.empty())
        throw script_error("script exhausted for tag \"" + request.tag + "\"");
    Entry entry = std::move(it->second.front());
    it->second.pop_front();
    if (entry.expect_substring) {
        const std::string& prompt = request.messages.back().content;
        if (prompt.find(*entry.expect_substring) == std::string::npos)
            throw script_error("prompt for tag \"" + request.tag +
                               "\" does not contain expected substring \"" +
                               *entry.expect_substring + "\"");
    }
    return entry.text;
}

std::size_t ScriptedBackend::remaining(const std::string& tag) const {
    std::lock_guard lock(mutex_);
    auto it = queues_.find(tag);
    return it == queues_.end() ? 0 : it->second.size();
}

std::vector<ChatRequest> ScriptedBackend::calls() const {
    std::lock_guard lock(mutex_);
    return calls_;
}

std::size_t ScriptedBackend::call_count() const {
    std::lock_guard lock(mutex_);
    return calls_.size();
}

}  // namespace delta
