#pragma once

#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "delta/gateway.hpp"

namespace delta {

/// Deterministic stand-in for a chat LLM. Replies are pre-registered per
/// component tag and consumed FIFO, so template edits do not invalidate
/// scripts. An entry may carry an expected prompt substring; when set, the
/// request's final user message must contain it (strict mode).
///
/// Same script + same request sequence -> identical outputs.
class ScriptedBackend : public Backend {
public:
    struct Entry {
        std::string text;
        std::optional<std::string> expect_substring;
    };

    ScriptedBackend() = default;

    void enqueue(const std::string& tag, std::string reply);
    void enqueue_expect(const std::string& tag, std::string reply, std::string expect_substring);

    /// Appends a script given as JSON:
    /// {"tag": ["reply", {"text": ..., "expect": ...}, ...], ...}
    void load_script_json(const std::string& text);

    /// Pops the next reply for request.tag. Throws script_error when the
    /// queue for the tag is exhausted or a strict expectation fails.
    std::string complete(const ChatRequest& request) override;

    std::size_t remaining(const std::string& tag) const;

    /// Every request seen, in order. The gateway never mutates messages, so
    /// tests can assert exact prompt bytes here.
    std::vector<ChatRequest> calls() const;
    std::size_t call_count() const;

private:
    mutable std::mutex mutex_;
    std::map<std::string, std::deque<Entry>> queues_;
    std::vector<ChatRequest> calls_;
};

}  // namespace delta
