#pragma once

#include <chrono>
#include <string>
#include <vector>

namespace delta {

enum class Role { System, User, Assistant };

const char* role_name(Role role);
Role role_from_name(const std::string& name);

struct ChatMessage {
    Role role = Role::User;
    std::string content;

    bool operator==(const ChatMessage&) const = default;
};

/// One chat-completion call. `tag` names the agent component issuing the
/// request; the scripted backend routes replies by it.
struct ChatRequest {
    std::vector<ChatMessage> messages;
    std::string model;
    int max_new_tokens = 2048;
    double temperature = 0.0;
    std::string tag;

    /// At least one message, last one from the user. Throws contract_error.
    void validate() const;
};

struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds initial_backoff{500};
    double multiplier = 2.0;
};

/// Uniform chat-completion interface. Implementations must be safe for
/// concurrent complete() calls.
class Backend {
public:
    virtual ~Backend() = default;

    /// Returns the assistant text. Throws auth_error / transport_error /
    /// protocol_error / script_error depending on the implementation.
    virtual std::string complete(const ChatRequest& request) = 0;
};

/// Multi-turn conversation over a backend. Single-owner: not thread safe.
class ChatSession {
public:
    /// `base` supplies model/limits/tag; its messages seed the history
    /// (typically empty or a single system message).
    ChatSession(Backend& backend, ChatRequest base);

    /// Appends the user message, obtains a reply, appends it, returns it.
    /// On backend failure the history is left untouched.
    std::string send(const std::string& user_text);

    const std::vector<ChatMessage>& history() const { return history_; }

private:
    Backend* backend_;
    ChatRequest base_;
    std::vector<ChatMessage> history_;
};

}  // namespace delta
