#include "delta/gateway.hpp"

#include "delta/errors.hpp"

namespace delta {

const char* role_name(Role role) {
    switch (role) {
        case Role::System: return "system";
        case Role::User: return "user";
        case Role::Assistant: return "assistant";
    }
    return "user";
}

Role role_from_name(const std::string& name) {
    if (name == "system") return Role::System;
    if (name == "assistant") return Role::Assistant;
    if (name == "user") return Role::User;
    throw contract_error("unknown chat role: " + name);
}

void ChatRequest::validate() const {
    if (messages.empty()) throw contract_error("chat request has no messages");
    if (messages.back().role != Role::User)
        throw contract_error("chat request must end with a user message");
    if (max_new_tokens < 1) throw contract_error("max_new_tokens must be >= 1");
    if (temperature < 0.0) throw contract_error("temperature must be >= 0");
}

ChatSession::ChatSession(Backend& backend, ChatRequest base)
    : backend_(&backend), base_(std::move(base)) {
    history_ = base_.messages;
    base_.messages.clear();
}

std::string ChatSession::send(const std::string& user_text) {
    ChatRequest request = base_;
    request.messages = history_;
    request.messages.push_back({Role::User, user_text});
    std::string reply = backend_->complete(request);  // may throw; history stays intact
    history_.push_back({Role::User, user_text});
    history_.push_back({Role::Assistant, reply});
    return reply;
}

}  // namespace delta
