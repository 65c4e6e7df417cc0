#pragma once

#include <chrono>
#include <memory>
#include <nlohmann/json.hpp>
#include <string>

#include "delta/gateway.hpp"
#include "delta/orchestrator.hpp"

namespace delta {

enum class Strategy { Delta, Sentence, Context, Doc2Doc };

Strategy strategy_from_name(const std::string& name);  // config_error on unknown
const char* strategy_name(Strategy strategy);

/// Which backend a run talks to. "http" is the OpenAI-compatible client;
/// "scripted" replays a script file for reproducible offline runs.
struct BackendSpec {
    std::string kind = "http";
    std::string base_url = "https://api.openai.com";
    std::chrono::seconds timeout{120};
    RetryPolicy retry;
    std::string script_path;  // scripted only
};

/// A full run configuration as loaded from the JSON config file. Every
/// hyperparameter (m, l, n, k, window, max_new_tokens, temperature) is a
/// config key with the reference defaults.
struct RunConfig {
    AgentConfig agent;
    BackendSpec backend;
    int window = 10;  // doc2doc batch size
    std::string templates_dir = "templates";

    static RunConfig from_json(const nlohmann::json& data, const std::string& origin);
    static RunConfig load(const std::string& path);

    /// Canonical JSON with every field present; hashing this is stable
    /// across key order and absent-vs-default spellings.
    nlohmann::json normalized() const;
    std::string config_hash() const;
};

/// Builds the per-document backend factory. HTTP runs share one client;
/// scripted runs give every document a fresh replay of the script so
/// documents stay independent and order-insensitive.
BackendFactory make_backend_factory(const BackendSpec& spec, const std::string& api_key);

/// Written exactly once per CLI run, next to the output file.
struct RunManifest {
    std::string config_hash;
    std::string corpus_path;
    std::string strategy;
    std::string backend_identity;
    std::string started_at;
    std::string finished_at;
    nlohmann::json outputs;  // name -> path

    nlohmann::json to_json() const;
};

std::string iso8601_utc_now();

}  // namespace delta
