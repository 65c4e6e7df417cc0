#include "delta/run_setup.hpp"

#include <ctime>

#include "delta/errors.hpp"
#include "delta/http_backend.hpp"
#include "delta/scripted_backend.hpp"
#include "delta/util.hpp"

namespace delta {

using nlohmann::json;

Strategy strategy_from_name(const std::string& name) {
    if (name == "delta") return Strategy::Delta;
    if (name == "sentence") return Strategy::Sentence;
    if (name == "context") return Strategy::Context;
    if (name == "doc2doc") return Strategy::Doc2Doc;
    throw config_error("unknown strategy \"" + name +
                       "\" (expected delta, sentence, context or doc2doc)");
}

const char* strategy_name(Strategy strategy) {
    switch (strategy) {
        case Strategy::Delta: return "delta";
        case Strategy::Sentence: return "sentence";
        case Strategy::Context: return "context";
        case Strategy::Doc2Doc: return "doc2doc";
    }
    return "delta";
}

namespace {

template <typename T>
T get_or(const json& data, const char* key, T fallback) {
    if (!data.contains(key)) return fallback;
    try {
        return data.at(key).get<T>();
    } catch (const json::exception&) {
        throw config_error(std::string("config key \"") + key + "\" has the wrong type");
    }
}

}  // namespace

RunConfig RunConfig::from_json(const json& data, const std::string& origin) {
    if (!data.is_object()) throw config_error(origin + ": config must be a JSON object");
    RunConfig config;
    auto& agent = config.agent;
    agent.summary_interval = get_or(data, "m", agent.summary_interval);
    agent.long_term_capacity = get_or(data, "l", agent.long_term_capacity);
    agent.retrieve_count = get_or(data, "n", agent.retrieve_count);
    agent.short_term_capacity = get_or(data, "k", agent.short_term_capacity);
    agent.src_lang = get_or<std::string>(data, "src_lang", agent.src_lang);
    agent.tgt_lang = get_or<std::string>(data, "tgt_lang", agent.tgt_lang);
    agent.src_lang_name = get_or<std::string>(data, "src_lang_name", agent.src_lang_name);
    agent.tgt_lang_name = get_or<std::string>(data, "tgt_lang_name", agent.tgt_lang_name);
    agent.model = get_or<std::string>(data, "model", agent.model);
    agent.max_new_tokens = get_or(data, "max_new_tokens", agent.max_new_tokens);
    agent.temperature = get_or(data, "temperature", agent.temperature);
    agent.lookup_case = get_or(data, "case_insensitive_lookup", false)
                            ? CaseMode::AsciiInsensitive
                            : CaseMode::Sensitive;
    agent.checkpoint_interval = get_or(data, "checkpoint_interval", agent.checkpoint_interval);
    agent.checkpoint_dir = get_or<std::string>(data, "checkpoint_dir", agent.checkpoint_dir);
    agent.use_records = get_or(data, "use_records", agent.use_records);
    agent.use_summary = get_or(data, "use_summary", agent.use_summary);
    agent.use_long_term = get_or(data, "use_long_term", agent.use_long_term);
    agent.use_short_term = get_or(data, "use_short_term", agent.use_short_term);
    agent.validate();

    config.window = get_or(data, "window", config.window);
    if (config.window < 1) throw config_error("window must be >= 1");
    config.templates_dir = get_or<std::string>(data, "templates_dir", config.templates_dir);

    if (data.contains("backend")) {
        const json& backend = data.at("backend");
        if (!backend.is_object()) throw config_error("\"backend\" must be an object");
        config.backend.kind = get_or<std::string>(backend, "kind", config.backend.kind);
        if (config.backend.kind != "http" && config.backend.kind != "scripted")
            throw config_error("backend kind must be \"http\" or \"scripted\"");
        config.backend.base_url =
            get_or<std::string>(backend, "base_url", config.backend.base_url);
        config.backend.timeout =
            std::chrono::seconds(get_or<long long>(backend, "timeout_s", 120));
        config.backend.script_path =
            get_or<std::string>(backend, "script", config.backend.script_path);
        if (backend.contains("retry")) {
            const json& retry = backend.at("retry");
            config.backend.retry.max_attempts =
                get_or(retry, "max_attempts", config.backend.retry.max_attempts);
            config.backend.retry.initial_backoff = std::chrono::milliseconds(
                get_or<long long>(retry, "initial_backoff_ms", 500));
            config.backend.retry.multiplier =
                get_or(retry, "multiplier", config.backend.retry.multiplier);
            if (config.backend.retry.max_attempts < 1)
                throw config_error("retry max_attempts must be >= 1");
        }
        if (config.backend.kind == "scripted" && config.backend.script_path.empty())
            throw config_error("scripted backend needs a \"script\" path");
    }
    return config;
}

RunConfig RunConfig::load(const std::string& path) {
    json data = json::parse(read_file(path), nullptr, false);
    if (data.is_discarded()) throw config_error("config file is not valid JSON: " + path);
    return from_json(data, path);
}

json RunConfig::normalized() const {
    return json{
        {"m", agent.summary_interval},
        {"l", agent.long_term_capacity},
        {"n", agent.retrieve_count},
        {"k", agent.short_term_capacity},
        {"src_lang", agent.src_lang},
        {"tgt_lang", agent.tgt_lang},
        {"src_lang_name", agent.resolved_src_name()},
        {"tgt_lang_name", agent.resolved_tgt_name()},
        {"model", agent.model},
        {"max_new_tokens", agent.max_new_tokens},
        {"temperature", agent.temperature},
        {"case_insensitive_lookup", agent.lookup_case == CaseMode::AsciiInsensitive},
        {"checkpoint_interval", agent.checkpoint_interval},
        {"checkpoint_dir", agent.checkpoint_dir},
        {"use_records", agent.use_records},
        {"use_summary", agent.use_summary},
        {"use_long_term", agent.use_long_term},
        {"use_short_term", agent.use_short_term},
        {"window", window},
        {"templates_dir", templates_dir},
        {"backend",
         {{"kind", backend.kind},
          {"base_url", backend.base_url},
          {"timeout_s", backend.timeout.count()},
          {"script", backend.script_path},
          {"retry",
           {{"max_attempts", backend.retry.max_attempts},
            {"initial_backoff_ms", backend.retry.initial_backoff.count()},
            {"multiplier", backend.retry.multiplier}}}}},
    };
}

std::string RunConfig::config_hash() const {
    return to_hex(fnv1a64(normalized().dump()));
}

BackendFactory make_backend_factory(const BackendSpec& spec, const std::string& api_key) {
    if (spec.kind == "scripted") {
        // Every document replays its own copy of the script, keeping
        // documents independent of corpus order.
        const std::string script_text = read_file(spec.script_path);
        ScriptedBackend{}.load_script_json(script_text);  // validate once up front
        return [script_text](const SourceDocument&) -> std::shared_ptr<Backend> {
            auto backend = std::make_shared<ScriptedBackend>();
            backend->load_script_json(script_text);
            return backend;
        };
    }
    HttpBackend::Options options;
    options.base_url = spec.base_url;
    options.api_key = api_key;
    options.retry = spec.retry;
    options.timeout = spec.timeout;
    auto shared = std::make_shared<HttpBackend>(std::move(options));
    return [shared](const SourceDocument&) -> std::shared_ptr<Backend> { return shared; };
}

json RunManifest::to_json() const {
    return json{{"config_hash", config_hash},   {"corpus", corpus_path},
                {"strategy", strategy},         {"backend", backend_identity},
                {"started_at", started_at},     {"finished_at", finished_at},
                {"outputs", outputs}};
}

std::string iso8601_utc_now() {
    std::time_t now = std::time(nullptr);
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &utc);
    return buf;
}

}  // namespace delta
