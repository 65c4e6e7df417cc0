#pragma once

#include <functional>
#include <memory>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "delta/components.hpp"
#include "delta/corpus.hpp"
#include "delta/gateway.hpp"
#include "delta/memory.hpp"
#include "delta/templates.hpp"

namespace delta {

/// Hyperparameters and per-run settings for the agent loop. Defaults match
/// the reference configuration: m = l = 20, n = 2, k = 3.
struct AgentConfig {
    int summary_interval = 20;    // m: update the bilingual summary every m sentences
    int long_term_capacity = 20;  // l
    int retrieve_count = 2;       // n
    int short_term_capacity = 3;  // k

    std::string src_lang = "en";
    std::string tgt_lang = "zh";
    std::string src_lang_name;  // display name for prompts; derived from code when empty
    std::string tgt_lang_name;

    std::string model = "gpt-3.5-turbo";
    int max_new_tokens = 2048;
    double temperature = 0.0;
    CaseMode lookup_case = CaseMode::Sensitive;

    int checkpoint_interval = 10;
    std::string checkpoint_dir;  // empty: checkpointing disabled

    // Component switches, for ablation runs and for isolating the effect of
    // the proper-noun records.
    bool use_records = true;
    bool use_summary = true;
    bool use_long_term = true;
    bool use_short_term = true;

    void validate() const;  // throws config_error
    std::string lang_pair() const { return src_lang + "-" + tgt_lang; }
    std::string resolved_src_name() const;
    std::string resolved_tgt_name() const;
};

/// "en" -> "English" for the handful of languages with shipped prompt
/// wording; other codes fall through unchanged.
std::string language_display_name(const std::string& code);

/// What happened while translating one sentence: the backend components
/// invoked (tags, in order) and the memory state after the update phase.
struct TraceRecord {
    int index = 0;
    std::string hypothesis;
    std::vector<std::string> component_calls;
    nlohmann::json memory;

    bool operator==(const TraceRecord&) const = default;
};

struct RunTrace {
    std::string doc_id;
    std::vector<TraceRecord> records;

    bool operator==(const RunTrace&) const = default;
};

/// Trace file format: JSON per line, one record per sentence.
std::string trace_to_jsonl(const RunTrace& trace);
RunTrace trace_from_jsonl(const std::string& text, const std::string& origin = "<memory>");

/// Enough state to continue an interrupted document run and reproduce the
/// full trace: progress, memory snapshot, hypotheses and trace so far.
struct Checkpoint {
    std::string doc_id;
    int next_index = 1;
    std::vector<std::string> hypotheses;
    nlohmann::json memory;
    std::vector<TraceRecord> trace;

    nlohmann::json to_json() const;
    static Checkpoint from_json(const nlohmann::json& data);
};

void save_checkpoint(const Checkpoint& checkpoint, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

struct RunResult {
    TargetDocument target;
    RunTrace trace;
};

/// Translates one document sentence-by-sentence: record lookup, long-term
/// retrieval, translation, proper-noun extraction, window pushes, and a
/// bilingual summary refresh every m sentences. The output always has
/// exactly one hypothesis per source sentence.
///
/// On an unrecoverable backend error a checkpoint is written (when
/// configured) and run_error is thrown with the last completed index.
RunResult translate_document(const SourceDocument& doc, const AgentConfig& config,
                             Backend& backend, const TemplateSet& templates);

/// Continues from a checkpoint. Under a deterministic backend the result is
/// identical to an uninterrupted run.
RunResult resume(const Checkpoint& checkpoint, const SourceDocument& doc,
                 const AgentConfig& config, Backend& backend, const TemplateSet& templates);

using BackendFactory = std::function<std::shared_ptr<Backend>(const SourceDocument&)>;

struct DocumentOutcome {
    std::optional<RunResult> result;
    std::string error;  // empty on success

    bool ok() const { return result.has_value(); }
};

/// Translates documents independently (fresh memory each) with up to
/// `parallelism` documents in flight. Per-document failures are collected;
/// the rest proceed. Results are in input order.
std::vector<DocumentOutcome> translate_corpus(const std::vector<SourceDocument>& docs,
                                              const AgentConfig& config, int parallelism,
                                              const BackendFactory& backend_factory,
                                              const TemplateSet& templates);

}  // namespace delta
