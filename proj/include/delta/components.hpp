#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "delta/gateway.hpp"
#include "delta/memory.hpp"
#include "delta/templates.hpp"

namespace delta {

/// Pairs chosen from the long-term window as few-shot exemplars. Positions
/// are 1-based listing positions into the window they came from.
struct RetrievedContext {
    std::vector<SentencePair> pairs;
    std::vector<int> positions;
};

enum class SummarySide { Source, Target };

/// Shared plumbing for the LLM-backed components.
struct ComponentContext {
    Backend* backend = nullptr;
    const TemplateSet* templates = nullptr;
    std::string model;
    int max_new_tokens = 2048;
    double temperature = 0.0;
    std::string src_lang_name;
    std::string tgt_lang_name;
};

// ── Response parsers ─────────────────────────────────────────────
// Total over arbitrary byte strings: they return a value or nullopt, never
// throw. nullopt means "unparseable", which triggers the caller's re-ask.

/// Pairs of the form "X" - "Y", comma- or newline-separated; smart quotes
/// and dash variants tolerated. A bare N/A parses as an empty list.
std::optional<std::vector<std::pair<std::string, std::string>>> parse_extractor_response(
    std::string_view response);

/// First bracketed comma/space-separated integer list, e.g. "[15, 16, 19]".
std::optional<std::vector<int>> parse_retriever_response(std::string_view response);

/// Strips surrounding whitespace and matched quote pairs from a hypothesis.
std::string trim_translation(std::string_view response);

// ── Components ───────────────────────────────────────────────────

/// Extracts newly encountered proper nouns from a translated sentence pair.
/// Nouns already in `known` and pairs translated as "N/A" are dropped. An
/// unparseable response is re-asked once, then treated as empty with a
/// logged warning; extraction noise must never abort a translation run.
std::vector<std::pair<std::string, std::string>> extract_proper_nouns(
    const ComponentContext& ctx, const std::string& source, const std::string& target,
    const ProperNounRecords& known);

/// Summarizes the last segment of sentences for one side. The source-side
/// prompt also asks for domain, style and tone. An empty reply is retried
/// once, then accepted as empty.
std::string write_segment_summary(const ComponentContext& ctx,
                                  const std::vector<std::string>& sentences, SummarySide side,
                                  const std::optional<std::string>& query = std::nullopt);

/// Merges the running summary with a fresh segment summary. When the old
/// summary is empty the new one is returned without a backend call.
std::string merge_summaries(const ComponentContext& ctx, const std::string& old_summary,
                            const std::string& new_summary, SummarySide side,
                            const std::optional<std::string>& query = std::nullopt);

/// Picks the n window pairs most relevant to the sentence about to be
/// translated. Windows with at most n pairs are returned whole without a
/// backend call. After two unparseable replies, falls back to the most
/// recent n pairs (logged).
RetrievedContext retrieve_relevant(const ComponentContext& ctx, const std::string& query_sentence,
                                   const MemoryWindow& window, int n);

/// Translates one sentence with all memory sections in the prompt; empty
/// sections render as the literal "N/A". Throws translation_error when the
/// backend returns nothing twice.
std::string translate_sentence(const ComponentContext& ctx, const std::string& source,
                               const std::vector<std::pair<std::string, std::string>>& matched,
                               const RetrievedContext& retrieved, const BilingualSummary& summary,
                               const MemoryWindow& short_term, int sentence_index = 0);

/// Formats window pairs as the numbered list the retriever prompt shows.
std::string numbered_sentence_list(const MemoryWindow& window);

/// Formats exemplar pairs for the RELEVANT_INSTANCES section.
std::string format_instances(const ComponentContext& ctx, const std::vector<SentencePair>& pairs);

/// Formats record hits for the HISTORY section, one "src" - "tgt" per line.
std::string format_noun_history(const std::vector<std::pair<std::string, std::string>>& matched);

}  // namespace delta
