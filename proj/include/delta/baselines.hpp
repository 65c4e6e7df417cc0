#pragma once

#include <optional>
#include <string>
#include <vector>

#include "delta/corpus.hpp"
#include "delta/gateway.hpp"
#include "delta/orchestrator.hpp"
#include "delta/templates.hpp"

namespace delta {

/// A windowed document run: sentences were sent in consecutive batches of
/// `window` through one chat session, and hypotheses recovered from numbered
/// reply lines. `recovered[i]` is the hypothesis for sentence i+1, or absent
/// when the reply omitted that line — the phenomenon this harness measures.
struct WindowedRun {
    int window = 0;
    struct Batch {
        int start_index = 0;  // 1-based index of the batch's first sentence
        int size = 0;
        std::string response;
        std::vector<int> missing;  // 1-based document indices with no reply line
    };
    std::vector<Batch> batches;
    std::vector<std::optional<std::string>> recovered;
};

/// Total source indices with no recovered hypothesis.
int count_missing(const WindowedRun& run);

/// Splits one batch reply into per-slot hypotheses by its numbered lines
/// ("1. ...", "2) ..." etc). Duplicate numbers keep the first occurrence;
/// out-of-range numbers are dropped; unnumbered lines continue the previous
/// hypothesis. Total over arbitrary input.
std::vector<std::optional<std::string>> parse_numbered_response(std::string_view response,
                                                                int batch_size);

/// One plain instruction per sentence; no context.
RunResult sentence_baseline(const SourceDocument& doc, const AgentConfig& config,
                            Backend& backend, const TemplateSet& templates);

/// Each call carries up to the 3 most recent (source, hypothesis) pairs.
RunResult context_baseline(const SourceDocument& doc, const AgentConfig& config,
                           Backend& backend, const TemplateSet& templates);

/// Translates in numbered batches of `window` sentences through a single
/// accumulating chat session. Batch replies may omit lines; the run records
/// recovered hypotheses and missing indices rather than failing.
std::pair<std::vector<std::string>, WindowedRun> doc2doc_baseline(const SourceDocument& doc,
                                                                  const AgentConfig& config,
                                                                  Backend& backend,
                                                                  const TemplateSet& templates,
                                                                  int window = 10);

}  // namespace delta
