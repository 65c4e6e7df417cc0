#pragma once

#include <map>
#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "delta/corpus.hpp"

namespace delta {

/// One appearance of a proper noun with the translation the aligner
/// recovered for it. Ordinals are 1-based per (doc_id, noun) in sentence
/// order; an absent translation means no target tokens were linked.
struct NounOccurrence {
    std::string noun;
    std::string doc_id;
    int sentence_index = 0;
    int ordinal = 0;
    std::optional<std::string> translation;

    bool operator==(const NounOccurrence&) const = default;
};

/// Occurrences grouped by (doc_id, noun), in first-appearance order.
/// add() assigns ordinals; callers add occurrences in sentence order.
class AnnotationSet {
public:
    struct NounGroup {
        std::string doc_id;
        std::string noun;
        std::vector<NounOccurrence> occurrences;  // ordinals 1..k_p
    };

    void add(const std::string& doc_id, const std::string& noun, int sentence_index,
             std::optional<std::string> translation);

    const std::vector<NounGroup>& groups() const { return groups_; }
    bool empty() const { return groups_.empty(); }

private:
    std::vector<NounGroup> groups_;
    std::map<std::pair<std::string, std::string>, std::size_t> index_;
};

/// A consistency ratio as the exact pair of Eq. 1/Eq. 2 sums. total == 0
/// means the metric is undefined, which is distinct from 0.0.
struct Ratio {
    long long matches = 0;
    long long total = 0;

    bool defined() const { return total > 0; }
    std::optional<double> value() const;

    bool operator==(const Ratio&) const = default;
};

struct MetricOptions {
    bool case_fold = false;  // no case folding by default; T(p) is target-language text
};

/// NFC-normalizes and trims a translation before comparison. A translation
/// that is empty after normalization is treated as absent.
std::string normalize_translation(std::string_view text, bool case_fold = false);

/// Proportion of repeat occurrences translated exactly like the first
/// occurrence, pooled over all documents: matches = sum over nouns of
/// [T_i == T_1] for i = 2..k_p, total = sum of (k_p - 1).
Ratio ltcr1(const AnnotationSet& annotations, const MetricOptions& options = {});

/// Fuzzy variant: a repeat matches when either translation is a contiguous
/// substring of the other. Always >= ltcr1 on the same input.
Ratio ltcr1_fuzzy(const AnnotationSet& annotations, const MetricOptions& options = {});

std::map<std::string, Ratio> ltcr1_per_document(const AnnotationSet& annotations,
                                                const MetricOptions& options = {});
std::map<std::string, Ratio> ltcr1_fuzzy_per_document(const AnnotationSet& annotations,
                                                      const MetricOptions& options = {});

/// Inclusive sentence-distance interval; no upper bound means open-ended.
struct BucketSpec {
    long long lo = 0;
    std::optional<long long> hi;

    bool contains(long long distance) const { return distance >= lo && (!hi || distance <= *hi); }
    std::string label() const;

    bool operator==(const BucketSpec&) const = default;
};

/// Parses "1-10,11-50,51-" (a bare number is a single-point interval).
std::vector<BucketSpec> parse_buckets(const std::string& spec);

/// Per-bucket Eq. 1 ratios over repeat occurrences, keyed by the distance
/// between each occurrence and the noun's first occurrence. Overlapping
/// buckets are a config_error; occurrences outside every bucket are skipped.
std::vector<Ratio> distance_buckets(const AnnotationSet& annotations,
                                    const std::vector<BucketSpec>& buckets,
                                    const MetricOptions& options = {});

// ── Annotation + alignment ingestion ─────────────────────────────

/// Token-level span of a proper noun: [start_token, end_token) into the
/// tokenized source sentence.
struct AnnotationSpan {
    int start_token = 0;
    int end_token = 0;
    std::string noun;
};

struct SentenceSpans {
    std::string doc_id;
    int index = 0;
    std::vector<AnnotationSpan> spans;
};

/// Annotation file: JSON per line {doc_id, index, spans:[{start_token,
/// end_token, noun}]}.
std::vector<SentenceSpans> load_annotation_spans(const std::string& path);
std::vector<SentenceSpans> parse_annotation_spans(const std::string& text,
                                                  const std::string& origin);

/// Word alignment for one sentence: Pharaoh "i-j" links over the tokenized
/// sentence pair (0-based indices).
struct SentenceAlignment {
    std::vector<std::string> src_tokens;
    std::vector<std::string> tgt_tokens;
    std::vector<std::pair<int, int>> links;
};

/// Keyed by (doc_id, sentence index). Built from a Pharaoh links file plus
/// companion token files, all in "doc_id<TAB>index<TAB>payload" lines.
class AlignmentMap {
public:
    static AlignmentMap load(const std::string& links_path, const std::string& src_tokens_path,
                             const std::string& tgt_tokens_path);
    static AlignmentMap parse(const std::string& links_text, const std::string& src_tokens_text,
                              const std::string& tgt_tokens_text,
                              const std::string& origin = "<memory>");

    const SentenceAlignment* find(const std::string& doc_id, int index) const;
    std::size_t size() const { return entries_.size(); }

    void put(const std::string& doc_id, int index, SentenceAlignment alignment);

private:
    std::map<std::pair<std::string, int>, SentenceAlignment> entries_;
};

/// "" for zh/ja targets (no word boundaries), " " otherwise.
std::string joiner_for_lang(const std::string& lang_code);

/// Resolves each annotated span to its target-side translation: the target
/// tokens linked to any token of the span, in target order, joined with
/// `joiner`. Spans with no links yield absent translations. Unknown doc ids
/// and out-of-range spans raise input_error naming the location.
AnnotationSet build_annotations(const std::vector<SentenceSpans>& spans,
                                const AlignmentMap& alignment,
                                const std::vector<TargetDocument>& target_docs,
                                const std::string& joiner);

/// Full evaluation report: overall and per-document LTCR-1 / LTCR-1_f and
/// the optional bucket table; undefined ratios serialize as null.
nlohmann::json metrics_report(const AnnotationSet& annotations,
                              const std::optional<std::vector<BucketSpec>>& buckets,
                              const MetricOptions& options = {});

}  // namespace delta
