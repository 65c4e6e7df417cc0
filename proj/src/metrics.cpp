#include "delta/metrics.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>
#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include "delta/errors.hpp"
#include "delta/util.hpp"

namespace delta {

using nlohmann::json;

void AnnotationSet::add(const std::string& doc_id, const std::string& noun, int sentence_index,
                        std::optional<std::string> translation) {
    auto key = std::make_pair(doc_id, noun);
    auto it = index_.find(key);
    if (it == index_.end()) {
        index_[key] = groups_.size();
        groups_.push_back(NounGroup{doc_id, noun, {}});
        it = index_.find(key);
    }
    auto& group = groups_[it->second];
    NounOccurrence occurrence;
    occurrence.noun = noun;
    occurrence.doc_id = doc_id;
    occurrence.sentence_index = sentence_index;
    occurrence.ordinal = static_cast<int>(group.occurrences.size()) + 1;
    occurrence.translation = std::move(translation);
    group.occurrences.push_back(std::move(occurrence));
}

std::optional<double> Ratio::value() const {
    if (total == 0) return std::nullopt;
    return static_cast<double>(matches) / static_cast<double>(total);
}

std::string normalize_translation(std::string_view text, bool case_fold) {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
    std::string trimmed = trim(text);
    if (U_FAILURE(status) || nfc == nullptr) return trimmed;  // normalizer data missing
    icu::UnicodeString unicode = icu::UnicodeString::fromUTF8(trimmed);
    if (case_fold) unicode.foldCase();
    icu::UnicodeString normalized = nfc->normalize(unicode, status);
    if (U_FAILURE(status)) return trimmed;
    std::string out;
    normalized.toUTF8String(out);
    return trim(out);
}

namespace {

// Normalized translation, or nullopt when absent or empty after
// normalization; an aligner that produced nothing is never "consistent".
std::optional<std::string> comparable(const std::optional<std::string>& translation,
                                      const MetricOptions& options) {
    if (!translation) return std::nullopt;
    std::string normalized = normalize_translation(*translation, options.case_fold);
    if (normalized.empty()) return std::nullopt;
    return normalized;
}

bool exact_match(const std::optional<std::string>& a, const std::optional<std::string>& b) {
    return a && b && *a == *b;
}

// Contiguous code-point containment. On valid UTF-8 a byte-level search is
// equivalent: code-point sequences map to byte substrings and a match can
// never start inside a multi-byte character.
bool fuzzy_match(const std::optional<std::string>& a, const std::optional<std::string>& b) {
    if (!a || !b) return false;
    return a->find(*b) != std::string::npos || b->find(*a) != std::string::npos;
}

template <typename Match>
Ratio pooled_ratio(const AnnotationSet& annotations, const MetricOptions& options, Match match) {
    Ratio ratio;
    for (const auto& group : annotations.groups()) {
        if (group.occurrences.size() < 2) continue;  // k_p == 1 contributes nothing
        const auto first = comparable(group.occurrences.front().translation, options);
        for (std::size_t i = 1; i < group.occurrences.size(); ++i) {
            ratio.total += 1;
            if (match(comparable(group.occurrences[i].translation, options), first))
                ratio.matches += 1;
        }
    }
    return ratio;
}

template <typename Match>
std::map<std::string, Ratio> per_document_ratio(const AnnotationSet& annotations,
                                                const MetricOptions& options, Match match) {
    std::map<std::string, Ratio> out;
    for (const auto& group : annotations.groups()) {
        auto& ratio = out[group.doc_id];
        if (group.occurrences.size() < 2) continue;
        const auto first = comparable(group.occurrences.front().translation, options);
        for (std::size_t i = 1; i < group.occurrences.size(); ++i) {
            ratio.total += 1;
            if (match(comparable(group.occurrences[i].translation, options), first))
                ratio.matches += 1;
        }
    }
    return out;
}

}  // namespace

Ratio ltcr1(const AnnotationSet& annotations, const MetricOptions& options) {
    return pooled_ratio(annotations, options, exact_match);
}

Ratio ltcr1_fuzzy(const AnnotationSet& annotations, const MetricOptions& options) {
    return pooled_ratio(annotations, options, fuzzy_match);
}

std::map<std::string, Ratio> ltcr1_per_document(const AnnotationSet& annotations,
                                                const MetricOptions& options) {
    return per_document_ratio(annotations, options, exact_match);
}

std::map<std::string, Ratio> ltcr1_fuzzy_per_document(const AnnotationSet& annotations,
                                                      const MetricOptions& options) {
    return per_document_ratio(annotations, options, fuzzy_match);
}

std::string BucketSpec::label() const {
    if (!hi) return std::to_string(lo) + "-";
    if (*hi == lo) return std::to_string(lo);
    return std::to_string(lo) + "-" + std::to_string(*hi);
}

std::vector<BucketSpec> parse_buckets(const std::string& spec) {
    std::vector<BucketSpec> buckets;
    std::size_t start = 0;
    while (start <= spec.size()) {
        std::size_t comma = spec.find(',', start);
        std::string piece = trim(spec.substr(
            start, comma == std::string::npos ? std::string::npos : comma - start));
        if (!piece.empty()) {
            BucketSpec bucket;
            std::size_t dash = piece.find('-');
            try {
                if (dash == std::string::npos) {
                    bucket.lo = std::stoll(piece);
                    bucket.hi = bucket.lo;
                } else {
                    bucket.lo = std::stoll(piece.substr(0, dash));
                    std::string upper = trim(piece.substr(dash + 1));
                    if (!upper.empty()) bucket.hi = std::stoll(upper);
                }
            } catch (const std::exception&) {
                throw config_error("bad bucket spec: \"" + piece + "\"");
            }
            if (bucket.hi && *bucket.hi < bucket.lo)
                throw config_error("bucket upper bound below lower bound: \"" + piece + "\"");
            buckets.push_back(bucket);
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (buckets.empty()) throw config_error("empty bucket spec");
    return buckets;
}

std::vector<Ratio> distance_buckets(const AnnotationSet& annotations,
                                    const std::vector<BucketSpec>& buckets,
                                    const MetricOptions& options) {
    if (buckets.empty()) throw config_error("need at least one bucket");
    auto sorted = buckets;
    std::sort(sorted.begin(), sorted.end(),
              [](const BucketSpec& a, const BucketSpec& b) { return a.lo < b.lo; });
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        const auto& prev = sorted[i - 1];
        if (!prev.hi || *prev.hi >= sorted[i].lo)
            throw config_error("overlapping buckets: " + prev.label() + " and " +
                               sorted[i].label());
    }

    std::vector<Ratio> ratios(buckets.size());
    for (const auto& group : annotations.groups()) {
        if (group.occurrences.size() < 2) continue;
        const auto first = comparable(group.occurrences.front().translation, options);
        const long long first_sentence = group.occurrences.front().sentence_index;
        for (std::size_t i = 1; i < group.occurrences.size(); ++i) {
            const long long distance = group.occurrences[i].sentence_index - first_sentence;
            for (std::size_t b = 0; b < buckets.size(); ++b) {
                if (!buckets[b].contains(distance)) continue;
                ratios[b].total += 1;
                if (exact_match(comparable(group.occurrences[i].translation, options), first))
                    ratios[b].matches += 1;
                break;
            }
        }
    }
    return ratios;
}

// ── Ingestion ────────────────────────────────────────────────────

std::vector<SentenceSpans> parse_annotation_spans(const std::string& text,
                                                  const std::string& origin) {
    std::vector<SentenceSpans> out;
    int line_no = 0;
    for (const auto& line : split_lines(text)) {
        ++line_no;
        if (trim_view(line).empty()) continue;
        json data = json::parse(line, nullptr, false);
        auto fail = [&](const std::string& what) {
            throw input_error(origin + ":" + std::to_string(line_no) + ": " + what);
        };
        if (data.is_discarded() || !data.is_object()) fail("invalid JSON record");
        if (!data.contains("doc_id") || !data["doc_id"].is_string()) fail("missing \"doc_id\"");
        if (!data.contains("index") || !data["index"].is_number_integer())
            fail("missing \"index\"");
        if (!data.contains("spans") || !data["spans"].is_array()) fail("missing \"spans\"");
        SentenceSpans record;
        record.doc_id = data["doc_id"].get<std::string>();
        record.index = data["index"].get<int>();
        for (const auto& span : data["spans"]) {
            if (!span.is_object() || !span.contains("start_token") || !span.contains("end_token") ||
                !span.contains("noun"))
                fail("span needs start_token, end_token and noun");
            record.spans.push_back(AnnotationSpan{span["start_token"].get<int>(),
                                                  span["end_token"].get<int>(),
                                                  span["noun"].get<std::string>()});
        }
        out.push_back(std::move(record));
    }
    return out;
}

std::vector<SentenceSpans> load_annotation_spans(const std::string& path) {
    return parse_annotation_spans(read_file(path), path);
}

namespace {

struct KeyedLine {
    std::string doc_id;
    int index;
    std::string payload;
};

KeyedLine split_keyed_line(const std::string& line, const std::string& origin, int line_no) {
    std::size_t tab1 = line.find('\t');
    std::size_t tab2 = tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
    if (tab1 == std::string::npos || tab2 == std::string::npos)
        throw input_error(origin + ":" + std::to_string(line_no) +
                          ": expected doc_id<TAB>index<TAB>payload");
    KeyedLine out;
    out.doc_id = line.substr(0, tab1);
    try {
        out.index = std::stoi(line.substr(tab1 + 1, tab2 - tab1 - 1));
    } catch (const std::exception&) {
        throw input_error(origin + ":" + std::to_string(line_no) + ": bad sentence index");
    }
    out.payload = line.substr(tab2 + 1);
    return out;
}

std::vector<std::string> split_tokens(const std::string& payload) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < payload.size()) {
        while (i < payload.size() && payload[i] == ' ') ++i;
        std::size_t j = i;
        while (j < payload.size() && payload[j] != ' ') ++j;
        if (j > i) tokens.push_back(payload.substr(i, j - i));
        i = j;
    }
    return tokens;
}

}  // namespace

void AlignmentMap::put(const std::string& doc_id, int index, SentenceAlignment alignment) {
    entries_[{doc_id, index}] = std::move(alignment);
}

const SentenceAlignment* AlignmentMap::find(const std::string& doc_id, int index) const {
    auto it = entries_.find({doc_id, index});
    return it == entries_.end() ? nullptr : &it->second;
}

AlignmentMap AlignmentMap::parse(const std::string& links_text, const std::string& src_tokens_text,
                                 const std::string& tgt_tokens_text, const std::string& origin) {
    AlignmentMap map;
    // Token files first, so link indices can be bounds-checked.
    auto read_tokens = [&](const std::string& text, const std::string& what)
        -> std::map<std::pair<std::string, int>, std::vector<std::string>> {
        std::map<std::pair<std::string, int>, std::vector<std::string>> out;
        int line_no = 0;
        for (const auto& line : split_lines(text)) {
            ++line_no;
            if (trim_view(line).empty()) continue;
            KeyedLine keyed = split_keyed_line(line, origin + " (" + what + ")", line_no);
            out[{keyed.doc_id, keyed.index}] = split_tokens(keyed.payload);
        }
        return out;
    };
    auto src_tokens = read_tokens(src_tokens_text, "source tokens");
    auto tgt_tokens = read_tokens(tgt_tokens_text, "target tokens");

    int line_no = 0;
    for (const auto& line : split_lines(links_text)) {
        ++line_no;
        if (trim_view(line).empty()) continue;
        KeyedLine keyed = split_keyed_line(line, origin, line_no);
        SentenceAlignment alignment;
        auto src_it = src_tokens.find({keyed.doc_id, keyed.index});
        auto tgt_it = tgt_tokens.find({keyed.doc_id, keyed.index});
        if (src_it == src_tokens.end() || tgt_it == tgt_tokens.end())
            throw input_error(origin + ":" + std::to_string(line_no) + ": no tokens for (\"" +
                              keyed.doc_id + "\", " + std::to_string(keyed.index) + ")");
        alignment.src_tokens = src_it->second;
        alignment.tgt_tokens = tgt_it->second;
        for (const auto& pair_text : split_tokens(keyed.payload)) {
            std::size_t dash = pair_text.find('-');
            int src = -1, tgt = -1;
            if (dash != std::string::npos) {
                try {
                    src = std::stoi(pair_text.substr(0, dash));
                    tgt = std::stoi(pair_text.substr(dash + 1));
                } catch (const std::exception&) {
                    src = -1;
                }
            }
            if (src < 0 || tgt < 0 || src >= static_cast<int>(alignment.src_tokens.size()) ||
                tgt >= static_cast<int>(alignment.tgt_tokens.size()))
                throw input_error(origin + ":" + std::to_string(line_no) +
                                  ": bad alignment link \"" + pair_text + "\"");
            alignment.links.emplace_back(src, tgt);
        }
        map.put(keyed.doc_id, keyed.index, std::move(alignment));
    }
    return map;
}

AlignmentMap AlignmentMap::load(const std::string& links_path, const std::string& src_tokens_path,
                                const std::string& tgt_tokens_path) {
    return parse(read_file(links_path), read_file(src_tokens_path), read_file(tgt_tokens_path),
                 links_path);
}

std::string joiner_for_lang(const std::string& lang_code) {
    if (lang_code.rfind("zh", 0) == 0 || lang_code.rfind("ja", 0) == 0) return "";
    return " ";
}

AnnotationSet build_annotations(const std::vector<SentenceSpans>& spans,
                                const AlignmentMap& alignment,
                                const std::vector<TargetDocument>& target_docs,
                                const std::string& joiner) {
    std::map<std::string, std::size_t> doc_lengths;
    for (const auto& doc : target_docs) doc_lengths[doc.doc_id] = doc.sentences.size();

    // Ordinals follow sentence order per document; spans within a sentence
    // follow token position. Documents keep their file order.
    std::map<std::string, std::size_t> doc_order;
    for (const auto& record : spans)
        doc_order.emplace(record.doc_id, doc_order.size());
    std::vector<SentenceSpans> ordered = spans;
    std::stable_sort(ordered.begin(), ordered.end(),
                     [&](const SentenceSpans& a, const SentenceSpans& b) {
                         auto rank_a = doc_order.at(a.doc_id);
                         auto rank_b = doc_order.at(b.doc_id);
                         if (rank_a != rank_b) return rank_a < rank_b;
                         return a.index < b.index;
                     });

    AnnotationSet annotations;
    for (const auto& record : ordered) {
        auto doc_it = doc_lengths.find(record.doc_id);
        if (doc_it == doc_lengths.end())
            throw input_error("annotation references unknown document \"" + record.doc_id + "\"");
        if (record.index < 1 || static_cast<std::size_t>(record.index) > doc_it->second)
            throw input_error("annotation for \"" + record.doc_id + "\" sentence " +
                              std::to_string(record.index) + " is out of range");

        auto sentence_spans = record.spans;
        std::stable_sort(sentence_spans.begin(), sentence_spans.end(),
                         [](const AnnotationSpan& a, const AnnotationSpan& b) {
                             return a.start_token < b.start_token;
                         });

        const SentenceAlignment* aligned = alignment.find(record.doc_id, record.index);
        for (const auto& span : sentence_spans) {
            if (span.start_token < 0 || span.end_token <= span.start_token)
                throw input_error("bad span [" + std::to_string(span.start_token) + ", " +
                                  std::to_string(span.end_token) + ") for \"" + span.noun +
                                  "\" in \"" + record.doc_id + "\" sentence " +
                                  std::to_string(record.index));
            std::optional<std::string> translation;
            if (aligned != nullptr) {
                if (span.end_token > static_cast<int>(aligned->src_tokens.size()))
                    throw input_error("span end " + std::to_string(span.end_token) +
                                      " exceeds " + std::to_string(aligned->src_tokens.size()) +
                                      " source tokens in \"" + record.doc_id + "\" sentence " +
                                      std::to_string(record.index));
                std::vector<int> linked;
                for (const auto& [src, tgt] : aligned->links)
                    if (src >= span.start_token && src < span.end_token) linked.push_back(tgt);
                std::sort(linked.begin(), linked.end());
                linked.erase(std::unique(linked.begin(), linked.end()), linked.end());
                if (!linked.empty()) {
                    std::string text;
                    for (std::size_t i = 0; i < linked.size(); ++i) {
                        if (i > 0) text += joiner;
                        text += aligned->tgt_tokens[static_cast<std::size_t>(linked[i])];
                    }
                    translation = std::move(text);
                }
            }
            annotations.add(record.doc_id, span.noun, record.index, std::move(translation));
        }
    }
    return annotations;
}

namespace {

json ratio_to_json(const Ratio& ratio) {
    json out;
    out["matches"] = ratio.matches;
    out["total"] = ratio.total;
    if (auto value = ratio.value())
        out["value"] = *value;
    else
        out["value"] = nullptr;
    return out;
}

}  // namespace

json metrics_report(const AnnotationSet& annotations,
                    const std::optional<std::vector<BucketSpec>>& buckets,
                    const MetricOptions& options) {
    json report;
    report["ltcr1"] = ratio_to_json(ltcr1(annotations, options));
    report["ltcr1_fuzzy"] = ratio_to_json(ltcr1_fuzzy(annotations, options));

    json per_doc = json::object();
    auto exact = ltcr1_per_document(annotations, options);
    auto fuzzy = ltcr1_fuzzy_per_document(annotations, options);
    for (const auto& [doc_id, ratio] : exact) {
        per_doc[doc_id] =
            json{{"ltcr1", ratio_to_json(ratio)}, {"ltcr1_fuzzy", ratio_to_json(fuzzy[doc_id])}};
    }
    report["per_document"] = std::move(per_doc);

    if (buckets) {
        json table = json::array();
        auto ratios = distance_buckets(annotations, *buckets, options);
        for (std::size_t i = 0; i < buckets->size(); ++i) {
            json row = ratio_to_json(ratios[i]);
            row["range"] = (*buckets)[i].label();
            table.push_back(std::move(row));
        }
        report["buckets"] = std::move(table);
    } else {
        report["buckets"] = nullptr;
    }
    return report;
}

}  // namespace delta
