#pragma once

#include <string>
#include <vector>

namespace delta {

/// One aligned sentence with its hypothesis. Indices are 1-based.
struct SentencePair {
    int index = 0;
    std::string source;
    std::string target;

    bool operator==(const SentencePair&) const = default;
};

/// An ordered source document. Sentence i of the paper is sentences[i-1].
struct SourceDocument {
    std::string doc_id;
    std::vector<std::string> sentences;
    std::string lang;

    bool operator==(const SourceDocument&) const = default;
};

/// The hypothesis side. When produced by the orchestrator its length always
/// equals the paired source document's length.
struct TargetDocument {
    std::string doc_id;
    std::vector<std::string> sentences;
    std::string lang;

    bool operator==(const TargetDocument&) const = default;
};

enum class CorpusFormat {
    PlainText,   // one sentence per line, blank line = document boundary
    LineRecord,  // one JSON object per line: {doc_id, index, source[, target]}
};

/// Picks a format from the file extension: .jsonl/.ndjson -> LineRecord,
/// anything else -> PlainText.
CorpusFormat corpus_format_from_path(const std::string& path);

/// Loads a corpus file. Documents keep file order, sentences keep document
/// order. An empty file yields an empty list. `lang` is stamped onto every
/// document (corpus files carry no language tag).
///
/// Line-record files must have contiguous 1-based indices per doc_id and no
/// duplicate (doc_id, index); violations raise input_error naming the line.
std::vector<SourceDocument> load_corpus(const std::string& path, CorpusFormat format,
                                        const std::string& lang = {});

/// Parses corpus text without touching the filesystem. `origin` is used in
/// error messages.
std::vector<SourceDocument> parse_corpus(const std::string& text, CorpusFormat format,
                                         const std::string& lang = {},
                                         const std::string& origin = "<memory>");

/// Pairs a source document with its hypotheses. Throws alignment_error unless
/// |hyps| equals the document length.
TargetDocument assemble_target(const SourceDocument& doc, std::vector<std::string> hyps);

/// Writes documents in the given format (UTF-8, Unix line endings).
/// For LineRecord, load_corpus(write_corpus(x)) reproduces doc ids and
/// sentences exactly.
void write_corpus(const std::vector<TargetDocument>& docs, const std::string& path,
                  CorpusFormat format);

/// Serializes to a string instead of a file.
std::string render_corpus(const std::vector<TargetDocument>& docs, CorpusFormat format);

}  // namespace delta
