#include "delta/corpus.hpp"

#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <utility>

#include "delta/errors.hpp"
#include "delta/util.hpp"

namespace delta {

using nlohmann::json;

CorpusFormat corpus_format_from_path(const std::string& path) {
    auto dot = path.find_last_of('.');
    if (dot != std::string::npos) {
        std::string ext = path.substr(dot + 1);
        if (ext == "jsonl" || ext == "ndjson") return CorpusFormat::LineRecord;
    }
    return CorpusFormat::PlainText;
}

namespace {

std::vector<SourceDocument> parse_plain_text(const std::string& text, const std::string& lang) {
    std::vector<SourceDocument> docs;
    SourceDocument current;
    int doc_count = 0;
    auto flush = [&] {
        if (!current.sentences.empty()) {
            ++doc_count;
            current.doc_id = "doc" + std::to_string(doc_count);
            current.lang = lang;
            docs.push_back(std::move(current));
            current = {};
        }
    };
    for (auto& line : split_lines(text)) {
        if (trim_view(line).empty()) {
            flush();
        } else {
            current.sentences.push_back(line);
        }
    }
    flush();
    return docs;
}

std::vector<SourceDocument> parse_line_records(const std::string& text, const std::string& lang,
                                               const std::string& origin) {
    std::vector<SourceDocument> docs;
    std::map<std::string, std::size_t> doc_pos;
    std::set<std::pair<std::string, int>> seen;

    auto fail = [&](int line_no, const std::string& what) {
        throw input_error(origin + ":" + std::to_string(line_no) + ": " + what);
    };

    int line_no = 0;
    for (auto& line : split_lines(text)) {
        ++line_no;
        if (trim_view(line).empty()) continue;
        json rec = json::parse(line, nullptr, false);
        if (rec.is_discarded() || !rec.is_object()) fail(line_no, "invalid JSON record");
        if (!rec.contains("doc_id") || !rec["doc_id"].is_string())
            fail(line_no, "missing field \"doc_id\"");
        if (!rec.contains("index") || !rec["index"].is_number_integer())
            fail(line_no, "missing field \"index\"");

        std::string sentence;
        if (rec.contains("source") && rec["source"].is_string()) {
            sentence = rec["source"].get<std::string>();
            if (sentence.find('\n') != std::string::npos)
                fail(line_no, "line break in source sentence");
        } else if (rec.contains("target") && rec["target"].is_string()) {
            sentence = rec["target"].get<std::string>();
        } else {
            fail(line_no, "missing field \"source\"");
        }

        const std::string doc_id = rec["doc_id"].get<std::string>();
        const int index = rec["index"].get<int>();
        if (index < 1) fail(line_no, "index must be >= 1");
        if (!seen.insert({doc_id, index}).second)
            fail(line_no, "duplicate (doc_id, index): (\"" + doc_id + "\", " +
                              std::to_string(index) + ")");

        auto it = doc_pos.find(doc_id);
        if (it == doc_pos.end()) {
            if (index != 1) fail(line_no, "non-contiguous index: doc \"" + doc_id +
                                              "\" starts at " + std::to_string(index));
            doc_pos[doc_id] = docs.size();
            docs.push_back(SourceDocument{doc_id, {sentence}, lang});
        } else {
            auto& doc = docs[it->second];
            if (index != static_cast<int>(doc.sentences.size()) + 1)
                fail(line_no, "non-contiguous index: doc \"" + doc_id + "\" expected " +
                                  std::to_string(doc.sentences.size() + 1) + ", got " +
                                  std::to_string(index));
            doc.sentences.push_back(sentence);
        }
    }
    return docs;
}

std::string escape_plain(const std::string& sentence) {
    // Plain text cannot represent internal line breaks; fold them to spaces.
    std::string out = sentence;
    for (auto& c : out)
        if (c == '\n' || c == '\r') c = ' ';
    return out;
}

}  // namespace

std::vector<SourceDocument> parse_corpus(const std::string& text, CorpusFormat format,
                                         const std::string& lang, const std::string& origin) {
    switch (format) {
        case CorpusFormat::PlainText: return parse_plain_text(text, lang);
        case CorpusFormat::LineRecord: return parse_line_records(text, lang, origin);
    }
    throw contract_error("unknown corpus format");
}

std::vector<SourceDocument> load_corpus(const std::string& path, CorpusFormat format,
                                        const std::string& lang) {
    return parse_corpus(read_file(path), format, lang, path);
}

TargetDocument assemble_target(const SourceDocument& doc, std::vector<std::string> hyps) {
    if (hyps.size() != doc.sentences.size()) throw alignment_error(doc.sentences.size(), hyps.size());
    return TargetDocument{doc.doc_id, std::move(hyps), doc.lang};
}

std::string render_corpus(const std::vector<TargetDocument>& docs, CorpusFormat format) {
    std::string out;
    if (format == CorpusFormat::PlainText) {
        for (std::size_t d = 0; d < docs.size(); ++d) {
            if (d > 0) out += '\n';
            for (const auto& sentence : docs[d].sentences) {
                out += escape_plain(sentence);
                out += '\n';
            }
        }
    } else {
        for (const auto& doc : docs) {
            for (std::size_t i = 0; i < doc.sentences.size(); ++i) {
                json rec;
                rec["doc_id"] = doc.doc_id;
                rec["index"] = static_cast<int>(i) + 1;
                rec["target"] = doc.sentences[i];
                out += rec.dump();
                out += '\n';
            }
        }
    }
    return out;
}

void write_corpus(const std::vector<TargetDocument>& docs, const std::string& path,
                  CorpusFormat format) {
    write_file(path, render_corpus(docs, format));
}

alignment_error::alignment_error(std::size_t source_len, std::size_t target_len)
    : error("alignment error: " + std::to_string(source_len) + " source sentences vs " +
            std::to_string(target_len) + " hypotheses"),
      source_len(source_len),
      target_len(target_len) {}

}  // namespace delta
