#include "delta/templates.hpp"

#include <array>
#include <filesystem>
#include <set>

#include "delta/errors.hpp"
#include "delta/util.hpp"

namespace delta {

namespace {

// The full placeholder vocabulary. Templates may not invent new names.
const std::set<std::string>& allowed_placeholders() {
    static const std::set<std::string> names = {
        "SOURCE_SENTENCE", "TARGET_SENTENCE", "SOURCE_SEGMENT", "SUMMARY_1", "SUMMARY_2",
        "TOP_NUM",         "QUERY",           "SRC_LANG",       "TGT_LANG",  "SRC_SUMMARY",
        "TGT_SUMMARY",     "HISTORY",         "SRC_CONTEXT",    "TGT_CONTEXT",
        "RELEVANT_INSTANCES", "SOURCE",
    };
    return names;
}

bool is_placeholder_char(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

// Scans for {NAME} slots; NAME must start with an uppercase letter. Other
// braces are literal text.
std::vector<std::string> scan_placeholders(std::string_view text) {
    std::vector<std::string> found;
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] != '{') {
            ++i;
            continue;
        }
        std::size_t j = i + 1;
        while (j < text.size() && is_placeholder_char(text[j])) ++j;
        if (j > i + 1 && j < text.size() && text[j] == '}' && text[i + 1] >= 'A' &&
            text[i + 1] <= 'Z') {
            found.emplace_back(text.substr(i + 1, j - i - 1));
            i = j + 1;
        } else {
            ++i;
        }
    }
    return found;
}

std::string strip_leading_comments(std::string text) {
    std::size_t pos = 0;
    while (pos < text.size() && text[pos] == '#') {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string::npos) return "";
        pos = nl + 1;
    }
    return text.substr(pos);
}

}  // namespace

const char* tag_name(ComponentTag tag) {
    switch (tag) {
        case ComponentTag::Extractor: return "extractor";
        case ComponentTag::SrcSummary: return "src_summary";
        case ComponentTag::TgtSummary: return "tgt_summary";
        case ComponentTag::SrcMerge: return "src_merge";
        case ComponentTag::TgtMerge: return "tgt_merge";
        case ComponentTag::Retriever: return "retriever";
        case ComponentTag::Translator: return "translator";
        case ComponentTag::SentenceBaseline: return "sentence_baseline";
        case ComponentTag::ContextBaseline: return "context_baseline";
        case ComponentTag::Doc2Doc: return "doc2doc";
    }
    return "unknown";
}

PromptTemplate PromptTemplate::parse(std::string text, const std::string& origin) {
    PromptTemplate tmpl;
    tmpl.text_ = strip_leading_comments(std::move(text));
    // Template files end with a newline for file hygiene; it is not part of
    // the prompt.
    if (!tmpl.text_.empty() && tmpl.text_.back() == '\n') tmpl.text_.pop_back();
    tmpl.placeholders_ = scan_placeholders(tmpl.text_);
    for (const auto& name : tmpl.placeholders_) {
        if (!allowed_placeholders().count(name))
            throw config_error(origin + ": unknown placeholder {" + name + "}");
    }
    return tmpl;
}

std::string PromptTemplate::render(const Bindings& bindings) const {
    std::string out;
    out.reserve(text_.size());
    std::size_t i = 0;
    while (i < text_.size()) {
        if (text_[i] == '{') {
            std::size_t j = i + 1;
            while (j < text_.size() && is_placeholder_char(text_[j])) ++j;
            if (j > i + 1 && j < text_.size() && text_[j] == '}' && text_[i + 1] >= 'A' &&
                text_[i + 1] <= 'Z') {
                std::string name(text_.substr(i + 1, j - i - 1));
                auto it = bindings.find(name);
                if (it == bindings.end())
                    throw contract_error("unbound template placeholder {" + name + "}");
                out += it->second;
                i = j + 1;
                continue;
            }
        }
        out += text_[i];
        ++i;
    }
    return out;
}

TemplateSet TemplateSet::load(const std::string& templates_dir, const std::string& lang_pair) {
    namespace fs = std::filesystem;
    static const std::array<const char*, 14> files = {
        "extractor",         "src_summary",       "tgt_summary",     "src_merge",
        "tgt_merge",         "retriever",         "translator",      "sentence_baseline",
        "context_baseline",  "doc2doc",           "src_summary_query", "tgt_summary_query",
        "src_merge_query",   "tgt_merge_query",
    };
    TemplateSet set;
    for (const char* name : files) {
        fs::path pair_path = fs::path(templates_dir) / lang_pair / (std::string(name) + ".txt");
        fs::path default_path = fs::path(templates_dir) / "default" / (std::string(name) + ".txt");
        fs::path chosen;
        if (fs::exists(pair_path))
            chosen = pair_path;
        else if (fs::exists(default_path))
            chosen = default_path;
        else
            throw config_error("template \"" + std::string(name) + "\" not found under " +
                               templates_dir + " (looked in " + lang_pair + "/ and default/)");
        set.templates_[name] = PromptTemplate::parse(read_file(chosen.string()), chosen.string());
    }
    return set;
}

const PromptTemplate& TemplateSet::get(ComponentTag tag, bool query_variant) const {
    std::string key = tag_name(tag);
    if (query_variant) key += "_query";
    auto it = templates_.find(key);
    if (it == templates_.end()) throw config_error("no template loaded for \"" + key + "\"");
    return it->second;
}

std::string TemplateSet::render(ComponentTag tag, const Bindings& bindings,
                                bool query_variant) const {
    return get(tag, query_variant).render(bindings);
}

}  // namespace delta
