#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace delta {

/// The ten prompt-bearing components plus query-mode variants of the four
/// summary components.
enum class ComponentTag {
    Extractor,
    SrcSummary,
    TgtSummary,
    SrcMerge,
    TgtMerge,
    Retriever,
    Translator,
    SentenceBaseline,
    ContextBaseline,
    Doc2Doc,
};

const char* tag_name(ComponentTag tag);

using Bindings = std::map<std::string, std::string>;

/// A template text with {PLACEHOLDER} slots. Rendering is pure: the same
/// bindings always produce the same bytes.
class PromptTemplate {
public:
    PromptTemplate() = default;
    /// Validates placeholder names against the allowed vocabulary
    /// (config_error otherwise). Leading lines starting with '#' are
    /// comments and are stripped.
    static PromptTemplate parse(std::string text, const std::string& origin);

    /// Substitutes every placeholder. An unbound placeholder is a
    /// contract_error; unused bindings are fine.
    std::string render(const Bindings& bindings) const;

    const std::string& text() const { return text_; }
    const std::vector<std::string>& placeholders() const { return placeholders_; }

private:
    std::string text_;
    std::vector<std::string> placeholders_;
};

/// Loads templates/<lang_pair>/<component>.txt with per-file fallback to
/// templates/default/<component>.txt. Query-mode summary prompts live in
/// "<component>_query.txt".
class TemplateSet {
public:
    /// `lang_pair` like "en-zh". Throws config_error when a required
    /// template is missing from both directories.
    static TemplateSet load(const std::string& templates_dir, const std::string& lang_pair);

    const PromptTemplate& get(ComponentTag tag, bool query_variant = false) const;
    std::string render(ComponentTag tag, const Bindings& bindings,
                       bool query_variant = false) const;

private:
    std::map<std::string, PromptTemplate> templates_;
};

}  // namespace delta
