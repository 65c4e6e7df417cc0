#include "delta/components.hpp"

#include <algorithm>
#include <set>

#include "delta/errors.hpp"
#include "delta/util.hpp"

namespace delta {

namespace {

std::string call_backend(const ComponentContext& ctx, ComponentTag tag, std::string prompt) {
    ChatRequest request;
    request.messages.push_back({Role::User, std::move(prompt)});
    request.model = ctx.model;
    request.max_new_tokens = ctx.max_new_tokens;
    request.temperature = ctx.temperature;
    request.tag = tag_name(tag);
    return ctx.backend->complete(request);
}

// Multi-byte aware token matching for the quote/dash variants LLMs emit.
std::size_t match_any(std::string_view text, std::size_t pos,
                      const std::vector<std::string_view>& tokens) {
    for (auto token : tokens)
        if (text.substr(pos, token.size()) == token) return token.size();
    return 0;
}

const std::vector<std::string_view>& quote_tokens() {
    static const std::vector<std::string_view> tokens = {"\"", "“", "”"};
    return tokens;
}

const std::vector<std::string_view>& dash_tokens() {
    static const std::vector<std::string_view> tokens = {"-", "–", "—", "－"};
    return tokens;
}

struct QuotedSpan {
    std::size_t begin;  // first content byte
    std::size_t end;    // one past last content byte
    std::size_t outer_begin;
    std::size_t outer_end;
};

std::vector<QuotedSpan> find_quoted_spans(std::string_view text) {
    std::vector<QuotedSpan> spans;
    std::size_t i = 0;
    while (i < text.size()) {
        std::size_t open = match_any(text, i, quote_tokens());
        if (open == 0) {
            ++i;
            continue;
        }
        std::size_t j = i + open;
        while (j < text.size() && match_any(text, j, quote_tokens()) == 0) ++j;
        if (j >= text.size()) break;  // unterminated quote
        std::size_t close = match_any(text, j, quote_tokens());
        spans.push_back({i + open, j, i, j + close});
        i = j + close;
    }
    return spans;
}

// True when the text between two quoted spans is just a dash (plus spaces).
bool is_pair_separator(std::string_view between) {
    std::string_view s = trim_view(between);
    if (s.empty()) return false;
    std::size_t i = 0;
    bool saw_dash = false;
    while (i < s.size()) {
        if (s[i] == ' ' || s[i] == '\t') {
            ++i;
            continue;
        }
        std::size_t dash = match_any(s, i, dash_tokens());
        if (dash == 0) return false;
        saw_dash = true;
        i += dash;
    }
    return saw_dash;
}

bool is_bare_na(std::string_view response) {
    std::string_view s = trim_view(response);
    // Allow one layer of quoting around the N/A.
    for (auto token : quote_tokens()) {
        if (s.size() > token.size() && s.substr(0, token.size()) == token) {
            for (auto closer : quote_tokens()) {
                if (s.size() >= token.size() + closer.size() &&
                    s.substr(s.size() - closer.size()) == closer) {
                    s = trim_view(s.substr(token.size(), s.size() - token.size() - closer.size()));
                    break;
                }
            }
            break;
        }
    }
    return s == "N/A" || s == "n/a" || s == "N/a";
}

}  // namespace

std::optional<std::vector<std::pair<std::string, std::string>>> parse_extractor_response(
    std::string_view response) {
    std::vector<std::pair<std::string, std::string>> pairs;
    auto spans = find_quoted_spans(response);
    std::size_t i = 0;
    while (i + 1 < spans.size()) {
        std::string_view between =
            response.substr(spans[i].outer_end, spans[i + 1].outer_begin - spans[i].outer_end);
        if (is_pair_separator(between)) {
            pairs.emplace_back(
                trim(response.substr(spans[i].begin, spans[i].end - spans[i].begin)),
                trim(response.substr(spans[i + 1].begin, spans[i + 1].end - spans[i + 1].begin)));
            i += 2;
        } else {
            i += 1;
        }
    }
    if (!pairs.empty()) return pairs;
    if (is_bare_na(response)) return std::vector<std::pair<std::string, std::string>>{};
    return std::nullopt;
}

std::optional<std::vector<int>> parse_retriever_response(std::string_view response) {
    std::size_t open = 0;
    while ((open = response.find('[', open)) != std::string_view::npos) {
        std::size_t close = response.find(']', open + 1);
        if (close == std::string_view::npos) return std::nullopt;
        std::string_view inner = response.substr(open + 1, close - open - 1);
        std::vector<int> numbers;
        std::size_t i = 0;
        bool garbage = false;
        while (i < inner.size()) {
            char c = inner[i];
            if (c >= '0' && c <= '9') {
                long long value = 0;
                while (i < inner.size() && inner[i] >= '0' && inner[i] <= '9') {
                    value = value * 10 + (inner[i] - '0');
                    if (value > 1'000'000'000LL) value = 1'000'000'000LL;  // clamp, dropped later
                    ++i;
                }
                numbers.push_back(static_cast<int>(value));
            } else if (c == ',' || c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                ++i;
            } else {
                garbage = true;
                break;
            }
        }
        if (!garbage && !numbers.empty()) return numbers;
        open = open + 1;
    }
    return std::nullopt;
}

std::string trim_translation(std::string_view response) {
    static const std::vector<std::pair<std::string_view, std::string_view>> quote_pairs = {
        {"\"", "\""},         {"'", "'"},           {"“", "”"},
        {"‘", "’"}, {"「", "」"},
    };
    std::string_view s = trim_view(response);
    bool changed = true;
    while (changed && !s.empty()) {
        changed = false;
        for (const auto& [open, close] : quote_pairs) {
            if (s.size() >= open.size() + close.size() && s.substr(0, open.size()) == open &&
                s.substr(s.size() - close.size()) == close) {
                s = trim_view(s.substr(open.size(), s.size() - open.size() - close.size()));
                changed = true;
                break;
            }
        }
    }
    return std::string(s);
}

std::vector<std::pair<std::string, std::string>> extract_proper_nouns(
    const ComponentContext& ctx, const std::string& source, const std::string& target,
    const ProperNounRecords& known) {
    const std::string prompt = ctx.templates->render(
        ComponentTag::Extractor,
        {{"SOURCE_SENTENCE", source}, {"TARGET_SENTENCE", target},
         {"SRC_LANG", ctx.src_lang_name}, {"TGT_LANG", ctx.tgt_lang_name}});

    std::optional<std::vector<std::pair<std::string, std::string>>> parsed;
    for (int attempt = 0; attempt < 2 && !parsed; ++attempt)
        parsed = parse_extractor_response(call_backend(ctx, ComponentTag::Extractor, prompt));
    if (!parsed) {
        log_warning("extractor response unparseable twice; continuing with no new records");
        return {};
    }

    std::vector<std::pair<std::string, std::string>> result;
    std::set<std::string> seen;
    for (auto& [noun, translation] : *parsed) {
        if (noun.empty() || translation.empty() || translation == "N/A") continue;
        if (known.contains(noun)) continue;
        if (!seen.insert(noun).second) continue;
        result.emplace_back(noun, translation);
    }
    return result;
}

std::string write_segment_summary(const ComponentContext& ctx,
                                  const std::vector<std::string>& sentences, SummarySide side,
                                  const std::optional<std::string>& query) {
    if (sentences.empty()) throw contract_error("segment summary needs at least one sentence");
    const ComponentTag tag =
        side == SummarySide::Source ? ComponentTag::SrcSummary : ComponentTag::TgtSummary;
    Bindings bindings{{"SOURCE_SEGMENT", join(sentences, " ")}};
    if (query) bindings["QUERY"] = *query;
    const std::string prompt = ctx.templates->render(tag, bindings, query.has_value());

    std::string summary = trim(call_backend(ctx, tag, prompt));
    if (summary.empty()) summary = trim(call_backend(ctx, tag, prompt));
    return summary;
}

std::string merge_summaries(const ComponentContext& ctx, const std::string& old_summary,
                            const std::string& new_summary, SummarySide side,
                            const std::optional<std::string>& query) {
    if (new_summary.empty()) throw contract_error("merge_summaries: new summary is empty");
    if (old_summary.empty()) return new_summary;  // first update shortcut
    const ComponentTag tag =
        side == SummarySide::Source ? ComponentTag::SrcMerge : ComponentTag::TgtMerge;
    Bindings bindings{{"SUMMARY_1", old_summary}, {"SUMMARY_2", new_summary}};
    if (query) bindings["QUERY"] = *query;
    return trim(call_backend(ctx, tag, ctx.templates->render(tag, bindings, query.has_value())));
}

std::string numbered_sentence_list(const MemoryWindow& window) {
    std::string out;
    for (std::size_t i = 0; i < window.pairs().size(); ++i) {
        if (i > 0) out += '\n';
        out += std::to_string(i + 1);
        out += ". ";
        out += window.pairs()[i].source;
    }
    return out;
}

RetrievedContext retrieve_relevant(const ComponentContext& ctx, const std::string& query_sentence,
                                   const MemoryWindow& window, int n) {
    if (n < 1) throw contract_error("retrieve_relevant: n must be >= 1");
    RetrievedContext result;
    const auto& pairs = window.pairs();
    if (static_cast<int>(pairs.size()) <= n) {  // small window: no call needed
        result.pairs = pairs;
        for (std::size_t i = 0; i < pairs.size(); ++i)
            result.positions.push_back(static_cast<int>(i) + 1);
        return result;
    }

    const std::string prompt =
        ctx.templates->render(ComponentTag::Retriever, {{"SOURCE_SEGMENT", numbered_sentence_list(window)},
                                                        {"QUERY", query_sentence},
                                                        {"TOP_NUM", std::to_string(n)}});
    std::optional<std::vector<int>> numbers;
    for (int attempt = 0; attempt < 2 && !numbers; ++attempt)
        numbers = parse_retriever_response(call_backend(ctx, ComponentTag::Retriever, prompt));

    std::vector<int> positions;
    if (!numbers) {
        log_warning("retriever response unparseable twice; falling back to most recent pairs");
        for (int i = static_cast<int>(pairs.size()) - n + 1; i <= static_cast<int>(pairs.size()); ++i)
            positions.push_back(i);
    } else {
        std::set<int> seen;
        for (int value : *numbers) {
            if (value < 1 || value > static_cast<int>(pairs.size())) continue;
            if (!seen.insert(value).second) continue;
            positions.push_back(value);
            if (static_cast<int>(positions.size()) == n) break;
        }
        std::sort(positions.begin(), positions.end());  // window order
    }
    for (int pos : positions) result.pairs.push_back(pairs[static_cast<std::size_t>(pos) - 1]);
    result.positions = std::move(positions);
    return result;
}

std::string format_instances(const ComponentContext& ctx, const std::vector<SentencePair>& pairs) {
    std::vector<std::string> blocks;
    for (const auto& pair : pairs)
        blocks.push_back("<" + ctx.src_lang_name + " source> " + pair.source + "\n<" +
                         ctx.tgt_lang_name + " translation> " + pair.target);
    return join(blocks, "\n\n");
}

std::string format_noun_history(const std::vector<std::pair<std::string, std::string>>& matched) {
    std::vector<std::string> lines;
    for (const auto& [noun, translation] : matched)
        lines.push_back("\"" + noun + "\" - \"" + translation + "\"");
    return join(lines, "\n");
}

std::string translate_sentence(const ComponentContext& ctx, const std::string& source,
                               const std::vector<std::pair<std::string, std::string>>& matched,
                               const RetrievedContext& retrieved, const BilingualSummary& summary,
                               const MemoryWindow& short_term, int sentence_index) {
    auto or_na = [](std::string text) { return text.empty() ? std::string("N/A") : text; };

    std::vector<std::string> src_context, tgt_context;
    for (const auto& pair : short_term.pairs()) {
        src_context.push_back(pair.source);
        tgt_context.push_back(pair.target);
    }

    const std::string prompt = ctx.templates->render(
        ComponentTag::Translator,
        {{"SRC_LANG", ctx.src_lang_name},
         {"TGT_LANG", ctx.tgt_lang_name},
         {"SRC_SUMMARY", or_na(summary.source)},
         {"TGT_SUMMARY", or_na(summary.target)},
         {"HISTORY", or_na(format_noun_history(matched))},
         {"SRC_CONTEXT", or_na(join(src_context, " "))},
         {"TGT_CONTEXT", or_na(join(tgt_context, " "))},
         {"RELEVANT_INSTANCES", or_na(format_instances(ctx, retrieved.pairs))},
         {"SOURCE", source}});

    std::string hypothesis = trim_translation(call_backend(ctx, ComponentTag::Translator, prompt));
    if (hypothesis.empty())
        hypothesis = trim_translation(call_backend(ctx, ComponentTag::Translator, prompt));
    if (hypothesis.empty())
        throw translation_error("translator returned an empty hypothesis twice", sentence_index);
    return hypothesis;
}

}  // namespace delta
