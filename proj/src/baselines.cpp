#include "delta/baselines.hpp"

#include <nlohmann/json.hpp>

#include "delta/errors.hpp"
#include "delta/util.hpp"

namespace delta {

namespace {

ChatRequest base_request(const AgentConfig& config, ComponentTag tag) {
    ChatRequest request;
    request.model = config.model;
    request.max_new_tokens = config.max_new_tokens;
    request.temperature = config.temperature;
    request.tag = tag_name(tag);
    return request;
}

std::string complete_prompt(Backend& backend, const AgentConfig& config, ComponentTag tag,
                            std::string prompt) {
    ChatRequest request = base_request(config, tag);
    request.messages.push_back({Role::User, std::move(prompt)});
    return backend.complete(request);
}

std::string hypothesis_or_throw(std::string reply, int index) {
    std::string hypothesis = trim_translation(reply);
    if (hypothesis.empty()) throw translation_error("empty hypothesis", index);
    return hypothesis;
}

TraceRecord simple_record(int index, std::string hypothesis, std::string tag) {
    TraceRecord record;
    record.index = index;
    record.hypothesis = std::move(hypothesis);
    record.component_calls = {std::move(tag)};
    record.memory = nullptr;
    return record;
}

}  // namespace

RunResult sentence_baseline(const SourceDocument& doc, const AgentConfig& config,
                            Backend& backend, const TemplateSet& templates) {
    std::vector<std::string> hypotheses;
    RunTrace trace{doc.doc_id, {}};
    for (std::size_t i = 0; i < doc.sentences.size(); ++i) {
        const std::string prompt =
            templates.render(ComponentTag::SentenceBaseline,
                             {{"SRC_LANG", config.resolved_src_name()},
                              {"TGT_LANG", config.resolved_tgt_name()},
                              {"SOURCE", doc.sentences[i]}});
        std::string hypothesis = hypothesis_or_throw(
            complete_prompt(backend, config, ComponentTag::SentenceBaseline, prompt),
            static_cast<int>(i) + 1);
        trace.records.push_back(simple_record(static_cast<int>(i) + 1, hypothesis,
                                              tag_name(ComponentTag::SentenceBaseline)));
        hypotheses.push_back(std::move(hypothesis));
    }
    return RunResult{assemble_target(doc, std::move(hypotheses)), std::move(trace)};
}

RunResult context_baseline(const SourceDocument& doc, const AgentConfig& config,
                           Backend& backend, const TemplateSet& templates) {
    constexpr std::size_t kContextPairs = 3;
    std::vector<std::string> hypotheses;
    RunTrace trace{doc.doc_id, {}};
    ComponentContext ctx;  // only the language names are used by the formatter
    ctx.src_lang_name = config.resolved_src_name();
    ctx.tgt_lang_name = config.resolved_tgt_name();

    for (std::size_t i = 0; i < doc.sentences.size(); ++i) {
        std::vector<SentencePair> context;
        const std::size_t begin = i > kContextPairs ? i - kContextPairs : 0;
        for (std::size_t j = begin; j < i; ++j)
            context.push_back({static_cast<int>(j) + 1, doc.sentences[j], hypotheses[j]});
        const std::string instances = format_instances(ctx, context);
        const std::string prompt =
            templates.render(ComponentTag::ContextBaseline,
                             {{"SRC_LANG", ctx.src_lang_name},
                              {"TGT_LANG", ctx.tgt_lang_name},
                              {"RELEVANT_INSTANCES", instances.empty() ? "N/A" : instances},
                              {"SOURCE", doc.sentences[i]}});
        std::string hypothesis = hypothesis_or_throw(
            complete_prompt(backend, config, ComponentTag::ContextBaseline, prompt),
            static_cast<int>(i) + 1);
        trace.records.push_back(simple_record(static_cast<int>(i) + 1, hypothesis,
                                              tag_name(ComponentTag::ContextBaseline)));
        hypotheses.push_back(std::move(hypothesis));
    }
    return RunResult{assemble_target(doc, std::move(hypotheses)), std::move(trace)};
}

std::vector<std::optional<std::string>> parse_numbered_response(std::string_view response,
                                                                int batch_size) {
    std::vector<std::optional<std::string>> slots(
        batch_size < 0 ? 0 : static_cast<std::size_t>(batch_size));
    int current = 0;  // 1-based slot being continued, 0 = none
    for (const auto& raw_line : split_lines(std::string(response))) {
        std::string_view line = trim_view(raw_line);
        if (line.empty()) continue;

        std::size_t d = 0;
        while (d < line.size() && line[d] >= '0' && line[d] <= '9') ++d;
        bool numbered = false;
        long long number = 0;
        std::size_t body_begin = 0;
        if (d > 0 && d <= 9 && d < line.size()) {
            // Require a separator after the digits: "3. text", "3) text", "3: text".
            static const std::vector<std::string_view> separators = {". ", ") ", ": ", ".", ")",
                                                                     ":", "、", "．",
                                                                     "："};
            for (auto sep : separators) {
                if (line.substr(d, sep.size()) == sep) {
                    numbered = true;
                    number = std::stoll(std::string(line.substr(0, d)));
                    body_begin = d + sep.size();
                    break;
                }
            }
        }

        if (numbered) {
            if (number >= 1 && number <= batch_size) {
                auto& slot = slots[static_cast<std::size_t>(number) - 1];
                if (!slot) {  // first occurrence wins
                    slot = trim(line.substr(body_begin));
                    current = static_cast<int>(number);
                } else {
                    current = 0;
                }
            } else {
                current = 0;  // out-of-range number: drop the line
            }
        } else if (current != 0) {
            auto& slot = slots[static_cast<std::size_t>(current) - 1];
            *slot += ' ';
            *slot += trim(line);
        }
    }
    return slots;
}

std::pair<std::vector<std::string>, WindowedRun> doc2doc_baseline(const SourceDocument& doc,
                                                                  const AgentConfig& config,
                                                                  Backend& backend,
                                                                  const TemplateSet& templates,
                                                                  int window) {
    if (window < 1) throw contract_error("doc2doc window must be >= 1");
    WindowedRun run;
    run.window = window;
    ChatSession session(backend, base_request(config, ComponentTag::Doc2Doc));

    const int n_sentences = static_cast<int>(doc.sentences.size());
    for (int start = 1; start <= n_sentences; start += window) {
        const int size = std::min(window, n_sentences - start + 1);
        std::string numbered;
        for (int j = 0; j < size; ++j) {
            if (j > 0) numbered += '\n';
            numbered += std::to_string(j + 1) + ". " +
                        doc.sentences[static_cast<std::size_t>(start + j) - 1];
        }
        const std::string prompt =
            templates.render(ComponentTag::Doc2Doc, {{"SRC_LANG", config.resolved_src_name()},
                                                     {"TGT_LANG", config.resolved_tgt_name()},
                                                     {"SOURCE_SEGMENT", numbered}});
        const std::string response = session.send(prompt);  // session errors abort the run

        WindowedRun::Batch batch;
        batch.start_index = start;
        batch.size = size;
        batch.response = response;
        auto slots = parse_numbered_response(response, size);
        for (int j = 0; j < size; ++j) {
            auto hypothesis = slots[static_cast<std::size_t>(j)];
            if (hypothesis && !trim_view(*hypothesis).empty()) {
                run.recovered.push_back(trim_translation(*hypothesis));
            } else {
                run.recovered.push_back(std::nullopt);
                batch.missing.push_back(start + j);
            }
        }
        run.batches.push_back(std::move(batch));
    }

    std::vector<std::string> hypotheses;
    for (const auto& slot : run.recovered)
        if (slot) hypotheses.push_back(*slot);
    return {std::move(hypotheses), std::move(run)};
}

int count_missing(const WindowedRun& run) {
    int missing = 0;
    for (const auto& slot : run.recovered)
        if (!slot) ++missing;
    return missing;
}

}  // namespace delta
