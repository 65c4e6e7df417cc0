#include "delta/orchestrator.hpp"

#include <atomic>
#include <filesystem>
#include <map>
#include <mutex>
#include <thread>

#include "delta/errors.hpp"
#include "delta/util.hpp"

namespace delta {

using nlohmann::json;

void AgentConfig::validate() const {
    if (summary_interval < 1) throw config_error("summary interval m must be >= 1");
    if (long_term_capacity < 1) throw config_error("long-term capacity l must be >= 1");
    if (retrieve_count < 1) throw config_error("retrieve count n must be >= 1");
    if (short_term_capacity < 0) throw config_error("short-term capacity k must be >= 0");
    if (retrieve_count > long_term_capacity) throw config_error("n must not exceed l");
    if (max_new_tokens < 1) throw config_error("max_new_tokens must be >= 1");
    if (temperature < 0.0) throw config_error("temperature must be >= 0");
    if (checkpoint_interval < 1) throw config_error("checkpoint interval must be >= 1");
    if (src_lang.empty() || tgt_lang.empty()) throw config_error("language codes must be set");
}

std::string language_display_name(const std::string& code) {
    static const std::map<std::string, std::string> names = {
        {"en", "English"}, {"zh", "Chinese"}, {"de", "German"},
        {"fr", "French"},  {"ja", "Japanese"},
    };
    auto it = names.find(code);
    return it == names.end() ? code : it->second;
}

std::string AgentConfig::resolved_src_name() const {
    return src_lang_name.empty() ? language_display_name(src_lang) : src_lang_name;
}

std::string AgentConfig::resolved_tgt_name() const {
    return tgt_lang_name.empty() ? language_display_name(tgt_lang) : tgt_lang_name;
}

namespace {

// Counts backend invocations per sentence for the trace.
class RecordingBackend : public Backend {
public:
    explicit RecordingBackend(Backend& inner) : inner_(&inner) {}

    std::string complete(const ChatRequest& request) override {
        std::string reply = inner_->complete(request);
        calls_.push_back(request.tag);
        return reply;
    }

    std::vector<std::string> drain() { return std::exchange(calls_, {}); }

private:
    Backend* inner_;
    std::vector<std::string> calls_;
};

std::string sanitize_for_filename(const std::string& name) {
    std::string out = name;
    for (auto& c : out) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                  c == '.' || c == '_' || c == '-';
        if (!ok) c = '_';
    }
    return out.empty() ? "doc" : out;
}

std::string checkpoint_path_for(const AgentConfig& config, const std::string& doc_id) {
    namespace fs = std::filesystem;
    return (fs::path(config.checkpoint_dir) / (sanitize_for_filename(doc_id) + ".checkpoint.json"))
        .string();
}

json trace_record_to_json(const TraceRecord& record) {
    return json{{"index", record.index},
                {"hypothesis", record.hypothesis},
                {"component_calls", record.component_calls},
                {"memory", record.memory}};
}

TraceRecord trace_record_from_json(const json& data) {
    TraceRecord record;
    record.index = data.at("index").get<int>();
    record.hypothesis = data.at("hypothesis").get<std::string>();
    record.component_calls = data.at("component_calls").get<std::vector<std::string>>();
    record.memory = data.at("memory");
    return record;
}

// The shared core of translate_document and resume.
RunResult run_loop(const SourceDocument& doc, const AgentConfig& config, Backend& raw_backend,
                   const TemplateSet& templates, AgentMemory memory,
                   std::vector<std::string> hypotheses, std::vector<TraceRecord> trace_records,
                   int start_index) {
    RecordingBackend backend(raw_backend);
    ComponentContext ctx;
    ctx.backend = &backend;
    ctx.templates = &templates;
    ctx.model = config.model;
    ctx.max_new_tokens = config.max_new_tokens;
    ctx.temperature = config.temperature;
    ctx.src_lang_name = config.resolved_src_name();
    ctx.tgt_lang_name = config.resolved_tgt_name();

    const int n_sentences = static_cast<int>(doc.sentences.size());
    const BilingualSummary no_summary;
    const MemoryWindow no_window(0);

    auto write_checkpoint = [&](int next_index) -> std::string {
        if (config.checkpoint_dir.empty()) return {};
        Checkpoint checkpoint;
        checkpoint.doc_id = doc.doc_id;
        checkpoint.next_index = next_index;
        checkpoint.hypotheses = hypotheses;
        checkpoint.memory = memory_to_json(memory);
        checkpoint.trace = trace_records;
        const std::string path = checkpoint_path_for(config, doc.doc_id);
        save_checkpoint(checkpoint, path);
        return path;
    };

    for (int i = start_index; i <= n_sentences; ++i) {
        const std::string& source = doc.sentences[static_cast<std::size_t>(i) - 1];
        try {
            // Retrieve memory.
            std::vector<std::pair<std::string, std::string>> matched;
            if (config.use_records) matched = memory.records.lookup(source, config.lookup_case);
            RetrievedContext retrieved;
            if (config.use_long_term)
                retrieved = retrieve_relevant(ctx, source, memory.long_term, config.retrieve_count);

            // Translate with hybrid memory information.
            const std::string hypothesis = translate_sentence(
                ctx, source, matched, retrieved,
                config.use_summary ? memory.summary : no_summary,
                config.use_short_term ? memory.short_term : no_window, i);

            // Update memory.
            if (config.use_records)
                memory.records.insert_all(
                    extract_proper_nouns(ctx, source, hypothesis, memory.records));
            memory.long_term.push({i, source, hypothesis});
            memory.short_term.push({i, source, hypothesis});
            if (config.use_summary && i % config.summary_interval == 0) {
                const auto seg_begin = static_cast<std::size_t>(i - config.summary_interval);
                std::vector<std::string> src_segment(
                    doc.sentences.begin() + static_cast<std::ptrdiff_t>(seg_begin),
                    doc.sentences.begin() + i);
                std::vector<std::string> tgt_segment(hypotheses.begin() +
                                                         static_cast<std::ptrdiff_t>(seg_begin),
                                                     hypotheses.end());
                tgt_segment.push_back(hypothesis);
                const std::string src_piece =
                    write_segment_summary(ctx, src_segment, SummarySide::Source);
                const std::string tgt_piece =
                    write_segment_summary(ctx, tgt_segment, SummarySide::Target);
                std::string new_src = src_piece.empty()
                                          ? memory.summary.source
                                          : merge_summaries(ctx, memory.summary.source, src_piece,
                                                            SummarySide::Source);
                std::string new_tgt = tgt_piece.empty()
                                          ? memory.summary.target
                                          : merge_summaries(ctx, memory.summary.target, tgt_piece,
                                                            SummarySide::Target);
                memory.summary.replace(std::move(new_src), std::move(new_tgt));
            }

            hypotheses.push_back(hypothesis);
            TraceRecord record;
            record.index = i;
            record.hypothesis = hypothesis;
            record.component_calls = backend.drain();
            record.memory = memory_to_json(memory);
            trace_records.push_back(std::move(record));
        } catch (const error& e) {
            const std::string path = write_checkpoint(i);
            throw run_error("document \"" + doc.doc_id + "\" aborted at sentence " +
                                std::to_string(i) + ": " + e.what(),
                            i - 1, path);
        }

        if (i % config.checkpoint_interval == 0 && i < n_sentences) write_checkpoint(i + 1);
    }

    RunResult result;
    result.target = assemble_target(doc, std::move(hypotheses));
    result.trace = RunTrace{doc.doc_id, std::move(trace_records)};
    return result;
}

}  // namespace

RunResult translate_document(const SourceDocument& doc, const AgentConfig& config,
                             Backend& backend, const TemplateSet& templates) {
    config.validate();
    AgentMemory memory(config.short_term_capacity, config.long_term_capacity);
    return run_loop(doc, config, backend, templates, std::move(memory), {}, {}, 1);
}

RunResult resume(const Checkpoint& checkpoint, const SourceDocument& doc,
                 const AgentConfig& config, Backend& backend, const TemplateSet& templates) {
    config.validate();
    if (checkpoint.doc_id != doc.doc_id)
        throw checkpoint_error("checkpoint is for document \"" + checkpoint.doc_id +
                               "\", not \"" + doc.doc_id + "\"");
    const int n_sentences = static_cast<int>(doc.sentences.size());
    if (checkpoint.next_index < 1 || checkpoint.next_index > n_sentences + 1)
        throw checkpoint_error("checkpoint index " + std::to_string(checkpoint.next_index) +
                               " out of range for a " + std::to_string(n_sentences) +
                               "-sentence document");
    if (static_cast<int>(checkpoint.hypotheses.size()) != checkpoint.next_index - 1)
        throw checkpoint_error("checkpoint is inconsistent: " +
                               std::to_string(checkpoint.hypotheses.size()) + " hypotheses for next index " +
                               std::to_string(checkpoint.next_index));

    AgentMemory memory = memory_from_json(checkpoint.memory);
    if (memory.short_term.capacity() != config.short_term_capacity ||
        memory.long_term.capacity() != config.long_term_capacity)
        throw checkpoint_error("checkpoint window capacities do not match the config");

    return run_loop(doc, config, backend, templates, std::move(memory), checkpoint.hypotheses,
                    checkpoint.trace, checkpoint.next_index);
}

std::vector<DocumentOutcome> translate_corpus(const std::vector<SourceDocument>& docs,
                                              const AgentConfig& config, int parallelism,
                                              const BackendFactory& backend_factory,
                                              const TemplateSet& templates) {
    config.validate();
    if (parallelism < 1) throw contract_error("parallelism must be >= 1");
    std::vector<DocumentOutcome> outcomes(docs.size());

    auto run_one = [&](std::size_t index) {
        try {
            auto backend = backend_factory(docs[index]);
            outcomes[index].result =
                translate_document(docs[index], config, *backend, templates);
        } catch (const std::exception& e) {
            outcomes[index].error = e.what();
        }
    };

    if (parallelism == 1 || docs.size() <= 1) {
        for (std::size_t i = 0; i < docs.size(); ++i) run_one(i);
        return outcomes;
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < docs.size(); i = next.fetch_add(1)) run_one(i);
    };
    std::vector<std::thread> threads;
    const std::size_t n_threads =
        std::min(static_cast<std::size_t>(parallelism), docs.size());
    threads.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (auto& thread : threads) thread.join();
    return outcomes;
}

std::string trace_to_jsonl(const RunTrace& trace) {
    std::string out;
    for (const auto& record : trace.records) {
        json line = trace_record_to_json(record);
        line["doc_id"] = trace.doc_id;
        out += line.dump();
        out += '\n';
    }
    return out;
}

RunTrace trace_from_jsonl(const std::string& text, const std::string& origin) {
    RunTrace trace;
    int line_no = 0;
    for (const auto& line : split_lines(text)) {
        ++line_no;
        if (trim_view(line).empty()) continue;
        json data = json::parse(line, nullptr, false);
        if (data.is_discarded() || !data.is_object())
            throw input_error(origin + ":" + std::to_string(line_no) + ": invalid trace record");
        try {
            trace.records.push_back(trace_record_from_json(data));
            if (data.contains("doc_id")) trace.doc_id = data["doc_id"].get<std::string>();
        } catch (const json::exception& e) {
            throw input_error(origin + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return trace;
}

json Checkpoint::to_json() const {
    json trace_arr = json::array();
    for (const auto& record : trace) trace_arr.push_back(trace_record_to_json(record));
    return json{{"doc_id", doc_id},
                {"next_index", next_index},
                {"hypotheses", hypotheses},
                {"memory", memory},
                {"trace", std::move(trace_arr)}};
}

Checkpoint Checkpoint::from_json(const json& data) {
    try {
        Checkpoint checkpoint;
        checkpoint.doc_id = data.at("doc_id").get<std::string>();
        checkpoint.next_index = data.at("next_index").get<int>();
        checkpoint.hypotheses = data.at("hypotheses").get<std::vector<std::string>>();
        checkpoint.memory = data.at("memory");
        for (const auto& record : data.at("trace"))
            checkpoint.trace.push_back(trace_record_from_json(record));
        return checkpoint;
    } catch (const json::exception& e) {
        throw input_error(std::string("malformed checkpoint: ") + e.what());
    }
}

void save_checkpoint(const Checkpoint& checkpoint, const std::string& path) {
    write_file_atomic(path, checkpoint.to_json().dump(2) + "\n");
}

Checkpoint load_checkpoint(const std::string& path) {
    json data = json::parse(read_file(path), nullptr, false);
    if (data.is_discarded()) throw input_error("checkpoint is not valid JSON: " + path);
    return Checkpoint::from_json(data);
}

}  // namespace delta
