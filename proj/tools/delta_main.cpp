#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <nlohmann/json.hpp>

#include "delta/baselines.hpp"
#include "delta/corpus.hpp"
#include "delta/errors.hpp"
#include "delta/metrics.hpp"
#include "delta/orchestrator.hpp"
#include "delta/run_setup.hpp"
#include "delta/templates.hpp"
#include "delta/util.hpp"

namespace {

using delta::CorpusFormat;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitConfig = 2;

struct TranslateArgs {
    std::string strategy = "delta";
    std::string config_path;
    std::string in_path;
    std::string out_path;
    std::string resume_path;
    std::string templates_dir;
    std::string format;
    int jobs = 1;
    int window = 0;  // 0: take the config value
    bool verbose = false;
};

CorpusFormat pick_format(const std::string& flag, const std::string& path) {
    if (flag == "plain") return CorpusFormat::PlainText;
    if (flag == "jsonl") return CorpusFormat::LineRecord;
    if (!flag.empty()) throw delta::config_error("unknown format \"" + flag + "\"");
    return delta::corpus_format_from_path(path);
}

std::string windowed_run_to_json_line(const std::string& doc_id, const delta::WindowedRun& run) {
    json batches = json::array();
    for (const auto& batch : run.batches)
        batches.push_back({{"start_index", batch.start_index},
                           {"size", batch.size},
                           {"response", batch.response},
                           {"missing", batch.missing}});
    json line{{"doc_id", doc_id},
              {"window", run.window},
              {"batches", std::move(batches)},
              {"missing_total", delta::count_missing(run)}};
    return line.dump();
}

int run_translate(const TranslateArgs& args) {
    const delta::Strategy strategy = delta::strategy_from_name(args.strategy);
    delta::RunConfig config = delta::RunConfig::load(args.config_path);
    if (!args.templates_dir.empty()) config.templates_dir = args.templates_dir;
    if (args.window > 0) config.window = args.window;
    if (args.jobs < 1) throw delta::config_error("--jobs must be >= 1");

    const CorpusFormat in_format = pick_format(args.format, args.in_path);
    const auto docs = delta::load_corpus(args.in_path, in_format, config.agent.src_lang);
    const auto templates =
        delta::TemplateSet::load(config.templates_dir, config.agent.lang_pair());
    const char* key_env = std::getenv("DELTA_API_KEY");
    const auto factory =
        delta::make_backend_factory(config.backend, key_env == nullptr ? "" : key_env);

    delta::RunManifest manifest;
    manifest.config_hash = config.config_hash();
    manifest.corpus_path = args.in_path;
    manifest.strategy = args.strategy;
    manifest.backend_identity = config.backend.kind == "scripted"
                                    ? "scripted:" + config.backend.script_path
                                    : config.backend.base_url + " model=" + config.agent.model;
    manifest.started_at = delta::iso8601_utc_now();

    const std::string trace_path = args.out_path + ".trace.jsonl";
    const std::string manifest_path = args.out_path + ".manifest.json";

    std::vector<delta::TargetDocument> outputs;
    std::string trace_text;
    std::size_t failed = 0;

    auto report_failure = [&](const std::string& doc_id, const std::string& what) {
        ++failed;
        std::cerr << "error: document \"" << doc_id << "\": " << what << "\n";
    };

    if (strategy == delta::Strategy::Delta) {
        std::optional<delta::Checkpoint> checkpoint;
        if (!args.resume_path.empty()) checkpoint = delta::load_checkpoint(args.resume_path);
        std::vector<delta::DocumentOutcome> outcomes;
        if (checkpoint) {
            // Resume the checkpointed document; the rest run fresh.
            outcomes.resize(docs.size());
            for (std::size_t i = 0; i < docs.size(); ++i) {
                try {
                    auto backend = factory(docs[i]);
                    outcomes[i].result =
                        docs[i].doc_id == checkpoint->doc_id
                            ? delta::resume(*checkpoint, docs[i], config.agent, *backend,
                                            templates)
                            : delta::translate_document(docs[i], config.agent, *backend,
                                                        templates);
                } catch (const std::exception& e) {
                    outcomes[i].error = e.what();
                }
            }
        } else {
            outcomes =
                delta::translate_corpus(docs, config.agent, args.jobs, factory, templates);
        }
        for (std::size_t i = 0; i < outcomes.size(); ++i) {
            if (!outcomes[i].ok()) {
                report_failure(docs[i].doc_id, outcomes[i].error);
                continue;
            }
            outputs.push_back(outcomes[i].result->target);
            trace_text += delta::trace_to_jsonl(outcomes[i].result->trace);
            if (args.verbose)
                for (const auto& record : outcomes[i].result->trace.records)
                    std::cerr << docs[i].doc_id << " #" << record.index << ": "
                              << record.hypothesis << "\n";
        }
    } else if (strategy == delta::Strategy::Doc2Doc) {
        for (const auto& doc : docs) {
            try {
                auto backend = factory(doc);
                auto [hyps, run] =
                    delta::doc2doc_baseline(doc, config.agent, *backend, templates, config.window);
                // Missing sentences keep their slot so indices stay contiguous.
                delta::TargetDocument target;
                target.doc_id = doc.doc_id;
                target.lang = config.agent.tgt_lang;
                for (const auto& slot : run.recovered)
                    target.sentences.push_back(slot.value_or(""));
                outputs.push_back(std::move(target));
                trace_text += windowed_run_to_json_line(doc.doc_id, run);
                trace_text += '\n';
            } catch (const std::exception& e) {
                report_failure(doc.doc_id, e.what());
            }
        }
    } else {
        for (const auto& doc : docs) {
            try {
                auto backend = factory(doc);
                delta::RunResult result =
                    strategy == delta::Strategy::Sentence
                        ? delta::sentence_baseline(doc, config.agent, *backend, templates)
                        : delta::context_baseline(doc, config.agent, *backend, templates);
                outputs.push_back(result.target);
                trace_text += delta::trace_to_jsonl(result.trace);
            } catch (const std::exception& e) {
                report_failure(doc.doc_id, e.what());
            }
        }
    }

    const CorpusFormat out_format = delta::corpus_format_from_path(args.out_path);
    delta::write_corpus(outputs, args.out_path, out_format);
    delta::write_file(trace_path, trace_text);
    manifest.finished_at = delta::iso8601_utc_now();
    manifest.outputs = json{{"corpus", args.out_path},
                            {"trace", trace_path},
                            {"manifest", manifest_path}};
    if (strategy == delta::Strategy::Doc2Doc) manifest.outputs["window"] = config.window;
    delta::write_file(manifest_path, manifest.to_json().dump(2) + "\n");

    std::cerr << "translated " << outputs.size() << "/" << docs.size() << " documents ("
              << args.strategy << ")\n";
    return failed == 0 ? kExitOk : kExitPartial;
}

struct EvaluateArgs {
    std::string hyp_path;
    std::string annotations_path;
    std::string alignment_path;
    std::string source_tokens_path;
    std::string target_tokens_path;
    std::string buckets;
    std::string tgt_lang = "en";
    std::string joiner = "auto";
    bool case_fold = false;
};

int run_evaluate(const EvaluateArgs& args) {
    const auto hyp_docs =
        delta::load_corpus(args.hyp_path, pick_format("", args.hyp_path), args.tgt_lang);
    std::vector<delta::TargetDocument> targets;
    for (const auto& doc : hyp_docs)
        targets.push_back(delta::TargetDocument{doc.doc_id, doc.sentences, doc.lang});

    const auto spans = delta::load_annotation_spans(args.annotations_path);
    const auto alignment = delta::AlignmentMap::load(
        args.alignment_path, args.source_tokens_path, args.target_tokens_path);

    std::string joiner;
    if (args.joiner == "auto")
        joiner = delta::joiner_for_lang(args.tgt_lang);
    else if (args.joiner == "none")
        joiner = "";
    else if (args.joiner == "space")
        joiner = " ";
    else
        throw delta::config_error("--joiner must be auto, none or space");

    const auto annotations = delta::build_annotations(spans, alignment, targets, joiner);

    std::optional<std::vector<delta::BucketSpec>> buckets;
    if (!args.buckets.empty()) buckets = delta::parse_buckets(args.buckets);

    delta::MetricOptions options;
    options.case_fold = args.case_fold;
    std::cout << delta::metrics_report(annotations, buckets, options).dump(2) << "\n";
    return kExitOk;
}

struct InspectArgs {
    std::string in_path;
    int at = -1;
};

void print_window(const json& window, const std::string& name) {
    std::cout << name << " window (" << window.at("pairs").size() << "/"
              << window.at("capacity").get<int>() << "):\n";
    for (const auto& pair : window.at("pairs"))
        std::cout << "  #" << pair.at("index").get<int>() << " "
                  << pair.at("source").get<std::string>() << " -> "
                  << pair.at("target").get<std::string>() << "\n";
}

void print_snapshot(const json& memory) {
    const auto& records = memory.at("records");
    std::cout << "proper noun records (" << records.size() << "):\n";
    for (const auto& entry : records)
        std::cout << "  \"" << entry.at(0).get<std::string>() << "\" -> \""
                  << entry.at(1).get<std::string>() << "\"\n";
    std::cout << "summary:\n  source: " << memory.at("summary").at("source").get<std::string>()
              << "\n  target: " << memory.at("summary").at("target").get<std::string>() << "\n";
    print_window(memory.at("short_term"), "short-term");
    print_window(memory.at("long_term"), "long-term");
}

json empty_snapshot() {
    return json{{"records", json::array()},
                {"summary", {{"source", ""}, {"target", ""}}},
                {"short_term", {{"capacity", 0}, {"pairs", json::array()}}},
                {"long_term", {{"capacity", 0}, {"pairs", json::array()}}}};
}

int run_inspect(const InspectArgs& args) {
    const std::string text = delta::read_file(args.in_path);

    // A checkpoint is one JSON object; a trace is JSON-per-line.
    json whole = json::parse(text, nullptr, false);
    std::vector<delta::TraceRecord> records;
    std::string doc_id;
    if (!whole.is_discarded() && whole.is_object() && whole.contains("next_index")) {
        delta::Checkpoint checkpoint = delta::Checkpoint::from_json(whole);
        records = checkpoint.trace;
        doc_id = checkpoint.doc_id;
    } else {
        delta::RunTrace trace = delta::trace_from_jsonl(text, args.in_path);
        records = trace.records;
        doc_id = trace.doc_id;
    }

    if (args.at < 0) throw delta::config_error("--at is required");
    if (args.at == 0) {
        std::cout << "memory before sentence 1"
                  << (doc_id.empty() ? "" : " of \"" + doc_id + "\"") << "\n";
        print_snapshot(empty_snapshot());
        return kExitOk;
    }
    for (const auto& record : records) {
        if (record.index == args.at) {
            std::cout << "memory after sentence " << record.index
                      << (doc_id.empty() ? "" : " of \"" + doc_id + "\"") << "\n";
            print_snapshot(record.memory);
            return kExitOk;
        }
    }
    std::cerr << "error: no record for sentence index " << args.at << "\n";
    return kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Document-level translation agent with multi-level memory, baseline "
                 "strategies, and proper-noun consistency evaluation"};
    app.require_subcommand(1);

    TranslateArgs targs;
    auto* translate = app.add_subcommand("translate", "Translate a corpus document by document");
    translate->add_option("--strategy", targs.strategy,
                          "delta | sentence | context | doc2doc");
    translate->add_option("--config", targs.config_path, "JSON config file")->required();
    translate->add_option("--in", targs.in_path, "input corpus")->required();
    translate->add_option("--out", targs.out_path, "output corpus path")->required();
    translate->add_option("--jobs", targs.jobs, "parallel documents (delta strategy)");
    translate->add_option("--window", targs.window, "doc2doc batch size override");
    translate->add_option("--resume", targs.resume_path, "checkpoint file to resume from");
    translate->add_option("--templates", targs.templates_dir, "template directory override");
    translate->add_option("--format", targs.format, "input format: plain | jsonl");
    translate->add_flag("--verbose", targs.verbose, "log one line per translated sentence");

    EvaluateArgs eargs;
    auto* evaluate =
        app.add_subcommand("evaluate", "Score proper-noun translation consistency");
    evaluate->add_option("--in", eargs.hyp_path, "hypothesis corpus (jsonl)")->required();
    evaluate->add_option("--annotations", eargs.annotations_path,
                         "proper-noun span file (jsonl)")->required();
    evaluate->add_option("--alignment", eargs.alignment_path, "Pharaoh alignment file")
        ->required();
    evaluate->add_option("--source-tokens", eargs.source_tokens_path, "source token file")
        ->required();
    evaluate->add_option("--target-tokens", eargs.target_tokens_path, "target token file")
        ->required();
    evaluate->add_option("--buckets", eargs.buckets,
                         "distance buckets, e.g. \"1-10,11-50,51-\"");
    evaluate->add_option("--tgt-lang", eargs.tgt_lang, "target language code (joiner choice)");
    evaluate->add_option("--joiner", eargs.joiner, "auto | none | space");
    evaluate->add_flag("--case-fold", eargs.case_fold, "case-insensitive comparison");

    InspectArgs iargs;
    auto* inspect = app.add_subcommand("inspect", "Print a memory snapshot from a trace "
                                                  "or checkpoint");
    inspect->add_option("--in", iargs.in_path, "trace (.jsonl) or checkpoint file")->required();
    inspect->add_option("--at", iargs.at, "sentence index (0 = initial memory)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (translate->parsed()) return run_translate(targs);
        if (evaluate->parsed()) return run_evaluate(eargs);
        if (inspect->parsed()) return run_inspect(iargs);
    } catch (const delta::config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const delta::input_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const delta::checkpoint_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitPartial;
    }
    return kExitConfig;
}
