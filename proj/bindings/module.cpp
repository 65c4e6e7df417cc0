#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "delta/baselines.hpp"
#include "delta/components.hpp"
#include "delta/corpus.hpp"
#include "delta/errors.hpp"
#include "delta/http_backend.hpp"
#include "delta/metrics.hpp"
#include "delta/orchestrator.hpp"
#include "delta/run_setup.hpp"
#include "delta/scripted_backend.hpp"
#include "delta/templates.hpp"

namespace py = pybind11;
using namespace delta;

namespace {

std::string memory_json_str(const TraceRecord& record) { return record.memory.dump(); }

std::string report_str(const AnnotationSet& annotations,
                       const std::optional<std::string>& buckets, bool case_fold) {
    std::optional<std::vector<BucketSpec>> parsed;
    if (buckets) parsed = parse_buckets(*buckets);
    MetricOptions options;
    options.case_fold = case_fold;
    return metrics_report(annotations, parsed, options).dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Document-level translation agent with multi-level memory and "
              "proper-noun consistency metrics";

    py::register_exception<delta::error>(m, "DeltaError");

    // ── corpus ───────────────────────────────────────────────────
    py::enum_<CorpusFormat>(m, "CorpusFormat")
        .value("PLAIN_TEXT", CorpusFormat::PlainText)
        .value("LINE_RECORD", CorpusFormat::LineRecord);

    py::class_<SentencePair>(m, "SentencePair")
        .def(py::init<>())
        .def(py::init([](int index, std::string source, std::string target) {
                 return SentencePair{index, std::move(source), std::move(target)};
             }),
             py::arg("index"), py::arg("source"), py::arg("target"))
        .def_readwrite("index", &SentencePair::index)
        .def_readwrite("source", &SentencePair::source)
        .def_readwrite("target", &SentencePair::target);

    py::class_<SourceDocument>(m, "SourceDocument")
        .def(py::init<>())
        .def(py::init([](std::string doc_id, std::vector<std::string> sentences,
                         std::string lang) {
                 return SourceDocument{std::move(doc_id), std::move(sentences), std::move(lang)};
             }),
             py::arg("doc_id"), py::arg("sentences"), py::arg("lang") = "")
        .def_readwrite("doc_id", &SourceDocument::doc_id)
        .def_readwrite("sentences", &SourceDocument::sentences)
        .def_readwrite("lang", &SourceDocument::lang);

    py::class_<TargetDocument>(m, "TargetDocument")
        .def(py::init<>())
        .def(py::init([](std::string doc_id, std::vector<std::string> sentences,
                         std::string lang) {
                 return TargetDocument{std::move(doc_id), std::move(sentences), std::move(lang)};
             }),
             py::arg("doc_id"), py::arg("sentences"), py::arg("lang") = "")
        .def_readwrite("doc_id", &TargetDocument::doc_id)
        .def_readwrite("sentences", &TargetDocument::sentences)
        .def_readwrite("lang", &TargetDocument::lang);

    m.def("corpus_format_from_path", &corpus_format_from_path);
    m.def("load_corpus", &load_corpus, py::arg("path"), py::arg("format"), py::arg("lang") = "");
    m.def("write_corpus", &write_corpus, py::arg("docs"), py::arg("path"), py::arg("format"));
    m.def("assemble_target", &assemble_target, py::arg("doc"), py::arg("hyps"));

    // ── memory ───────────────────────────────────────────────────
    py::enum_<CaseMode>(m, "CaseMode")
        .value("SENSITIVE", CaseMode::Sensitive)
        .value("ASCII_INSENSITIVE", CaseMode::AsciiInsensitive);

    py::class_<ProperNounRecords>(m, "ProperNounRecords")
        .def(py::init<>())
        .def("insert", &ProperNounRecords::insert, py::arg("noun"), py::arg("translation"))
        .def("insert_all", &ProperNounRecords::insert_all)
        .def("lookup", &ProperNounRecords::lookup, py::arg("sentence"),
             py::arg("mode") = CaseMode::Sensitive)
        .def("contains", &ProperNounRecords::contains)
        .def("entries", &ProperNounRecords::entries)
        .def("__len__", &ProperNounRecords::size);

    py::class_<BilingualSummary>(m, "BilingualSummary")
        .def(py::init<>())
        .def_readwrite("source", &BilingualSummary::source)
        .def_readwrite("target", &BilingualSummary::target)
        .def("replace", &BilingualSummary::replace)
        .def("empty", &BilingualSummary::empty);

    py::class_<MemoryWindow>(m, "MemoryWindow")
        .def(py::init<int>(), py::arg("capacity"))
        .def("push", &MemoryWindow::push)
        .def("pairs", &MemoryWindow::pairs)
        .def_property_readonly("capacity", &MemoryWindow::capacity)
        .def("__len__", &MemoryWindow::size);

    // ── backends ─────────────────────────────────────────────────
    py::class_<Backend, std::shared_ptr<Backend>>(m, "Backend");

    py::class_<ScriptedBackend, Backend, std::shared_ptr<ScriptedBackend>>(m, "ScriptedBackend")
        .def(py::init<>())
        .def("enqueue", &ScriptedBackend::enqueue, py::arg("tag"), py::arg("reply"))
        .def("enqueue_expect", &ScriptedBackend::enqueue_expect, py::arg("tag"),
             py::arg("reply"), py::arg("expect_substring"))
        .def("load_script_json", &ScriptedBackend::load_script_json)
        .def("remaining", &ScriptedBackend::remaining)
        .def("call_count", &ScriptedBackend::call_count);

    // ── templates ────────────────────────────────────────────────
    py::class_<TemplateSet>(m, "TemplateSet")
        .def_static("load", &TemplateSet::load, py::arg("templates_dir"), py::arg("lang_pair"))
        .def(
            "render",
            [](const TemplateSet& set, const std::string& tag, const Bindings& bindings,
               bool query_variant) {
                static const std::map<std::string, ComponentTag> tags = {
                    {"extractor", ComponentTag::Extractor},
                    {"src_summary", ComponentTag::SrcSummary},
                    {"tgt_summary", ComponentTag::TgtSummary},
                    {"src_merge", ComponentTag::SrcMerge},
                    {"tgt_merge", ComponentTag::TgtMerge},
                    {"retriever", ComponentTag::Retriever},
                    {"translator", ComponentTag::Translator},
                    {"sentence_baseline", ComponentTag::SentenceBaseline},
                    {"context_baseline", ComponentTag::ContextBaseline},
                    {"doc2doc", ComponentTag::Doc2Doc},
                };
                auto it = tags.find(tag);
                if (it == tags.end()) throw config_error("unknown component tag \"" + tag + "\"");
                return set.render(it->second, bindings, query_variant);
            },
            py::arg("tag"), py::arg("bindings"), py::arg("query_variant") = false);

    // ── orchestrator ─────────────────────────────────────────────
    py::class_<AgentConfig>(m, "AgentConfig")
        .def(py::init<>())
        .def_readwrite("summary_interval", &AgentConfig::summary_interval)
        .def_readwrite("long_term_capacity", &AgentConfig::long_term_capacity)
        .def_readwrite("retrieve_count", &AgentConfig::retrieve_count)
        .def_readwrite("short_term_capacity", &AgentConfig::short_term_capacity)
        .def_readwrite("src_lang", &AgentConfig::src_lang)
        .def_readwrite("tgt_lang", &AgentConfig::tgt_lang)
        .def_readwrite("src_lang_name", &AgentConfig::src_lang_name)
        .def_readwrite("tgt_lang_name", &AgentConfig::tgt_lang_name)
        .def_readwrite("model", &AgentConfig::model)
        .def_readwrite("max_new_tokens", &AgentConfig::max_new_tokens)
        .def_readwrite("temperature", &AgentConfig::temperature)
        .def_readwrite("lookup_case", &AgentConfig::lookup_case)
        .def_readwrite("checkpoint_interval", &AgentConfig::checkpoint_interval)
        .def_readwrite("checkpoint_dir", &AgentConfig::checkpoint_dir)
        .def_readwrite("use_records", &AgentConfig::use_records)
        .def_readwrite("use_summary", &AgentConfig::use_summary)
        .def_readwrite("use_long_term", &AgentConfig::use_long_term)
        .def_readwrite("use_short_term", &AgentConfig::use_short_term)
        .def("validate", &AgentConfig::validate)
        .def("lang_pair", &AgentConfig::lang_pair);

    py::class_<TraceRecord>(m, "TraceRecord")
        .def_readonly("index", &TraceRecord::index)
        .def_readonly("hypothesis", &TraceRecord::hypothesis)
        .def_readonly("component_calls", &TraceRecord::component_calls)
        .def("memory_json", &memory_json_str);

    py::class_<RunTrace>(m, "RunTrace")
        .def_readonly("doc_id", &RunTrace::doc_id)
        .def_readonly("records", &RunTrace::records);

    py::class_<RunResult>(m, "RunResult")
        .def_readonly("target", &RunResult::target)
        .def_readonly("trace", &RunResult::trace);

    m.def("trace_to_jsonl", &trace_to_jsonl);
    m.def(
        "translate_document",
        [](const SourceDocument& doc, const AgentConfig& config, Backend& backend,
           const TemplateSet& templates) {
            return translate_document(doc, config, backend, templates);
        },
        py::arg("doc"), py::arg("config"), py::arg("backend"), py::arg("templates"),
        py::call_guard<py::gil_scoped_release>());

    // ── baselines ────────────────────────────────────────────────
    py::class_<WindowedRun>(m, "WindowedRun")
        .def_readonly("window", &WindowedRun::window)
        .def_property_readonly("recovered",
                               [](const WindowedRun& run) { return run.recovered; })
        .def_property_readonly("batch_count",
                               [](const WindowedRun& run) { return run.batches.size(); });

    m.def("count_missing", &count_missing);
    m.def("parse_numbered_response", &parse_numbered_response, py::arg("response"),
          py::arg("batch_size"));
    m.def(
        "sentence_baseline",
        [](const SourceDocument& doc, const AgentConfig& config, Backend& backend,
           const TemplateSet& templates) {
            return sentence_baseline(doc, config, backend, templates);
        },
        py::call_guard<py::gil_scoped_release>());
    m.def(
        "context_baseline",
        [](const SourceDocument& doc, const AgentConfig& config, Backend& backend,
           const TemplateSet& templates) {
            return context_baseline(doc, config, backend, templates);
        },
        py::call_guard<py::gil_scoped_release>());
    m.def(
        "doc2doc_baseline",
        [](const SourceDocument& doc, const AgentConfig& config, Backend& backend,
           const TemplateSet& templates, int window) {
            return doc2doc_baseline(doc, config, backend, templates, window);
        },
        py::arg("doc"), py::arg("config"), py::arg("backend"), py::arg("templates"),
        py::arg("window") = 10, py::call_guard<py::gil_scoped_release>());

    // ── component parsers ────────────────────────────────────────
    m.def("parse_extractor_response",
          [](const std::string& text) { return parse_extractor_response(text); });
    m.def("parse_retriever_response",
          [](const std::string& text) { return parse_retriever_response(text); });
    m.def("trim_translation", [](const std::string& text) { return trim_translation(text); });

    // ── metrics ──────────────────────────────────────────────────
    py::class_<Ratio>(m, "Ratio")
        .def_readonly("matches", &Ratio::matches)
        .def_readonly("total", &Ratio::total)
        .def("defined", &Ratio::defined)
        .def_property_readonly("value",
                               [](const Ratio& ratio) { return ratio.value(); });

    py::class_<AnnotationSet>(m, "AnnotationSet")
        .def(py::init<>())
        .def("add", &AnnotationSet::add, py::arg("doc_id"), py::arg("noun"),
             py::arg("sentence_index"), py::arg("translation"))
        .def("empty", &AnnotationSet::empty);

    m.def("ltcr1", [](const AnnotationSet& a, bool case_fold) {
              return ltcr1(a, MetricOptions{case_fold});
          },
          py::arg("annotations"), py::arg("case_fold") = false);
    m.def("ltcr1_fuzzy", [](const AnnotationSet& a, bool case_fold) {
              return ltcr1_fuzzy(a, MetricOptions{case_fold});
          },
          py::arg("annotations"), py::arg("case_fold") = false);
    m.def("normalize_translation",
          [](const std::string& text, bool case_fold) {
              return normalize_translation(text, case_fold);
          },
          py::arg("text"), py::arg("case_fold") = false);
    m.def("joiner_for_lang", &joiner_for_lang);
    m.def("load_annotation_spans", &load_annotation_spans);
    m.def("metrics_report_json", &report_str, py::arg("annotations"),
          py::arg("buckets") = std::nullopt, py::arg("case_fold") = false);
    m.def(
        "build_annotations_from_files",
        [](const std::string& annotations_path, const std::string& links_path,
           const std::string& src_tokens_path, const std::string& tgt_tokens_path,
           const std::string& hyp_corpus_path, const std::string& joiner) {
            auto docs = load_corpus(hyp_corpus_path, corpus_format_from_path(hyp_corpus_path));
            std::vector<TargetDocument> targets;
            targets.reserve(docs.size());
            for (auto& doc : docs)
                targets.push_back(TargetDocument{doc.doc_id, doc.sentences, doc.lang});
            return build_annotations(load_annotation_spans(annotations_path),
                                     AlignmentMap::load(links_path, src_tokens_path,
                                                        tgt_tokens_path),
                                     targets, joiner);
        },
        py::arg("annotations_path"), py::arg("links_path"), py::arg("src_tokens_path"),
        py::arg("tgt_tokens_path"), py::arg("hyp_corpus_path"), py::arg("joiner") = " ");

#ifdef DELTA_VERSION
    m.attr("__version__") = DELTA_VERSION;
#else
    m.attr("__version__") = "dev";
#endif
}
