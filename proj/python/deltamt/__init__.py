"""Document-level translation agent with multi-level memory.

Thin Python surface over the C++ core: corpus IO, the memory components,
scripted/HTTP chat backends, prompt templates, the document translation
loop, baseline strategies, and the LTCR consistency metrics.
"""

from ._core import (  # noqa: F401
    AgentConfig,
    AnnotationSet,
    Backend,
    BilingualSummary,
    CaseMode,
    CorpusFormat,
    DeltaError,
    MemoryWindow,
    ProperNounRecords,
    Ratio,
    RunResult,
    RunTrace,
    ScriptedBackend,
    SentencePair,
    SourceDocument,
    TargetDocument,
    TemplateSet,
    TraceRecord,
    WindowedRun,
    __version__,
    assemble_target,
    build_annotations_from_files,
    context_baseline,
    corpus_format_from_path,
    count_missing,
    doc2doc_baseline,
    joiner_for_lang,
    load_annotation_spans,
    load_corpus,
    ltcr1,
    ltcr1_fuzzy,
    metrics_report_json,
    normalize_translation,
    parse_extractor_response,
    parse_numbered_response,
    parse_retriever_response,
    sentence_baseline,
    trace_to_jsonl,
    translate_document,
    trim_translation,
    write_corpus,
)
