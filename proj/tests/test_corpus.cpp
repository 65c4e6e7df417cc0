#include <doctest.h>

#include <filesystem>

#include "delta/corpus.hpp"
#include "delta/errors.hpp"
#include "delta/util.hpp"

using namespace delta;

TEST_CASE("plain text: empty file yields no documents") {
    CHECK(parse_corpus("", CorpusFormat::PlainText).empty());
    CHECK(parse_corpus("\n\n\n", CorpusFormat::PlainText).empty());
}

TEST_CASE("plain text: blank line separates documents") {
    auto docs = parse_corpus("a1\na2\na3\n\nb1\nb2\n", CorpusFormat::PlainText, "en");
    REQUIRE(docs.size() == 2);
    CHECK(docs[0].sentences == std::vector<std::string>{"a1", "a2", "a3"});
    CHECK(docs[1].sentences == std::vector<std::string>{"b1", "b2"});
    CHECK(docs[0].doc_id == "doc1");
    CHECK(docs[1].doc_id == "doc2");
    CHECK(docs[0].lang == "en");
}

TEST_CASE("plain text: trailing blank lines do not create documents") {
    auto docs = parse_corpus("a\n\n\n", CorpusFormat::PlainText);
    REQUIRE(docs.size() == 1);
}

TEST_CASE("line records: basic load keeps file order") {
    const std::string text =
        R"({"doc_id":"x","index":1,"source":"s1"})" "\n"
        R"({"doc_id":"x","index":2,"source":"s2"})" "\n"
        R"({"doc_id":"y","index":1,"source":"t1"})" "\n";
    auto docs = parse_corpus(text, CorpusFormat::LineRecord);
    REQUIRE(docs.size() == 2);
    CHECK(docs[0].doc_id == "x");
    CHECK(docs[0].sentences == std::vector<std::string>{"s1", "s2"});
    CHECK(docs[1].doc_id == "y");
}

TEST_CASE("line records: non-contiguous index names the line") {
    const std::string text =
        R"({"doc_id":"a","index":1,"source":"s1"})" "\n"
        R"({"doc_id":"a","index":3,"source":"s3"})" "\n";
    CHECK_THROWS_WITH_AS(parse_corpus(text, CorpusFormat::LineRecord, "", "f.jsonl"),
                         doctest::Contains("f.jsonl:2: non-contiguous index"), input_error);
}

TEST_CASE("line records: duplicate (doc_id, index) rejected") {
    const std::string text =
        R"({"doc_id":"a","index":1,"source":"s1"})" "\n"
        R"({"doc_id":"a","index":1,"source":"again"})" "\n";
    CHECK_THROWS_WITH_AS(parse_corpus(text, CorpusFormat::LineRecord),
                         doctest::Contains("duplicate (doc_id, index)"), input_error);
}

TEST_CASE("line records: missing fields and bad JSON name the line") {
    CHECK_THROWS_WITH_AS(parse_corpus(R"({"index":1,"source":"s"})", CorpusFormat::LineRecord),
                         doctest::Contains("doc_id"), input_error);
    CHECK_THROWS_WITH_AS(parse_corpus(R"({"doc_id":"a","index":1})", CorpusFormat::LineRecord),
                         doctest::Contains("source"), input_error);
    CHECK_THROWS_WITH_AS(parse_corpus("not json", CorpusFormat::LineRecord),
                         doctest::Contains(":1:"), input_error);
}

TEST_CASE("line records: source may not contain a line break") {
    CHECK_THROWS_AS(
        parse_corpus("{\"doc_id\":\"a\",\"index\":1,\"source\":\"two\\nlines\"}",
                     CorpusFormat::LineRecord),
        input_error);
}

TEST_CASE("line records: target-only records load as sentences") {
    auto docs = parse_corpus(R"({"doc_id":"a","index":1,"target":"hyp"})",
                             CorpusFormat::LineRecord);
    REQUIRE(docs.size() == 1);
    CHECK(docs[0].sentences == std::vector<std::string>{"hyp"});
}

TEST_CASE("assemble_target pairs hypotheses with the source document") {
    SourceDocument empty{"e", {}, "en"};
    CHECK(assemble_target(empty, {}).sentences.empty());

    SourceDocument doc{"d", {"s1", "s2", "s3"}, "en"};
    auto target = assemble_target(doc, {"t1", "t2", "t3"});
    CHECK(target.doc_id == "d");
    CHECK(target.sentences == std::vector<std::string>{"t1", "t2", "t3"});

    try {
        assemble_target(doc, {"t1", "t2"});
        FAIL("expected alignment_error");
    } catch (const alignment_error& e) {
        CHECK(e.source_len == 3);
        CHECK(e.target_len == 2);
    }
}

TEST_CASE("render_corpus: plain text folds internal line breaks") {
    TargetDocument doc{"d", {"one\ntwo"}, "zh"};
    CHECK(render_corpus({doc}, CorpusFormat::PlainText) == "one two\n");
}

TEST_CASE("line-record round trip is the identity") {
    std::vector<TargetDocument> docs;
    for (int d = 0; d < 12; ++d) {
        TargetDocument doc;
        doc.doc_id = "doc-" + std::to_string(d);
        for (int s = 0; s < 2 + d % 3; ++s)
            doc.sentences.push_back("句子 " + std::to_string(d) + "/" + std::to_string(s) +
                                    " with \"quotes\" and tabs\t.");
        docs.push_back(std::move(doc));
    }
    const std::string once = render_corpus(docs, CorpusFormat::LineRecord);
    auto loaded = parse_corpus(once, CorpusFormat::LineRecord);
    REQUIRE(loaded.size() == docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i) {
        CHECK(loaded[i].doc_id == docs[i].doc_id);
        CHECK(loaded[i].sentences == docs[i].sentences);
    }
    // Canonical form: a second render reproduces the same bytes.
    std::vector<TargetDocument> reloaded;
    for (auto& doc : loaded)
        reloaded.push_back(TargetDocument{doc.doc_id, doc.sentences, doc.lang});
    CHECK(render_corpus(reloaded, CorpusFormat::LineRecord) == once);
}

TEST_CASE("write_corpus/load_corpus work through files") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "delta_corpus_test";
    fs::create_directories(dir);
    const std::string path = (dir / "out.jsonl").string();
    std::vector<TargetDocument> docs{{"a", {"x", "y"}, "zh"}};
    write_corpus(docs, path, CorpusFormat::LineRecord);
    auto loaded = load_corpus(path, CorpusFormat::LineRecord);
    REQUIRE(loaded.size() == 1);
    CHECK(loaded[0].sentences == std::vector<std::string>{"x", "y"});
    CHECK(corpus_format_from_path(path) == CorpusFormat::LineRecord);
    CHECK(corpus_format_from_path("a.txt") == CorpusFormat::PlainText);
    fs::remove_all(dir);
}
