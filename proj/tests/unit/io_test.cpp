#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "icrank/error.hpp"
#include "icrank/io.hpp"
#include "temp_dir.hpp"

namespace icrank {
namespace {

using testing_support::slurp;
using testing_support::TempDir;

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no Error thrown";
    return ErrorCode::InvalidArgument;
}

TEST(FormatDouble, ShortestRoundTrip) {
    EXPECT_EQ(format_double(20.5), "20.5");
    EXPECT_EQ(format_double(3.0), "3");
    EXPECT_EQ(format_double(-1.0), "-1");
    EXPECT_EQ(format_double(0.1), "0.1");
    SeededRng rng(5);
    for (int i = 0; i < 1000; ++i) {
        const double v = (rng.uniform() - 0.5) * std::pow(10.0, static_cast<double>(rng.below(20)) - 10.0);
        EXPECT_EQ(std::stod(format_double(v)), v);
    }
}

TEST(Run, ReadCanonicalizesAndWriteRoundTrips) {
    TempDir dir;
    const auto p = dir.write("in.run",
                             "q2 Q0 b 1 3.5 bm25\n"
                             "q1 Q0 x 2 1 bm25\n"
                             "q1 Q0 y 1 2 bm25\r\n"
                             "\n"
                             "q2 Q0 a 2 3.5 bm25\n");
    const auto runs = read_run(p);
    ASSERT_EQ(runs.size(), 2u);
    EXPECT_EQ(runs.at("q1").doc_ids(), (std::vector<std::string>{"y", "x"}));
    EXPECT_EQ(runs.at("q2").doc_ids(), (std::vector<std::string>{"a", "b"}));
    EXPECT_EQ(runs.at("q2").tag(), "bm25");

    std::ostringstream out;
    write_run(out, runs);
    EXPECT_EQ(out.str(),
              "q1 Q0 y 1 2 bm25\n"
              "q1 Q0 x 2 1 bm25\n"
              "q2 Q0 a 1 3.5 bm25\n"
              "q2 Q0 b 2 3.5 bm25\n");
    write_run(dir / "out.run", runs);
    EXPECT_EQ(read_run(dir / "out.run"), runs);
}

TEST(Run, Errors) {
    TempDir dir;
    EXPECT_EQ(code_of([&] { read_run(dir.write("a", "q1 Q0 d1 1\n")); }), ErrorCode::Parse);
    EXPECT_EQ(code_of([&] { read_run(dir.write("b", "q1 Q0 d1 1 notanumber t\n")); }), ErrorCode::Parse);
    EXPECT_EQ(code_of([&] { read_run(dir.write("c", "q1 Q0 d1 1 2 t\nq1 Q0 d1 2 1 t\n")); }),
              ErrorCode::DuplicateDocId);
    EXPECT_EQ(code_of([&] { read_run(dir / "missing"); }), ErrorCode::Io);
}

TEST(Qrels, ReadGradesAndSubtopics) {
    TempDir dir;
    auto qrels = read_qrels(dir.write("q", "q1 0 a 2\nq1 0 b 0\nq1 0 c -1\nq2 0 a 1\n"));
    EXPECT_EQ(qrels.grade("q1", "a"), 2);
    EXPECT_EQ(qrels.grade("q1", "c"), 0);
    EXPECT_EQ(qrels.grade("q1", "zz"), 0);
    EXPECT_TRUE(qrels.has_query("q2"));
    EXPECT_FALSE(qrels.has_subtopics());
    read_subtopic_qrels(dir.write("s", "q1 s1 a 1\nq1 s2 a 1\nq1 s1 b 0\n"), qrels);
    EXPECT_TRUE(qrels.has_subtopics());
    EXPECT_EQ(qrels.coverage("q1").at("a"), (std::set<std::string>{"s1", "s2"}));
    EXPECT_FALSE(qrels.coverage("q1").contains("b"));
    EXPECT_EQ(code_of([&] { read_qrels(dir.write("bad", "q1 0 a\n")); }), ErrorCode::Parse);
}

TEST(Corpus, ReadJsonl) {
    TempDir dir;
    const auto corpus = read_corpus(dir.write("c.jsonl", "{\"doc_id\": \"a\", \"text\": \"hello\"}\n\n"
                                                         "{\"doc_id\": \"b\", \"text\": \"world\"}\n"));
    EXPECT_EQ(corpus.size(), 2u);
    EXPECT_EQ(corpus.at("b").text, "world");
    EXPECT_FALSE(corpus.at("a").attribute.has_value());
    EXPECT_EQ(code_of([&] {
                  read_corpus(dir.write("d.jsonl", "{\"doc_id\":\"a\",\"text\":\"x\"}\n{\"doc_id\":\"a\",\"text\":\"y\"}\n"));
              }),
              ErrorCode::DuplicateDocId);
    EXPECT_EQ(code_of([&] { read_corpus(dir.write("e.jsonl", "{broken\n")); }), ErrorCode::Parse);
    EXPECT_EQ(code_of([&] { read_corpus(dir.write("f.jsonl", "{\"doc_id\":\"a\"}\n")); }), ErrorCode::Parse);
}

TEST(Queries, ReadTsv) {
    TempDir dir;
    const auto qs = read_queries(dir.write("q.tsv", "q1\tfirst query\nq2\tsecond\ttabbed\n"));
    ASSERT_EQ(qs.size(), 2u);
    EXPECT_EQ(qs[0].text, "first query");
    EXPECT_EQ(qs[1].text, "second\ttabbed");
    try {
        read_queries(dir.write("bad.tsv", "q1\tok\nno tab here\n"));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Parse);
        EXPECT_NE(std::string(e.what()).find(":2"), std::string::npos);
    }
    EXPECT_EQ(code_of([&] { read_queries(dir.write("dup.tsv", "q1\ta\nq1\tb\n")); }), ErrorCode::DuplicateQueryId);
}

TEST(Attributes, LabelOrder) {
    TempDir dir;
    const auto p = dir.write("a.tsv", "d1\tF\nd2\tM\nd3\tF\n");
    const auto t = read_attributes(p);
    EXPECT_EQ(t.schema.value_labels(), (std::vector<std::string>{"F", "M"}));
    EXPECT_EQ(t.values.at("d2"), 1);
    const std::vector<std::string> labels{"M", "F"};
    const auto fixed = read_attributes(p, labels, "gender");
    EXPECT_EQ(fixed.values.at("d2"), 0);
    EXPECT_EQ(fixed.schema.name(), "gender");
    const std::vector<std::string> partial{"M"};
    EXPECT_THROW(read_attributes(p, partial), Error);

    Corpus corpus{{"d1", {"d1", "x", std::nullopt}}, {"d9", {"d9", "y", std::nullopt}}};
    attach_attributes(corpus, fixed);
    EXPECT_EQ(corpus.at("d1").attribute, 1);
    EXPECT_FALSE(corpus.at("d9").attribute.has_value());
}

IclExample sample_example() {
    IclExample ex;
    ex.example_query = {"l1", "who is the most famous architect"};
    ex.documents = {{"d1", "text one", 0}, {"d2", "text \"two\"", 1}, {"d3", "three", std::nullopt}};
    ex.target_order = {2, 3, 1};
    ex.strategy = ExampleStrategy::Adversarial;
    return ex;
}

TEST(Examples, JsonRoundTrip) {
    const auto ex = sample_example();
    EXPECT_EQ(example_from_json(to_json(ex)), ex);
    TempDir dir;
    const std::vector<ExampleRecord> recs{{"t1", ex}, {"t2", ex}};
    write_examples(dir / "ex.jsonl", recs);
    const auto back = read_examples(dir / "ex.jsonl");
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[1].test_query_id, "t2");
    EXPECT_EQ(back[1].example, ex);
}

TEST(Examples, RejectsInvalidOrder) {
    auto j = to_json(sample_example());
    j["target_order"] = {1, 1, 2};
    EXPECT_THROW(example_from_json(j), Error);
}

TEST(Examples, StaticFileFromFixture) {
    const auto ex = read_example_file(std::filesystem::path(ICRANK_TOY_DIR) / "static_example.json");
    EXPECT_EQ(ex.documents.size(), 5u);
    EXPECT_EQ(ex.target_order, (std::vector<int>{5, 2, 3, 4, 1}));
    EXPECT_EQ(ex.strategy, ExampleStrategy::Static);
}

TEST(Report, TsvLayout) {
    MetricReport r;
    r.add("q1", "ndcg_cut_10", 0.5);
    r.add("q2", "ndcg_cut_10", 0.25);
    r.finalize();
    std::ostringstream out;
    write_report_tsv(out, r);
    EXPECT_EQ(out.str(),
              "ndcg_cut_10\tq1\t0.500000\n"
              "ndcg_cut_10\tq2\t0.250000\n"
              "ndcg_cut_10\tall\t0.375000\n");
    const auto j = report_to_json(r);
    EXPECT_DOUBLE_EQ(j["means"]["ndcg_cut_10"].get<double>(), 0.375);
}

TEST(Transcript, JsonlLines) {
    TempDir dir;
    const std::vector<TranscriptRecord> recs{{"q1", 10, "prompt\ntext", "[1] > [2]", false},
                                             {"q1", 0, "p", "junk", true}};
    write_transcript(dir / "t.jsonl", recs);
    std::istringstream in(slurp(dir / "t.jsonl"));
    std::string line;
    std::vector<nlohmann::json> rows;
    while (std::getline(in, line)) {
        rows.push_back(nlohmann::json::parse(line));
    }
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0]["window_start"], 10);
    EXPECT_EQ(rows[0]["prompt"], "prompt\ntext");
    EXPECT_EQ(rows[1]["repaired"], true);
}

} // namespace
} // namespace icrank
