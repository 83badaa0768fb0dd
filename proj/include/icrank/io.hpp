#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "icrank/core.hpp"
#include "icrank/example_builder.hpp"
#include "icrank/llm_rerank.hpp"
#include "icrank/metrics.hpp"

namespace icrank {

/// Runs keyed (and therefore written) by query_id.
using RunSet = std::map<std::string, RankedList>;

/// TREC run: `query_id Q0 doc_id rank score tag`. Each query's list is canonicalized.
RunSet read_run(const std::filesystem::path& path);
void write_run(std::ostream& out, const RunSet& runs);
void write_run(const std::filesystem::path& path, const RunSet& runs);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

/// `query_id 0 doc_id grade`
Qrels read_qrels(const std::filesystem::path& path);
/// `query_id subtopic_id doc_id grade`; rows with grade > 0 add coverage.
void read_subtopic_qrels(const std::filesystem::path& path, Qrels& qrels);

/// JSONL {"doc_id": ..., "text": ...}. Throws DuplicateDocId.
Corpus read_corpus(const std::filesystem::path& path);

/// `query_id<TAB>text`. Throws DuplicateQueryId, Parse (with line number).
std::vector<Query> read_queries(const std::filesystem::path& path);

struct AttributeTable {
    std::unordered_map<std::string, AttributeValue> values;
    AttributeSchema schema;
};

/// `doc_id<TAB>label`. Label order follows `labels` when given, otherwise the
/// order of first appearance in the file.
AttributeTable read_attributes(const std::filesystem::path& path, std::span<const std::string> labels = {},
                               const std::string& name = "attribute");

/// Copies the table's attribute values into the corpus documents.
void attach_attributes(Corpus& corpus, const AttributeTable& table);

struct ExampleRecord {
    std::string test_query_id;
    IclExample example;
};

nlohmann::json to_json(const IclExample& example);
IclExample example_from_json(const nlohmann::json& j);

void write_examples(const std::filesystem::path& path, std::span<const ExampleRecord> records);
std::vector<ExampleRecord> read_examples(const std::filesystem::path& path);
/// A single IclExample stored as one JSON object (the Static strategy's configuration).
IclExample read_example_file(const std::filesystem::path& path);

void write_transcript(const std::filesystem::path& path, std::span<const TranscriptRecord> records);

/// trec_eval-style lines `metric<TAB>query_id<TAB>value` followed by `all` means.
void write_report_tsv(std::ostream& out, const MetricReport& report);
nlohmann::json report_to_json(const MetricReport& report);

} // namespace icrank
