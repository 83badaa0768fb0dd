#include "icrank/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "icrank/error.hpp"

namespace icrank {

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, path.string(), "cannot open");
    }
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::Io, path.string(), "cannot open for writing");
    }
    return out;
}

std::string where(const std::filesystem::path& path, std::size_t lineno) {
    return path.string() + ":" + std::to_string(lineno);
}

// getline that strips a trailing CR.
bool next_line(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) {
        return false;
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    return true;
}

std::vector<std::string> split_ws(const std::string& line) {
    std::istringstream ss(line);
    std::vector<std::string> out;
    std::string tok;
    while (ss >> tok) {
        out.push_back(tok);
    }
    return out;
}

double parse_double(const std::string& s, const std::string& loc) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end) {
        throw Error(ErrorCode::Parse, loc, "bad number '" + s + "'");
    }
    return v;
}

int parse_int(const std::string& s, const std::string& loc) {
    int v = 0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end) {
        throw Error(ErrorCode::Parse, loc, "bad integer '" + s + "'");
    }
    return v;
}

} // namespace

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

RunSet read_run(const std::filesystem::path& path) {
    auto in = open_input(path);
    std::map<std::string, std::vector<RankedEntry>> entries;
    std::map<std::string, std::string> tags;
    std::string line;
    std::size_t lineno = 0;
    while (next_line(in, line)) {
        ++lineno;
        const auto f = split_ws(line);
        if (f.empty()) {
            continue;
        }
        if (f.size() != 6) {
            throw Error(ErrorCode::Parse, where(path, lineno), "expected 6 fields");
        }
        entries[f[0]].push_back({f[2], parse_double(f[4], where(path, lineno))});
        tags.emplace(f[0], f[5]);
    }
    RunSet runs;
    for (auto& [qid, list] : entries) {
        try {
            runs.emplace(qid, RankedList::canonicalize(qid, std::move(list), tags[qid]));
        } catch (const Error& e) {
            throw Error(e.code(), e.subject(), path.string() + " query " + qid);
        }
    }
    return runs;
}

void write_run(std::ostream& out, const RunSet& runs) {
    for (const auto& [qid, list] : runs) {
        const std::string tag = list.tag().empty() ? "icrank" : list.tag();
        for (std::size_t i = 0; i < list.size(); ++i) {
            out << qid << " Q0 " << list[i].doc_id << ' ' << (i + 1) << ' ' << format_double(list[i].score) << ' '
                << tag << '\n';
        }
    }
}

void write_run(const std::filesystem::path& path, const RunSet& runs) {
    auto out = open_output(path);
    write_run(out, runs);
}

Qrels read_qrels(const std::filesystem::path& path) {
    auto in = open_input(path);
    Qrels qrels;
    std::string line;
    std::size_t lineno = 0;
    while (next_line(in, line)) {
        ++lineno;
        const auto f = split_ws(line);
        if (f.empty()) {
            continue;
        }
        if (f.size() != 4) {
            throw Error(ErrorCode::Parse, where(path, lineno), "expected 4 fields");
        }
        const int grade = parse_int(f[3], where(path, lineno));
        // Negative grades (e.g. -2 for spam in some tracks) count as non-relevant.
        qrels.set_grade(f[0], f[2], std::max(grade, 0));
    }
    return qrels;
}

void read_subtopic_qrels(const std::filesystem::path& path, Qrels& qrels) {
    auto in = open_input(path);
    std::string line;
    std::size_t lineno = 0;
    while (next_line(in, line)) {
        ++lineno;
        const auto f = split_ws(line);
        if (f.empty()) {
            continue;
        }
        if (f.size() != 4) {
            throw Error(ErrorCode::Parse, where(path, lineno), "expected 4 fields");
        }
        if (parse_int(f[3], where(path, lineno)) > 0) {
            qrels.add_subtopic(f[0], f[2], f[1]);
        }
    }
}

Corpus read_corpus(const std::filesystem::path& path) {
    auto in = open_input(path);
    Corpus corpus;
    std::string line;
    std::size_t lineno = 0;
    while (next_line(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        Document doc;
        try {
            const auto j = nlohmann::json::parse(line);
            doc.doc_id = j.at("doc_id").get<std::string>();
            doc.text = j.at("text").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::Parse, where(path, lineno), e.what());
        }
        if (doc.doc_id.empty()) {
            throw Error(ErrorCode::Parse, where(path, lineno), "empty doc_id");
        }
        const std::string id = doc.doc_id;
        if (!corpus.emplace(id, std::move(doc)).second) {
            throw Error(ErrorCode::DuplicateDocId, id, where(path, lineno));
        }
    }
    return corpus;
}

std::vector<Query> read_queries(const std::filesystem::path& path) {
    auto in = open_input(path);
    std::vector<Query> queries;
    std::unordered_set<std::string> ids;
    std::string line;
    std::size_t lineno = 0;
    while (next_line(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        const auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0) {
            throw Error(ErrorCode::Parse, where(path, lineno), "expected query_id<TAB>text");
        }
        Query q{line.substr(0, tab), line.substr(tab + 1)};
        if (!ids.insert(q.query_id).second) {
            throw Error(ErrorCode::DuplicateQueryId, q.query_id, where(path, lineno));
        }
        queries.push_back(std::move(q));
    }
    return queries;
}

AttributeTable read_attributes(const std::filesystem::path& path, std::span<const std::string> labels,
                               const std::string& name) {
    auto in = open_input(path);
    std::vector<std::pair<std::string, std::string>> rows;
    std::vector<std::string> order(labels.begin(), labels.end());
    std::string line;
    std::size_t lineno = 0;
    while (next_line(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        const auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 == line.size()) {
            throw Error(ErrorCode::Parse, where(path, lineno), "expected doc_id<TAB>label");
        }
        rows.emplace_back(line.substr(0, tab), line.substr(tab + 1));
        if (labels.empty() && std::find(order.begin(), order.end(), rows.back().second) == order.end()) {
            order.push_back(rows.back().second);
        }
    }
    if (order.empty()) {
        throw Error(ErrorCode::Parse, path.string(), "no attribute rows");
    }
    AttributeTable table{{}, AttributeSchema(name, order)};
    for (const auto& [doc, label] : rows) {
        auto v = table.schema.find(label);
        if (!v) {
            throw Error(ErrorCode::Parse, path.string(), "label '" + label + "' not in configured label list");
        }
        table.values[doc] = *v;
    }
    return table;
}

void attach_attributes(Corpus& corpus, const AttributeTable& table) {
    for (auto& [id, doc] : corpus) {
        auto it = table.values.find(id);
        if (it != table.values.end()) {
            doc.attribute = it->second;
        }
    }
}

nlohmann::json to_json(const IclExample& example) {
    nlohmann::json docs = nlohmann::json::array();
    for (const auto& d : example.documents) {
        docs.push_back({{"doc_id", d.doc_id},
                        {"text", d.text},
                        {"attribute", d.attribute ? nlohmann::json(*d.attribute) : nlohmann::json(nullptr)}});
    }
    return {{"example_query", {{"query_id", example.example_query.query_id}, {"text", example.example_query.text}}},
            {"documents", std::move(docs)},
            {"target_order", example.target_order},
            {"strategy", std::string(to_string(example.strategy))}};
}

IclExample example_from_json(const nlohmann::json& j) {
    IclExample ex;
    try {
        ex.example_query.query_id = j.at("example_query").at("query_id").get<std::string>();
        ex.example_query.text = j.at("example_query").at("text").get<std::string>();
        for (const auto& d : j.at("documents")) {
            Document doc{d.at("doc_id").get<std::string>(), d.at("text").get<std::string>(), std::nullopt};
            if (d.contains("attribute") && !d["attribute"].is_null()) {
                doc.attribute = d["attribute"].get<int>();
            }
            ex.documents.push_back(std::move(doc));
        }
        ex.target_order = j.at("target_order").get<std::vector<int>>();
        ex.strategy = parse_strategy(j.value("strategy", "static"));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Parse, "example", e.what());
    }
    ex.validate();
    return ex;
}

void write_examples(const std::filesystem::path& path, std::span<const ExampleRecord> records) {
    auto out = open_output(path);
    for (const auto& r : records) {
        auto j = to_json(r.example);
        nlohmann::json line = {{"test_query_id", r.test_query_id}};
        line.update(j);
        out << line.dump() << '\n';
    }
}

std::vector<ExampleRecord> read_examples(const std::filesystem::path& path) {
    auto in = open_input(path);
    std::vector<ExampleRecord> out;
    std::string line;
    std::size_t lineno = 0;
    while (next_line(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        try {
            const auto j = nlohmann::json::parse(line);
            out.push_back({j.at("test_query_id").get<std::string>(), example_from_json(j)});
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::Parse, where(path, lineno), e.what());
        } catch (const Error& e) {
            throw Error(ErrorCode::Parse, where(path, lineno), e.what());
        }
    }
    return out;
}

IclExample read_example_file(const std::filesystem::path& path) {
    auto in = open_input(path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Parse, path.string(), e.what());
    }
    return example_from_json(j);
}

void write_transcript(const std::filesystem::path& path, std::span<const TranscriptRecord> records) {
    auto out = open_output(path);
    for (const auto& r : records) {
        nlohmann::json j = {{"query_id", r.query_id},
                            {"window_start", r.window_start},
                            {"prompt", r.prompt},
                            {"raw_response", r.raw_response},
                            {"repaired", r.repaired}};
        out << j.dump() << '\n';
    }
}

void write_report_tsv(std::ostream& out, const MetricReport& report) {
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6f", v);
        return std::string(buf);
    };
    for (const auto& [qid, metrics] : report.per_query) {
        for (const auto& [name, value] : metrics) {
            out << name << '\t' << qid << '\t' << fmt(value) << '\n';
        }
    }
    for (const auto& [name, value] : report.means) {
        out << name << '\t' << "all" << '\t' << fmt(value) << '\n';
    }
}

nlohmann::json report_to_json(const MetricReport& report) {
    return {{"per_query", report.per_query}, {"means", report.means}};
}

} // namespace icrank
