#include "icrank/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/beta.hpp>

#include "icrank/error.hpp"

namespace icrank {

void Qrels::set_grade(const std::string& query_id, const std::string& doc_id, int grade) {
    if (grade < 0) {
        throw Error(ErrorCode::InvalidArgument, query_id + "/" + doc_id, "negative relevance grade");
    }
    grades_[query_id][doc_id] = grade;
}

void Qrels::add_subtopic(const std::string& query_id, const std::string& doc_id, const std::string& subtopic) {
    coverage_[query_id][doc_id].insert(subtopic);
    has_subtopics_ = true;
}

int Qrels::grade(const std::string& query_id, const std::string& doc_id) const {
    auto q = grades_.find(query_id);
    if (q == grades_.end()) {
        return 0;
    }
    auto d = q->second.find(doc_id);
    return d == q->second.end() ? 0 : d->second;
}

const Qrels::Grades* Qrels::grades(const std::string& query_id) const {
    auto q = grades_.find(query_id);
    return q == grades_.end() ? nullptr : &q->second;
}

const Qrels::Coverage& Qrels::coverage(const std::string& query_id) const {
    static const Coverage empty;
    auto q = coverage_.find(query_id);
    return q == coverage_.end() ? empty : q->second;
}

namespace {

double discount(std::size_t rank0) { return 1.0 / std::log2(static_cast<double>(rank0) + 2.0); }

} // namespace

double ndcg_at(const RankedList& run, const Qrels& qrels, std::size_t cutoff) {
    if (cutoff == 0) {
        throw Error(ErrorCode::InvalidArgument, "cutoff", "cutoff must be >= 1");
    }
    std::vector<int> ideal;
    if (const auto* g = qrels.grades(run.query_id())) {
        for (const auto& [doc, grade] : *g) {
            if (grade > 0) {
                ideal.push_back(grade);
            }
        }
    }
    std::sort(ideal.begin(), ideal.end(), std::greater<>());
    double idcg = 0.0;
    for (std::size_t i = 0; i < std::min(cutoff, ideal.size()); ++i) {
        idcg += ideal[i] * discount(i);
    }
    if (idcg <= 0.0) {
        return 0.0;
    }
    double dcg = 0.0;
    for (std::size_t i = 0; i < std::min(cutoff, run.size()); ++i) {
        dcg += qrels.grade(run.query_id(), run[i].doc_id) * discount(i);
    }
    return dcg / idcg;
}

namespace {

double novelty_gain(const std::set<std::string>& subtopics, const std::map<std::string, int>& seen, double alpha) {
    double gain = 0.0;
    for (const auto& t : subtopics) {
        auto it = seen.find(t);
        const int c = it == seen.end() ? 0 : it->second;
        gain += std::pow(1.0 - alpha, c);
    }
    return gain;
}

} // namespace

double alpha_ndcg_at(const RankedList& run, const Qrels& qrels, double alpha, std::size_t cutoff) {
    if (!qrels.has_subtopics()) {
        throw Error(ErrorCode::MissingSubtopics, run.query_id());
    }
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, std::to_string(alpha), "alpha must be in [0, 1]");
    }
    if (cutoff == 0) {
        throw Error(ErrorCode::InvalidArgument, "cutoff", "cutoff must be >= 1");
    }
    const auto& coverage = qrels.coverage(run.query_id());

    // Greedy ideal: std::map iteration gives doc_id order, strict > keeps the smallest on ties.
    double idcg = 0.0;
    {
        std::map<std::string, int> seen;
        std::set<std::string> used;
        for (std::size_t rank = 0; rank < cutoff; ++rank) {
            const std::string* best = nullptr;
            double best_gain = 0.0;
            for (const auto& [doc, subtopics] : coverage) {
                if (used.contains(doc)) {
                    continue;
                }
                const double g = novelty_gain(subtopics, seen, alpha);
                if (best == nullptr || g > best_gain) {
                    best = &doc;
                    best_gain = g;
                }
            }
            if (best == nullptr) {
                break;
            }
            used.insert(*best);
            for (const auto& t : coverage.at(*best)) {
                ++seen[t];
            }
            idcg += best_gain * discount(rank);
        }
    }
    if (idcg <= 0.0) {
        return 0.0;
    }

    double dcg = 0.0;
    std::map<std::string, int> seen;
    for (std::size_t rank = 0; rank < std::min(cutoff, run.size()); ++rank) {
        auto it = coverage.find(run[rank].doc_id);
        if (it == coverage.end()) {
            continue;
        }
        dcg += novelty_gain(it->second, seen, alpha) * discount(rank);
        for (const auto& t : it->second) {
            ++seen[t];
        }
    }
    return dcg / idcg;
}

std::vector<double> exposure(const RankedList& run, const std::unordered_map<std::string, AttributeValue>& doc_attrs,
                             std::size_t k, std::size_t cutoff) {
    std::vector<double> out(k, 0.0);
    const std::size_t n = std::min(cutoff, run.size());
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        auto it = doc_attrs.find(run[i].doc_id);
        if (it == doc_attrs.end()) {
            throw Error(ErrorCode::MissingAttribute, run[i].doc_id);
        }
        if (it->second < 0 || static_cast<std::size_t>(it->second) >= k) {
            throw Error(ErrorCode::InvalidArgument, run[i].doc_id, "attribute outside target range");
        }
        const double w = discount(i);
        out[static_cast<std::size_t>(it->second)] += w;
        total += w;
    }
    if (total > 0.0) {
        for (auto& e : out) {
            e /= total;
        }
    }
    return out;
}

double jensen_shannon(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) {
        throw Error(ErrorCode::InvalidArgument, "", "distributions differ in length");
    }
    double js = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double m = 0.5 * (p[i] + q[i]);
        if (p[i] > 0.0) {
            js += 0.5 * p[i] * std::log2(p[i] / m);
        }
        if (q[i] > 0.0) {
            js += 0.5 * q[i] * std::log2(q[i] / m);
        }
    }
    return std::clamp(js, 0.0, 1.0);
}

double awrf(const RankedList& run, const std::unordered_map<std::string, AttributeValue>& doc_attrs,
            const CategoricalDistribution& target, std::size_t cutoff) {
    if (cutoff == 0) {
        throw Error(ErrorCode::InvalidArgument, "cutoff", "cutoff must be >= 1");
    }
    if (run.empty()) {
        return 0.0;
    }
    const auto e = exposure(run, doc_attrs, target.k(), cutoff);
    return 1.0 - jensen_shannon(e, target.probs());
}

double m1(const RankedList& run, const Qrels& qrels,
          const std::unordered_map<std::string, AttributeValue>& doc_attrs, const CategoricalDistribution& target,
          std::size_t cutoff) {
    return ndcg_at(run, qrels, cutoff) * awrf(run, doc_attrs, target, cutoff);
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2) {
        throw Error(ErrorCode::InvalidArgument, "", "paired t-test needs two equal-length samples of size >= 2");
    }
    const std::size_t n = a.size();
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) {
        d[i] = a[i] - b[i];
    }
    TTestResult r;
    r.df = n - 1;
    const auto [lo, hi] = std::minmax_element(d.begin(), d.end());
    const double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(n);
    if (*hi - *lo <= 1e-12 * std::max(1.0, std::abs(mean))) {
        if (std::abs(mean) <= 1e-12) {
            return r;  // identical samples
        }
        throw Error(ErrorCode::DegenerateVariance, "", "all paired differences are equal");
    }
    double ss = 0.0;
    for (double x : d) {
        ss += (x - mean) * (x - mean);
    }
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    r.t = mean / (sd / std::sqrt(static_cast<double>(n)));
    const double df = static_cast<double>(r.df);
    // P(|T| > t) = I_{df / (df + t^2)}(df / 2, 1 / 2)
    r.p = boost::math::ibeta(df / 2.0, 0.5, df / (df + r.t * r.t));
    return r;
}

void MetricReport::add(const std::string& query_id, const std::string& metric, double value) {
    per_query[query_id][metric] = value;
}

void MetricReport::finalize() {
    std::map<std::string, std::pair<double, std::size_t>> acc;
    for (const auto& [q, metrics] : per_query) {
        for (const auto& [name, value] : metrics) {
            auto& [sum, count] = acc[name];
            sum += value;
            ++count;
        }
    }
    means.clear();
    for (const auto& [name, sc] : acc) {
        means[name] = sc.first / static_cast<double>(sc.second);
    }
}

} // namespace icrank
