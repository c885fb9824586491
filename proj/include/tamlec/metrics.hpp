#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "tamlec/error.hpp"
#include "tamlec/tat.hpp"
#include "tamlec/taxonomy.hpp"

namespace tamlec {

struct EvalSample {
    std::vector<LabelId> ranking;  // no duplicates
    std::set<LabelId> gold;        // nonempty
    std::vector<TaskId> tasks;     // tasks the gold labels touch (optional)

    std::size_t k_y() const { return gold.size(); }
};

/// P@k: fraction of the first k ranked labels that are correct. Rankings
/// shorter than k count the missing tail as incorrect.
inline double precision_at_k(const EvalSample& s, std::size_t k) {
    if (k < 1)
        throw Error(ErrorCode::InvalidArgument, "eval-metrics: k must be >= 1");
    std::size_t hits = 0;
    for (std::size_t n = 0; n < k && n < s.ranking.size(); ++n)
        if (s.gold.count(s.ranking[n])) ++hits;
    return static_cast<double>(hits) / static_cast<double>(k);
}

/// NDCG@k with 1/log(n+1) gains, normalized by the ideal prefix of length
/// min(k, k_y). Log-base invariant; natural log used internally.
inline double ndcg_at_k(const EvalSample& s, std::size_t k) {
    if (k < 1)
        throw Error(ErrorCode::InvalidArgument, "eval-metrics: k must be >= 1");
    double dcg = 0;
    for (std::size_t n = 1; n <= k && n <= s.ranking.size(); ++n)
        if (s.gold.count(s.ranking[n - 1]))
            dcg += 1.0 / std::log(static_cast<double>(n) + 1.0);
    double ideal = 0;
    const std::size_t lim = std::min(k, s.k_y());
    for (std::size_t n = 1; n <= lim; ++n)
        ideal += 1.0 / std::log(static_cast<double>(n) + 1.0);
    return ideal == 0 ? 0.0 : dcg / ideal;
}

struct MetricTable {
    // ("P" or "NDCG", k) -> corpus mean over eligible documents (k_y >= k)
    std::map<std::pair<std::string, std::size_t>, double> values;
    std::map<std::pair<std::string, std::size_t>, std::size_t> eligible;
    // Per-task distributions of per-document P@1 values.
    std::map<TaskId, std::vector<double>> per_task_p1;

    double at(const std::string& metric, std::size_t k) const {
        auto it = values.find({metric, k});
        if (it == values.end())
            throw Error(ErrorCode::InvalidArgument,
                        "eval-metrics: missing " + metric + "@" +
                            std::to_string(k));
        return it->second;
    }
};

/// Corpus means per (metric, k); a document participates at k only when it
/// carries at least k gold labels.
inline MetricTable evaluate_corpus(const std::vector<EvalSample>& samples,
                                   const std::vector<std::size_t>& ks) {
    if (samples.empty())
        throw Error(ErrorCode::InvalidArgument, "eval-metrics: empty corpus");
    MetricTable table;
    for (std::size_t k : ks) {
        double psum = 0, nsum = 0;
        std::size_t n = 0;
        for (const EvalSample& s : samples) {
            if (s.k_y() < k) continue;
            psum += precision_at_k(s, k);
            nsum += ndcg_at_k(s, k);
            ++n;
        }
        if (n == 0)
            throw Error(ErrorCode::NoEligibleDocuments,
                        "eval-metrics: no document has >= " +
                            std::to_string(k) + " labels");
        table.values[{"P", k}] = psum / static_cast<double>(n);
        table.values[{"NDCG", k}] = nsum / static_cast<double>(n);
        table.eligible[{"P", k}] = n;
        table.eligible[{"NDCG", k}] = n;
    }
    for (const EvalSample& s : samples)
        for (TaskId t : s.tasks)
            table.per_task_p1[t].push_back(precision_at_k(s, 1));
    return table;
}

}  // namespace tamlec
