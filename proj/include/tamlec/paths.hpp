#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "tamlec/error.hpp"
#include "tamlec/rng.hpp"
#include "tamlec/tat.hpp"
#include "tamlec/taxonomy.hpp"

namespace tamlec {

/// Root-anchored chain of cover-related labels; the unit of prediction.
struct LabelPath {
    std::vector<LabelId> labels;

    bool operator==(const LabelPath& o) const { return labels == o.labels; }
    bool operator<(const LabelPath& o) const { return labels < o.labels; }

    void validate(const Taxonomy& t) const {
        if (labels.empty())
            throw Error(ErrorCode::EmptyPath, "path-engine: empty path");
        if (labels.front() != t.root())
            throw Error(ErrorCode::InvalidArgument,
                        "path-engine: path does not start at the root");
        std::set<LabelId> seen;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            t.check_label(labels[i]);
            if (!seen.insert(labels[i]).second)
                throw Error(ErrorCode::InvalidArgument,
                            "path-engine: repeated label " +
                                t.name(labels[i]));
            if (i + 1 < labels.size()) {
                const auto& ch = t.children(labels[i]);
                if (!std::binary_search(ch.begin(), ch.end(), labels[i + 1]))
                    throw Error(ErrorCode::InvalidArgument,
                                "path-engine: " + t.name(labels[i + 1]) +
                                    " is not a child of " + t.name(labels[i]));
            }
        }
    }
};

namespace detail {

/// True iff every label in `set` lies on a root-anchored cover chain fully
/// contained in `set`.
inline bool is_path_complete(const Taxonomy& t, const std::set<LabelId>& set,
                             LabelId* orphan = nullptr) {
    if (set.empty()) return true;
    LabelId root = t.root();
    std::vector<bool> in(t.size(), false), reach(t.size(), false);
    for (LabelId l : set) in[l] = true;
    if (in[root]) reach[root] = true;
    for (LabelId l : t.topo_order()) {
        if (!reach[l]) continue;
        for (LabelId c : t.children(l))
            if (in[c]) reach[c] = true;
    }
    for (LabelId l : set) {
        if (!reach[l]) {
            if (orphan) *orphan = l;
            return false;
        }
    }
    return true;
}

/// All strict ancestors of any label in `targets` that are missing from
/// `set`: the only labels an expansion may ever add.
inline std::vector<LabelId> candidate_additions(const Taxonomy& t,
                                                const std::set<LabelId>& set,
                                                const std::set<LabelId>& targets) {
    std::set<LabelId> cands;
    for (LabelId tgt : targets)
        for (LabelId a = 0; a < t.size(); ++a)
            if (a != tgt && t.leq(a, tgt) && !set.count(a)) cands.insert(a);
    return {cands.begin(), cands.end()};
}

}  // namespace detail

/// Hierarchical label-set expansion: the minimum-cardinality superset that is
/// path-complete, ties between equally small solutions broken by the seeded
/// RNG. Exhaustive over candidate ancestor subsets in increasing size; the
/// candidate pool is the ancestors of the incomplete labels, which stays tiny
/// for document-sized label sets. Beyond `max_candidates` a sequential
/// per-label shortest-chain fallback is used.
inline std::set<LabelId> expand_label_set(const Taxonomy& t,
                                          const std::set<LabelId>& labels,
                                          std::uint64_t rng_seed,
                                          std::size_t max_candidates = 24) {
    for (LabelId l : labels) t.check_label(l);
    if (detail::is_path_complete(t, labels)) return labels;

    std::set<LabelId> incomplete;
    {
        // Labels without an in-set root chain right now.
        LabelId root = t.root();
        std::vector<bool> in(t.size(), false), reach(t.size(), false);
        for (LabelId l : labels) in[l] = true;
        if (in[root]) reach[root] = true;
        for (LabelId l : t.topo_order())
            if (reach[l])
                for (LabelId c : t.children(l))
                    if (in[c]) reach[c] = true;
        for (LabelId l : labels)
            if (!reach[l]) incomplete.insert(l);
    }

    std::vector<LabelId> cands =
        detail::candidate_additions(t, labels, incomplete);
    Rng rng(rng_seed);

    if (cands.size() <= max_candidates) {
        // Increasing-size subset search; uniform random pick among minima.
        for (std::size_t k = 1; k <= cands.size(); ++k) {
            std::vector<std::set<LabelId>> optima;
            std::vector<std::size_t> idx(k);
            for (std::size_t i = 0; i < k; ++i) idx[i] = i;
            for (;;) {
                std::set<LabelId> trial = labels;
                for (std::size_t i : idx) trial.insert(cands[i]);
                if (detail::is_path_complete(t, trial))
                    optima.push_back(std::move(trial));
                // next combination
                std::size_t i = k;
                while (i > 0 && idx[i - 1] == cands.size() - (k - i) - 1) --i;
                if (i == 0) break;
                ++idx[i - 1];
                for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
            }
            if (!optima.empty())
                return optima[static_cast<std::size_t>(rng.below(optima.size()))];
        }
        throw Error(ErrorCode::NotPathComplete,
                    "path-engine: no path-complete superset exists");
    }

    // Fallback: per incomplete label, add a cheapest root chain (cost = number
    // of labels not yet in the set), random tie-break among cheapest chains.
    std::set<LabelId> out = labels;
    std::vector<LabelId> order(incomplete.begin(), incomplete.end());
    auto reachable_in = [&](const std::set<LabelId>& set,
                            LabelId target) -> bool {
        LabelId root = t.root();
        std::vector<bool> in(t.size(), false), reach(t.size(), false);
        for (LabelId l : set) in[l] = true;
        if (in[root]) reach[root] = true;
        for (LabelId l : t.topo_order())
            if (reach[l])
                for (LabelId c : t.children(l))
                    if (in[c]) reach[c] = true;
        return reach[target];
    };
    for (LabelId target : order) {
        if (reachable_in(out, target)) continue;  // fixed by an earlier chain
        // Shortest-chain DP from root to target over ancestors.
        LabelId root = t.root();
        std::vector<std::size_t> cost(t.size(), SIZE_MAX);
        std::vector<double> npaths(t.size(), 0.0);
        auto node_cost = [&](LabelId l) {
            return out.count(l) ? std::size_t{0} : std::size_t{1};
        };
        cost[root] = node_cost(root);
        npaths[root] = 1.0;
        for (LabelId l : t.topo_order()) {
            if (cost[l] == SIZE_MAX || !t.leq(l, target)) continue;
            for (LabelId c : t.children(l)) {
                if (!t.leq(c, target)) continue;
                std::size_t nc = cost[l] + node_cost(c);
                if (nc < cost[c]) {
                    cost[c] = nc;
                    npaths[c] = npaths[l];
                } else if (nc == cost[c]) {
                    npaths[c] += npaths[l];
                }
            }
        }
        // Sample a min-cost chain backwards, weighting parents by their
        // min-cost path counts.
        LabelId cur_l = target;
        std::vector<LabelId> chain{target};
        while (cur_l != root) {
            std::vector<LabelId> best_parents;
            std::vector<double> weights;
            for (LabelId p : t.parents(cur_l)) {
                if (cost[p] != SIZE_MAX &&
                    cost[p] + node_cost(cur_l) == cost[cur_l])
                    best_parents.push_back(p), weights.push_back(npaths[p]);
            }
            double total = 0;
            for (double w : weights) total += w;
            double pick = rng.uniform01() * total;
            LabelId chosen = best_parents.back();
            for (std::size_t i = 0; i < best_parents.size(); ++i) {
                pick -= weights[i];
                if (pick <= 0) {
                    chosen = best_parents[i];
                    break;
                }
            }
            chain.push_back(chosen);
            cur_l = chosen;
        }
        out.insert(chain.begin(), chain.end());
    }
    return out;
}

/// All maximal chains within `labels` (consecutive elements cover-related in
/// t), lexicographic by label ids. Requires path-completeness.
inline std::vector<LabelPath> paths_from_label_set(
    const Taxonomy& t, const std::set<LabelId>& labels) {
    for (LabelId l : labels) t.check_label(l);
    if (labels.empty()) return {};
    LabelId orphan = 0;
    if (!detail::is_path_complete(t, labels, &orphan))
        throw Error(ErrorCode::NotPathComplete,
                    "path-engine: label " + t.name(orphan) +
                        " has no in-set root chain");
    LabelId root = t.root();
    std::vector<LabelPath> out;
    std::vector<LabelId> stack{root};
    // DFS over in-set cover edges; children are id-sorted so emission order
    // is lexicographic.
    struct Frame {
        LabelId label;
        std::size_t next_child;
    };
    std::vector<Frame> frames{{root, 0}};
    auto in_set_children = [&](LabelId l) {
        std::vector<LabelId> cs;
        for (LabelId c : t.children(l))
            if (labels.count(c)) cs.push_back(c);
        return cs;
    };
    std::vector<std::vector<LabelId>> memo(t.size());
    std::vector<bool> memo_set(t.size(), false);
    auto children_of = [&](LabelId l) -> const std::vector<LabelId>& {
        if (!memo_set[l]) {
            memo[l] = in_set_children(l);
            memo_set[l] = true;
        }
        return memo[l];
    };
    while (!frames.empty()) {
        Frame& f = frames.back();
        const auto& cs = children_of(f.label);
        if (cs.empty() && f.next_child == 0) {
            out.push_back(LabelPath{stack});
            f.next_child = 1;  // mark emitted
            frames.pop_back();
            stack.pop_back();
            continue;
        }
        if (f.next_child < cs.size()) {
            LabelId c = cs[f.next_child++];
            frames.push_back({c, 0});
            stack.push_back(c);
        } else {
            frames.pop_back();
            stack.pop_back();
        }
    }
    return out;
}

/// Task ids having at least one label of the path (the root belongs to none).
inline std::vector<TaskId> relevant_tasks(const TatDecomposition& d,
                                          const LabelPath& p) {
    if (p.labels.empty())
        throw Error(ErrorCode::EmptyPath, "path-engine: empty path");
    std::set<TaskId> ids;
    for (LabelId l : p.labels)
        for (TaskId i : d.tasks_of(l)) ids.insert(i);
    return {ids.begin(), ids.end()};
}

/// Beam-search starting points: each maximal chain of `known` paired with
/// every relevant task. A root-only chain is relevant to all tasks.
inline std::vector<std::pair<LabelPath, TaskId>> inference_prefixes(
    const Taxonomy& t, const TatDecomposition& d,
    const std::set<LabelId>& known) {
    if (known.empty())
        throw Error(ErrorCode::EmptyPath, "path-engine: empty known set");
    std::vector<std::pair<LabelPath, TaskId>> out;
    for (const LabelPath& p : paths_from_label_set(t, known)) {
        std::vector<TaskId> ts = relevant_tasks(d, p);
        if (ts.empty()) {
            for (const TaskSet& task : d.tasks) out.emplace_back(p, task.task_id);
        } else {
            for (TaskId i : ts) out.emplace_back(p, i);
        }
    }
    return out;
}

}  // namespace tamlec
