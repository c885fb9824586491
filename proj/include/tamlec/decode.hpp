#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "tamlec/error.hpp"
#include "tamlec/model.hpp"
#include "tamlec/paths.hpp"
#include "tamlec/tat.hpp"

namespace tamlec {

struct BeamConfig {
    std::size_t beam_width = 10;
    std::size_t max_extension_len = 32;

    void validate() const {
        if (beam_width < 1)
            throw Error(ErrorCode::InvalidArgument, "decode: beam_width >= 1");
    }
};

/// A (possibly still growing) decoded path. log_prob covers only the
/// extension beyond the starting prefix, under step distributions
/// renormalized over the admissible candidate set.
struct ScoredPath {
    LabelPath path;
    double log_prob = 0.0;
    bool terminated = false;
};

struct LabelScores {
    std::map<LabelId, double> scores;
    // provenance: for each scored label, the contributing (path, task) pairs.
    std::map<LabelId, std::vector<std::pair<LabelPath, TaskId>>> provenance;
};

/// Produces the next-label distribution for a prefix within a task; the model
/// supplies one, and test oracles may substitute a synthetic one.
using StepFn =
    std::function<NextLabelDistribution(const LabelPath&, TaskId)>;

namespace detail {

struct StepChoice {
    bool is_stop = false;
    LabelId label = 0;
    double log_prob = 0.0;  // log of the renormalized step probability
};

/// Admissible next steps from a path within a task: children of the last
/// label restricted to the task, plus STOP, renormalized to a proper
/// distribution. When `force_stop` only STOP remains (probability one).
inline std::vector<StepChoice> admissible_steps(
    const Taxonomy& t, const TatDecomposition& d, const ModelParameters& params,
    const NextLabelDistribution& dist, const LabelPath& path, TaskId task_id,
    bool force_stop) {
    const TaskSet& task = d.task(task_id);
    std::vector<StepChoice> out;
    if (force_stop) {
        out.push_back({true, 0, 0.0});
        return out;
    }
    std::vector<LabelId> cands;
    for (LabelId c : t.children(path.labels.back()))
        if (task.contains(c) &&
            std::find(path.labels.begin(), path.labels.end(), c) ==
                path.labels.end())
            cands.push_back(c);
    double mass = dist.probabilities[dist.stop_index()];
    for (LabelId c : cands)
        mass += dist.probabilities[params.output_index(task_id, c)];
    for (LabelId c : cands) {
        double p = dist.probabilities[params.output_index(task_id, c)] / mass;
        out.push_back({false, c, std::log(p)});
    }
    out.push_back({true, 0,
                   std::log(dist.probabilities[dist.stop_index()] / mass)});
    return out;
}

}  // namespace detail

/// Taxonomy-constrained beam search from a prefix within one task. Returns up
/// to beam_width terminated paths, highest combined probability first, ties
/// broken by label-id order of the path.
inline std::vector<ScoredPath> beam_extend(const Taxonomy& t,
                                           const TatDecomposition& d,
                                           const ModelParameters& params,
                                           const StepFn& step,
                                           const LabelPath& prefix,
                                           TaskId task_id,
                                           const BeamConfig& cfg) {
    cfg.validate();
    d.task(task_id);  // throws UnknownTask early
    prefix.validate(t);

    auto better = [](const ScoredPath& a, const ScoredPath& b) {
        if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
        return a.path.labels < b.path.labels;
    };

    std::vector<ScoredPath> live{{prefix, 0.0, false}};
    std::vector<ScoredPath> terminated;
    while (!live.empty()) {
        std::vector<ScoredPath> next;
        for (const ScoredPath& sp : live) {
            const std::size_t ext = sp.path.labels.size() - prefix.labels.size();
            const bool force_stop = ext >= cfg.max_extension_len;
            NextLabelDistribution dist = step(sp.path, task_id);
            for (const auto& choice : detail::admissible_steps(
                     t, d, params, dist, sp.path, task_id, force_stop)) {
                ScoredPath np = sp;
                np.log_prob += choice.log_prob;
                if (choice.is_stop) {
                    np.terminated = true;
                    terminated.push_back(std::move(np));
                } else {
                    np.path.labels.push_back(choice.label);
                    next.push_back(std::move(np));
                }
            }
        }
        std::sort(next.begin(), next.end(), better);
        if (next.size() > cfg.beam_width) next.resize(cfg.beam_width);
        live = std::move(next);
    }
    std::sort(terminated.begin(), terminated.end(), better);
    if (terminated.size() > cfg.beam_width) terminated.resize(cfg.beam_width);
    return terminated;
}

/// Model-backed step function over a fixed document memory.
inline StepFn model_step_fn(Workspace& ws, const ag::Var& memory) {
    return [&ws, memory](const LabelPath& path, TaskId task_id) {
        return forward(ws, memory, path, task_id);
    };
}

/// Leaf-only score aggregation: each terminated path credits exp(log_prob) to
/// its final label; sums run across prefixes and tasks. `score_interior`
/// additionally credits every post-prefix interior label. Known labels are
/// removed from the result.
inline LabelScores aggregate(
    const std::vector<std::tuple<LabelPath, TaskId, std::vector<ScoredPath>>>&
        paths_by_prefix_and_task,
    const std::set<LabelId>& known, bool score_interior = false) {
    LabelScores out;
    for (const auto& [prefix, task_id, paths] : paths_by_prefix_and_task) {
        for (const ScoredPath& sp : paths) {
            const double p = std::exp(sp.log_prob);
            auto credit = [&](LabelId l) {
                if (known.count(l)) return;
                out.scores[l] += p;
                out.provenance[l].emplace_back(sp.path, task_id);
            };
            credit(sp.path.labels.back());
            if (score_interior) {
                for (std::size_t i = prefix.labels.size();
                     i + 1 < sp.path.labels.size(); ++i)
                    credit(sp.path.labels[i]);
            }
        }
    }
    return out;
}

/// Top-k by score, ties broken by label id; shorter when fewer labels scored.
inline std::vector<LabelId> rank(const LabelScores& scores, std::size_t k) {
    if (k < 1)
        throw Error(ErrorCode::InvalidArgument, "decode: k must be >= 1");
    std::vector<std::pair<LabelId, double>> items(scores.scores.begin(),
                                                  scores.scores.end());
    std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    std::vector<LabelId> out;
    for (const auto& [l, s] : items) {
        if (out.size() >= k) break;
        out.push_back(l);
    }
    return out;
}

}  // namespace tamlec
