#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "tamlec/autograd.hpp"
#include "tamlec/error.hpp"
#include "tamlec/model.hpp"
#include "tamlec/tat.hpp"

namespace tamlec {

enum class SmoothingForm {
    Complement,    // smoothing terms use log(1 - P(l'))
    Conventional,  // smoothing terms use log P(l')
};

struct LossConfig {
    double epsilon = 0.01;
    bool adaptive = true;  // false reproduces the plain-smoothing ablation
    SmoothingForm form = SmoothingForm::Complement;

    void validate() const {
        if (epsilon < 0.0 || epsilon >= 1.0)
            throw Error(ErrorCode::InvalidArgument,
                        "loss: epsilon must be in [0, 1)");
    }

    /// Smoothing weight: epsilon * w/(1+w) when adaptive, else epsilon.
    double smoothing_weight(std::size_t task_width) const {
        if (!adaptive) return epsilon;
        const double w = static_cast<double>(task_width);
        return epsilon * w / (1.0 + w);
    }
};

/// Probabilities clamped below this before taking logs; clamps are counted.
inline constexpr double kProbFloor = 1e-12;

inline thread_local std::size_t g_zero_probability_clamps = 0;

/// Width-adaptive label-smoothing loss for one prediction step. `target` is
/// an index into the distribution (a task output index, STOP allowed).
///
///   L = -[(1 - a) log P(target) + sum_{l' != target} a log(1 - P(l'))]
///
/// with a = eps * w/(1+w) (adaptive) or a = eps (plain). STOP is an ordinary
/// label inside the smoothing sum. Only the task's own outputs participate.
inline double tat_loss(const NextLabelDistribution& dist, std::size_t target,
                       const TaskSet& task, const LossConfig& cfg) {
    cfg.validate();
    if (target >= dist.probabilities.size())
        throw Error(ErrorCode::TargetOutsideTask,
                    "loss: target index " + std::to_string(target) +
                        " outside the task distribution");
    const double a = cfg.smoothing_weight(task.width);
    auto safe_log = [](double x) {
        if (x < kProbFloor) {
            ++g_zero_probability_clamps;
            x = kProbFloor;
        }
        return std::log(x);
    };
    double acc = (1.0 - a) * safe_log(dist.probabilities[target]);
    for (std::size_t j = 0; j < dist.probabilities.size(); ++j) {
        if (j == target) continue;
        const double p = dist.probabilities[j];
        acc += a * (cfg.form == SmoothingForm::Complement ? safe_log(1.0 - p)
                                                     : safe_log(p));
    }
    return -acc;
}

/// Convenience overload resolving a Label (or STOP) to its output index.
inline double tat_loss(const ModelParameters& params,
                       const NextLabelDistribution& dist, LabelId target,
                       bool target_is_stop, const TaskSet& task,
                       const LossConfig& cfg) {
    std::size_t idx = target_is_stop ? dist.stop_index()
                                     : params.output_index(dist.task_id, target);
    return tat_loss(dist, idx, task, cfg);
}

/// Differentiable version over one row of step probabilities [1, m].
inline ag::Var tat_loss_var(const ag::Var& prob_row, std::size_t target,
                            std::size_t task_width, const LossConfig& cfg) {
    cfg.validate();
    const std::size_t m = prob_row->cols;
    if (prob_row->rows != 1 || target >= m)
        throw Error(ErrorCode::TargetOutsideTask,
                    "loss: bad probability row / target index");
    const double a = cfg.smoothing_weight(task_width);
    std::vector<double> c_target(m, 0.0), c_rest(m, 0.0);
    c_target[target] = -(1.0 - a);
    for (std::size_t j = 0; j < m; ++j)
        if (j != target) c_rest[j] = -a;
    ag::Var lp = ag::log_clamped(prob_row, kProbFloor, &g_zero_probability_clamps);
    ag::Var lrest = cfg.form == SmoothingForm::Complement
                        ? ag::log1m_clamped(prob_row, kProbFloor,
                                            &g_zero_probability_clamps)
                        : lp;
    return ag::add(ag::dot_const(lp, c_target), ag::dot_const(lrest, c_rest));
}

/// Mean of per-step losses over aligned (distribution, target, task) triples.
inline double batch_loss(const std::vector<NextLabelDistribution>& dists,
                         const std::vector<std::size_t>& targets,
                         const std::vector<const TaskSet*>& tasks,
                         const LossConfig& cfg) {
    if (dists.size() != targets.size() || dists.size() != tasks.size())
        throw Error(ErrorCode::InvalidArgument, "loss: misaligned batch");
    if (dists.empty())
        throw Error(ErrorCode::InvalidArgument, "loss: empty batch");
    double acc = 0;
    for (std::size_t i = 0; i < dists.size(); ++i)
        acc += tat_loss(dists[i], targets[i], *tasks[i], cfg);
    return acc / static_cast<double>(dists.size());
}

}  // namespace tamlec
