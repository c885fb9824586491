#pragma once

// Shared fixtures and independent oracles for the test suite. The oracles
// deliberately avoid library internals: order relations come from a
// Floyd-Warshall closure over the raw input edges, and every set-level
// property is checked by exhaustive enumeration.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "tamlec/decode.hpp"
#include "tamlec/rng.hpp"
#include "tamlec/tat.hpp"
#include "tamlec/taxonomy.hpp"

namespace fixtures {

using tamlec::LabelId;
using tamlec::TaskId;

/// The toy taxonomy used throughout the docs: CS at the root, NLP/Database/ML
/// below it, and LLMs shared by NLP and ML.
inline std::vector<std::pair<std::string, std::string>> toy_edges() {
    return {{"CS", "NLP"},  {"CS", "Database"},   {"CS", "ML"},
            {"NLP", "Vocabulary"}, {"NLP", "LLMs"}, {"ML", "LLMs"},
            {"ML", "RL"},   {"ML", "Unsupervised"}};
}

inline tamlec::Taxonomy toy_taxonomy() {
    return tamlec::load_taxonomy(toy_edges());
}

// ---------------------------------------------------------------------------
// Raw-edge poset oracle
// ---------------------------------------------------------------------------

/// Reflexive-transitive closure of raw edges by Floyd-Warshall; entirely
/// independent of the library's bitset reachability.
struct PosetOracle {
    std::size_t n = 0;
    std::vector<std::vector<bool>> leq;  // leq[a][b]: a <= b

    explicit PosetOracle(std::size_t n_,
                         const std::vector<std::pair<std::size_t, std::size_t>>& edges)
        : n(n_), leq(n_, std::vector<bool>(n_, false)) {
        for (std::size_t i = 0; i < n; ++i) leq[i][i] = true;
        for (const auto& [a, b] : edges) leq[a][b] = true;
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t i = 0; i < n; ++i)
                if (leq[i][k])
                    for (std::size_t j = 0; j < n; ++j)
                        if (leq[k][j]) leq[i][j] = true;
    }

    /// Weak-semilattice check by exhaustive subset enumeration: every
    /// nonempty subset must have a lower bound within the whole poset.
    bool weak_semilattice() const {
        for (std::uint64_t mask = 1; mask < (1ULL << n); ++mask) {
            bool found = false;
            for (std::size_t m = 0; m < n && !found; ++m) {
                bool lower = true;
                for (std::size_t s = 0; s < n; ++s)
                    if ((mask >> s) & 1ULL)
                        if (!leq[m][s]) {
                            lower = false;
                            break;
                        }
                found = lower;
            }
            if (!found) return false;
        }
        return true;
    }

    /// Cover relation: b covers a iff a < b with nothing in between.
    bool covers(std::size_t a, std::size_t b) const {
        if (a == b || !leq[a][b]) return false;
        for (std::size_t c = 0; c < n; ++c)
            if (c != a && c != b && leq[a][c] && leq[c][b]) return false;
        return true;
    }

    std::vector<std::size_t> lower_set(const std::vector<std::size_t>& s) const {
        std::vector<std::size_t> out;
        for (std::size_t cand = 0; cand < n; ++cand) {
            bool ok = true;
            for (std::size_t l : s)
                if (!leq[cand][l]) ok = false;
            if (ok) out.push_back(cand);
        }
        return out;
    }
};

/// Random acyclic edge lists over `n` node names, dense enough that node 0
/// usually reaches everything when `rooted` is set.
inline std::vector<std::pair<std::string, std::string>> random_dag_edges(
    tamlec::Rng& rng, std::size_t n, double p, bool rooted) {
    std::vector<std::pair<std::string, std::string>> edges;
    auto name = [](std::size_t i) { return "L" + std::to_string(i); };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (rng.uniform01() < p) edges.emplace_back(name(i), name(j));
    if (rooted)
        for (std::size_t j = 1; j < n; ++j)
            if (rng.uniform01() < 0.5 || edges.empty())
                edges.emplace_back(name(0), name(j));
    if (edges.empty()) edges.emplace_back(name(0), name(1));
    return edges;
}

/// Rebuilds (ids, index edges) for a PosetOracle from the same raw edges the
/// taxonomy was built from, using the taxonomy only as a name interner.
inline PosetOracle oracle_for(
    const tamlec::Taxonomy& t,
    const std::vector<std::pair<std::string, std::string>>& edges) {
    std::vector<std::pair<std::size_t, std::size_t>> idx;
    for (const auto& [a, b] : edges) idx.emplace_back(t.id_of(a), t.id_of(b));
    return PosetOracle(t.size(), idx);
}

// ---------------------------------------------------------------------------
// Exhaustive decomposition-family search
// ---------------------------------------------------------------------------

/// All families of label subsets satisfying the task-decomposition conditions
/// over the oracle relation, restricted to root-free tasks (including the
/// global root would make the trivial family {T} valid and uniqueness
/// vacuous). Feasible up to ~12 labels because valid tasks are scarce.
inline std::vector<std::vector<std::set<LabelId>>> decomposition_families(
    const PosetOracle& o, std::size_t root) {
    const std::size_t n = o.n;
    // A valid task: root-free, upward-closed within the poset minus the
    // global root, and itself a weak-semilattice (has a member below all
    // members).
    std::vector<std::set<LabelId>> valid;
    for (std::uint64_t mask = 1; mask < (1ULL << n); ++mask) {
        if ((mask >> root) & 1ULL) continue;
        std::set<LabelId> s;
        for (std::size_t i = 0; i < n; ++i)
            if ((mask >> i) & 1ULL) s.insert(static_cast<LabelId>(i));
        bool ok = true;
        for (LabelId a : s)  // upward closure (global root exempt)
            for (std::size_t b = 0; b < n && ok; ++b)
                if (b != root && o.leq[a][b] && !s.count(static_cast<LabelId>(b)))
                    ok = false;
        if (!ok) continue;
        bool has_winner = false;  // condition 1
        for (LabelId m : s) {
            bool wins = true;
            for (LabelId x : s)
                if (!o.leq[m][x]) wins = false;
            if (wins) has_winner = true;
        }
        if (has_winner) valid.push_back(std::move(s));
    }
    // Families: subsets of the valid tasks with pairwise non-containment and
    // full coverage of the non-root labels.
    std::vector<std::vector<std::set<LabelId>>> families;
    const std::size_t v = valid.size();
    for (std::uint64_t fam = 1; fam < (1ULL << v); ++fam) {
        std::vector<const std::set<LabelId>*> picked;
        for (std::size_t i = 0; i < v; ++i)
            if ((fam >> i) & 1ULL) picked.push_back(&valid[i]);
        bool ok = true;
        for (std::size_t i = 0; i < picked.size() && ok; ++i)
            for (std::size_t j = 0; j < picked.size() && ok; ++j)
                if (i != j &&
                    std::includes(picked[i]->begin(), picked[i]->end(),
                                  picked[j]->begin(), picked[j]->end()))
                    ok = false;  // condition 2 (equal sets violate too)
        if (!ok) continue;
        std::set<LabelId> covered;
        for (const auto* s : picked) covered.insert(s->begin(), s->end());
        if (covered.size() != n - 1) continue;  // condition 4
        std::vector<std::set<LabelId>> f;
        for (const auto* s : picked) f.push_back(*s);
        std::sort(f.begin(), f.end());
        families.push_back(std::move(f));
    }
    return families;
}

// ---------------------------------------------------------------------------
// Beam-search oracle
// ---------------------------------------------------------------------------

/// Exhaustive enumeration of all terminated extensions of a prefix, using the
/// same admissible-step renormalization arithmetic exposed by the library so
/// equality can be exact.
inline std::vector<tamlec::ScoredPath> enumerate_paths(
    const tamlec::Taxonomy& t, const tamlec::TatDecomposition& d,
    const tamlec::ModelParameters& params, const tamlec::StepFn& step,
    const tamlec::LabelPath& prefix, TaskId task_id, std::size_t max_ext) {
    std::vector<tamlec::ScoredPath> done;
    std::vector<tamlec::ScoredPath> frontier{{prefix, 0.0, false}};
    while (!frontier.empty()) {
        std::vector<tamlec::ScoredPath> next;
        for (const auto& sp : frontier) {
            const bool force =
                sp.path.labels.size() - prefix.labels.size() >= max_ext;
            auto dist = step(sp.path, task_id);
            for (const auto& c : tamlec::detail::admissible_steps(
                     t, d, params, dist, sp.path, task_id, force)) {
                tamlec::ScoredPath np = sp;
                np.log_prob += c.log_prob;
                if (c.is_stop) {
                    np.terminated = true;
                    done.push_back(np);
                } else {
                    np.path.labels.push_back(c.label);
                    next.push_back(np);
                }
            }
        }
        frontier = std::move(next);
    }
    std::sort(done.begin(), done.end(), [](const auto& a, const auto& b) {
        if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
        return a.path.labels < b.path.labels;
    });
    return done;
}

// ---------------------------------------------------------------------------
// Independent metric scorer
// ---------------------------------------------------------------------------

inline double naive_p_at_k(const std::vector<LabelId>& ranking,
                           const std::set<LabelId>& gold, std::size_t k) {
    double hits = 0;
    for (std::size_t i = 0; i < ranking.size() && i < k; ++i)
        hits += gold.count(ranking[i]) ? 1.0 : 0.0;
    return hits / static_cast<double>(k);
}

inline double naive_ndcg_at_k(const std::vector<LabelId>& ranking,
                              const std::set<LabelId>& gold, std::size_t k) {
    double dcg = 0;
    for (std::size_t i = 0; i < ranking.size() && i < k; ++i)
        if (gold.count(ranking[i]))
            dcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
    double ideal = 0;
    for (std::size_t i = 0; i < std::min(k, gold.size()); ++i)
        ideal += 1.0 / std::log2(static_cast<double>(i) + 2.0);
    return ideal == 0 ? 0.0 : dcg / ideal;
}

}  // namespace fixtures
