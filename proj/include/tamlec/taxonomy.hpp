#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tamlec/error.hpp"

namespace tamlec {

using LabelId = std::uint32_t;

struct Label {
    LabelId id;
    std::string name;
};

struct TaxonomyStats {
    std::size_t n_labels = 0;
    std::size_t width = 0;
    std::size_t depth = 0;
    std::size_t n_roots = 0;
};

/// A finite poset of labels stored as its Hasse (cover-edge) DAG, with the
/// full order relation cached as one reachability bitset per label.
///
/// Construction validates acyclicity and applies transitive reduction, so the
/// stored cover edges are always irredundant. A taxonomy may have several
/// minimal elements (needed to *test* the weak-semilattice property); the
/// strict loader below additionally enforces a unique root.
class Taxonomy {
public:
    /// Build from (parent-name, child-name) cover candidates. Duplicate edges
    /// are merged; redundant (transitively implied) edges are removed.
    static Taxonomy from_edges(
        const std::vector<std::pair<std::string, std::string>>& edges) {
        Taxonomy t;
        for (const auto& [p, c] : edges) {
            if (p.empty() || c.empty())
                throw Error(ErrorCode::InvalidArgument,
                            "taxonomy-core: empty label name in edge list");
            if (p == c)
                throw Error(ErrorCode::CycleDetected,
                            "taxonomy-core: self-edge on '" + p + "'");
            t.intern(p);
            t.intern(c);
        }
        t.children_.assign(t.labels_.size(), {});
        t.parents_.assign(t.labels_.size(), {});
        std::set<std::pair<LabelId, LabelId>> seen;
        for (const auto& [p, c] : edges) {
            LabelId pi = t.name_to_id_.at(p);
            LabelId ci = t.name_to_id_.at(c);
            if (seen.insert({pi, ci}).second) t.children_[pi].push_back(ci);
        }
        t.validate_acyclic();
        t.compute_closure();
        t.transitive_reduction();
        t.finalize();
        return t;
    }

    std::size_t size() const { return labels_.size(); }
    const std::vector<Label>& labels() const { return labels_; }
    const std::string& name(LabelId id) const { return labels_.at(id).name; }

    bool has_label(const std::string& name) const {
        return name_to_id_.count(name) > 0;
    }

    LabelId id_of(const std::string& name) const {
        auto it = name_to_id_.find(name);
        if (it == name_to_id_.end())
            throw Error(ErrorCode::UnknownLabel,
                        "taxonomy-core: unknown label '" + name + "'");
        return it->second;
    }

    void check_label(LabelId id) const {
        if (id >= labels_.size())
            throw Error(ErrorCode::UnknownLabel,
                        "taxonomy-core: label id " + std::to_string(id) +
                            " out of range");
    }

    /// a <= b: a is more general than (or equal to) b.
    bool leq(LabelId a, LabelId b) const {
        check_label(a);
        check_label(b);
        return reach_bit(a, b);
    }

    /// Out-neighbors in the reduced cover graph (Hasse diagram children).
    const std::vector<LabelId>& children(LabelId l) const {
        check_label(l);
        return children_[l];
    }

    const std::vector<LabelId>& parents(LabelId l) const {
        check_label(l);
        return parents_[l];
    }

    /// low(S): every label that is <= all members of S. For S = {} this is
    /// all labels (vacuous quantifier).
    std::vector<LabelId> lower_set(const std::vector<LabelId>& s) const {
        for (LabelId l : s) check_label(l);
        std::vector<LabelId> out;
        for (LabelId cand = 0; cand < labels_.size(); ++cand) {
            bool ok = true;
            for (LabelId l : s) {
                if (!reach_bit(cand, l)) {
                    ok = false;
                    break;
                }
            }
            if (ok) out.push_back(cand);
        }
        return out;
    }

    /// A Condorcet winner (<= every label) exists iff the poset is a
    /// weak-semilattice.
    bool is_weak_semilattice() const {
        return find_condorcet_winner() >= 0;
    }

    /// Returns the Condorcet winner id, or -1 when none exists.
    int find_condorcet_winner() const {
        for (LabelId c = 0; c < labels_.size(); ++c) {
            bool wins = true;
            for (LabelId l = 0; l < labels_.size(); ++l) {
                if (!reach_bit(c, l)) {
                    wins = false;
                    break;
                }
            }
            if (wins) return static_cast<int>(c);
        }
        return -1;
    }

    LabelId root() const {
        int c = find_condorcet_winner();
        if (c < 0)
            throw Error(ErrorCode::NotWeakSemilattice,
                        "taxonomy-core: no Condorcet winner");
        return static_cast<LabelId>(c);
    }

    std::size_t width() const {
        std::size_t w = 0;
        for (const auto& ch : children_) w = std::max(w, ch.size());
        return w;
    }

    /// Edge length of the longest chain starting at a minimal element.
    std::size_t depth() const {
        std::vector<std::size_t> d(labels_.size(), 0);
        std::size_t best = 0;
        for (LabelId l : topo_order_) {
            for (LabelId c : children_[l]) d[c] = std::max(d[c], d[l] + 1);
        }
        for (std::size_t v : d) best = std::max(best, v);
        return best;
    }

    std::vector<LabelId> roots() const {
        std::vector<LabelId> out;
        for (LabelId l = 0; l < labels_.size(); ++l)
            if (parents_[l].empty()) out.push_back(l);
        return out;
    }

    TaxonomyStats stats() const {
        TaxonomyStats s;
        s.n_labels = labels_.size();
        s.width = width();
        s.depth = depth();
        s.n_roots = roots().size();
        return s;
    }

    /// Labels in increasing order along the cover relation (parents first).
    const std::vector<LabelId>& topo_order() const { return topo_order_; }

    /// Minimum number of cover edges from the root to each label (root has
    /// depth 0). Requires a weak-semilattice.
    std::vector<std::size_t> depths_from_root() const {
        LabelId r = root();
        std::vector<std::size_t> d(labels_.size(), SIZE_MAX);
        d[r] = 0;
        for (LabelId l : topo_order_) {
            if (d[l] == SIZE_MAX) continue;
            for (LabelId c : children_[l]) d[c] = std::min(d[c], d[l] + 1);
        }
        return d;
    }

private:
    void intern(const std::string& name) {
        if (name_to_id_.count(name)) return;
        LabelId id = static_cast<LabelId>(labels_.size());
        labels_.push_back({id, name});
        name_to_id_[name] = id;
    }

    void validate_acyclic() {
        const std::size_t n = labels_.size();
        std::vector<std::size_t> indeg(n, 0);
        for (const auto& ch : children_)
            for (LabelId c : ch) indeg[c]++;
        std::vector<LabelId> queue;
        for (LabelId l = 0; l < n; ++l)
            if (indeg[l] == 0) queue.push_back(l);
        topo_order_.clear();
        for (std::size_t head = 0; head < queue.size(); ++head) {
            LabelId l = queue[head];
            topo_order_.push_back(l);
            for (LabelId c : children_[l])
                if (--indeg[c] == 0) queue.push_back(c);
        }
        if (topo_order_.size() != n) {
            // Some label sits on a cycle; walk child pointers among the
            // remaining labels to produce a witness.
            std::vector<bool> placed(n, false);
            for (LabelId l : topo_order_) placed[l] = true;
            LabelId start = 0;
            for (LabelId l = 0; l < n; ++l)
                if (!placed[l]) {
                    start = l;
                    break;
                }
            std::vector<LabelId> walk{start};
            std::vector<int> pos(n, -1);
            pos[start] = 0;
            LabelId cur = start;
            std::string witness;
            for (;;) {
                LabelId next = cur;
                for (LabelId c : children_[cur])
                    if (!placed[c]) {
                        next = c;
                        break;
                    }
                if (pos[next] >= 0) {
                    for (std::size_t i = static_cast<std::size_t>(pos[next]);
                         i < walk.size(); ++i)
                        witness += labels_[walk[i]].name + " -> ";
                    witness += labels_[next].name;
                    break;
                }
                pos[next] = static_cast<int>(walk.size());
                walk.push_back(next);
                cur = next;
            }
            throw Error(ErrorCode::CycleDetected,
                        "taxonomy-core: cycle " + witness);
        }
    }

    void compute_closure() {
        const std::size_t n = labels_.size();
        words_ = (n + 63) / 64;
        reach_.assign(n * words_, 0);
        // Reverse topological order: children closed before parents.
        for (auto it = topo_order_.rbegin(); it != topo_order_.rend(); ++it) {
            LabelId l = *it;
            set_reach_bit(l, l);
            for (LabelId c : children_[l]) {
                std::uint64_t* dst = &reach_[l * words_];
                const std::uint64_t* src = &reach_[c * words_];
                for (std::size_t w = 0; w < words_; ++w) dst[w] |= src[w];
            }
        }
    }

    void transitive_reduction() {
        // Edge (a, c) is redundant iff some other child b of a reaches c.
        for (LabelId a = 0; a < labels_.size(); ++a) {
            auto& ch = children_[a];
            std::vector<LabelId> kept;
            for (LabelId c : ch) {
                bool redundant = false;
                for (LabelId b : ch) {
                    if (b != c && reach_bit(b, c)) {
                        redundant = true;
                        break;
                    }
                }
                if (!redundant) kept.push_back(c);
            }
            ch = std::move(kept);
        }
    }

    void finalize() {
        for (auto& ch : children_) std::sort(ch.begin(), ch.end());
        parents_.assign(labels_.size(), {});
        for (LabelId p = 0; p < labels_.size(); ++p)
            for (LabelId c : children_[p]) parents_[c].push_back(p);
        for (auto& ps : parents_) std::sort(ps.begin(), ps.end());
    }

    bool reach_bit(LabelId a, LabelId b) const {
        return (reach_[a * words_ + b / 64] >> (b % 64)) & 1ULL;
    }
    void set_reach_bit(LabelId a, LabelId b) {
        reach_[a * words_ + b / 64] |= 1ULL << (b % 64);
    }

    std::vector<Label> labels_;
    std::map<std::string, LabelId> name_to_id_;
    std::vector<std::vector<LabelId>> children_;
    std::vector<std::vector<LabelId>> parents_;
    std::vector<LabelId> topo_order_;
    std::vector<std::uint64_t> reach_;
    std::size_t words_ = 0;
};

/// Parse the TSV cover-edge format: one `parent<TAB>child` per line,
/// '#' starts a comment, blank lines ignored.
inline std::vector<std::pair<std::string, std::string>> parse_taxonomy_tsv(
    std::istream& in) {
    std::vector<std::pair<std::string, std::string>> edges;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw Error(ErrorCode::InvalidArgument,
                        "taxonomy-core: line " + std::to_string(lineno) +
                            ": expected parent<TAB>child");
        edges.emplace_back(line.substr(0, tab), line.substr(tab + 1));
    }
    return edges;
}

/// Strict loader: validates the poset *and* requires a single root
/// (Condorcet winner). `add_synthetic_root` repairs multi-root inputs by
/// inserting an explicit root above every minimal element.
inline Taxonomy load_taxonomy(
    std::vector<std::pair<std::string, std::string>> edges,
    bool add_synthetic_root = false,
    const std::string& synthetic_root_name = "__root__") {
    if (edges.empty())
        throw Error(ErrorCode::NoRoot, "taxonomy-core: empty edge list");
    Taxonomy t = Taxonomy::from_edges(edges);
    auto rs = t.roots();
    if (rs.size() > 1) {
        if (!add_synthetic_root) {
            std::string names;
            for (LabelId r : rs) names += (names.empty() ? "" : ", ") + t.name(r);
            throw Error(ErrorCode::MultipleRoots,
                        "taxonomy-core: multiple roots: " + names);
        }
        std::vector<std::pair<std::string, std::string>> repaired;
        for (LabelId r : rs) repaired.emplace_back(synthetic_root_name, t.name(r));
        repaired.insert(repaired.end(), edges.begin(), edges.end());
        t = Taxonomy::from_edges(repaired);
    }
    if (!t.is_weak_semilattice())
        throw Error(ErrorCode::NotWeakSemilattice,
                    "taxonomy-core: taxonomy has no Condorcet winner");
    return t;
}

inline Taxonomy load_taxonomy_file(const std::string& path,
                                   bool add_synthetic_root = false) {
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::IoError, "taxonomy-core: cannot open " + path);
    return load_taxonomy(parse_taxonomy_tsv(in), add_synthetic_root);
}

}  // namespace tamlec
