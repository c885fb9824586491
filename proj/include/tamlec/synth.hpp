#pragma once

#include <cstdint>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "tamlec/data.hpp"
#include "tamlec/error.hpp"
#include "tamlec/rng.hpp"
#include "tamlec/taxonomy.hpp"

namespace tamlec {

struct SyntheticSpec {
    std::size_t depth = 2;            // levels below the root
    std::size_t branching = 3;        // children per expanded node
    double multi_parent_prob = 0.0;   // extra-parent chance for depth >= 2 nodes
    std::size_t docs_per_task = 50;
    std::size_t noise_vocab = 20;     // distinct filler words
    std::size_t keyword_repeats = 3;  // per-label keyword signal strength
    std::size_t noise_tokens = 3;     // filler words per document
};

struct SyntheticData {
    std::vector<std::pair<std::string, std::string>> edges;
    std::vector<Document> docs;
};

/// Seeded taxonomy + corpus where each document's text repeats a keyword per
/// label, so label paths are learnable from text alone. The taxonomy is a
/// depth/branching tree plus optional cross edges (multi-parent labels); it
/// is always single-rooted, hence a weak-semilattice. Documents are
/// path-complete by construction (labels form one root walk).
inline SyntheticData generate_synthetic(const SyntheticSpec& spec,
                                        std::uint64_t seed) {
    if (spec.depth < 1 || spec.branching < 1)
        throw Error(ErrorCode::InvalidArgument,
                    "experiment-harness: depth and branching must be >= 1");
    Rng rng(seed);
    SyntheticData out;

    std::vector<std::vector<std::string>> levels;  // levels[0] = {root}
    levels.push_back({"root"});
    std::size_t counter = 0;
    for (std::size_t l = 1; l <= spec.depth; ++l) {
        std::vector<std::string> level;
        for (const std::string& parent : levels[l - 1]) {
            for (std::size_t b = 0; b < spec.branching; ++b) {
                std::string name = "n" + std::to_string(counter++);
                out.edges.emplace_back(parent, name);
                level.push_back(name);
            }
        }
        // Cross edges create shared labels across tasks.
        if (l >= 2 && spec.multi_parent_prob > 0) {
            for (const std::string& node : level) {
                if (rng.bernoulli(spec.multi_parent_prob)) {
                    const auto& above = levels[l - 1];
                    const std::string& extra =
                        above[static_cast<std::size_t>(rng.below(above.size()))];
                    bool exists = false;
                    for (const auto& [p, c] : out.edges)
                        if (p == extra && c == node) exists = true;
                    if (!exists) out.edges.emplace_back(extra, node);
                }
            }
        }
        levels.push_back(std::move(level));
    }

    Taxonomy t = load_taxonomy(out.edges);
    LabelId root = t.root();
    std::size_t doc_counter = 0;
    for (LabelId task_root : t.children(root)) {
        for (std::size_t k = 0; k < spec.docs_per_task; ++k) {
            // Root walk through the task, descending as far as possible.
            std::vector<LabelId> walk{root, task_root};
            LabelId cur = task_root;
            while (!t.children(cur).empty()) {
                const auto& cs = t.children(cur);
                cur = cs[static_cast<std::size_t>(rng.below(cs.size()))];
                walk.push_back(cur);
            }
            std::vector<std::string> tokens;
            for (LabelId l : walk)
                for (std::size_t r = 0; r < spec.keyword_repeats; ++r)
                    tokens.push_back(t.name(l));
            for (std::size_t r = 0; r < spec.noise_tokens; ++r)
                tokens.push_back(
                    "w" + std::to_string(rng.below(std::max<std::uint64_t>(
                              1, spec.noise_vocab))));
            rng.shuffle(tokens);
            Document d;
            d.doc_id = "doc" + std::to_string(doc_counter++);
            for (const auto& tok : tokens) {
                if (!d.text.empty()) d.text += ' ';
                d.text += tok;
            }
            for (LabelId l : walk) d.labels.push_back(t.name(l));
            out.docs.push_back(std::move(d));
        }
    }
    return out;
}

inline void write_synthetic(const SyntheticData& data,
                            const std::string& taxonomy_path,
                            const std::string& corpus_path) {
    std::ofstream tsv(taxonomy_path);
    if (!tsv)
        throw Error(ErrorCode::IoError,
                    "experiment-harness: cannot write " + taxonomy_path);
    for (const auto& [p, c] : data.edges) tsv << p << '\t' << c << '\n';
    std::ofstream jsonl(corpus_path);
    if (!jsonl)
        throw Error(ErrorCode::IoError,
                    "experiment-harness: cannot write " + corpus_path);
    for (const Document& d : data.docs) {
        nlohmann::json j{{"doc_id", d.doc_id}, {"text", d.text},
                         {"labels", d.labels}};
        jsonl << j.dump() << '\n';
    }
}

}  // namespace tamlec
