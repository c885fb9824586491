// Command-line frontend for the tamlec library.
//
// Exit codes: 0 success, 1 data/validation failure, 2 usage error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tamlec/data.hpp"
#include "tamlec/decode.hpp"
#include "tamlec/metrics.hpp"
#include "tamlec/model.hpp"
#include "tamlec/paths.hpp"
#include "tamlec/synth.hpp"
#include "tamlec/tat.hpp"
#include "tamlec/taxonomy.hpp"
#include "tamlec/train.hpp"

namespace {

using nlohmann::json;

struct CommonOpts {
    std::string taxonomy;
    std::string corpus;
    std::string embeddings;
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    bool add_synthetic_root = false;
};

/// Run manifest: everything needed to reproduce the invocation, written
/// before any artifact so a crashed run still leaves its provenance.
void write_manifest(const CommonOpts& o, const std::string& command,
                    const json& extra) {
    if (o.out.empty()) return;
    json m{{"command", command},
           {"seed", o.seed},
           {"taxonomy", o.taxonomy},
           {"corpus", o.corpus},
           {"embeddings", o.embeddings},
           {"config", o.config},
           {"out", o.out}};
    m["params"] = extra;
    std::ofstream f(o.out + ".manifest.json");
    if (!f)
        throw tamlec::Error(tamlec::ErrorCode::IoError,
                            "cli: cannot write " + o.out + ".manifest.json");
    f << m.dump(2) << '\n';
}

struct LoadedCorpus {
    std::vector<tamlec::Document> docs;
    std::vector<std::vector<std::size_t>> tokens;
    std::vector<std::set<tamlec::LabelId>> labels;  // expanded, path-complete
};

LoadedCorpus prepare_corpus(const tamlec::Taxonomy& t,
                            const tamlec::Vocabulary& vocab,
                            const std::string& path, std::size_t max_text_len,
                            std::uint64_t seed) {
    LoadedCorpus out;
    out.docs = tamlec::load_corpus(path);
    for (const auto& d : out.docs) {
        out.tokens.push_back(vocab.tokenize(d.text, max_text_len));
        std::set<tamlec::LabelId> ls;
        for (tamlec::LabelId l : tamlec::resolve_labels(t, d)) ls.insert(l);
        out.labels.push_back(tamlec::expand_label_set(t, ls, seed));
    }
    return out;
}

tamlec::ModelConfig model_config_from(const tamlec::Config& cfg,
                                      std::size_t vocab_size) {
    tamlec::ModelConfig m;
    m.d_text = static_cast<std::size_t>(cfg.get("model.d_text", 32L));
    m.d_label = static_cast<std::size_t>(cfg.get("model.d_label", 64L));
    m.n_encoders = static_cast<std::size_t>(cfg.get("model.n_encoders", 2L));
    m.n_decoders = static_cast<std::size_t>(cfg.get("model.n_decoders", 2L));
    m.n_heads = static_cast<std::size_t>(cfg.get("model.n_heads", 4L));
    m.ff_mult = static_cast<std::size_t>(cfg.get("model.ff_mult", 2L));
    m.max_text_len = static_cast<std::size_t>(cfg.get("model.max_text_len", 64L));
    m.max_path_len = static_cast<std::size_t>(cfg.get("model.max_path_len", 16L));
    m.label_smoothing = cfg.get("model.label_smoothing", 0.01);
    m.vocab_size = vocab_size;
    return m;
}

tamlec::TrainConfig train_config_from(const tamlec::Config& cfg,
                                      std::uint64_t seed, bool adaptive) {
    tamlec::TrainConfig tc;
    tc.learning_rate = cfg.get("train.learning_rate", 5e-5);
    tc.weight_decay = cfg.get("train.weight_decay", 1e-2);
    tc.epochs = static_cast<std::size_t>(cfg.get("train.epochs", 10L));
    tc.batch_size = static_cast<std::size_t>(cfg.get("train.batch_size", 8L));
    tc.seed = seed;
    tc.loss.epsilon = cfg.get("loss.epsilon", 0.01);
    tc.loss.adaptive = adaptive;
    return tc;
}

json metrics_json(const tamlec::MetricTable& m) {
    json out = json::object();
    for (const auto& [key, v] : m.values) {
        out[key.first + "@" + std::to_string(key.second)] = {
            {"value", v}, {"eligible", m.eligible.at(key)}};
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Taxonomy-aware extreme multi-label completion"};
    app.require_subcommand(1);
    app.fallthrough();  // --seed/--config/--out may follow the subcommand

    CommonOpts o;
    app.add_option("--seed", o.seed, "Global RNG seed");
    app.add_option("--config", o.config, "key=value config file");
    app.add_option("--out", o.out, "Output path prefix");

    std::string labels_csv, model_path;
    std::size_t beam_width = 10, topk = 5, epochs_cli = 0;
    double lr_cli = 0.0;
    bool adaptive = true, explain = false;
    std::vector<std::size_t> ks{1, 3, 5};
    tamlec::TaskId task_id = 0;
    tamlec::SyntheticSpec synth_spec;
    std::string synth_tax = "taxonomy.tsv", synth_corpus = "corpus.jsonl";

    auto add_tax = [&](CLI::App* c, bool required = true) {
        auto* opt = c->add_option("--taxonomy", o.taxonomy, "Cover-edge TSV");
        if (required) opt->required();
        c->add_flag("--add-synthetic-root", o.add_synthetic_root,
                    "Insert a root above multi-root inputs");
    };
    auto add_corpus = [&](CLI::App* c) {
        c->add_option("--corpus", o.corpus, "JSONL corpus")->required();
    };

    auto* c_validate = app.add_subcommand("validate-taxonomy",
                                          "Check poset + weak-semilattice");
    add_tax(c_validate);

    auto* c_decompose = app.add_subcommand("decompose", "Print the TAT tasks");
    add_tax(c_decompose);

    auto* c_expand = app.add_subcommand(
        "expand-labels", "Path-complete expansion of a label set");
    add_tax(c_expand);
    c_expand->add_option("--labels", labels_csv, "Comma-separated label names")
        ->required();
    c_expand->add_flag("--explain", explain, "Also print the maximal chains");

    auto* c_synth = app.add_subcommand("synth", "Generate a synthetic dataset");
    c_synth->add_option("--depth", synth_spec.depth, "Levels below the root");
    c_synth->add_option("--branching", synth_spec.branching, "Children per node");
    c_synth->add_option("--docs-per-task", synth_spec.docs_per_task);
    c_synth->add_option("--multi-parent-prob", synth_spec.multi_parent_prob);
    c_synth->add_option("--out-taxonomy", synth_tax, "Taxonomy TSV path");
    c_synth->add_option("--out-corpus", synth_corpus, "Corpus JSONL path");

    auto* c_train = app.add_subcommand("train", "Train a model");
    add_tax(c_train);
    add_corpus(c_train);
    c_train->add_option("--embeddings", o.embeddings,
                        "Pretrained text embeddings (GloVe text format)");
    c_train->add_option("--epochs", epochs_cli, "Override config epochs");
    c_train->add_option("--lr", lr_cli, "Override config learning rate");
    c_train->add_flag("--adaptive-loss,!--no-adaptive-loss", adaptive,
                      "Width-adaptive smoothing (default on)");

    auto* c_complete = app.add_subcommand("complete",
                                          "Rank completion labels per document");
    add_tax(c_complete);
    add_corpus(c_complete);
    c_complete->add_option("--model", model_path, "Checkpoint path")->required();
    c_complete->add_option("--beam-width", beam_width);
    c_complete->add_option("--k", topk, "Labels to emit per document");

    auto* c_eval = app.add_subcommand("evaluate", "P@k / NDCG@k on a corpus");
    add_tax(c_eval);
    add_corpus(c_eval);
    c_eval->add_option("--model", model_path, "Checkpoint path")->required();
    c_eval->add_option("--beam-width", beam_width);
    c_eval->add_option("--ks", ks, "Cutoffs");

    auto* c_fewshot = app.add_subcommand("few-shot",
                                         "Hold out one task, then fine-tune it");
    add_tax(c_fewshot);
    add_corpus(c_fewshot);
    c_fewshot->add_option("--task", task_id, "Held-out task id")->required();
    c_fewshot->add_option("--beam-width", beam_width);
    c_fewshot->add_option("--ks", ks, "Cutoffs");

    auto* c_ablate = app.add_subcommand(
        "ablate", "Adaptive vs plain smoothing, same seed");
    add_tax(c_ablate);
    add_corpus(c_ablate);
    c_ablate->add_option("--beam-width", beam_width);
    c_ablate->add_option("--ks", ks, "Cutoffs");

    CLI11_PARSE(app, argc, argv);

    try {
        tamlec::Config cfg;
        if (!o.config.empty()) cfg = tamlec::Config::parse_file(o.config);

        if (c_validate->parsed()) {
            tamlec::Taxonomy t =
                tamlec::load_taxonomy_file(o.taxonomy, o.add_synthetic_root);
            auto s = t.stats();
            json j{{"n_labels", s.n_labels}, {"width", s.width},
                   {"depth", s.depth},       {"n_roots", s.n_roots},
                   {"root", t.name(t.root())}, {"weak_semilattice", true}};
            std::cout << j.dump(2) << '\n';
            return 0;
        }

        if (c_decompose->parsed()) {
            tamlec::Taxonomy t =
                tamlec::load_taxonomy_file(o.taxonomy, o.add_synthetic_root);
            tamlec::TatDecomposition d = tamlec::decompose(t);
            auto v = tamlec::verify_tat(t, d);
            if (!v.ok) {
                std::cerr << "decomposition violates condition " << v.condition
                          << ": " << v.detail << '\n';
                return 1;
            }
            json out = json::array();
            for (const auto& task : d.tasks) {
                json names = json::array();
                for (tamlec::LabelId l : task.members) names.push_back(t.name(l));
                out.push_back({{"task_id", task.task_id},
                               {"root", t.name(task.root)},
                               {"width", task.width},
                               {"members", names}});
            }
            std::cout << out.dump(2) << '\n';
            return 0;
        }

        if (c_expand->parsed()) {
            tamlec::Taxonomy t =
                tamlec::load_taxonomy_file(o.taxonomy, o.add_synthetic_root);
            std::set<tamlec::LabelId> in;
            std::stringstream ss(labels_csv);
            std::string name;
            while (std::getline(ss, name, ',')) in.insert(t.id_of(name));
            std::set<tamlec::LabelId> expanded =
                tamlec::expand_label_set(t, in, o.seed);
            json j;
            j["added"] = json::array();
            j["expanded"] = json::array();
            for (tamlec::LabelId l : expanded) {
                j["expanded"].push_back(t.name(l));
                if (!in.count(l)) j["added"].push_back(t.name(l));
            }
            if (explain) {
                j["chains"] = json::array();
                for (const auto& p : tamlec::paths_from_label_set(t, expanded)) {
                    json chain = json::array();
                    for (tamlec::LabelId l : p.labels) chain.push_back(t.name(l));
                    j["chains"].push_back(chain);
                }
            }
            std::cout << j.dump(2) << '\n';
            return 0;
        }

        if (c_synth->parsed()) {
            write_manifest(o, "synth",
                           {{"depth", synth_spec.depth},
                            {"branching", synth_spec.branching},
                            {"docs_per_task", synth_spec.docs_per_task},
                            {"multi_parent_prob", synth_spec.multi_parent_prob}});
            tamlec::SyntheticData data =
                tamlec::generate_synthetic(synth_spec, o.seed);
            tamlec::write_synthetic(data, synth_tax, synth_corpus);
            std::cout << "wrote " << synth_tax << " (" << data.edges.size()
                      << " edges) and " << synth_corpus << " ("
                      << data.docs.size() << " docs)\n";
            return 0;
        }

        // Everything below needs taxonomy + decomposition (+ corpus).
        tamlec::Taxonomy t =
            tamlec::load_taxonomy_file(o.taxonomy, o.add_synthetic_root);
        tamlec::TatDecomposition d = tamlec::decompose(t);

        if (c_train->parsed()) {
            tamlec::TrainConfig tc = train_config_from(cfg, o.seed, adaptive);
            if (epochs_cli) tc.epochs = epochs_cli;
            if (lr_cli > 0) tc.learning_rate = lr_cli;
            if (o.out.empty()) o.out = "model.tmlc";
            write_manifest(o, "train",
                           {{"epochs", tc.epochs},
                            {"learning_rate", tc.learning_rate},
                            {"batch_size", tc.batch_size},
                            {"adaptive_loss", tc.loss.adaptive},
                            {"epsilon", tc.loss.epsilon}});
            auto docs = tamlec::load_corpus(o.corpus);
            tamlec::Vocabulary vocab = tamlec::Vocabulary::build(
                docs, static_cast<std::size_t>(cfg.get("data.min_freq", 2L)));
            tamlec::ModelConfig mc = model_config_from(cfg, vocab.size());
            LoadedCorpus lc =
                prepare_corpus(t, vocab, o.corpus, mc.max_text_len, o.seed);
            std::optional<tamlec::EmbeddingTable> pre;
            if (!o.embeddings.empty()) {
                pre = tamlec::load_embeddings(o.embeddings, mc.d_text);
                std::cerr << "embedding coverage: " << pre->coverage(vocab)
                          << '\n';
            }
            tamlec::ModelParameters params = tamlec::init_parameters(
                mc, d, t.size(), o.seed, pre, vocab);
            tamlec::TrainResult r = tamlec::train(params, t, d, lc.tokens,
                                                  lc.labels, tc);
            tamlec::save_model(o.out, params, vocab, d, o.seed, r.steps);
            json curve = json::array();
            for (double v : r.loss_curve) curve.push_back(v);
            std::cout << json{{"model", o.out}, {"loss_curve", curve}}.dump(2)
                      << '\n';
            return 0;
        }

        if (c_complete->parsed() || c_eval->parsed()) {
            auto [params, vocab] = tamlec::load_model(model_path, d);
            LoadedCorpus lc = prepare_corpus(t, vocab, o.corpus,
                                             params.cfg.max_text_len, o.seed);
            tamlec::BeamConfig bc;
            bc.beam_width = beam_width;
            if (c_complete->parsed()) {
                json out = json::array();
                for (std::size_t i = 0; i < lc.docs.size(); ++i) {
                    std::set<tamlec::LabelId> known;
                    known.insert(t.root());
                    for (tamlec::LabelId l : lc.labels[i]) known.insert(l);
                    tamlec::LabelScores scores = tamlec::complete_document(
                        params, t, d, lc.tokens[i], known, bc);
                    json ranked = json::array();
                    for (tamlec::LabelId l : tamlec::rank(scores, topk))
                        ranked.push_back({{"label", t.name(l)},
                                          {"score", scores.scores.at(l)}});
                    out.push_back({{"doc_id", lc.docs[i].doc_id},
                                   {"completions", ranked}});
                }
                if (!o.out.empty()) {
                    write_manifest(o, "complete",
                                   {{"model", model_path},
                                    {"beam_width", beam_width},
                                    {"k", topk}});
                    std::ofstream f(o.out);
                    f << out.dump(2) << '\n';
                } else {
                    std::cout << out.dump(2) << '\n';
                }
            } else {
                tamlec::MetricTable m = tamlec::evaluate_xmlco(
                    params, t, d, lc.tokens, lc.labels, ks, bc);
                std::cout << metrics_json(m).dump(2) << '\n';
            }
            return 0;
        }

        if (c_fewshot->parsed() || c_ablate->parsed()) {
            auto docs = tamlec::load_corpus(o.corpus);
            tamlec::Vocabulary vocab = tamlec::Vocabulary::build(
                docs, static_cast<std::size_t>(cfg.get("data.min_freq", 2L)));
            tamlec::ModelConfig mc = model_config_from(cfg, vocab.size());
            LoadedCorpus lc =
                prepare_corpus(t, vocab, o.corpus, mc.max_text_len, o.seed);
            tamlec::BeamConfig bc;
            bc.beam_width = beam_width;
            tamlec::TrainConfig tc = train_config_from(cfg, o.seed, true);
            if (c_fewshot->parsed()) {
                tamlec::FewShotResult r = tamlec::few_shot_run(
                    t, d, mc, lc.tokens, lc.labels, task_id, tc, tc, ks, bc);
                json j{{"held_out_task", task_id},
                       {"shared_weights_intact", r.shared_weights_intact},
                       {"global", metrics_json(r.global)},
                       {"new_task_before", metrics_json(r.new_task_before)},
                       {"new_task_after", metrics_json(r.new_task)}};
                std::cout << j.dump(2) << '\n';
            } else {
                tamlec::AblationResult r = tamlec::ablation_run(
                    t, d, mc, lc.tokens, lc.labels, tc, ks, bc);
                json j{{"adaptive", metrics_json(r.adaptive)},
                       {"plain", metrics_json(r.plain)}};
                std::cout << j.dump(2) << '\n';
            }
            return 0;
        }
    } catch (const tamlec::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
