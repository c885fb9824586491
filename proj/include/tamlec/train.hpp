#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "tamlec/checkpoint.hpp"
#include "tamlec/data.hpp"
#include "tamlec/decode.hpp"
#include "tamlec/error.hpp"
#include "tamlec/loss.hpp"
#include "tamlec/metrics.hpp"
#include "tamlec/model.hpp"
#include "tamlec/paths.hpp"
#include "tamlec/rng.hpp"
#include "tamlec/tat.hpp"
#include "tamlec/taxonomy.hpp"

namespace tamlec {

struct TrainConfig {
    double learning_rate = 5e-5;  // conservative default; synthetic runs use larger
    double weight_decay = 1e-2;
    std::size_t epochs = 10;
    std::size_t batch_size = 8;
    std::uint64_t seed = 0;
    LossConfig loss;

    void validate() const {
        if (learning_rate <= 0 || weight_decay < 0 || epochs == 0 ||
            batch_size == 0)
            throw Error(ErrorCode::InvalidArgument,
                        "experiment-harness: non-positive hyperparameter");
        loss.validate();
    }
};

/// Adam with decoupled weight decay. Moment buffers and step counts are kept
/// per tensor; a tensor whose batch gradient is identically zero is skipped
/// entirely, so untouched generators never move.
class AdamOptimizer {
public:
    AdamOptimizer(double lr, double weight_decay)
        : lr_(lr), wd_(weight_decay) {}

    void step(const std::vector<ParamView>& views) {
        for (const ParamView& v : views) {
            Tensor& t = *v.tensor;
            if (t.grad.empty()) continue;
            bool any = false;
            for (double g : t.grad)
                if (g != 0.0) {
                    any = true;
                    break;
                }
            if (!any) continue;
            auto& st = state_[v.name];
            if (st.m.size() != t.data.size()) {
                st.m.assign(t.data.size(), 0.0);
                st.v.assign(t.data.size(), 0.0);
                st.t = 0;
            }
            ++st.t;
            const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(st.t));
            const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(st.t));
            auto update = [&](std::size_t i) {
                const double g = t.grad[i];
                st.m[i] = beta1_ * st.m[i] + (1 - beta1_) * g;
                st.v[i] = beta2_ * st.v[i] + (1 - beta2_) * g * g;
                const double mhat = st.m[i] / bc1;
                const double vhat = st.v[i] / bc2;
                t.data[i] -= lr_ * (mhat / (std::sqrt(vhat) + eps_) + wd_ * t.data[i]);
            };
            if (v.rows) {
                const std::size_t cols = t.cols();
                for (std::size_t r : *v.rows)
                    for (std::size_t c = 0; c < cols; ++c) update(r * cols + c);
            } else {
                for (std::size_t i = 0; i < t.data.size(); ++i) update(i);
            }
        }
    }

private:
    struct State {
        std::vector<double> m, v;
        std::size_t t = 0;
    };
    double lr_, wd_;
    double beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
    std::map<std::string, State> state_;
};

// ---------------------------------------------------------------------------
// Training data
// ---------------------------------------------------------------------------

struct TrainStep {
    std::size_t position;      // row of forward_all_steps output
    std::size_t target_index;  // task output index (STOP included)
};

struct TrainSequence {
    std::size_t doc_index;
    LabelPath path;
    TaskId task_id;
    std::vector<TrainStep> steps;
};

/// Teacher-forcing triples: every (path, relevant task) pair contributes one
/// sequence; step targets outside the task are dropped, the terminal STOP is
/// always kept. Paths are taken from the (expanded) document label sets.
inline std::vector<TrainSequence> build_train_sequences(
    const Taxonomy& t, const TatDecomposition& d, const ModelParameters& params,
    const std::vector<std::set<LabelId>>& doc_labels) {
    std::vector<TrainSequence> seqs;
    for (std::size_t di = 0; di < doc_labels.size(); ++di) {
        for (const LabelPath& p : paths_from_label_set(t, doc_labels[di])) {
            for (TaskId task_id : relevant_tasks(d, p)) {
                if (!params.present_tasks.count(task_id)) continue;
                const TaskSet& task = d.task(task_id);
                TrainSequence seq;
                seq.doc_index = di;
                seq.path = p;
                seq.task_id = task_id;
                const std::size_t len = p.labels.size();
                for (std::size_t pos = 0; pos + 1 < len; ++pos) {
                    LabelId next = p.labels[pos + 1];
                    if (!task.contains(next)) continue;
                    seq.steps.push_back(
                        {pos, params.output_index(task_id, next)});
                }
                seq.steps.push_back({len - 1, task.members.size()});  // STOP
                seqs.push_back(std::move(seq));
            }
        }
    }
    return seqs;
}

struct TrainResult {
    std::vector<double> loss_curve;  // mean batch loss per epoch
    std::size_t steps = 0;
};

/// Teacher-forced next-label training with Adam (decoupled weight decay).
/// One graph per batch of documents: each document is encoded once and its
/// sequences share the memory. Deterministic under a fixed seed.
inline TrainResult train(ModelParameters& params, const Taxonomy& t,
                         const TatDecomposition& d,
                         const std::vector<std::vector<std::size_t>>& doc_tokens,
                         const std::vector<std::set<LabelId>>& doc_labels,
                         const TrainConfig& cfg,
                         const TrainScope& scope = TrainScope::all()) {
    cfg.validate();
    auto views = trainable_parameters(params, scope);
    AdamOptimizer opt(cfg.learning_rate, cfg.weight_decay);
    std::vector<TrainSequence> all_seqs =
        build_train_sequences(t, d, params, doc_labels);
    // Group sequences by document so each batch encodes a document once.
    std::map<std::size_t, std::vector<std::size_t>> by_doc;
    for (std::size_t i = 0; i < all_seqs.size(); ++i)
        by_doc[all_seqs[i].doc_index].push_back(i);
    std::vector<std::size_t> doc_order;
    for (const auto& [di, _] : by_doc) doc_order.push_back(di);

    Rng rng(cfg.seed);
    TrainResult result;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(doc_order);
        double epoch_loss = 0;
        std::size_t n_batches = 0;
        for (std::size_t start = 0; start < doc_order.size();
             start += cfg.batch_size) {
            const std::size_t end =
                std::min(start + cfg.batch_size, doc_order.size());
            Workspace ws(params, /*train=*/true);
            ag::Var total;
            std::size_t n_steps = 0;
            for (std::size_t bi = start; bi < end; ++bi) {
                const std::size_t di = doc_order[bi];
                ag::Var memory = encode_text(ws, doc_tokens[di]);
                for (std::size_t si : by_doc[di]) {
                    const TrainSequence& seq = all_seqs[si];
                    ag::Var probs =
                        forward_all_steps(ws, memory, seq.path, seq.task_id);
                    for (const TrainStep& st : seq.steps) {
                        ag::Var row = ag::slice_rows(probs, st.position, 1);
                        ag::Var l = tat_loss_var(row, st.target_index,
                                                 d.task(seq.task_id).width,
                                                 cfg.loss);
                        total = total ? ag::add(total, l) : l;
                        ++n_steps;
                    }
                }
            }
            if (!total) continue;
            ag::Var mean = ag::mul_scalar(total, 1.0 / static_cast<double>(n_steps));
            const double value = mean->value[0];
            if (!std::isfinite(value))
                throw Error(ErrorCode::DivergenceDetected,
                            "experiment-harness: non-finite loss");
            for (auto& [_, tensor] : params.tensors) tensor.zero_grad();
            ag::backward(mean);
            opt.step(views);
            for (auto& [_, tensor] : params.tensors) tensor.zero_grad();
            epoch_loss += value;
            ++n_batches;
            ++result.steps;
        }
        result.loss_curve.push_back(
            n_batches ? epoch_loss / static_cast<double>(n_batches) : 0.0);
    }
    return result;
}

// ---------------------------------------------------------------------------
// XMLCo protocol
// ---------------------------------------------------------------------------

struct XmlcoSample {
    std::size_t doc_index;
    std::set<LabelId> known;    // root + depth-1 labels of the document
    std::set<LabelId> targets;  // remaining gold labels
};

/// Keep only the most general labels (the root and its children); everything
/// deeper becomes a completion target.
inline std::vector<XmlcoSample> make_xmlco_split(
    const Taxonomy& t, const std::vector<std::set<LabelId>>& doc_labels) {
    LabelId root = t.root();
    std::set<LabelId> general{root};
    for (LabelId c : t.children(root)) general.insert(c);
    std::vector<XmlcoSample> out;
    for (std::size_t di = 0; di < doc_labels.size(); ++di) {
        XmlcoSample s;
        s.doc_index = di;
        s.known.insert(root);  // the root is trivially known
        for (LabelId l : doc_labels[di])
            if (l != root) (general.count(l) ? s.known : s.targets).insert(l);
        out.push_back(std::move(s));
    }
    return out;
}

/// Full completion for one document: beam-extend every (prefix, task) pair
/// and aggregate leaf scores.
inline LabelScores complete_document(ModelParameters& params, const Taxonomy& t,
                                     const TatDecomposition& d,
                                     const std::vector<std::size_t>& tokens,
                                     const std::set<LabelId>& known,
                                     const BeamConfig& beam,
                                     bool score_interior = false) {
    Workspace ws(params, /*train=*/false);
    ag::Var memory = encode_text(ws, tokens);
    StepFn step = model_step_fn(ws, memory);
    std::vector<std::tuple<LabelPath, TaskId, std::vector<ScoredPath>>> results;
    for (const auto& [prefix, task_id] : inference_prefixes(t, d, known)) {
        if (!params.present_tasks.count(task_id)) continue;
        results.emplace_back(prefix, task_id,
                             beam_extend(t, d, params, step, prefix, task_id, beam));
    }
    return aggregate(results, known, score_interior);
}

/// XMLCo evaluation: per-document rankings over completion targets.
/// Documents with no target are excluded from metric denominators.
inline MetricTable evaluate_xmlco(
    ModelParameters& params, const Taxonomy& t, const TatDecomposition& d,
    const std::vector<std::vector<std::size_t>>& doc_tokens,
    const std::vector<std::set<LabelId>>& doc_labels,
    const std::vector<std::size_t>& ks, const BeamConfig& beam,
    std::vector<EvalSample>* out_samples = nullptr) {
    std::vector<EvalSample> samples;
    const std::size_t max_k = *std::max_element(ks.begin(), ks.end());
    for (const XmlcoSample& x : make_xmlco_split(t, doc_labels)) {
        if (x.targets.empty()) continue;
        LabelScores scores =
            complete_document(params, t, d, doc_tokens[x.doc_index], x.known,
                              beam);
        EvalSample s;
        s.ranking = rank(scores, std::max(max_k, x.targets.size()));
        s.gold = x.targets;
        std::set<TaskId> tasks;
        for (LabelId l : x.targets)
            for (TaskId i : d.tasks_of(l)) tasks.insert(i);
        s.tasks.assign(tasks.begin(), tasks.end());
        samples.push_back(std::move(s));
    }
    if (out_samples) *out_samples = samples;
    return evaluate_corpus(samples, ks);
}

/// Empirical chance level: a uniform random ranking over all non-known
/// labels, same eligibility filter as the real evaluation.
inline MetricTable evaluate_uniform_chance(
    const Taxonomy& t, const std::vector<std::set<LabelId>>& doc_labels,
    const std::vector<std::size_t>& ks, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<EvalSample> samples;
    for (const XmlcoSample& x : make_xmlco_split(t, doc_labels)) {
        if (x.targets.empty()) continue;
        std::vector<LabelId> cands;
        for (LabelId l = 0; l < t.size(); ++l)
            if (!x.known.count(l)) cands.push_back(l);
        rng.shuffle(cands);
        EvalSample s;
        s.ranking = cands;
        s.gold = x.targets;
        samples.push_back(std::move(s));
    }
    return evaluate_corpus(samples, ks);
}

// ---------------------------------------------------------------------------
// Model persistence
// ---------------------------------------------------------------------------

inline std::uint64_t decomposition_hash(const TatDecomposition& d) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&](std::uint64_t v) {
        h ^= v;
        h *= 1099511628211ULL;
    };
    for (const TaskSet& t : d.tasks) {
        mix(t.root);
        for (LabelId m : t.members) mix(m);
        mix(0xFFFFFFFFULL);
    }
    return h;
}

inline void save_model(const std::string& path, const ModelParameters& params,
                       const Vocabulary& vocab, const TatDecomposition& d,
                       std::uint64_t seed, std::size_t step) {
    save_checkpoint(path, params.tensors);
    nlohmann::json j;
    j["config"] = {{"d_text", params.cfg.d_text},
                   {"d_label", params.cfg.d_label},
                   {"n_encoders", params.cfg.n_encoders},
                   {"n_decoders", params.cfg.n_decoders},
                   {"n_heads", params.cfg.n_heads},
                   {"ff_mult", params.cfg.ff_mult},
                   {"vocab_size", params.cfg.vocab_size},
                   {"max_text_len", params.cfg.max_text_len},
                   {"max_path_len", params.cfg.max_path_len},
                   {"label_smoothing", params.cfg.label_smoothing}};
    j["n_labels"] = params.n_labels;
    j["present_tasks"] = std::vector<TaskId>(params.present_tasks.begin(),
                                             params.present_tasks.end());
    j["decomposition_hash"] = decomposition_hash(d);
    j["seed"] = seed;
    j["step"] = step;
    j["vocab"] = vocab.tokens();
    std::ofstream out(path + ".json");
    if (!out)
        throw Error(ErrorCode::IoError,
                    "experiment-harness: cannot write " + path + ".json");
    out << j.dump(2) << '\n';
}

inline std::pair<ModelParameters, Vocabulary> load_model(
    const std::string& path, const TatDecomposition& d) {
    std::ifstream in(path + ".json");
    if (!in)
        throw Error(ErrorCode::IoError,
                    "experiment-harness: cannot open " + path + ".json");
    nlohmann::json j = nlohmann::json::parse(in);
    if (j["decomposition_hash"].get<std::uint64_t>() != decomposition_hash(d))
        throw Error(ErrorCode::InvalidArgument,
                    "experiment-harness: checkpoint was trained on a "
                    "different decomposition");
    ModelParameters p;
    p.cfg.d_text = j["config"]["d_text"];
    p.cfg.d_label = j["config"]["d_label"];
    p.cfg.n_encoders = j["config"]["n_encoders"];
    p.cfg.n_decoders = j["config"]["n_decoders"];
    p.cfg.n_heads = j["config"]["n_heads"];
    p.cfg.ff_mult = j["config"]["ff_mult"];
    p.cfg.vocab_size = j["config"]["vocab_size"];
    p.cfg.max_text_len = j["config"]["max_text_len"];
    p.cfg.max_path_len = j["config"]["max_path_len"];
    p.cfg.label_smoothing = j["config"]["label_smoothing"];
    p.n_labels = j["n_labels"];
    for (const TaskSet& t : d.tasks) p.task_members.push_back(t.members);
    for (TaskId i : j["present_tasks"].get<std::vector<TaskId>>())
        p.present_tasks.insert(i);
    p.tensors = load_checkpoint(path);
    Vocabulary vocab;
    {
        // Rebuild the vocabulary in stored id order.
        std::vector<std::string> toks = j["vocab"].get<std::vector<std::string>>();
        vocab = Vocabulary::from_tokens(toks);
    }
    return {std::move(p), std::move(vocab)};
}

// ---------------------------------------------------------------------------
// Protocol runs
// ---------------------------------------------------------------------------

struct FewShotResult {
    MetricTable global;
    MetricTable new_task;
    MetricTable new_task_before;  // untrained generator baseline
    bool shared_weights_intact = false;
};

/// Few-shot protocol: phase 1 trains with the held-out task's labels removed
/// and its generator absent; phase 2 instantiates the generator and
/// fine-tunes only it (plus the held-out task's label-embedding rows) on the
/// documents that carry the task's labels.
inline FewShotResult few_shot_run(
    const Taxonomy& t, const TatDecomposition& d, const ModelConfig& mcfg,
    const std::vector<std::vector<std::size_t>>& doc_tokens,
    const std::vector<std::set<LabelId>>& doc_labels, TaskId held_out,
    const TrainConfig& phase1_cfg, const TrainConfig& phase2_cfg,
    const std::vector<std::size_t>& ks, const BeamConfig& beam) {
    const TaskSet& nt = d.task(held_out);

    // Phase-1 corpus: held-out labels removed; documents left with only the
    // root disappear entirely.
    std::vector<std::vector<std::size_t>> p1_tokens;
    std::vector<std::set<LabelId>> p1_labels;
    std::vector<std::size_t> nt_docs;  // documents touching the held-out task
    LabelId root = t.root();
    for (std::size_t di = 0; di < doc_labels.size(); ++di) {
        std::set<LabelId> reduced;
        for (LabelId l : doc_labels[di])
            if (!nt.contains(l)) reduced.insert(l);
        bool touches_nt = reduced.size() != doc_labels[di].size();
        if (touches_nt) nt_docs.push_back(di);
        bool only_root = true;
        for (LabelId l : reduced)
            if (l != root) only_root = false;
        if (only_root) continue;  // solely equipped with held-out labels
        p1_tokens.push_back(doc_tokens[di]);
        p1_labels.push_back(std::move(reduced));
    }

    ModelParameters params = init_parameters(mcfg, d, t.size(),
                                             phase1_cfg.seed, {}, {},
                                             {held_out});
    train(params, t, d, p1_tokens, p1_labels, phase1_cfg);
    std::map<std::string, Tensor> phase1_tensors = params.tensors;

    // Phase 2: new generator, generator-only fine-tuning on the held-out
    // task's documents.
    add_generator(params, held_out, phase2_cfg.seed);

    std::vector<std::vector<std::size_t>> ft_tokens;
    std::vector<std::set<LabelId>> ft_labels;
    for (std::size_t di : nt_docs) {
        ft_tokens.push_back(doc_tokens[di]);
        ft_labels.push_back(doc_labels[di]);
    }

    auto nt_metrics = [&](std::vector<EvalSample>* dump = nullptr) {
        std::vector<EvalSample> samples;
        const std::size_t max_k = *std::max_element(ks.begin(), ks.end());
        for (const XmlcoSample& x : make_xmlco_split(t, doc_labels)) {
            std::set<LabelId> nt_targets;
            for (LabelId l : x.targets)
                if (nt.contains(l)) nt_targets.insert(l);
            if (nt_targets.empty()) continue;
            LabelScores scores = complete_document(
                params, t, d, doc_tokens[x.doc_index], x.known, beam);
            EvalSample s;
            s.ranking = rank(scores, std::max(max_k, x.targets.size()));
            s.gold = x.targets;  // full gold; NT filter is on eligibility
            samples.push_back(std::move(s));
        }
        if (dump) *dump = samples;
        return evaluate_corpus(samples, ks);
    };

    FewShotResult result;
    result.new_task_before = nt_metrics();
    train(params, t, d, ft_tokens, ft_labels, phase2_cfg,
          TrainScope::generator_only(held_out));

    // Shared tensors must be byte-identical to the phase-1 checkpoint. The
    // held-out task's label-embedding rows are new parameters and excluded.
    result.shared_weights_intact = true;
    const std::string gen_prefix = "gen." + std::to_string(held_out) + ".";
    for (const auto& [name, before] : phase1_tensors) {
        const Tensor& after = params.tensor(name);
        if (name == "label_embedding") {
            const std::size_t cols = before.cols();
            for (std::size_t r = 0; r < before.rows(); ++r) {
                if (r < t.size() && nt.contains(static_cast<LabelId>(r)))
                    continue;
                for (std::size_t c = 0; c < cols; ++c)
                    if (before.at(r, c) != after.at(r, c))
                        result.shared_weights_intact = false;
            }
        } else if (name.rfind(gen_prefix, 0) != 0) {
            if (before.data != after.data)
                result.shared_weights_intact = false;
        }
    }

    result.new_task = nt_metrics();
    result.global = evaluate_xmlco(params, t, d, doc_tokens, doc_labels, ks,
                                   beam);
    return result;
}

struct AblationResult {
    MetricTable adaptive;  // TAMLEC
    MetricTable plain;     // ablated variant (constant smoothing)
};

/// Two runs differing only in LossConfig.adaptive, same seed and data order.
inline AblationResult ablation_run(
    const Taxonomy& t, const TatDecomposition& d, const ModelConfig& mcfg,
    const std::vector<std::vector<std::size_t>>& doc_tokens,
    const std::vector<std::set<LabelId>>& doc_labels, const TrainConfig& cfg,
    const std::vector<std::size_t>& ks, const BeamConfig& beam) {
    AblationResult out;
    for (bool adaptive : {true, false}) {
        TrainConfig c = cfg;
        c.loss.adaptive = adaptive;
        ModelParameters params =
            init_parameters(mcfg, d, t.size(), c.seed);
        train(params, t, d, doc_tokens, doc_labels, c);
        MetricTable m =
            evaluate_xmlco(params, t, d, doc_tokens, doc_labels, ks, beam);
        (adaptive ? out.adaptive : out.plain) = m;
    }
    return out;
}

}  // namespace tamlec
