#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tamlec/autograd.hpp"
#include "tamlec/data.hpp"
#include "tamlec/error.hpp"
#include "tamlec/paths.hpp"
#include "tamlec/rng.hpp"
#include "tamlec/tat.hpp"
#include "tamlec/tensor.hpp"

namespace tamlec {

struct ModelConfig {
    // Desk-scale defaults; full-scale reference values are 300/600/6/6/12.
    std::size_t d_text = 32;
    std::size_t d_label = 64;
    std::size_t n_encoders = 2;
    std::size_t n_decoders = 2;
    std::size_t n_heads = 4;
    std::size_t ff_mult = 2;  // feed-forward hidden = ff_mult * d
    std::size_t vocab_size = 0;
    std::size_t max_text_len = 64;
    std::size_t max_path_len = 16;
    double label_smoothing = 0.01;

    void validate() const {
        if (d_text % n_heads != 0 || d_label % n_heads != 0)
            throw Error(ErrorCode::InvalidArgument,
                        "model: d_text and d_label must be divisible by n_heads");
        if (vocab_size == 0)
            throw Error(ErrorCode::InvalidArgument, "model: vocab_size unset");
    }
};

/// Probability distribution over a task's labels plus STOP. Index i < size-1
/// addresses task.members[i]; the last index is STOP.
struct NextLabelDistribution {
    TaskId task_id = 0;
    std::vector<double> probabilities;  // |T_i| + 1, STOP last

    std::size_t stop_index() const { return probabilities.size() - 1; }
};

/// Shared encoder/decoder/adapter weights plus one generator head per TAT.
/// All tensors live in one name -> Tensor map so checkpointing and trainable
/// views are uniform. Generator tensors are prefixed "gen.<task>." and may be
/// absent (few-shot phase 1 trains without the held-out task).
class ModelParameters {
public:
    ModelConfig cfg;
    std::size_t n_labels = 0;
    std::vector<std::vector<LabelId>> task_members;  // indexed by TaskId
    std::set<TaskId> present_tasks;
    std::map<std::string, Tensor> tensors;

    std::size_t bos_row() const { return n_labels; }
    std::size_t stop_row() const { return n_labels + 1; }

    Tensor& tensor(const std::string& name) {
        auto it = tensors.find(name);
        if (it == tensors.end())
            throw Error(ErrorCode::InvalidArgument,
                        "model: missing tensor " + name);
        return it->second;
    }
    const Tensor& tensor(const std::string& name) const {
        return const_cast<ModelParameters*>(this)->tensor(name);
    }

    std::size_t task_output_size(TaskId id) const {
        if (id >= task_members.size())
            throw Error(ErrorCode::UnknownTask,
                        "model: task id " + std::to_string(id) + " out of range");
        return task_members[id].size() + 1;  // + STOP
    }

    void check_task_present(TaskId id) const {
        if (id >= task_members.size() || !present_tasks.count(id))
            throw Error(ErrorCode::UnknownTask,
                        "model: no generator for task " + std::to_string(id));
    }

    /// Index of a label inside a task's output head.
    std::size_t output_index(TaskId id, LabelId l) const {
        const auto& m = task_members.at(id);
        auto it = std::lower_bound(m.begin(), m.end(), l);
        if (it == m.end() || *it != l)
            throw Error(ErrorCode::TargetOutsideTask,
                        "model: label " + std::to_string(l) + " not in task " +
                            std::to_string(id));
        return static_cast<std::size_t>(it - m.begin());
    }
};

namespace detail {

inline std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 1469598103934665603ULL) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline void init_tensor(Tensor& t, const std::string& name, std::uint64_t seed) {
    // Per-tensor stream keyed by name: insertion order of the map never
    // affects the values, and a generator added later (few-shot phase 2)
    // reproduces regardless of what else exists.
    Rng rng(seed ^ fnv1a(name));
    const auto dot = name.rfind('.');
    const std::string leaf = dot == std::string::npos ? name : name.substr(dot + 1);
    if (name.find(".ln") != std::string::npos && leaf == "g") {
        std::fill(t.data.begin(), t.data.end(), 1.0);
        return;
    }
    if (!leaf.empty() && leaf[0] == 'b') {  // all biases start at zero
        std::fill(t.data.begin(), t.data.end(), 0.0);
        return;
    }
    const double fan_in = static_cast<double>(t.rows());
    const double fan_out = static_cast<double>(t.cols());
    const double s = std::sqrt(6.0 / (fan_in + fan_out));
    for (double& v : t.data) v = rng.uniform(-s, s);
}

inline void add_attention_tensors(ModelParameters& p, const std::string& prefix,
                                  std::size_t d_q, std::size_t d_kv,
                                  std::uint64_t seed) {
    auto add = [&](const std::string& n, std::size_t r, std::size_t c) {
        Tensor t({r, c});
        init_tensor(t, prefix + n, seed);
        p.tensors.emplace(prefix + n, std::move(t));
    };
    add(".wq", d_q, d_q);
    add(".wk", d_kv, d_q);
    add(".wv", d_kv, d_q);
    add(".wo", d_q, d_q);
    add(".bq", 1, d_q);
    add(".bk", 1, d_q);
    add(".bv", 1, d_q);
    add(".bo", 1, d_q);
}

inline void add_block_tensors(ModelParameters& p, const std::string& prefix,
                              std::size_t d, std::size_t d_kv, bool with_cross,
                              std::size_t ff_mult, std::uint64_t seed) {
    auto add = [&](const std::string& n, std::size_t r, std::size_t c) {
        Tensor t({r, c});
        init_tensor(t, prefix + n, seed);
        p.tensors.emplace(prefix + n, std::move(t));
    };
    add_attention_tensors(p, prefix + ".self", d, d, seed);
    add(".ln1.g", 1, d);
    add(".ln1.b", 1, d);
    if (with_cross) {
        add_attention_tensors(p, prefix + ".cross", d, d_kv, seed);
        add(".ln2.g", 1, d);
        add(".ln2.b", 1, d);
    }
    add(".ff.w1", d, ff_mult * d);
    add(".ff.b1", 1, ff_mult * d);
    add(".ff.w2", ff_mult * d, d);
    add(".ff.b2", 1, d);
    add(".ln3.g", 1, d);
    add(".ln3.b", 1, d);
}

inline std::string gen_prefix(TaskId id) {
    return "gen." + std::to_string(id);
}

/// Sinusoidal positional encodings for `len` positions of dimension d.
inline std::vector<double> positional_encoding(std::size_t len, std::size_t d) {
    std::vector<double> pe(len * d);
    for (std::size_t pos = 0; pos < len; ++pos)
        for (std::size_t i = 0; i < d; ++i) {
            const double angle =
                static_cast<double>(pos) /
                std::pow(10000.0, 2.0 * static_cast<double>(i / 2) /
                                      static_cast<double>(d));
            pe[pos * d + i] = (i % 2 == 0) ? std::sin(angle) : std::cos(angle);
        }
    return pe;
}

}  // namespace detail

/// Instantiates the generator tensors for one task (used at construction and
/// when a new task appears in the few-shot protocol).
inline void add_generator(ModelParameters& p, TaskId id, std::uint64_t seed) {
    const std::string g = detail::gen_prefix(id);
    detail::add_block_tensors(p, g, p.cfg.d_label, p.cfg.d_label, true,
                              p.cfg.ff_mult, seed);
    Tensor w({p.cfg.d_label, p.task_output_size(id)});
    detail::init_tensor(w, g + ".out.w", seed);
    p.tensors.emplace(g + ".out.w", std::move(w));
    Tensor b({std::size_t{1}, p.task_output_size(id)});
    detail::init_tensor(b, g + ".out.b", seed);
    p.tensors.emplace(g + ".out.b", std::move(b));
    p.present_tasks.insert(id);
}

/// Deterministic init from seed; text-embedding rows are overwritten from the
/// pretrained table for covered vocabulary tokens. `skip_tasks` leaves the
/// named generators uninstantiated (few-shot phase 1).
inline ModelParameters init_parameters(
    const ModelConfig& cfg, const TatDecomposition& d, std::size_t n_labels,
    std::uint64_t seed, const std::optional<EmbeddingTable>& pretrained = {},
    const std::optional<Vocabulary>& vocab = {},
    const std::set<TaskId>& skip_tasks = {}) {
    cfg.validate();
    ModelParameters p;
    p.cfg = cfg;
    p.n_labels = n_labels;
    for (const TaskSet& t : d.tasks) p.task_members.push_back(t.members);

    auto add = [&](const std::string& n, std::size_t r, std::size_t c) {
        Tensor t({r, c});
        detail::init_tensor(t, n, seed);
        p.tensors.emplace(n, std::move(t));
    };
    add("text_embedding", cfg.vocab_size, cfg.d_text);
    add("label_embedding", n_labels + 2, cfg.d_label);
    for (std::size_t i = 0; i < cfg.n_encoders; ++i)
        detail::add_block_tensors(p, "enc." + std::to_string(i), cfg.d_text,
                                  cfg.d_text, false, cfg.ff_mult, seed);
    add("adapter.w", cfg.d_text, cfg.d_label);
    add("adapter.b", 1, cfg.d_label);
    for (std::size_t i = 0; i < cfg.n_decoders; ++i)
        detail::add_block_tensors(p, "dec." + std::to_string(i), cfg.d_label,
                                  cfg.d_label, true, cfg.ff_mult, seed);
    for (const TaskSet& t : d.tasks)
        if (!skip_tasks.count(t.task_id)) add_generator(p, t.task_id, seed);

    if (pretrained) {
        if (pretrained->dim != cfg.d_text)
            throw Error(ErrorCode::EmbeddingDimMismatch,
                        "model: pretrained dim " + std::to_string(pretrained->dim) +
                            " != d_text " + std::to_string(cfg.d_text));
        if (!vocab)
            throw Error(ErrorCode::InvalidArgument,
                        "model: pretrained embeddings require a vocabulary");
        Tensor& emb = p.tensor("text_embedding");
        for (std::size_t id = 0; id < vocab->size() && id < cfg.vocab_size; ++id) {
            auto it = pretrained->vectors.find(vocab->token(id));
            if (it == pretrained->vectors.end()) continue;
            for (std::size_t j = 0; j < cfg.d_text; ++j)
                emb.at(id, j) = it->second[j];
        }
    }
    return p;
}

/// One forward-graph context: parameter leaves are created once and shared by
/// every forward pass recorded on the same graph, so a batch accumulates each
/// parameter's gradient through a single leaf.
class Workspace {
public:
    Workspace(ModelParameters& params, bool train)
        : params_(params), train_(train) {}

    ModelParameters& params() { return params_; }
    const ModelParameters& params() const { return params_; }
    bool train() const { return train_; }

    ag::Var var(const std::string& name) {
        auto it = leaves_.find(name);
        if (it != leaves_.end()) return it->second;
        ag::Var v = ag::leaf(params_.tensor(name), train_);
        leaves_.emplace(name, v);
        return v;
    }

private:
    ModelParameters& params_;
    bool train_;
    std::map<std::string, ag::Var> leaves_;
};

namespace detail {

inline ag::Var linear(Workspace& ws, const ag::Var& x, const std::string& w,
                      const std::string& b) {
    return ag::add_rowvec(ag::matmul(x, ws.var(w)), ws.var(b));
}

/// Multi-head attention. `mask`, when given, is Lq x Lk row-major with 1 at
/// positions that must not be attended.
inline ag::Var attention(Workspace& ws, const std::string& prefix,
                         const ag::Var& q_in, const ag::Var& kv_in,
                         std::size_t n_heads,
                         const std::vector<std::uint8_t>* mask) {
    const std::size_t d = q_in->cols;
    const std::size_t dh = d / n_heads;
    ag::Var q = linear(ws, q_in, prefix + ".wq", prefix + ".bq");
    ag::Var k = linear(ws, kv_in, prefix + ".wk", prefix + ".bk");
    ag::Var v = linear(ws, kv_in, prefix + ".wv", prefix + ".bv");
    std::vector<ag::Var> heads;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
    for (std::size_t h = 0; h < n_heads; ++h) {
        ag::Var qh = ag::slice_cols(q, h * dh, dh);
        ag::Var kh = ag::slice_cols(k, h * dh, dh);
        ag::Var vh = ag::slice_cols(v, h * dh, dh);
        ag::Var scores = ag::mul_scalar(ag::matmul_nt(qh, kh), scale);
        if (mask) scores = ag::mask_fill(scores, *mask, -1e30);
        heads.push_back(ag::matmul(ag::softmax_rows(scores), vh));
    }
    return linear(ws, ag::concat_cols(heads), prefix + ".wo", prefix + ".bo");
}

inline ag::Var add_norm(Workspace& ws, const ag::Var& x, const ag::Var& sub,
                        const std::string& ln) {
    return ag::layer_norm_rows(ag::add(x, sub), ws.var(ln + ".g"),
                               ws.var(ln + ".b"));
}

inline ag::Var feed_forward(Workspace& ws, const std::string& prefix,
                            const ag::Var& x) {
    return linear(ws, ag::relu(linear(ws, x, prefix + ".ff.w1", prefix + ".ff.b1")),
                  prefix + ".ff.w2", prefix + ".ff.b2");
}

inline ag::Var encoder_block(Workspace& ws, const std::string& prefix,
                             const ag::Var& x, std::size_t n_heads) {
    ag::Var a = attention(ws, prefix + ".self", x, x, n_heads, nullptr);
    ag::Var h = add_norm(ws, x, a, prefix + ".ln1");
    return add_norm(ws, h, feed_forward(ws, prefix, h), prefix + ".ln3");
}

inline ag::Var decoder_block(Workspace& ws, const std::string& prefix,
                             const ag::Var& x, const ag::Var& memory,
                             std::size_t n_heads,
                             const std::vector<std::uint8_t>& self_mask) {
    ag::Var a = attention(ws, prefix + ".self", x, x, n_heads, &self_mask);
    ag::Var h1 = add_norm(ws, x, a, prefix + ".ln1");
    ag::Var c = attention(ws, prefix + ".cross", h1, memory, n_heads, nullptr);
    ag::Var h2 = add_norm(ws, h1, c, prefix + ".ln2");
    return add_norm(ws, h2, feed_forward(ws, prefix, h2), prefix + ".ln3");
}

inline std::vector<std::uint8_t> causal_mask(std::size_t len) {
    std::vector<std::uint8_t> m(len * len, 0);
    for (std::size_t i = 0; i < len; ++i)
        for (std::size_t j = i + 1; j < len; ++j) m[i * len + j] = 1;
    return m;
}

}  // namespace detail

/// Per-token contextual encodings: embeddings + positional encodings through
/// the shared encoder stack, then the adapter projection to d_label.
inline ag::Var encode_text(Workspace& ws, const std::vector<std::size_t>& token_ids) {
    const ModelConfig& cfg = ws.params().cfg;
    std::vector<std::size_t> ids = token_ids;
    if (ids.empty()) ids.push_back(0);  // PAD: empty documents stay defined
    if (ids.size() > cfg.max_text_len)
        throw Error(ErrorCode::SequenceTooLong,
                    "model: text length " + std::to_string(ids.size()) +
                        " exceeds max_text_len");
    ag::Var x = ag::embedding_lookup(ws.var("text_embedding"), ids);
    x = ag::add(x, ag::constant(ids.size(), cfg.d_text,
                                detail::positional_encoding(ids.size(), cfg.d_text)));
    for (std::size_t i = 0; i < cfg.n_encoders; ++i)
        x = detail::encoder_block(ws, "enc." + std::to_string(i), x, cfg.n_heads);
    return detail::linear(ws, x, "adapter.w", "adapter.b");
}

/// Generator self-attention mask: causal, and prefix positions whose label is
/// outside the task are never attended. Position 0 (BOS / the global root) is
/// always visible.
inline std::vector<std::uint8_t> generator_mask(const ModelParameters& p,
                                                const LabelPath& path,
                                                TaskId task_id) {
    const std::size_t len = path.labels.size();
    std::vector<std::uint8_t> m(len * len, 0);
    const auto& members = p.task_members.at(task_id);
    for (std::size_t i = 0; i < len; ++i)
        for (std::size_t j = 0; j < len; ++j) {
            bool blocked = j > i;
            if (j > 0 && !std::binary_search(members.begin(), members.end(),
                                             path.labels[j]))
                blocked = true;
            if (blocked) m[i * len + j] = 1;
        }
    return m;
}

/// Full decoder pass: probabilities [L, |T_i|+1], row j conditioning on the
/// path prefix path[0..j]. Training consumes all rows; inference reads the
/// last one. Causal masking makes row j identical to a fresh pass on the
/// truncated prefix.
inline ag::Var forward_all_steps(Workspace& ws, const ag::Var& memory,
                                 const LabelPath& path, TaskId task_id) {
    ModelParameters& p = ws.params();
    const ModelConfig& cfg = p.cfg;
    p.check_task_present(task_id);
    if (path.labels.empty())
        throw Error(ErrorCode::EmptyPath, "model: empty path prefix");
    if (path.labels.size() > cfg.max_path_len)
        throw Error(ErrorCode::PathTooLong,
                    "model: path length " + std::to_string(path.labels.size()) +
                        " exceeds max_path_len");
    // Token 0 is BOS standing for the global root; later tokens are the path
    // labels themselves.
    std::vector<std::size_t> rows;
    rows.push_back(p.bos_row());
    for (std::size_t i = 1; i < path.labels.size(); ++i)
        rows.push_back(path.labels[i]);
    const std::size_t len = rows.size();

    ag::Var x = ag::embedding_lookup(ws.var("label_embedding"), rows);
    x = ag::add(x, ag::constant(len, cfg.d_label,
                                detail::positional_encoding(len, cfg.d_label)));
    const auto causal = detail::causal_mask(len);
    for (std::size_t i = 0; i < cfg.n_decoders; ++i)
        x = detail::decoder_block(ws, "dec." + std::to_string(i), x, memory,
                                  cfg.n_heads, causal);
    const std::string g = detail::gen_prefix(task_id);
    x = detail::decoder_block(ws, g, x, memory, cfg.n_heads,
                              generator_mask(p, path, task_id));
    ag::Var logits = detail::linear(ws, x, g + ".out.w", g + ".out.b");
    return ag::softmax_rows(logits);
}

/// Next-label distribution for one prefix (inference entry point).
inline NextLabelDistribution forward(Workspace& ws, const ag::Var& memory,
                                     const LabelPath& path, TaskId task_id) {
    ag::Var probs = forward_all_steps(ws, memory, path, task_id);
    NextLabelDistribution out;
    out.task_id = task_id;
    const std::size_t m = probs->cols;
    const std::size_t last = probs->rows - 1;
    out.probabilities.assign(probs->value.begin() + last * m,
                             probs->value.begin() + (last + 1) * m);
    return out;
}

// ---------------------------------------------------------------------------
// Trainable-parameter views
// ---------------------------------------------------------------------------

struct ParamView {
    std::string name;
    Tensor* tensor = nullptr;
    std::optional<std::vector<std::size_t>> rows;  // row-restricted update
};

struct TrainScope {
    enum Kind { All, GeneratorOnly } kind = All;
    TaskId task_id = 0;

    static TrainScope all() { return {All, 0}; }
    static TrainScope generator_only(TaskId id) { return {GeneratorOnly, id}; }
};

/// Tensors receiving gradient updates under the scope. generator_only(i)
/// selects the task-i generator plus the label-embedding rows of task-i
/// labels (new parameters in the few-shot protocol); every shared tensor and
/// other tasks' generators are excluded.
inline std::vector<ParamView> trainable_parameters(ModelParameters& p,
                                                   const TrainScope& scope) {
    std::vector<ParamView> views;
    if (scope.kind == TrainScope::All) {
        for (auto& [name, t] : p.tensors) views.push_back({name, &t, {}});
        return views;
    }
    p.check_task_present(scope.task_id);
    const std::string g = detail::gen_prefix(scope.task_id) + ".";
    for (auto& [name, t] : p.tensors)
        if (name.rfind(g, 0) == 0) views.push_back({name, &t, {}});
    std::vector<std::size_t> rows;
    for (LabelId l : p.task_members.at(scope.task_id)) rows.push_back(l);
    views.push_back({"label_embedding", &p.tensor("label_embedding"), rows});
    return views;
}

}  // namespace tamlec
