#include <doctest.h>

#include <cstdio>
#include <set>

#include "fixtures.hpp"
#include "tamlec/synth.hpp"
#include "tamlec/train.hpp"

using namespace tamlec;

namespace {

ModelConfig tiny_config(std::size_t vocab) {
    ModelConfig cfg;
    cfg.d_text = 8;
    cfg.d_label = 8;
    cfg.n_encoders = 1;
    cfg.n_decoders = 1;
    cfg.n_heads = 2;
    cfg.vocab_size = vocab;
    return cfg;
}

struct TinyData {
    Taxonomy t;
    TatDecomposition d;
    Vocabulary vocab;
    std::vector<std::vector<std::size_t>> tokens;
    std::vector<std::set<LabelId>> labels;
};

TinyData tiny_synthetic(std::uint64_t seed, std::size_t docs_per_task = 4) {
    SyntheticSpec spec;
    spec.depth = 2;
    spec.branching = 2;
    spec.docs_per_task = docs_per_task;
    SyntheticData data = generate_synthetic(spec, seed);
    TinyData out{load_taxonomy(data.edges), {}, {}, {}, {}};
    out.d = decompose(out.t);
    out.vocab = Vocabulary::build(data.docs, 2);
    for (const auto& doc : data.docs) {
        out.tokens.push_back(out.vocab.tokenize(doc.text, 64));
        std::set<LabelId> ls;
        for (LabelId l : resolve_labels(out.t, doc)) ls.insert(l);
        out.labels.push_back(ls);
    }
    return out;
}

}  // namespace

TEST_CASE("adam converges on a quadratic and skips zero-grad tensors") {
    Tensor x({1, 2});
    x.data = {5.0, -3.0};
    Tensor frozen({1, 2});
    frozen.data = {1.0, 2.0};
    AdamOptimizer opt(0.1, 0.0);
    std::vector<ParamView> views{{"x", &x, {}}, {"frozen", &frozen, {}}};
    for (int step = 0; step < 500; ++step) {
        x.ensure_grad();
        x.zero_grad();
        frozen.ensure_grad();
        frozen.zero_grad();
        for (std::size_t i = 0; i < 2; ++i) x.grad[i] = 2.0 * x.data[i];
        opt.step(views);
    }
    CHECK(std::abs(x.data[0]) < 1e-3);
    CHECK(std::abs(x.data[1]) < 1e-3);
    CHECK(frozen.data == std::vector<double>{1.0, 2.0});  // never touched
}

TEST_CASE("row-restricted adam updates only the listed rows") {
    Tensor emb({3, 2});
    emb.data = {1, 1, 2, 2, 3, 3};
    AdamOptimizer opt(0.5, 0.0);
    emb.ensure_grad();
    emb.zero_grad();
    for (double& g : emb.grad) g = 1.0;
    std::vector<ParamView> views{{"emb", &emb, std::vector<std::size_t>{1}}};
    opt.step(views);
    CHECK(emb.data[0] == 1.0);  // row 0 untouched despite nonzero grad
    CHECK(emb.data[2] != 2.0);
    CHECK(emb.data[4] == 3.0);
}

TEST_CASE("training sequences: teacher forcing with STOP") {
    Taxonomy t = fixtures::toy_taxonomy();
    TatDecomposition d = decompose(t);
    ModelParameters p = init_parameters(tiny_config(8), d, t.size(), 1);

    std::set<LabelId> doc{t.id_of("CS"), t.id_of("ML"), t.id_of("LLMs")};
    auto seqs = build_train_sequences(t, d, p, {doc});
    // One chain CS-ML-LLMs, relevant to the ML and NLP tasks.
    REQUIRE(seqs.size() == 2);
    for (const auto& seq : seqs) {
        const TaskSet& task = d.task(seq.task_id);
        // Final step is STOP at the last position.
        CHECK(seq.steps.back().position == seq.path.labels.size() - 1);
        CHECK(seq.steps.back().target_index == task.members.size());
        if (task.contains(t.id_of("ML"))) {
            // ML task: predict ML from CS, LLMs from CS-ML, STOP at the end.
            CHECK(seq.steps.size() == 3);
        } else {
            // NLP task: ML is not a member, only its own labels are targets.
            CHECK(seq.steps.size() == 2);  // LLMs step + STOP
        }
    }
}

TEST_CASE("training is deterministic and decreases the loss") {
    TinyData td = tiny_synthetic(3);
    ModelConfig mc = tiny_config(td.vocab.size());
    TrainConfig tc;
    tc.learning_rate = 1e-3;
    tc.epochs = 8;
    tc.batch_size = 4;
    tc.seed = 5;

    ModelParameters a = init_parameters(mc, td.d, td.t.size(), 5);
    TrainResult ra = train(a, td.t, td.d, td.tokens, td.labels, tc);
    ModelParameters b = init_parameters(mc, td.d, td.t.size(), 5);
    TrainResult rb = train(b, td.t, td.d, td.tokens, td.labels, tc);

    CHECK(ra.loss_curve == rb.loss_curve);
    for (const auto& [name, ta] : a.tensors)
        CHECK(ta.data == b.tensor(name).data);

    CHECK(ra.loss_curve.back() < ra.loss_curve.front());
    CHECK(ra.steps > 0);
}

TEST_CASE("xmlco split keeps root and depth-1 labels as known") {
    Taxonomy t = fixtures::toy_taxonomy();
    std::set<LabelId> doc{t.id_of("CS"), t.id_of("ML"), t.id_of("LLMs"),
                          t.id_of("RL")};
    auto split = make_xmlco_split(t, {doc, {t.id_of("CS"), t.id_of("ML")}});
    REQUIRE(split.size() == 2);
    CHECK(split[0].known ==
          std::set<LabelId>{t.id_of("CS"), t.id_of("ML")});
    CHECK(split[0].targets ==
          std::set<LabelId>{t.id_of("LLMs"), t.id_of("RL")});
    CHECK(split[1].targets.empty());
    // The root is known even when the document omits it.
    auto split2 = make_xmlco_split(t, {{t.id_of("ML")}});
    CHECK(split2[0].known.count(t.root()));
}

TEST_CASE("model save / load round trip") {
    TinyData td = tiny_synthetic(9);
    ModelConfig mc = tiny_config(td.vocab.size());
    ModelParameters p = init_parameters(mc, td.d, td.t.size(), 2);

    const std::string path = "t_model.tmlc";
    save_model(path, p, td.vocab, td.d, 2, 17);
    auto [loaded, vocab] = load_model(path, td.d);
    CHECK(vocab.tokens() == td.vocab.tokens());
    CHECK(loaded.cfg.d_label == mc.d_label);
    CHECK(loaded.present_tasks == p.present_tasks);
    for (const auto& [name, tensor] : p.tensors)
        CHECK(loaded.tensor(name).data == tensor.data);

    // A different decomposition must be rejected.
    Taxonomy other = fixtures::toy_taxonomy();
    TatDecomposition od = decompose(other);
    CHECK_THROWS_AS(load_model(path, od), Error);

    std::remove(path.c_str());
    std::remove((path + ".json").c_str());
}

TEST_CASE("generator-only training leaves shared tensors untouched") {
    TinyData td = tiny_synthetic(13);
    ModelConfig mc = tiny_config(td.vocab.size());
    ModelParameters p = init_parameters(mc, td.d, td.t.size(), 4);
    auto before = p.tensors;

    TrainConfig tc;
    tc.learning_rate = 1e-3;
    tc.epochs = 2;
    tc.batch_size = 4;
    tc.seed = 4;
    train(p, td.t, td.d, td.tokens, td.labels, tc, TrainScope::generator_only(0));

    const TaskSet& task0 = td.d.task(0);
    for (const auto& [name, tensor] : p.tensors) {
        if (name.rfind("gen.0.", 0) == 0) continue;
        if (name == "label_embedding") {
            const auto& b = before.at(name);
            for (std::size_t r = 0; r < tensor.rows(); ++r) {
                bool frozen_row =
                    r >= td.t.size() ||
                    !task0.contains(static_cast<LabelId>(r));
                if (!frozen_row) continue;
                for (std::size_t c = 0; c < tensor.cols(); ++c)
                    CHECK(tensor.at(r, c) == b.at(r, c));
            }
            continue;
        }
        CHECK(tensor.data == before.at(name).data);
    }
}

TEST_CASE("uniform chance ranker is reproducible") {
    TinyData td = tiny_synthetic(7);
    MetricTable a = evaluate_uniform_chance(td.t, td.labels, {1}, 3);
    MetricTable b = evaluate_uniform_chance(td.t, td.labels, {1}, 3);
    CHECK(a.at("P", 1) == b.at("P", 1));
    CHECK(a.at("P", 1) >= 0.0);
    CHECK(a.at("P", 1) <= 1.0);
}

TEST_CASE("train config validation") {
    TrainConfig tc;
    tc.epochs = 0;
    CHECK_THROWS_AS(tc.validate(), Error);
    tc.epochs = 1;
    tc.learning_rate = 0;
    CHECK_THROWS_AS(tc.validate(), Error);
}
