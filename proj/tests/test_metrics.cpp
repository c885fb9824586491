#include <doctest.h>

#include "fixtures.hpp"
#include "tamlec/metrics.hpp"

using namespace tamlec;

TEST_CASE("precision worked cases") {
    CHECK(precision_at_k({{1, 2}, {1, 2}, {}}, 2) == doctest::Approx(1.0));
    CHECK(precision_at_k({{1, 2, 3}, {1, 3}, {}}, 3) ==
          doctest::Approx(2.0 / 3.0));
    CHECK(precision_at_k({{7, 8}, {1}, {}}, 2) == doctest::Approx(0.0));
    // Rankings shorter than k count the missing tail as wrong.
    CHECK(precision_at_k({{1}, {1, 2}, {}}, 4) == doctest::Approx(0.25));
    CHECK_THROWS_AS(precision_at_k({{1}, {1}, {}}, 0), Error);
}

TEST_CASE("ndcg worked cases") {
    // y = [1,1]: perfect prefix.
    CHECK(ndcg_at_k({{1, 2}, {1, 2}, {}}, 2) == doctest::Approx(1.0));
    // y = [1,0], k_y = 2: (1/log 2) / (1/log 2 + 1/log 3).
    CHECK(ndcg_at_k({{1, 9}, {1, 2}, {}}, 2) ==
          doctest::Approx(0.6131).epsilon(1e-4));
    // y = [0,1], k_y = 2.
    CHECK(ndcg_at_k({{9, 1}, {1, 2}, {}}, 2) ==
          doctest::Approx(0.3869).epsilon(1e-4));
    // Normalization uses min(k, k_y): one gold label found first is perfect.
    CHECK(ndcg_at_k({{1, 9}, {1}, {}}, 2) == doctest::Approx(1.0));
}

TEST_CASE("metrics match the independent scorer on random pairs") {
    Rng rng(12345);
    for (int trial = 0; trial < 1000; ++trial) {
        std::size_t n = 1 + static_cast<std::size_t>(rng.below(20));
        std::vector<LabelId> ranking;
        for (LabelId l = 0; l < 40; ++l) ranking.push_back(l);
        rng.shuffle(ranking);
        ranking.resize(n);
        std::set<LabelId> gold;
        const std::size_t gold_size = 1 + static_cast<std::size_t>(rng.below(8));
        while (gold.size() < gold_size)
            gold.insert(static_cast<LabelId>(rng.below(40)));
        std::size_t k = 1 + static_cast<std::size_t>(rng.below(10));

        EvalSample s{ranking, gold, {}};
        CHECK(precision_at_k(s, k) ==
              doctest::Approx(fixtures::naive_p_at_k(ranking, gold, k))
                  .epsilon(1e-9));
        CHECK(ndcg_at_k(s, k) ==
              doctest::Approx(fixtures::naive_ndcg_at_k(ranking, gold, k))
                  .epsilon(1e-9));
    }
}

TEST_CASE("corpus evaluation applies the eligibility filter") {
    std::vector<EvalSample> samples{
        {{1, 2, 3}, {1, 2, 3}, {0}},  // 3 labels
        {{4, 9}, {4}, {1}},           // 1 label
    };
    MetricTable m = evaluate_corpus(samples, {1, 2});
    CHECK(m.eligible.at({"P", 1}) == 2);
    CHECK(m.eligible.at({"P", 2}) == 1);  // second sample has k_y = 1
    CHECK(m.at("P", 1) == doctest::Approx(1.0));
    CHECK(m.at("P", 2) == doctest::Approx(1.0));
    CHECK(m.per_task_p1.at(0).size() == 1);
    CHECK(m.per_task_p1.at(1).size() == 1);

    CHECK_THROWS_AS(evaluate_corpus(samples, {5}), Error);
    CHECK_THROWS_AS(evaluate_corpus({}, {1}), Error);
    CHECK_THROWS_AS(m.at("P", 7), Error);
}
