#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include "divmbest/errors.hpp"
#include "divmbest/reranker.hpp"
#include "qp_oracle.hpp"

using namespace divmbest;
using divmbest::testing::active_set_minimizer;
using divmbest::testing::primal;

namespace {

std::vector<CandidateSet> separable_toy()
{
    return {{"a", {{1.0}, {0.0}}, {0.0, 0.5}}, {"b", {{0.0}, {1.0}}, {0.5, 0.0}}};
}

}  // namespace

TEST_CASE("score and predict")
{
    RerankerModel zero{{0.0, 0.0}};
    const CandidateSet set{"x", {{2.0, 9.0}, {3.0, -1.0}}, {0.1, 0.2}};
    CHECK(predict(zero, set) == 0);
    RerankerModel m{{1.0, 0.0}};
    CHECK(score(m, {2.0, 9.0}) == 2.0);
    CHECK(predict(m, set) == 1);
    RerankerModel scaled{{7.5, 0.0}};
    CHECK(predict(scaled, set) == 1);
    CHECK_THROWS_AS(score(m, {1.0}), DimensionMismatch);

    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> dist(-2, 2);
    for (int trial = 0; trial < 100; ++trial) {
        CandidateSet s{"r", std::vector<std::vector<double>>(5, std::vector<double>(3)), std::vector<double>(5, 0.0)};
        for (auto& f : s.features) {
            for (auto& v : f) v = dist(rng);
        }
        RerankerModel r{{dist(rng), dist(rng), dist(rng)}};
        RerankerModel r2{{r.alpha[0] * 3.3, r.alpha[1] * 3.3, r.alpha[2] * 3.3}};
        CHECK(predict(r, s) == predict(r2, s));
        // score differences depend only on feature differences
        const std::vector<double> shift{dist(rng), dist(rng), dist(rng)};
        auto moved = s;
        for (auto& f : moved.features) {
            for (std::size_t d = 0; d < 3; ++d) f[d] += shift[d];
        }
        const double before = score(r, s.features[1]) - score(r, s.features[3]);
        const double after = score(r, moved.features[1]) - score(r, moved.features[3]);
        CHECK(std::abs(before - after) <= 1e-12);
        CHECK(predict(r, s) == predict(r, moved));
    }
}

TEST_CASE("relative loss")
{
    CHECK(relative_losses({5, 25}) == std::vector<double>{0, 20});
    CHECK(relative_losses({60, 65}) == std::vector<double>{0, 5});
    CHECK(relative_losses({0.3}) == std::vector<double>{0.0});
    CHECK(relative_loss({5, 25}, 1) == 20);
    CHECK_THROWS_AS(relative_losses({}), InvalidArgument);
}

TEST_CASE("find_most_violated")
{
    const CandidateSet set{"x", {{1.0}, {0.0}, {0.5}}, {0.0, 0.5, 0.8}};
    CHECK(find_most_violated(RerankerModel{{0.0}}, set) == 2);
    CHECK(violation({0.4}, set, 1) == doctest::Approx(0.5 * (1 - 0.4)));
    CHECK(violation({0.4}, set, 0) == 0.0);

    const CandidateSet flat{"f", {{1.0}, {4.0}}, {0.2, 0.2}};
    CHECK(find_most_violated(RerankerModel{{3.0}}, flat) == 0);
    CHECK_THROWS_AS(find_most_violated(RerankerModel{{1.0, 2.0}}, set), DimensionMismatch);
}

TEST_CASE("restricted QP agrees with an active-set enumeration")
{
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> dist(-1.0, 1.0), pos(0.05, 1.0);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t p = 1 + trial % 2;
        const std::size_t k = 1 + trial % 4;
        std::vector<std::vector<double>> a(k, std::vector<double>(p));
        std::vector<double> b(k);
        for (auto& row : a) {
            for (auto& v : row) v = dist(rng);
        }
        for (auto& v : b) v = pos(rng);
        const double C = trial % 3 == 0 ? 0.5 : 2.0;
        const auto qp = solve_restricted_qp(a, b, C);
        const auto grid = active_set_minimizer(a, b, C, p);
        for (std::size_t d = 0; d < p; ++d) CHECK(std::abs(qp.alpha[d] - grid[d]) <= 1e-3);
        CHECK(qp.objective <= primal(a, b, C, grid) + 1e-9);
    }
}

TEST_CASE("QP on the toy working set")
{
    // one constraint: xi >= 0.5 - 0.5 alpha; optimum alpha = C / 2 for C < 2
    const auto qp = solve_restricted_qp({{0.5}}, {0.5}, 1.0);
    CHECK(qp.alpha[0] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(qp.xi == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(qp.objective == doctest::Approx(0.375).epsilon(1e-9));
}

TEST_CASE("train_1slack on the separable toy")
{
    const auto sep = separable_toy();
    const auto t = train_1slack(sep, 1.0, 1e-3);
    CHECK(t.model.alpha[0] > 0.0);
    CHECK(t.model.alpha[0] == doctest::Approx(0.5).epsilon(1e-6));
    for (const auto& set : sep) CHECK(predict(t.model, set) == set.oracle_index());
    CHECK(t.final_violation <= t.xi + 1e-3);
    const auto grid = active_set_minimizer({{0.5}}, {0.5}, 1.0, 1);
    CHECK(std::abs(t.model.alpha[0] - grid[0]) <= 1e-3);

    const auto big = train_1slack(sep, 1.0, 10.0);
    CHECK(big.iterations == 1);
    CHECK(big.working_set.size() == 1);

    CHECK_THROWS_AS(train_1slack(sep, 0.0, 1e-3), InvalidArgument);
    CHECK_THROWS_AS(train_1slack(sep, 1.0, 0.0), InvalidArgument);
}

TEST_CASE("degenerate training data")
{
    const std::vector<CandidateSet> flat{{"a", {{1.0}, {0.0}}, {0.3, 0.3}}};
    const auto r = train_1slack(flat, 1.0, 1e-3);
    CHECK(r.degenerate);
    CHECK(r.model.alpha == std::vector<double>{0.0});
}

TEST_CASE("cutting plane certificate and monotone objective")
{
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> dist(-1.0, 1.0), unit(0.0, 1.0);
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<CandidateSet> data;
        for (int i = 0; i < 12; ++i) {
            CandidateSet s;
            s.id = std::to_string(i);
            for (int j = 0; j < 6; ++j) {
                s.features.push_back({dist(rng), dist(rng), dist(rng)});
                s.losses.push_back(unit(rng));
            }
            data.push_back(std::move(s));
        }
        for (double C : {0.1, 1.0, 10.0}) {
            const auto r = train_1slack(data, C, 1e-3);
            for (std::size_t i = 1; i < r.objectives.size(); ++i) CHECK(r.objectives[i] >= r.objectives[i - 1] - 1e-9);
            CHECK(r.final_violation <= r.xi + 1e-3);
            for (std::size_t i = 0; i < r.working_set.size(); ++i) {
                for (std::size_t j = i + 1; j < r.working_set.size(); ++j) CHECK(r.working_set[i] != r.working_set[j]);
            }
        }
    }
}

TEST_CASE("larger C tightens the training slack on separable data")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-1.0, 1.0), unit(0.05, 1.0);
    const std::vector<double> w{0.6, -0.8};
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<CandidateSet> data;
        for (int i = 0; i < 10; ++i) {
            CandidateSet s;
            s.id = std::to_string(i);
            // candidate j sits 0.4*j behind its predecessor along w (plus
            // noise well below the gap) and has loss 0.2*j, so w separates
            // every set with margin
            for (int j = 0; j < 5; ++j) {
                const double along = -0.4 * j + 0.05 * dist(rng);
                const double across = dist(rng);
                s.features.push_back({along * w[0] - across * w[1], along * w[1] + across * w[0]});
                s.losses.push_back(0.2 * j);
            }
            for (std::size_t j = 4; j > 0; --j) {
                const std::size_t k = rng() % (j + 1);
                std::swap(s.features[j], s.features[k]);
                std::swap(s.losses[j], s.losses[k]);
            }
            data.push_back(std::move(s));
        }
        double last_xi = INFINITY, loss = 0.0;
        for (double C : {0.1, 1.0, 10.0, 100.0}) {
            const double eps = 1e-4;
            const auto r = train_1slack(data, C, eps);
            loss = 0.0;
            for (const auto& s : data) loss += relative_loss(s.losses, predict(r.model, s));
            loss /= static_cast<double>(data.size());
            // the aggregate slack bounds the training loss and shrinks with C
            CHECK(loss <= r.xi + eps);
            CHECK(r.xi <= last_xi + eps);
            last_xi = r.xi;
        }
        CHECK(loss == 0.0);
    }
}

TEST_CASE("relative loss favors the set with more to gain")
{
    // set i: accuracies 95% / 75%; set j: 40% / 35%. One feature, and the two
    // sets want opposite signs, so only one of them can be ranked correctly.
    const std::vector<CandidateSet> data{{"i", {{1.0}, {0.0}}, {0.05, 0.25}}, {"j", {{0.0}, {1.0}}, {0.60, 0.65}}};
    const auto r = train_1slack(data, 10.0, 1e-4);
    CHECK(r.model.alpha[0] > 0.0);
    CHECK(predict(r.model, data[0]) == 0);
}

TEST_CASE("mmr_select")
{
    const std::vector<double> scores{3.0, 2.9, 1.0};
    const std::vector<std::vector<double>> o{{1.0, 0.9, 0.1}, {0.9, 1.0, 0.1}, {0.1, 0.1, 1.0}};
    CHECK(mmr_select(scores, o, 1.0, 3) == std::vector<std::size_t>{0, 1, 2});
    // 0.5*2.9 - 0.5*0.9 = 1.0 beats 0.5*1 - 0.5*0.1 = 0.45
    CHECK(mmr_select(scores, o, 0.5, 3) == std::vector<std::size_t>{0, 1, 2});
    // 0.2*2.9 - 0.8*0.9 = -0.14 loses to 0.2*1 - 0.8*0.1 = 0.12
    CHECK(mmr_select(scores, o, 0.2, 3) == std::vector<std::size_t>{0, 2, 1});

    const std::vector<std::vector<double>> same{{1, 1, 0}, {1, 1, 0}, {0, 0, 1}};
    CHECK(mmr_select({1.0, 1.0, 0.5}, same, 0.0, 2) == std::vector<std::size_t>{0, 2});

    CHECK_THROWS_AS(mmr_select(scores, o, 0.5, 4), InvalidArgument);
    CHECK_THROWS_AS(mmr_select(scores, o, 1.5, 1), InvalidArgument);
}
