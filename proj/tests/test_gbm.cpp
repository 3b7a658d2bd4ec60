#include <doctest.h>

#include <cmath>

#include "yodar/errors.hpp"
#include "yodar/gbm.hpp"
#include "yodar/rng.hpp"

using namespace yodar;

namespace {

double logloss(const Ensemble& e, const std::vector<std::vector<double>>& xs,
               const std::vector<std::uint8_t>& ys) {
    double acc = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double p = predict_proba(e, xs[i]);
        acc -= ys[i] ? std::log(p) : std::log(1.0 - p);
    }
    return acc / static_cast<double>(xs.size());
}

double accuracy(const Ensemble& e, const std::vector<std::vector<double>>& xs,
                const std::vector<std::uint8_t>& ys) {
    long ok = 0;
    for (std::size_t i = 0; i < xs.size(); ++i)
        ok += (predict_proba(e, xs[i]) >= 0.5) == (ys[i] != 0) ? 1 : 0;
    return static_cast<double>(ok) / static_cast<double>(xs.size());
}

}  // namespace

TEST_CASE("separable 1-feature data reaches training accuracy 1.0") {
    std::vector<std::vector<double>> xs;
    std::vector<std::uint8_t> ys;
    RngStream s(1);
    for (int i = 0; i < 200; ++i) {
        double v = s.uniform(0.0, 10.0);
        xs.push_back({v});
        ys.push_back(v > 5.0 ? 1 : 0);
    }
    BoostConfig cfg;
    cfg.n_rounds = 10;
    cfg.max_depth = 1;
    cfg.subsample = 1.0;
    Ensemble e = fit(xs, ys, cfg);
    CHECK(accuracy(e, xs, ys) == 1.0);
}

TEST_CASE("training loss is non-increasing every round with subsample=1") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        RngStream s(seed);
        std::vector<std::vector<double>> xs;
        std::vector<std::uint8_t> ys;
        for (int i = 0; i < 300; ++i) {
            std::vector<double> row{s.uniform(), s.uniform(), s.uniform()};
            // noisy linear rule
            ys.push_back(row[0] + 0.5 * row[1] + 0.3 * s.normal() > 0.75 ? 1 : 0);
            xs.push_back(std::move(row));
        }
        BoostConfig cfg;
        cfg.n_rounds = 200;
        cfg.subsample = 1.0;
        cfg.seed = seed;
        std::vector<double> round_loss;
        fit(xs, ys, cfg, &round_loss);
        REQUIRE(round_loss.size() == 200);
        for (std::size_t r = 1; r < round_loss.size(); ++r)
            CHECK(round_loss[r] <= round_loss[r - 1] + 1e-12);
    }
}

TEST_CASE("shuffled labels stay near chance-level log-loss") {
    RngStream s(99);
    std::vector<std::vector<double>> xs;
    std::vector<std::uint8_t> ys;
    for (int i = 0; i < 5000; ++i) {
        xs.push_back({s.uniform(), s.uniform()});
        ys.push_back(s.bernoulli(0.5) ? 1 : 0);  // independent of features
    }
    BoostConfig cfg;
    cfg.seed = 7;
    Ensemble e = fit(xs, ys, cfg);
    CHECK(logloss(e, xs, ys) >= 0.9 * std::log(2.0));
}

TEST_CASE("a single stump cannot express XOR") {
    std::vector<std::vector<double>> xs;
    std::vector<std::uint8_t> ys;
    RngStream s(3);
    for (int i = 0; i < 400; ++i) {
        double a = s.uniform(), b = s.uniform();
        xs.push_back({a, b});
        ys.push_back((a > 0.5) != (b > 0.5) ? 1 : 0);
    }
    BoostConfig cfg;
    cfg.n_rounds = 1;
    cfg.max_depth = 1;
    cfg.shrinkage = 1.0;
    cfg.subsample = 1.0;
    cfg.min_leaf = 1;
    Ensemble e = fit(xs, ys, cfg);
    CHECK(accuracy(e, xs, ys) <= 0.75);
}

TEST_CASE("stump split lands near the true boundary") {
    std::vector<std::vector<double>> xs;
    std::vector<double> residuals;
    std::vector<double> hess;
    std::vector<std::size_t> rows;
    RngStream s(4);
    for (int i = 0; i < 500; ++i) {
        double v = s.uniform(0.0, 10.0);
        xs.push_back({v});
        residuals.push_back(v > 5.0 ? 0.5 : -0.5);
        hess.push_back(0.25);
        rows.push_back(static_cast<std::size_t>(i));
    }
    BoostConfig cfg;
    cfg.max_depth = 1;
    cfg.min_leaf = 1;
    auto root = fit_tree(xs, residuals, hess, cfg, rows);
    REQUIRE(!root->is_leaf);
    CHECK(root->feature_index == 0);
    CHECK(root->threshold == doctest::Approx(5.0).epsilon(0.05));
    CHECK(root->left->leaf_value < 0.0);
    CHECK(root->right->leaf_value > 0.0);
}

TEST_CASE("fit is invariant to row permutation when subsample is 1") {
    RngStream s(12);
    std::vector<std::vector<double>> xs;
    std::vector<std::uint8_t> ys;
    for (int i = 0; i < 150; ++i) {
        std::vector<double> row{s.uniform(), s.uniform()};
        ys.push_back(row[0] > row[1] ? 1 : 0);
        xs.push_back(std::move(row));
    }
    BoostConfig cfg;
    cfg.n_rounds = 30;
    cfg.subsample = 1.0;
    Ensemble a = fit(xs, ys, cfg);

    // reverse the rows
    std::vector<std::vector<double>> xs_r(xs.rbegin(), xs.rend());
    std::vector<std::uint8_t> ys_r(ys.rbegin(), ys.rend());
    Ensemble b = fit(xs_r, ys_r, cfg);

    RngStream probe(5);
    for (int i = 0; i < 50; ++i) {
        std::vector<double> q{probe.uniform(), probe.uniform()};
        CHECK(std::abs(predict_proba(a, q) - predict_proba(b, q)) < 1e-12);
    }
}

TEST_CASE("single-class labels and wrong arity are rejected") {
    std::vector<std::vector<double>> xs{{0.1}, {0.2}, {0.3}};
    CHECK_THROWS_AS(fit(xs, {1, 1, 1}, BoostConfig{}), DataError);
    CHECK_THROWS_AS(fit(xs, {0, 0, 0}, BoostConfig{}), DataError);

    Ensemble e = fit(xs, {0, 1, 0}, [] {
        BoostConfig c;
        c.n_rounds = 2;
        c.min_leaf = 1;
        c.subsample = 1.0;
        return c;
    }());
    CHECK(e.n_features == 1);
    CHECK_THROWS_AS(predict_proba(e, {0.1, 0.2}), ShapeError);
    double p = predict_proba(e, {0.15});
    CHECK(p > 0.0);
    CHECK(p < 1.0);
}

TEST_CASE("BoostConfig validation") {
    BoostConfig c;
    c.n_rounds = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = BoostConfig{};
    c.subsample = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    CHECK_NOTHROW(BoostConfig{}.validate());
}
