#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "yodar/radarnet.hpp"
#include "yodar/rng.hpp"

namespace yodar {

// Central differences are only valid away from the LeakyReLU kinks; this hook
// measures how close the cached pre-activations are to zero so probe data
// straddling a kink can be rejected before comparing.
struct RadarNetTestAccess {
    static double min_kink_distance(const RadarNet& net) {
        double best = 1e300;
        for (const detail::LeakyReLU* r :
             {&net.r1_, &net.r2_, &net.r3_, &net.r4_, &net.rd1_, &net.rd2_, &net.rd3_})
            for (double v : r->in_cache.v) best = std::min(best, std::abs(v));
        return best;
    }
};

}  // namespace yodar

using namespace yodar;

namespace {

struct Probe {
    std::vector<RadarTensor> xs_store;
    std::vector<std::vector<std::uint8_t>> ts_store;
    std::vector<const RadarTensor*> xs;
    std::vector<const std::vector<std::uint8_t>*> ts;
};

Probe make_probe(std::uint64_t seed, int attempt) {
    Probe p;
    RngStream s(seed * 1000 + 7 + static_cast<std::uint64_t>(attempt) * 104729);
    for (int i = 0; i < 3; ++i) {
        RadarTensor x(8, 3, 4);
        std::vector<std::uint8_t> t(8);
        for (int sl = 0; sl < 8; ++sl) {
            t[static_cast<std::size_t>(sl)] = s.bernoulli(0.5) ? 1 : 0;
            // dense inputs keep every batch-norm variance well conditioned
            for (int f = 0; f < 4; ++f)
                for (int ti = 0; ti < 3; ++ti) x.at(sl, ti, f) = s.uniform(-1.0, 1.0);
        }
        p.xs_store.push_back(std::move(x));
        p.ts_store.push_back(std::move(t));
    }
    for (int i = 0; i < 3; ++i) {
        p.xs.push_back(&p.xs_store[static_cast<std::size_t>(i)]);
        p.ts.push_back(&p.ts_store[static_cast<std::size_t>(i)]);
    }
    return p;
}

// Backward pass vs central finite differences (step 1e-4) over every
// parameter of the reduced net. Probe data whose pre-activations sit within
// 5e-3 of a LeakyReLU kink is re-drawn: the difference quotient itself is
// invalid there, not the gradient.
double max_rel_error(std::uint64_t seed) {
    NetConfig cfg;
    cfg.n_s = 8;
    cfg.base_channels = 4;
    RadarNet net(cfg);
    net.init_weights(seed);

    const double alpha = 3.0, wd = 1e-3, h = 1e-4;
    Probe p;
    std::vector<std::vector<double>> grads;
    double data_loss = 0.0;
    int attempt = 0;
    for (;; ++attempt) {
        REQUIRE(attempt < 20);
        p = make_probe(seed, attempt);
        grads = net.training_gradients(p.xs, p.ts, alpha, wd, false, data_loss);
        if (RadarNetTestAccess::min_kink_distance(net) > 5e-3) break;
    }

    auto params = net.params();
    REQUIRE(grads.size() == params.size());
    double worst = 0.0;
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        std::vector<double>& vals = *params[pi].values;
        REQUIRE(grads[pi].size() == vals.size());
        for (std::size_t j = 0; j < vals.size(); ++j) {
            double saved = vals[j];
            vals[j] = saved + h;
            double up = net.training_loss(p.xs, p.ts, alpha, wd);
            vals[j] = saved - h;
            double dn = net.training_loss(p.xs, p.ts, alpha, wd);
            vals[j] = saved;
            double fd = (up - dn) / (2.0 * h);
            double an = grads[pi][j];
            double denom = std::max(1e-4, std::abs(fd) + std::abs(an));
            worst = std::max(worst, std::abs(fd - an) / denom);
        }
    }
    return worst;
}

}  // namespace

TEST_CASE("analytic gradients match central finite differences, 5 seeds") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        double err = max_rel_error(seed);
        INFO("seed ", seed, " max rel error ", err);
        CHECK(err < 1e-4);
    }
}

TEST_CASE("training_gradients separates data loss from the weight penalty") {
    NetConfig cfg;
    cfg.n_s = 8;
    cfg.base_channels = 4;
    RadarNet net(cfg);
    net.init_weights(3);
    RadarTensor x(8, 3, 4);
    x.at(2, 1, 0) = 0.7;
    std::vector<std::uint8_t> t(8, 0);
    t[2] = 1;
    std::vector<const RadarTensor*> xs{&x};
    std::vector<const std::vector<std::uint8_t>*> ts{&t};

    double data_loss = 0.0;
    net.training_gradients(xs, ts, 1.0, 0.0, false, data_loss);
    double total_no_wd = net.training_loss(xs, ts, 1.0, 0.0);
    CHECK(data_loss == doctest::Approx(total_no_wd).epsilon(1e-12));
    // with decay the total strictly exceeds the data part (nonzero kernels)
    CHECK(net.training_loss(xs, ts, 1.0, 1e-3) > total_no_wd);
}
