#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "yodar/rng.hpp"

using namespace yodar;

TEST_CASE("same seed reproduces the same stream") {
    RngStream a(123), b(123);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("draws follow the documented counter formula") {
    std::uint64_t seed = 987654321;
    RngStream s(seed);
    constexpr std::uint64_t gamma = 0x9e3779b97f4a7c15ULL;
    std::uint64_t key = RngStream::mix(seed + gamma);
    for (std::uint64_t n = 1; n <= 20; ++n)
        CHECK(s.next_u64() == RngStream::mix(key + n * gamma));
}

TEST_CASE("child streams are independent of parent draw count") {
    RngStream a(55), b(55);
    for (int i = 0; i < 17; ++i) a.next_u64();  // burn draws on one copy only
    CHECK(a.child("x").next_u64() == b.child("x").next_u64());
    CHECK(a.child(9).next_u64() == b.child(9).next_u64());
    CHECK(a.child("x").next_u64() != b.child("y").next_u64());
}

TEST_CASE("uniform stays in [0,1) and looks uniform") {
    RngStream s(3);
    double sum = 0.0;
    for (int i = 0; i < 20000; ++i) {
        double u = s.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        sum += u;
    }
    CHECK(sum / 20000.0 == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("uniform_int covers its inclusive range") {
    RngStream s(4);
    std::set<int> seen;
    for (int i = 0; i < 1000; ++i) {
        int v = s.uniform_int(2, 7);
        CHECK(v >= 2);
        CHECK(v <= 7);
        seen.insert(v);
    }
    CHECK(seen.size() == 6);
}

TEST_CASE("shuffle yields a permutation") {
    RngStream s(5);
    std::vector<int> v(50);
    std::iota(v.begin(), v.end(), 0);
    auto orig = v;
    s.shuffle(v);
    CHECK(v != orig);
    std::sort(v.begin(), v.end());
    CHECK(v == orig);
}

TEST_CASE("normal and poisson have roughly the right moments") {
    RngStream s(6);
    double sum = 0.0, sq = 0.0;
    const int n = 50000;
    for (int i = 0; i < n; ++i) {
        double x = s.normal(2.0, 3.0);
        sum += x;
        sq += x * x;
    }
    double mean = sum / n;
    double var = sq / n - mean * mean;
    CHECK(mean == doctest::Approx(2.0).epsilon(0.05));
    CHECK(std::sqrt(var) == doctest::Approx(3.0).epsilon(0.05));

    long total = 0;
    for (int i = 0; i < n; ++i) total += s.poisson(1.5);
    CHECK(static_cast<double>(total) / n == doctest::Approx(1.5).epsilon(0.05));
}
