#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

namespace yodar {

// Counter-based splittable random stream.
//
// Every stream is identified by a 64-bit key; drawing the n-th value is a pure
// function mix(key + n * GAMMA) where mix is the SplitMix64 finalizer
// (Steele et al., "Fast splittable pseudorandom number generators"):
//
//   z = x;  z ^= z >> 30;  z *= 0xbf58476d1ce4e5b9
//           z ^= z >> 27;  z *= 0x94d049bb133111eb
//           z ^= z >> 31
//   GAMMA = 0x9e3779b97f4a7c15
//
// Child streams derive their key as mix(parent_key ^ mix(label + GAMMA)), with
// string labels first reduced by FNV-1a 64. This makes streams independent of
// how many draws preceded the split, so e.g. scene k's content never depends
// on the number of scenes generated before it. Ports in other languages only
// need the constants above to reproduce every stream bit-exactly.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : key_(mix(seed + kGamma)), counter_(0) {}

    RngStream child(std::uint64_t label) const {
        RngStream s(*this);
        s.key_ = mix(key_ ^ mix(label + kGamma));
        s.counter_ = 0;
        return s;
    }

    RngStream child(std::string_view label) const { return child(fnv1a(label)); }

    std::uint64_t next_u64() { return mix(key_ + (++counter_) * kGamma); }

    // Uniform in [0, 1), 53-bit mantissa.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Unbiased integer in [0, n), Lemire multiply-shift with rejection.
    std::uint64_t uniform_u64(std::uint64_t n) {
        std::uint64_t x = next_u64();
        __uint128_t m = static_cast<__uint128_t>(x) * n;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < n) {
            std::uint64_t t = (0 - n) % n;
            while (lo < t) {
                x = next_u64();
                m = static_cast<__uint128_t>(x) * n;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    int uniform_int(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(uniform_u64(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    bool bernoulli(double p) { return uniform() < p; }

    // Box-Muller without state: always burns two uniforms per draw.
    double normal(double mean = 0.0, double stddev = 1.0) {
        double u1 = uniform();
        double u2 = uniform();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        double r = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * r * std::cos(6.283185307179586476925286766559 * u2);
    }

    // Knuth's product method; fine for the small rates used here.
    int poisson(double lambda) {
        double limit = std::exp(-lambda);
        double prod = 1.0;
        int k = -1;
        do {
            ++k;
            prod *= uniform();
        } while (prod > limit);
        return k;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = uniform_u64(i);
            std::swap(v[i - 1], v[j]);
        }
    }

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

    static std::uint64_t fnv1a(std::string_view s) {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (char c : s) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ULL;
        }
        return h;
    }

private:
    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

    std::uint64_t key_;
    std::uint64_t counter_;
};

}  // namespace yodar
