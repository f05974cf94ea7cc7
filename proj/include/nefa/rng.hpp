#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace nefa {

// 64-bit finalizer with full avalanche; bijective on uint64.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Counter-based stream.  Draw i is a pure function of (key, i), and child
// streams derived with distinct id tuples are statistically independent, so
// any fixed keying scheme (seed, role, object, feature) yields results that
// do not depend on evaluation order across features or objects.
class RngStream {
public:
    using result_type = std::uint64_t;

    explicit RngStream(std::uint64_t seed)
        : key_(mix64(seed ^ 0x8f0c1b2d9e3a5c71ULL)), ctr_(0) {}

    RngStream derive(std::uint64_t a) const {
        return RngStream(mix64(key_ ^ mix64(a ^ 0xd1342543de82ef95ULL)), 0);
    }
    RngStream derive(std::uint64_t a, std::uint64_t b) const {
        return derive(a).derive(b ^ 0x2545f4914f6cdd1dULL);
    }
    RngStream derive(std::uint64_t a, std::uint64_t b, std::uint64_t c) const {
        return derive(a, b).derive(c ^ 0x9e6c63d0a4f8c2b3ULL);
    }

    std::uint64_t operator()() { return mix64(key_ ^ mix64(++ctr_)); }

    static constexpr std::uint64_t min() { return 0; }
    static constexpr std::uint64_t max() { return std::numeric_limits<std::uint64_t>::max(); }

private:
    RngStream(std::uint64_t key, std::uint64_t ctr) : key_(key), ctr_(ctr) {}
    std::uint64_t key_;
    std::uint64_t ctr_;
};

// Uniform on [0, 1), 53-bit resolution.
inline double uniform01(RngStream& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

// Uniform on the open interval (0, 1); safe under log().
inline double uniform_open(RngStream& g) {
    return (static_cast<double>(g() >> 12) + 0.5) * 0x1.0p-52;
}

inline double uniform_range(RngStream& g, double a, double b) {
    return a + (b - a) * uniform01(g);
}

inline double exponential_rv(RngStream& g, double rate) {
    return -std::log(uniform_open(g)) / rate;
}

// Standard normal via Box-Muller (fixed two draws, no cached state).
inline double normal_rv(RngStream& g) {
    double u1 = uniform_open(g);
    double u2 = uniform01(g);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

std::uint64_t poisson_rv(RngStream& g, double mean);

// Gamma(shape, rate) by Marsaglia-Tsang squeeze; any shape > 0.
double gamma_rv(RngStream& g, double shape, double rate);

// Exponential with the given rate truncated to (0, 1), by inverse CDF.
inline double truncated_exponential_rv(RngStream& g, double rate) {
    double u = uniform01(g);
    if (rate < 1e-10) return u;
    return -std::log1p(u * std::expm1(-rate)) / rate;
}

}  // namespace nefa
