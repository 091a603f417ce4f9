#pragma once

// Deterministic random number generation.
//
// A hand-rolled engine (xoshiro256++) plus the handful of samplers the library
// needs. std::<random> distributions are implementation-defined, so using them
// would make output depend on the standard library build; everything here is
// pinned to the bit level. Substreams are derived from (seed, index) so that
// parallel fan-out by draw index is reproducible regardless of thread count.

#include <cmath>
#include <cstdint>

namespace mvig {

namespace detail {

// splitmix64: used for seeding and substream derivation only.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl64(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

} // namespace detail

// xoshiro256++ engine.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : seed_(seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = detail::splitmix64(sm);
    }

    // Independent substream for draw/trajectory `index` under this generator's
    // construction seed. Two rounds of splitmix64 mix (seed, index) apart.
    Rng stream(std::uint64_t index) const {
        std::uint64_t sm = seed_ ^ (0x9e3779b97f4a7c15ULL * (index + 1));
        detail::splitmix64(sm);
        return Rng(detail::splitmix64(sm));
    }

    std::uint64_t next_u64() {
        const std::uint64_t result =
            detail::rotl64(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl64(state_[3], 45);
        return result;
    }

    // Uniform on the open interval (0, 1): 53-bit mantissa, offset by half an
    // ulp so 0 and 1 are unreachable (safe for log()).
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal, Box-Muller (cosine branch; exactly two uniforms per
    // call, which keeps substream layouts independent of call history).
    double normal() {
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double a = 6.283185307179586476925286766559 * uniform();
        return r * std::cos(a);
    }

    double exponential(double rate) { return -std::log(uniform()) / rate; }

    // Gamma(shape, rate), Marsaglia-Tsang squeeze with the usual shape<1 boost.
    double gamma(double shape, double rate) {
        if (shape < 1.0) {
            const double u = uniform();
            return gamma(shape + 1.0, rate) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            const double x2 = x * x;
            if (u < 1.0 - 0.0331 * x2 * x2) return d * v / rate;
            if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v)))
                return d * v / rate;
        }
    }

  private:
    std::uint64_t state_[4];
    std::uint64_t seed_;
};

// Inverse Gaussian IG(mu, lambda), Michael-Schucany-Haas. The candidate root
// is evaluated as mu*(sqrt(1+t)-1)/(sqrt(1+t)+1) with t = 4*lambda/(mu*nu),
// which is algebraically the textbook smaller root but free of the
// large-mu cancellation.
inline double sample_inverse_gaussian_raw(double mu, double lambda, Rng& rng) {
    const double z = rng.normal();
    const double nu = z * z;
    const double t = 4.0 * lambda / (mu * nu);
    const double s = std::sqrt(1.0 + t);
    const double cand = mu * (s - 1.0) / (s + 1.0);
    const double u = rng.uniform();
    if (u < mu / (mu + cand)) return cand;
    return mu * mu / cand;
}

} // namespace mvig
