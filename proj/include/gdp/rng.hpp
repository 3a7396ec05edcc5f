#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string_view>

#include "gdp/errors.hpp"

namespace gdp {

// 64-bit FNV-1a, used for stream tags and input digests.
inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Seeded generator state. One instance per caller; never shared between
// concurrent samplers. All randomness in the project flows from a single
// 64-bit seed expanded into per-component streams via child().
//
// The engine is std::mt19937_64 (its output sequence is fixed by the
// standard) and every variate algorithm is spelled out here, so draws are
// reproducible bit-for-bit from (seed, call order).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)), root_(splitmix64(seed)) {}

    // Derived stream for a named component / replicate index.
    Rng child(std::string_view tag, std::uint64_t index = 0) const {
        std::uint64_t s = root_;
        s = splitmix64(s ^ fnv1a64(tag));
        s = splitmix64(s ^ index);
        return Rng(s, 0);
    }

    std::uint64_t raw() { return engine_(); }

    // Uniform on [0,1), 53-bit resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform on (0,1); safe under log().
    double uniform_pos() {
        double u = uniform();
        return u > 0.0 ? u : 0x1.0p-53;
    }

    // Box-Muller; the sine partner is cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform_pos();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    double exponential(double rate) {
        if (!(rate > 0.0)) throw DataError("exponential: rate must be > 0");
        return -std::log(uniform_pos()) / rate;
    }

    // Marsaglia-Tsang for shape >= 1; boost by u^(1/shape) below 1.
    double gamma(double shape, double rate) {
        if (!(shape > 0.0) || !(rate > 0.0))
            throw DataError("gamma: shape and rate must be > 0");
        if (shape < 1.0) {
            double u = uniform_pos();
            return gamma(shape + 1.0, rate) * std::pow(u, 1.0 / shape);
        }
        double d = shape - 1.0 / 3.0;
        double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            double u = uniform_pos();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
        }
    }

    // Density ~ x^{-shape-1} exp(-rate/x); mean rate/(shape-1).
    double inv_gamma(double shape, double rate) {
        if (!(rate > 0.0)) throw DataError("inv_gamma: rate must be > 0");
        return rate / gamma(shape, 1.0);
    }

    // Inverse Gaussian with location mu and scale rho (Michael, Schucany
    // and Haas transformation with the randomized root choice).
    double inverse_gaussian(double mu, double rho) {
        if (!(mu > 0.0) || !(rho > 0.0))
            throw DataError("inverse_gaussian: mu and rho must be > 0");
        double nu = normal();
        double y = nu * nu;
        double x = mu + mu * mu * y / (2.0 * rho) -
                   mu / (2.0 * rho) * std::sqrt(4.0 * mu * rho * y + mu * mu * y * y);
        if (!(x > 0.0)) x = std::numeric_limits<double>::min();
        double u = uniform();
        if (u <= mu / (mu + x)) return x;
        return mu * mu / x;
    }

  private:
    Rng(std::uint64_t derived, int) : engine_(derived), root_(derived) {}

    std::mt19937_64 engine_;
    std::uint64_t root_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace gdp
