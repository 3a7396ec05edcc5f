#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "gdp/rng.hpp"

using namespace gdp;

namespace {

struct Moments {
    double mean, var;
};

template <typename F>
Moments sample_moments(F&& draw, int n) {
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        double x = draw();
        s += x;
        s2 += x * x;
    }
    double mean = s / n;
    return {mean, s2 / n - mean * mean};
}

}  // namespace

TEST_CASE("same seed reproduces the exact stream") {
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i) REQUIRE(a.uniform() == b.uniform());
    Rng c(42), d(43);
    bool differ = false;
    for (int i = 0; i < 10; ++i) differ = differ || (c.uniform() != d.uniform());
    REQUIRE(differ);
}

TEST_CASE("child streams are deterministic and distinct") {
    Rng root(7);
    Rng a = root.child("gibbs", 0);
    Rng b = Rng(7).child("gibbs", 0);
    REQUIRE(a.uniform() == b.uniform());
    Rng c = Rng(7).child("gibbs", 1);
    Rng e = Rng(7).child("model", 0);
    REQUIRE(Rng(7).child("gibbs", 0).uniform() != c.uniform());
    REQUIRE(Rng(7).child("gibbs", 0).uniform() != e.uniform());
}

TEST_CASE("normal moments") {
    Rng rng(1);
    const int n = 100000;
    auto m = sample_moments([&] { return rng.normal(); }, n);
    REQUIRE(std::abs(m.mean) < 3.0 / std::sqrt(static_cast<double>(n)));
    REQUIRE(m.var == Catch::Approx(1.0).margin(0.02));
}

TEST_CASE("exponential moments") {
    Rng rng(2);
    const int n = 100000;
    auto m = sample_moments([&] { return rng.exponential(2.0); }, n);
    // mean 1/2, var 1/4
    REQUIRE(std::abs(m.mean - 0.5) < 3.0 * 0.5 / std::sqrt(static_cast<double>(n)));
    REQUIRE(m.var == Catch::Approx(0.25).epsilon(0.05));
}

TEST_CASE("gamma moments across shape regimes") {
    const int n = 100000;
    for (double shape : {0.5, 1.0, 2.5, 8.0}) {
        for (double rate : {0.5, 3.0}) {
            Rng rng(100 + static_cast<std::uint64_t>(10 * shape + rate));
            auto m = sample_moments([&] { return rng.gamma(shape, rate); }, n);
            double mean = shape / rate, var = shape / (rate * rate);
            REQUIRE(std::abs(m.mean - mean) < 3.0 * std::sqrt(var / n));
            REQUIRE(m.var == Catch::Approx(var).epsilon(0.06));
        }
    }
}

TEST_CASE("inverse gamma mean matches rate/(shape-1)") {
    Rng rng(5);
    const int n = 100000;
    double shape = 5.0, rate = 8.0;
    auto m = sample_moments([&] { return rng.inv_gamma(shape, rate); }, n);
    double mean = rate / (shape - 1.0);
    double var = rate * rate / ((shape - 1.0) * (shape - 1.0) * (shape - 2.0));
    REQUIRE(std::abs(m.mean - mean) < 3.0 * std::sqrt(var / n));
}

TEST_CASE("inverse Gaussian moments and support") {
    Rng rng(6);
    const int n = 100000;
    double mu = 2.0, rho = 4.0;
    std::vector<double> draws(n);
    for (auto& d : draws) d = rng.inverse_gaussian(mu, rho);
    double s = 0.0;
    for (double d : draws) {
        REQUIRE(d > 0.0);
        s += d;
    }
    double mean = s / n;
    double var_theory = mu * mu * mu / rho;  // = 2
    REQUIRE(std::abs(mean - mu) < 3.0 * std::sqrt(var_theory / n));
    double ss = 0.0;
    for (double d : draws) ss += (d - mean) * (d - mean);
    REQUIRE(ss / n == Catch::Approx(var_theory).epsilon(0.05));
}

TEST_CASE("sampler parameter validation") {
    Rng rng(9);
    REQUIRE_THROWS_AS(rng.exponential(0.0), DataError);
    REQUIRE_THROWS_AS(rng.gamma(-1.0, 1.0), DataError);
    REQUIRE_THROWS_AS(rng.inverse_gaussian(0.0, 1.0), DataError);
}
