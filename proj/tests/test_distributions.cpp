#include <catch2/catch_amalgamated.hpp>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <algorithm>
#include <cmath>
#include <vector>

#include "gdp/distributions.hpp"
#include "gdp/rng.hpp"

using namespace gdp;

namespace {

// exact one-sample Kolmogorov distance against an analytic CDF
template <typename Cdf>
double ks_distance(std::vector<double> draws, Cdf&& cdf) {
    std::sort(draws.begin(), draws.end());
    double n = static_cast<double>(draws.size());
    double d = 0.0;
    for (std::size_t i = 0; i < draws.size(); ++i) {
        double f = cdf(draws[i]);
        d = std::max(d, std::abs((i + 1) / n - f));
        d = std::max(d, std::abs(i / n - f));
    }
    return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / a.size() -
                                 static_cast<double>(j) / b.size()));
    }
    return d;
}

// Kolmogorov distance of kappa draws against a density on (0,1), computed in
// sqrt(kappa) coordinates where the density has no endpoint singularity; the
// sup distance is invariant under the monotone change of variable.
template <typename Pdf>
double ks_kappa(std::vector<double> kappas, Pdf&& pdf, int grid = 4000) {
    std::vector<double> t(kappas.size());
    std::transform(kappas.begin(), kappas.end(), t.begin(),
                   [](double k) { return std::sqrt(k); });
    std::sort(t.begin(), t.end());
    auto pdf_t = [&](double v) { return v > 0.0 && v < 1.0 ? pdf(v * v) * 2.0 * v : 0.0; };
    double d = 0.0, cum = 0.0;
    double h = 1.0 / grid;
    for (int g = 1; g <= grid; ++g) {
        double lo = (g - 1) * h, hi = g * h;
        cum += h / 6.0 * (pdf_t(lo) + 4.0 * pdf_t(0.5 * (lo + hi)) + pdf_t(hi));
        double ecdf = static_cast<double>(std::upper_bound(t.begin(), t.end(), hi) - t.begin()) /
                      static_cast<double>(t.size());
        d = std::max(d, std::abs(ecdf - cum));
    }
    return d;
}

}  // namespace

TEST_CASE("gdp_pdf closed-form values") {
    REQUIRE(gdp_pdf(0.0, GdpHyper::from_scale(1.0, 1.0)) == 0.5);
    REQUIRE(gdp_pdf(1.0, GdpHyper::from_scale(1.0, 1.0)) == Catch::Approx(0.125).epsilon(1e-15));
    REQUIRE(gdp_pdf(2.0, GdpHyper::from_scale(1.0, 0.5)) == Catch::Approx(0.04).epsilon(1e-15));
}

TEST_CASE("gdp_pdf symmetry and monotonicity") {
    GdpHyper h(2.0, 3.0);
    double prev = gdp_pdf(0.0, h);
    for (double t = 0.1; t < 25.0; t += 0.1) {
        REQUIRE(gdp_pdf(t, h) == gdp_pdf(-t, h));
        REQUIRE(gdp_pdf(t, h) <= prev);
        prev = gdp_pdf(t, h);
    }
}

TEST_CASE("gdp_pdf integrates to one over the hyper grid") {
    boost::math::quadrature::exp_sinh<double> integrator;
    for (double alpha : {0.5, 1.0, 2.0, 3.0, 5.0}) {
        for (double eta : {0.5, 1.0, 2.0, 5.0}) {
            GdpHyper h(alpha, eta);
            double half = integrator.integrate([&](double t) { return gdp_pdf(t, h); }, 1e-10);
            REQUIRE(2.0 * half == Catch::Approx(1.0).margin(1e-8));
        }
    }
}

TEST_CASE("gdp_cdf values and limits") {
    GdpHyper h(1.0, 1.0);
    REQUIRE(gdp_cdf(0.0, h) == 0.5);
    REQUIRE(gdp_cdf(0.0, GdpHyper(3.0, 0.7)) == 0.5);
    REQUIRE(gdp_cdf(1e12, h) == Catch::Approx(1.0).margin(1e-11));
    REQUIRE(gdp_cdf(-1e12, h) == Catch::Approx(0.0).margin(1e-11));
    double prev = -1.0;
    for (double t = -30.0; t <= 30.0; t += 0.25) {
        double f = gdp_cdf(t, h);
        REQUIRE(f >= prev);
        prev = f;
    }
}

TEST_CASE("gdp_cdf matches quadrature of the density") {
    GdpHyper h(1.0, 1.0);
    boost::math::quadrature::exp_sinh<double> integrator;
    // \int_{-inf}^{1} f = 1/2 + \int_0^1 f
    boost::math::quadrature::tanh_sinh<double> finite;
    double head = finite.integrate([&](double t) { return gdp_pdf(t, h); }, 0.0, 1.0);
    REQUIRE(gdp_cdf(1.0, h) == Catch::Approx(0.5 + head).epsilon(1e-12));
    REQUIRE(gdp_cdf(1.0, h) == Catch::Approx(0.75).epsilon(1e-14));
}

TEST_CASE("gdp_quantile inverts the CDF") {
    GdpHyper h(1.0, 1.0);
    REQUIRE(gdp_quantile(0.5, h) == 0.0);

    // independent inversion by bisection
    auto invert = [&](double u) {
        double lo = -1.0, hi = 1.0;
        while (gdp_cdf(lo, h) > u) lo *= 2.0;
        while (gdp_cdf(hi, h) < u) hi *= 2.0;
        for (int i = 0; i < 200; ++i) {
            double mid = 0.5 * (lo + hi);
            (gdp_cdf(mid, h) < u ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };
    REQUIRE(gdp_quantile(0.75, h) == Catch::Approx(invert(0.75)).margin(1e-10));
    REQUIRE(gdp_quantile(0.75, h) == Catch::Approx(1.0).margin(1e-12));

    GdpHyper h2(2.5, 0.8);
    for (int k = 1; k <= 99; ++k) {
        double u = k / 100.0;
        REQUIRE(std::abs(gdp_cdf(gdp_quantile(u, h2), h2) - u) < 1e-12);
    }
    REQUIRE_THROWS_AS(gdp_quantile(0.0, h), DataError);
    REQUIRE_THROWS_AS(gdp_quantile(1.0, h), DataError);
}

TEST_CASE("gdp_moments") {
    auto m1 = gdp_moments(GdpHyper::from_scale(3.0, 1.0));
    REQUIRE(m1.mean.has_value());
    REQUIRE(*m1.mean == 0.0);
    REQUIRE(m1.variance.has_value());
    REQUIRE(*m1.variance == Catch::Approx(9.0).epsilon(1e-15));

    auto m2 = gdp_moments(GdpHyper::from_scale(1.0, 1.0));
    REQUIRE_FALSE(m2.mean.has_value());
    REQUIRE_FALSE(m2.variance.has_value());

    auto m3 = gdp_moments(GdpHyper::from_scale(4.0, 2.0));
    REQUIRE(*m3.variance == Catch::Approx(64.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("hyper construction rejects the improper corner") {
    REQUIRE_THROWS_AS(GdpHyper(0.0, 0.0), DataError);
    REQUIRE_THROWS_AS(GdpHyper(0.0, 1.0), DataError);
    REQUIRE_THROWS_AS(GdpHyper(1.0, 0.0), DataError);
    REQUIRE_THROWS_AS(GdpHyper(-1.0, 1.0), DataError);
    GdpHyper h(2.0, 3.0);
    REQUIRE(h.xi() == h.eta / h.alpha);
}

TEST_CASE("direct sampler matches the analytic CDF") {
    GdpHyper h(1.0, 1.0);
    Rng rng(11);
    auto draws = gdp_sample_direct(h, 100000, rng);
    REQUIRE(ks_distance(draws, [&](double t) { return gdp_cdf(t, h); }) < 0.01);

    std::vector<double> sorted = draws;
    std::sort(sorted.begin(), sorted.end());
    REQUIRE(std::abs(sorted[sorted.size() / 2]) < 0.05);

    Rng r1(99), r2(99);
    auto a = gdp_sample_direct(h, 50, r1);
    auto b = gdp_sample_direct(h, 50, r2);
    REQUIRE(a == b);
}

TEST_CASE("hierarchical sampler reproduces the GDP marginal") {
    GdpHyper h(1.0, 1.0);
    Rng rng(12);
    auto draws = gdp_sample_hierarchical(h, 100000, rng);
    std::vector<double> thetas(draws.size());
    for (std::size_t i = 0; i < draws.size(); ++i) {
        REQUIRE(draws[i].tau > 0.0);
        REQUIRE(draws[i].lambda > 0.0);
        thetas[i] = draws[i].theta;
    }
    REQUIRE(ks_distance(thetas, [&](double t) { return gdp_cdf(t, h); }) < 0.01);
}

TEST_CASE("hierarchical lambda marginal has the Gamma mean") {
    GdpHyper h(2.0, 1.0);
    Rng rng(13);
    auto draws = gdp_sample_hierarchical(h, 100000, rng);
    double s = 0.0;
    for (const auto& d : draws) s += d.lambda;
    double mean = s / draws.size();
    double se = std::sqrt(2.0 / 1.0 / draws.size());  // Var Ga(2,1) = 2
    REQUIRE(std::abs(mean - 2.0) < 3.0 * se);
}

TEST_CASE("direct and hierarchical samplers agree in distribution") {
    GdpHyper h(1.0, 1.0);
    Rng r1(21), r2(22);
    auto direct = gdp_sample_direct(h, 100000, r1);
    auto hier = gdp_sample_hierarchical(h, 100000, r2);
    std::vector<double> thetas(hier.size());
    for (std::size_t i = 0; i < hier.size(); ++i) thetas[i] = hier[i].theta;
    REQUIRE(ks_two_sample(direct, thetas) < 0.015);
}

TEST_CASE("Laplace limit of the family") {
    GdpHyper h(1e4, 1e4);
    double sup = 0.0;
    for (double t = -10.0; t <= 10.0; t += 0.001)
        sup = std::max(sup, std::abs(gdp_pdf(t, h) - 0.5 * std::exp(-std::abs(t))));
    REQUIRE(sup < 1e-3);
}

TEST_CASE("standard kappa density: normalization, frozen value, domain") {
    boost::math::quadrature::tanh_sinh<double> integrator;
    double I = integrator.integrate([](double k) { return kappa_pdf_standard(k); }, 0.0, 1.0);
    REQUIRE(I == Catch::Approx(1.0).margin(1e-6));
    // high-precision reference for the closed form at kappa = 1/2
    REQUIRE(kappa_pdf_standard(0.5) == Catch::Approx(0.6227181696751938861755).epsilon(1e-13));
    REQUIRE_THROWS_AS(kappa_pdf_standard(0.0), DataError);
    REQUIRE_THROWS_AS(kappa_pdf_standard(1.0), DataError);
}

TEST_CASE("kappa of hierarchical draws follows the standard kappa density") {
    GdpHyper h(1.0, 1.0);
    Rng rng(31);
    auto draws = gdp_sample_hierarchical(h, 100000, rng);
    std::vector<double> kappas(draws.size());
    for (std::size_t i = 0; i < draws.size(); ++i) kappas[i] = 1.0 / (1.0 + draws[i].tau);
    REQUIRE(ks_kappa(kappas, [](double k) { return kappa_pdf_standard(k); }) < 0.015);
}

TEST_CASE("general kappa density specializes to the standard form") {
    GdpHyper h(1.0, 1.0);
    for (int i = 1; i <= 99; ++i) {
        double k = i / 100.0;
        REQUIRE(kappa_pdf_general(k, h) ==
                Catch::Approx(kappa_pdf_standard(k)).margin(1e-8).epsilon(1e-8));
    }
    REQUIRE_THROWS_AS(kappa_pdf_general(0.0, h), DataError);
    REQUIRE_THROWS_AS(kappa_pdf_general(1.0, h), DataError);
}

TEST_CASE("general kappa density integrates to one") {
    boost::math::quadrature::tanh_sinh<double> integrator;
    for (auto [alpha, eta] : {std::pair{1.0, 0.5}, {2.0, 1.0}, {3.0, 1.0}}) {
        GdpHyper h(alpha, eta);
        double I = integrator.integrate([&](double k) { return kappa_pdf_general(k, h); }, 0.0, 1.0);
        REQUIRE(I == Catch::Approx(1.0).margin(1e-5));
    }
}

TEST_CASE("kappa histogram from the hierarchy matches the general density") {
    GdpHyper h(3.0, 1.0);
    Rng rng(32);
    auto draws = gdp_sample_hierarchical(h, 100000, rng);
    std::vector<double> kappas(draws.size());
    for (std::size_t i = 0; i < draws.size(); ++i) kappas[i] = 1.0 / (1.0 + draws[i].tau);
    REQUIRE(ks_kappa(kappas, [&](double k) { return kappa_pdf_general(k, h); }) < 0.015);
}
