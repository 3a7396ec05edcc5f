#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "gdp/errors.hpp"
#include "gdp/hyper.hpp"
#include "gdp/rng.hpp"
#include "gdp/special.hpp"

namespace gdp {

// One draw from the Normal-Exponential-Gamma hierarchy whose theta-marginal
// is the generalized double Pareto.
struct MixtureDraw {
    double theta;
    double tau;
    double lambda;
};

// f(theta) = (1/2xi) (1 + |theta|/(alpha xi))^-(alpha+1), xi = eta/alpha.
inline double gdp_pdf(double theta, const GdpHyper& h) {
    return 0.5 * h.alpha / h.eta * std::pow(1.0 + std::abs(theta) / h.eta, -(h.alpha + 1.0));
}

inline double gdp_cdf(double theta, const GdpHyper& h) {
    double tail = 0.5 * std::pow(1.0 + std::abs(theta) / h.eta, -h.alpha);
    return theta >= 0.0 ? 1.0 - tail : tail;
}

inline double gdp_quantile(double u, const GdpHyper& h) {
    if (!(u > 0.0 && u < 1.0)) throw DataError("gdp_quantile: u must lie in (0,1)");
    if (u >= 0.5) return h.eta * (std::pow(2.0 * (1.0 - u), -1.0 / h.alpha) - 1.0);
    return -h.eta * (std::pow(2.0 * u, -1.0 / h.alpha) - 1.0);
}

struct GdpMoments {
    std::optional<double> mean;
    std::optional<double> variance;
};

// Mean exists for alpha > 1, variance 2 xi^2 alpha^2 / ((alpha-1)(alpha-2))
// for alpha > 2. Nonexistent moments come back empty, never as NaN.
inline GdpMoments gdp_moments(const GdpHyper& h) {
    GdpMoments m;
    if (h.alpha > 1.0) m.mean = 0.0;
    if (h.alpha > 2.0) m.variance = 2.0 * h.eta * h.eta / ((h.alpha - 1.0) * (h.alpha - 2.0));
    return m;
}

// Inverse-CDF sampling; exact, no rejection step to tune.
inline std::vector<double> gdp_sample_direct(const GdpHyper& h, std::size_t n, Rng& rng) {
    std::vector<double> out(n);
    for (auto& v : out) v = gdp_quantile(rng.uniform_pos(), h);
    return out;
}

// theta ~ N(0,tau), tau ~ Exp(lambda^2/2), lambda ~ Ga(alpha, eta); the
// marginal law of theta is GDP(xi = eta/alpha, alpha).
inline std::vector<MixtureDraw> gdp_sample_hierarchical(const GdpHyper& h, std::size_t n, Rng& rng) {
    std::vector<MixtureDraw> out(n);
    for (auto& d : out) {
        d.lambda = rng.gamma(h.alpha, h.eta);
        d.tau = rng.exponential(0.5 * d.lambda * d.lambda);
        d.theta = std::sqrt(d.tau) * rng.normal();
    }
    return out;
}

namespace detail {

// Adaptive Simpson on [a,b] with absolute tolerance.
template <typename F>
double simpson_rec(const F& f, double a, double b, double fa, double fm, double fb,
                   double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) < 15.0 * tol) return left + right + delta / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <typename F>
double adaptive_simpson(const F& f, double a, double b, double tol) {
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 55);
}

// log pi(kappa | alpha, eta) through the lambda-mixture integral
//   pi(kappa) = eta^alpha / (2 kappa^2 Gamma(alpha)) *
//               int_0^inf l^{alpha+1} exp(-s l^2 - eta l) dl,  s = (1-kappa)/(2 kappa).
// Evaluated in log space around the integrand peak; stable for any argument,
// in particular where the closed form loses all precision to cancellation.
inline double log_kappa_pdf_integral(double kappa, double alpha, double eta) {
    double s = (1.0 - kappa) / (2.0 * kappa);
    double ap1 = alpha + 1.0;
    double lstar = s > 0.0 ? (-eta + std::sqrt(eta * eta + 8.0 * s * ap1)) / (4.0 * s)
                           : ap1 / eta;
    auto logg = [&](double l) { return ap1 * std::log(l) - s * l * l - eta * l; };
    double gs = logg(lstar);
    auto f = [&](double l) { return l > 0.0 ? std::exp(logg(l) - gs) : 0.0; };

    // bracket where the integrand falls below e^-45 of the peak
    double lo = 0.0, hi = lstar;
    {
        double a = lstar * 1e-18, b = lstar;
        if (logg(a) - gs < -45.0) {
            for (int i = 0; i < 200; ++i) {
                double m = 0.5 * (a + b);
                (logg(m) - gs < -45.0 ? a : b) = m;
            }
            lo = a;
        }
        double step = lstar + 1.0;
        b = lstar + step;
        while (logg(b) - gs > -45.0) b += step *= 2.0;
        a = lstar;
        for (int i = 0; i < 200; ++i) {
            double m = 0.5 * (a + b);
            (logg(m) - gs > -45.0 ? a : b) = m;
        }
        hi = b;
    }
    double I = adaptive_simpson(f, lo, hi, 1e-13 * std::max(1.0, hi - lo));
    return alpha * std::log(eta) - std::log(2.0) - 2.0 * std::log(kappa) -
           std::lgamma(alpha) + gs + std::log(I);
}

}  // namespace detail

// Density of the shrinkage factor kappa = 1/(1+tau) implied by the standard
// double Pareto (alpha = eta = 1), written with the scaled complementary
// error function so the bracket stays finite up to kappa -> 1.
inline double kappa_pdf_standard(double kappa) {
    if (!(kappa > 0.0 && kappa < 1.0)) throw DataError("kappa_pdf_standard: kappa must lie in (0,1)");
    double y = kappa / (2.0 * (1.0 - kappa));
    double bracket = 1.7724538509055160273 * erfcx(std::sqrt(y)) /
                         std::sqrt(2.0 * kappa * (1.0 - kappa)) -
                     1.0;
    return bracket / (2.0 * (1.0 - kappa) * (1.0 - kappa));
}

// Density of kappa for general (alpha, eta). The closed form (a difference
// of two 1F1 terms) is used where it is well conditioned; its two terms
// agree to leading order as the argument x = eta^2 kappa / (2(1-kappa))
// grows, so past x = 6 the evaluation switches to the log-scaled mixture
// integral, which carries full double precision for every argument.
inline double kappa_pdf_general(double kappa, const GdpHyper& h) {
    if (!(kappa > 0.0 && kappa < 1.0)) throw DataError("kappa_pdf_general: kappa must lie in (0,1)");
    double a = h.alpha, e = h.eta;
    double x = e * e * kappa / (2.0 * (1.0 - kappa));
    if (x <= 6.0 && a < 60.0) {
        double pre = std::pow(2.0, 0.5 * a - 1.0) * std::pow(e, a) *
                     std::pow(kappa, 0.5 * (a - 1.0)) *
                     std::pow(1.0 - kappa, -0.5 * (a + 3.0)) / std::tgamma(a);
        double t1 = std::sqrt(1.0 / kappa - 1.0) * std::tgamma(0.5 * a + 1.0) *
                    hyp1f1(0.5 * a + 1.0, 0.5, x);
        double t2 = std::sqrt(2.0) * e * std::tgamma(0.5 * (a + 3.0)) *
                    hyp1f1(0.5 * (a + 3.0), 1.5, x);
        return pre * (t1 - t2);
    }
    return std::exp(detail::log_kappa_pdf_integral(kappa, a, e));
}

}  // namespace gdp
