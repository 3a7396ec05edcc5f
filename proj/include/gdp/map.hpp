#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "gdp/errors.hpp"
#include "gdp/model.hpp"

namespace gdp {

// Log penalty induced by the GDP prior: p(|beta|) = (alpha+1) log(sigma eta + |beta|).
inline double penalty(double beta_abs, double alpha, double eta, double sigma) {
    if (beta_abs < 0.0) throw DataError("penalty: |beta| must be >= 0");
    return (alpha + 1.0) * std::log(sigma * eta + beta_abs);
}

// The penalized least-squares estimator maps a neighborhood of zero exactly
// to zero iff eta < 2 sqrt(alpha+1); the boundary itself does not threshold.
inline bool is_thresholding_rule(double alpha, double eta) {
    return eta < 2.0 * std::sqrt(alpha + 1.0);
}

// Scalar objective of the component-wise penalized problem,
// g(b) = (bhat-b)^2/2 + sigma^2 (alpha+1) log(sigma eta + |b|).
inline double pls_objective(double b, double beta_hat, double sigma, double alpha, double eta) {
    double r = beta_hat - b;
    return 0.5 * r * r + sigma * sigma * penalty(std::abs(b), alpha, eta, sigma);
}

// Global minimizer of the scalar penalized problem for arbitrary (alpha, eta).
// The first-order condition on b > 0 is the quadratic
//   b^2 + (sigma eta - t) b + sigma^2(alpha+1) - t sigma eta = 0,  t = |beta_hat|,
// so the candidates are exactly {0, larger root}; the smaller objective wins,
// with ties resolved to zero.
inline double threshold_general(double beta_hat, double sigma, double alpha, double eta) {
    if (!(sigma > 0.0)) throw DataError("threshold_general: sigma must be > 0");
    if (beta_hat == 0.0) return 0.0;
    double t = std::abs(beta_hat);
    double sg = beta_hat > 0.0 ? 1.0 : -1.0;
    double se = sigma * eta;
    double disc = (t + se) * (t + se) - 4.0 * sigma * sigma * (alpha + 1.0);
    if (disc < 0.0) return 0.0;
    double root = 0.5 * ((t - se) + std::sqrt(disc));
    if (root <= 0.0) return 0.0;
    double g_root = pls_objective(root, t, sigma, alpha, eta);
    double g_zero = pls_objective(0.0, t, sigma, alpha, eta);
    return g_root < g_zero ? sg * root : 0.0;
}

// Closed form on the continuity manifold eta = sqrt(alpha+1): zero for
// |beta_hat| <= sigma sqrt(alpha+1), otherwise the explicit root; odd in
// beta_hat.
inline double threshold_orthogonal(double beta_hat, double sigma, double alpha) {
    if (!(sigma > 0.0) || !(alpha > 0.0))
        throw DataError("threshold_orthogonal: sigma and alpha must be > 0");
    double t = std::abs(beta_hat);
    double s = sigma * std::sqrt(alpha + 1.0);
    if (t <= s) return 0.0;
    double sg = beta_hat > 0.0 ? 1.0 : -1.0;
    return sg * 0.5 * (t - s + std::sqrt(t * t + 2.0 * t * s - 3.0 * s * s));
}

// Positive root of a sigma^2 + b sigma + c = 0 (a < 0, b >= 0, c > 0),
// returned as sigma^2: ((b + sqrt(b^2 - 4ac)) / (2|a|))^2. This is the
// stationary point of the Laplace-representation M-step in sigma; all terms
// are positive, so there is no cancellation.
inline double sigma2_root(double a, double b, double c) {
    if (!(a < 0.0)) throw DataError("sigma2_root: a must be < 0");
    if (!(b >= 0.0)) throw DataError("sigma2_root: b must be >= 0");
    if (!(c > 0.0)) throw DataError("sigma2_root: c must be > 0");
    double sigma = (b + std::sqrt(b * b - 4.0 * a * c)) / (-2.0 * a);
    return sigma * sigma;
}

namespace detail {

// Coordinate descent for  min ||y - X b||^2 + lam * sum_j w_j |b_j|
// run to an exact KKT certificate. Weights may be +inf (coordinate pinned
// at zero, the adaptive-lasso convention).
inline Eigen::VectorXd weighted_lasso_gram(const GramProblem& pr, const Eigen::VectorXd& w,
                                           double lam, const Eigen::VectorXd* warm = nullptr) {
    if (w.size() != pr.p) throw DataError("weighted_lasso: weight length must equal p");
    for (int j = 0; j < pr.p; ++j)
        if (std::isnan(w[j]) || w[j] < 0.0) throw DataError("weighted_lasso: weights must be >= 0");
    if (!(lam >= 0.0)) throw DataError("weighted_lasso: lam must be >= 0");

    Eigen::VectorXd beta = warm ? *warm : Eigen::VectorXd::Zero(pr.p);
    for (int j = 0; j < pr.p; ++j)
        if (std::isinf(w[j])) beta[j] = 0.0;
    Eigen::VectorXd q = pr.G * beta;  // maintained as G * beta

    const double ktol = 1e-10 * std::max(1.0, 2.0 * pr.c.cwiseAbs().maxCoeff());
    const int max_sweeps = 200000;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double max_delta = 0.0;
        for (int j = 0; j < pr.p; ++j) {
            if (std::isinf(w[j])) continue;
            double gjj = pr.G(j, j);
            if (!(gjj > 0.0)) {
                beta[j] = 0.0;
                continue;
            }
            double rho = pr.c[j] - q[j] + gjj * beta[j];
            double thr = 0.5 * lam * w[j];
            double bnew;
            if (rho > thr)
                bnew = (rho - thr) / gjj;
            else if (rho < -thr)
                bnew = (rho + thr) / gjj;
            else
                bnew = 0.0;
            double delta = bnew - beta[j];
            if (delta != 0.0) {
                q += pr.G.col(j) * delta;
                beta[j] = bnew;
                max_delta = std::max(max_delta, std::abs(delta));
            }
        }
        if (max_delta < 1e-15 * (1.0 + beta.cwiseAbs().maxCoeff())) {
            bool ok = true;
            for (int j = 0; j < pr.p && ok; ++j) {
                if (std::isinf(w[j])) continue;
                double grad = 2.0 * (pr.c[j] - q[j]);  // -d RSS / d b_j
                if (beta[j] != 0.0)
                    ok = std::abs(grad - lam * w[j] * (beta[j] > 0.0 ? 1.0 : -1.0)) <= ktol;
                else
                    ok = std::abs(grad) <= lam * w[j] + ktol;
            }
            if (ok) return beta;
        }
    }
    throw NumericError("weighted_lasso: coordinate descent exceeded its cycle limit");
}

}  // namespace detail

inline Eigen::VectorXd weighted_lasso(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                      const Eigen::VectorXd& weights, double lam) {
    Dataset d{y, X, {}};
    d.validate();
    detail::GramProblem pr(d);
    return detail::weighted_lasso_gram(pr, weights, lam);
}

enum class MixtureRep { normal, laplace };

struct MapConfig {
    double alpha = 1.0;
    double eta = 1.0;
    double tol = 1e-6;        // on ||beta_{k+1} - beta_k||_2
    int max_iters = 100000;
    double zero_eps = 1e-8;
    MixtureRep representation = MixtureRep::normal;
    std::optional<double> sigma2_fixed;  // fit with sigma^2 held fixed

    void validate() const {
        if (!(alpha > 0.0) || !(eta > 0.0)) throw DataError("MapConfig: alpha and eta must be > 0");
        if (!(tol > 0.0)) throw DataError("MapConfig: tol must be > 0");
        if (!(zero_eps > 0.0)) throw DataError("MapConfig: zero_eps must be > 0");
        if (max_iters < 1) throw DataError("MapConfig: max_iters must be >= 1");
        if (sigma2_fixed && !(*sigma2_fixed > 0.0))
            throw DataError("MapConfig: fixed sigma^2 must be > 0");
    }
};

struct MapResult {
    Eigen::VectorXd beta;
    double sigma2 = 0.0;
    std::vector<int> support;
    int iterations = 0;
    bool converged = false;
};

// Exact negative log posterior (up to an additive constant) targeted by both
// EM variants: ((n+2-alpha p)/2) log s2 + RSS/(2 s2) + (alpha+1) sum log(sigma eta + |b_j|).
inline double map_objective(const Eigen::VectorXd& beta, double sigma2, const Dataset& d,
                            double alpha, double eta) {
    double rss = (d.y - d.X * beta).squaredNorm();
    double sigma = std::sqrt(sigma2);
    double pen = 0.0;
    for (int j = 0; j < beta.size(); ++j) pen += std::log(sigma * eta + std::abs(beta[j]));
    return 0.5 * (d.n() + 2.0 - alpha * d.p()) * std::log(sigma2) + rss / (2.0 * sigma2) +
           (alpha + 1.0) * pen;
}

namespace detail {

inline void finalize_support(MapResult& r, double zero_eps) {
    r.support.clear();
    for (int j = 0; j < r.beta.size(); ++j)
        if (std::abs(r.beta[j]) > zero_eps) r.support.push_back(j);
}

// Ridge initializer with a tiny trace-scaled penalty so n <= p still works.
inline Eigen::VectorXd ridge_init(const GramProblem& pr) {
    double delta = 1e-6 * pr.G.trace() / pr.p;
    Eigen::MatrixXd A = pr.G + delta * Eigen::MatrixXd::Identity(pr.p, pr.p);
    return A.llt().solve(pr.c);
}

inline double init_sigma2(const GramProblem& pr, const Eigen::VectorXd& beta0,
                          const MapConfig& cfg) {
    if (cfg.sigma2_fixed) return *cfg.sigma2_fixed;
    double s2 = pr.rss(beta0) / pr.n;
    if (!(s2 > 0.0))
        throw DataError("em: initial residual variance is zero (degenerate response)");
    return s2;
}

}  // namespace detail

// EM under the normal mixture representation. E-step weights
// d_j = (alpha+1) s2 / (|b_j| (|b_j| + sigma eta)) blow up at zero, so a
// coordinate that falls below zero_eps is frozen at exact zero, but only
// once the zero-subgradient condition |x_j'(y-Xb)| <= sigma (alpha+1)/eta
// certifies that zero is locally optimal there; the certificate is
// re-checked when the iteration settles and a violated coordinate re-enters.
inline MapResult em_normal(const Dataset& d, const MapConfig& cfg) {
    d.validate();
    cfg.validate();
    detail::GramProblem pr(d);
    const int n = pr.n, p = pr.p;
    const double alpha = cfg.alpha, eta = cfg.eta;

    MapResult res;
    res.beta = detail::ridge_init(pr);
    double s2 = detail::init_sigma2(pr, res.beta, cfg);
    std::vector<bool> frozen(p, false);

    for (res.iterations = 0; res.iterations < cfg.max_iters;) {
        ++res.iterations;
        double sigma = std::sqrt(s2);
        double zero_bound = sigma * (alpha + 1.0) / eta;

        Eigen::VectorXd q = pr.G * res.beta;
        std::vector<int> active;
        Eigen::VectorXd dweight = Eigen::VectorXd::Zero(p);
        for (int j = 0; j < p; ++j) {
            if (frozen[j]) continue;
            double b = std::abs(res.beta[j]);
            if (b < cfg.zero_eps) {
                double partial = pr.c[j] - q[j] + pr.G(j, j) * res.beta[j];
                if (std::abs(partial) <= zero_bound) {
                    frozen[j] = true;
                    res.beta[j] = 0.0;
                    continue;
                }
                b = cfg.zero_eps;
            }
            dweight[j] = (alpha + 1.0) * s2 / (b * (b + sigma * eta));
            active.push_back(j);
        }

        Eigen::VectorXd beta_new = Eigen::VectorXd::Zero(p);
        if (!active.empty()) {
            int m = static_cast<int>(active.size());
            Eigen::MatrixXd A(m, m);
            Eigen::VectorXd ca(m);
            for (int r = 0; r < m; ++r) {
                for (int cidx = 0; cidx < m; ++cidx) A(r, cidx) = pr.G(active[r], active[cidx]);
                A(r, r) += dweight[active[r]];
                ca[r] = pr.c[active[r]];
            }
            Eigen::LLT<Eigen::MatrixXd> llt(A);
            if (llt.info() != Eigen::Success)
                throw NumericError("em_normal: normal-equations factorization failed");
            Eigen::VectorXd ba = llt.solve(ca);
            for (int r = 0; r < m; ++r) beta_new[active[r]] = ba[r];
        }

        double step = (beta_new - res.beta).norm();
        res.beta = beta_new;
        if (!cfg.sigma2_fixed) {
            double quad = 0.0;
            for (int j : active) quad += dweight[j] * res.beta[j] * res.beta[j];
            s2 = (pr.rss(res.beta) + quad) / (n + p + 2.0);
            if (!(s2 > 0.0)) throw DataError("em_normal: sigma^2 update collapsed to zero");
        }

        if (step < cfg.tol) {
            // settled; make sure no frozen coordinate wants back in
            Eigen::VectorXd qf = pr.G * res.beta;
            double bound = std::sqrt(s2) * (alpha + 1.0) / eta;
            bool reopened = false;
            for (int j = 0; j < p; ++j) {
                if (!frozen[j]) continue;
                if (std::abs(pr.c[j] - qf[j]) > bound * (1.0 + 1e-12)) {
                    frozen[j] = false;
                    reopened = true;
                }
            }
            if (!reopened) {
                res.converged = true;
                break;
            }
        }
    }
    res.sigma2 = s2;
    detail::finalize_support(res, cfg.zero_eps);
    return res;
}

// EM under the Laplace mixture representation: each M-step is the weighted
// l1 problem with per-coordinate weight (alpha+1)/(|b_j|/sigma + eta) at
// penalty level 2 sigma, solved exactly by coordinate descent, followed by
// the closed-form sigma update.
inline MapResult em_laplace(const Dataset& d, const MapConfig& cfg) {
    d.validate();
    cfg.validate();
    detail::GramProblem pr(d);
    const int n = pr.n, p = pr.p;
    const double alpha = cfg.alpha, eta = cfg.eta;

    MapResult res;
    res.beta = detail::ridge_init(pr);
    double s2 = detail::init_sigma2(pr, res.beta, cfg);

    for (res.iterations = 0; res.iterations < cfg.max_iters;) {
        ++res.iterations;
        double sigma = std::sqrt(s2);
        Eigen::VectorXd w(p);
        for (int j = 0; j < p; ++j)
            w[j] = (alpha + 1.0) / (std::abs(res.beta[j]) / sigma + eta);

        Eigen::VectorXd beta_new;
        try {
            beta_new = detail::weighted_lasso_gram(pr, w, 2.0 * sigma, &res.beta);
        } catch (const NumericError& err) {
            throw NumericError("em_laplace: inner solver failed at iteration " +
                               std::to_string(res.iterations) + ": " + err.what());
        }

        if (!cfg.sigma2_fixed) {
            double b = 0.0;
            for (int j = 0; j < p; ++j) b += w[j] * std::abs(beta_new[j]);
            double c = pr.rss(beta_new);
            if (c > 0.0)
                s2 = sigma2_root(-(n + p + 2.0), b, c);
            else
                throw DataError("em_laplace: residual sum of squares collapsed to zero");
        }

        double step = (beta_new - res.beta).norm();
        res.beta = beta_new;
        if (step < cfg.tol) {
            res.converged = true;
            break;
        }
    }
    res.sigma2 = s2;
    detail::finalize_support(res, cfg.zero_eps);
    return res;
}

// Single weighted-lasso pass from an initial estimate:
//   min ||y - X b||^2 + alpha_dag sum_j |b_j| / (|b0_j| + eta_dag).
// With no explicit b0 the least-squares fit is used, which needs n > p.
inline MapResult one_step(const Dataset& d, double alpha_dag, double eta_dag,
                          std::optional<Eigen::VectorXd> beta0 = std::nullopt) {
    d.validate();
    if (!(alpha_dag >= 0.0) || !(eta_dag >= 0.0))
        throw DataError("one_step: alpha_dag and eta_dag must be >= 0");
    detail::GramProblem pr(d);
    Eigen::VectorXd b0;
    if (beta0) {
        if (beta0->size() != pr.p) throw DataError("one_step: beta0 length must equal p");
        b0 = *beta0;
    } else {
        if (pr.n <= pr.p)
            throw UsageError("one_step: n <= p requires an explicit initial estimate");
        Eigen::LLT<Eigen::MatrixXd> llt(pr.G);
        if (llt.info() != Eigen::Success)
            throw NumericError("one_step: least-squares initializer is singular");
        b0 = llt.solve(pr.c);
    }
    Eigen::VectorXd w(pr.p);
    for (int j = 0; j < pr.p; ++j) {
        double denom = std::abs(b0[j]) + eta_dag;
        w[j] = denom > 0.0 ? 1.0 / denom : std::numeric_limits<double>::infinity();
    }
    MapResult res;
    res.beta = detail::weighted_lasso_gram(pr, w, alpha_dag);
    double rss = pr.rss(res.beta);
    if (!(rss > 0.0)) throw DataError("one_step: residual sum of squares is zero");
    res.sigma2 = rss / pr.n;
    res.iterations = 1;
    res.converged = true;
    detail::finalize_support(res, 1e-8);
    return res;
}

}  // namespace gdp
