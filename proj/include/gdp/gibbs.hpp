#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gdp/errors.hpp"
#include "gdp/model.hpp"
#include "gdp/rng.hpp"

namespace gdp {

enum class HyperMode { fixed, learn_alpha, learn_both };

struct GibbsConfig {
    int iters = 2000;
    int burn_in = 1000;
    int thin = 1;
    HyperMode hyper_mode = HyperMode::fixed;
    double alpha = 1.0;
    double eta = 1.0;
    int grid_size = 100;
    std::uint64_t seed = 0;

    int kept() const { return (iters - burn_in) / thin; }

    void validate() const {
        if (iters < 1) throw DataError("GibbsConfig: iters must be >= 1");
        if (burn_in < 0 || burn_in >= iters) throw DataError("GibbsConfig: need 0 <= burn_in < iters");
        if (thin < 1) throw DataError("GibbsConfig: thin must be >= 1");
        if (grid_size < 10) throw DataError("GibbsConfig: grid_size must be >= 10");
        if (!(alpha > 0.0) || !(eta > 0.0)) throw DataError("GibbsConfig: alpha and eta must be > 0");
    }
};

// Current position of one chain.
struct GibbsState {
    Eigen::VectorXd beta;
    Eigen::VectorXd tau;
    Eigen::VectorXd lambda;
    double sigma2 = 1.0;
    double alpha = 1.0;
    double eta = 1.0;

    void validate() const {
        if (!(sigma2 > 0.0)) throw DataError("GibbsState: sigma2 must be > 0");
        if ((tau.array() <= 0.0).any()) throw DataError("GibbsState: all tau must be > 0");
        if ((lambda.array() <= 0.0).any()) throw DataError("GibbsState: all lambda must be > 0");
    }
};

// Retained post-burn-in draws plus the configuration that produced them.
struct PosteriorDraws {
    Eigen::MatrixXd beta;    // kept x p
    Eigen::VectorXd sigma2;  // kept
    Eigen::VectorXd alpha;   // kept (constant under fixed hyper modes)
    Eigen::VectorXd eta;     // kept
    GibbsConfig config;
    bool standardized_input = true;
};

// |beta_j| floor inside the tau draw; the inverse-Gaussian location
// lambda sigma / |beta_j| diverges at zero.
inline constexpr double kBetaFloor = 1e-10;

namespace detail {

// beta | sigma^2, T, y  ~  N((X'X + T^-1)^-1 X'y, sigma^2 (X'X + T^-1)^-1),
// drawn through a Cholesky factor of the precision-shaped matrix, with a
// trace-scaled jitter escalation if heavy shrinkage has made T^-1
// ill-conditioned.
inline Eigen::VectorXd draw_beta_gram(const GramProblem& pr, const GibbsState& st, Rng& rng) {
    Eigen::MatrixXd A = pr.G;
    for (int j = 0; j < pr.p; ++j) A(j, j) += 1.0 / st.tau[j];
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success) {
        double scale = A.trace() / pr.p;
        for (double delta = 1e-10; delta <= 1.0000001e-6; delta *= 10.0) {
            Eigen::MatrixXd Aj = A + delta * scale * Eigen::MatrixXd::Identity(pr.p, pr.p);
            llt.compute(Aj);
            if (llt.info() == Eigen::Success) break;
        }
        if (llt.info() != Eigen::Success)
            throw NumericError("draw_beta: X'X + T^-1 factorization failed after jitter escalation");
    }
    Eigen::VectorXd mean = llt.solve(pr.c);
    Eigen::VectorXd z(pr.p);
    for (int j = 0; j < pr.p; ++j) z[j] = rng.normal();
    return mean + std::sqrt(st.sigma2) * llt.matrixU().solve(z);
}

inline double draw_sigma2_gram(const GramProblem& pr, const GibbsState& st, Rng& rng) {
    double quad = 0.0;
    for (int j = 0; j < pr.p; ++j) quad += st.beta[j] * st.beta[j] / st.tau[j];
    double rate = 0.5 * pr.rss(st.beta) + 0.5 * quad;
    if (!(rate > 0.0)) throw DataError("draw_sigma2: zero rate (degenerate y and beta)");
    return rng.inv_gamma(0.5 * (pr.n + pr.p), rate);
}

}  // namespace detail

inline Eigen::VectorXd draw_beta(const GibbsState& st, const Dataset& d, Rng& rng) {
    detail::GramProblem pr(d);
    return detail::draw_beta_gram(pr, st, rng);
}

inline double draw_sigma2(const GibbsState& st, const Dataset& d, Rng& rng) {
    detail::GramProblem pr(d);
    return detail::draw_sigma2_gram(pr, st, rng);
}

// lambda_j | beta_j, sigma^2  ~  Ga(alpha + 1, |beta_j|/sigma + eta)
inline double draw_lambda(const GibbsState& st, int j, Rng& rng) {
    return rng.gamma(st.alpha + 1.0, std::abs(st.beta[j]) / std::sqrt(st.sigma2) + st.eta);
}

// tau_j^-1 | beta_j, lambda_j, sigma^2  ~  Inv-Gauss(lambda_j sigma / |beta_j|, lambda_j^2);
// |beta_j| is floored at kBetaFloor.
inline double draw_tau_inv(const GibbsState& st, int j, Rng& rng) {
    double b = std::max(std::abs(st.beta[j]), kBetaFloor);
    double mu = st.lambda[j] * std::sqrt(st.sigma2) / b;
    return rng.inverse_gaussian(mu, st.lambda[j] * st.lambda[j]);
}

enum class GriddySide { alpha, eta };

// Grid values and normalized conditional weights for the embedded griddy
// step, computed in log space and max-subtracted before exponentiation.
inline std::pair<std::vector<double>, std::vector<double>> griddy_weights(GriddySide side,
                                                                          const GibbsState& st,
                                                                          int m) {
    if (m < 2) throw DataError("griddy_weights: need m >= 2");
    double sigma = std::sqrt(st.sigma2);
    const int p = static_cast<int>(st.beta.size());
    std::vector<double> grid(m), logw(m);
    double sum_alpha_side = 0.0;
    if (side == GriddySide::alpha)
        for (int j = 0; j < p; ++j)
            sum_alpha_side += std::log1p(std::abs(st.beta[j]) / (sigma * st.eta));
    for (int k = 0; k < m; ++k) {
        double g = (k + 0.5) / m;
        grid[k] = g;
        if (side == GriddySide::alpha) {
            // pi(a | beta, eta) ~ ((1-a)/a)^p prod_j (1 + |b_j|/(sigma eta))^(-1/a)
            logw[k] = p * std::log((1.0 - g) / g) - sum_alpha_side / g;
        } else {
            // pi(e | beta, alpha) ~ (e/(1-e))^p prod_j (1 + e |b_j|/(sigma(1-e)))^-(alpha+1)
            double s = 0.0;
            for (int j = 0; j < p; ++j)
                s += std::log1p(g * std::abs(st.beta[j]) / (sigma * (1.0 - g)));
            logw[k] = p * std::log(g / (1.0 - g)) - (st.alpha + 1.0) * s;
        }
    }
    double mx = -std::numeric_limits<double>::infinity();
    for (double lw : logw)
        if (std::isfinite(lw)) mx = std::max(mx, lw);
    if (!std::isfinite(mx))
        throw NumericError("griddy_weights: all conditional weights underflowed (degenerate state)");
    std::vector<double> w(m);
    double total = 0.0;
    for (int k = 0; k < m; ++k) {
        w[k] = std::isfinite(logw[k]) ? std::exp(logw[k] - mx) : 0.0;
        total += w[k];
    }
    for (double& v : w) v /= total;
    return {std::move(grid), std::move(w)};
}

// One griddy draw; returns the new alpha (or eta) mapped back through
// alpha = 1/a - 1.
inline double griddy_draw(GriddySide side, const GibbsState& st, int m, Rng& rng) {
    auto [grid, w] = griddy_weights(side, st, m);
    double u = rng.uniform();
    double acc = 0.0;
    int pick = m - 1;
    for (int k = 0; k < m; ++k) {
        acc += w[k];
        if (u < acc) {
            pick = k;
            break;
        }
    }
    return 1.0 / grid[pick] - 1.0;
}

inline bool looks_standardized(const Dataset& d) {
    if (std::abs(d.y.mean()) > 1e-8 * (1.0 + d.y.norm())) return false;
    for (int j = 0; j < d.p(); ++j) {
        if (std::abs(d.X.col(j).norm() - 1.0) > 1e-6) return false;
        if (std::abs(d.X.col(j).mean()) > 1e-8) return false;
    }
    return true;
}

// Data-augmentation Gibbs sampler with scan order
// beta -> sigma^2 -> lambda -> tau -> [griddy alpha] -> [griddy eta].
inline PosteriorDraws run_gibbs(const Dataset& d, const GibbsConfig& cfg) {
    d.validate();
    cfg.validate();
    detail::GramProblem pr(d);
    const int p = pr.p;
    Rng rng = Rng(cfg.seed).child("gibbs");

    GibbsState st;
    st.beta = Eigen::VectorXd::Zero(p);
    st.tau = Eigen::VectorXd::Ones(p);
    st.alpha = cfg.alpha;
    st.eta = cfg.eta;
    st.lambda = Eigen::VectorXd::Constant(p, cfg.alpha / cfg.eta);
    double y_var = (d.y.array() - d.y.mean()).square().sum() / (d.n() - 1);
    st.sigma2 = y_var > 0.0 ? y_var : 1.0;

    PosteriorDraws out;
    out.config = cfg;
    out.standardized_input = looks_standardized(d);
    const int kept = cfg.kept();
    out.beta.resize(kept, p);
    out.sigma2.resize(kept);
    out.alpha.resize(kept);
    out.eta.resize(kept);

    int row = 0;
    for (int t = 1; t <= cfg.iters; ++t) {
        try {
            st.beta = detail::draw_beta_gram(pr, st, rng);
            st.sigma2 = detail::draw_sigma2_gram(pr, st, rng);
            for (int j = 0; j < p; ++j) st.lambda[j] = draw_lambda(st, j, rng);
            for (int j = 0; j < p; ++j) st.tau[j] = 1.0 / draw_tau_inv(st, j, rng);
            if (cfg.hyper_mode != HyperMode::fixed)
                st.alpha = griddy_draw(GriddySide::alpha, st, cfg.grid_size, rng);
            if (cfg.hyper_mode == HyperMode::learn_both)
                st.eta = griddy_draw(GriddySide::eta, st, cfg.grid_size, rng);
        } catch (const std::runtime_error& err) {
            throw NumericError("run_gibbs: iteration " + std::to_string(t) + ": " + err.what());
        }
        if (t > cfg.burn_in && (t - cfg.burn_in) % cfg.thin == 0 && row < kept) {
            out.beta.row(row) = st.beta.transpose();
            out.sigma2[row] = st.sigma2;
            out.alpha[row] = st.alpha;
            out.eta[row] = st.eta;
            ++row;
        }
    }
    return out;
}

struct PosteriorSummary {
    Eigen::VectorXd beta_mean, beta_sd, beta_q025, beta_q975;
    double sigma2_mean = 0.0, alpha_mean = 0.0, eta_mean = 0.0;
};

inline double quantile_sorted(std::vector<double>& v, double q) {
    std::sort(v.begin(), v.end());
    double pos = q * (static_cast<double>(v.size()) - 1.0);
    std::size_t lo = static_cast<std::size_t>(pos);
    std::size_t hi = std::min(lo + 1, v.size() - 1);
    double frac = pos - static_cast<double>(lo);
    return v[lo] * (1.0 - frac) + v[hi] * frac;
}

inline PosteriorSummary summarize(const PosteriorDraws& draws) {
    PosteriorSummary s;
    const int p = static_cast<int>(draws.beta.cols());
    const int k = static_cast<int>(draws.beta.rows());
    s.beta_mean = draws.beta.colwise().mean();
    s.beta_sd.resize(p);
    s.beta_q025.resize(p);
    s.beta_q975.resize(p);
    for (int j = 0; j < p; ++j) {
        double m = s.beta_mean[j];
        s.beta_sd[j] = k > 1 ? std::sqrt((draws.beta.col(j).array() - m).square().sum() / (k - 1)) : 0.0;
        std::vector<double> col(draws.beta.col(j).data(), draws.beta.col(j).data() + k);
        s.beta_q025[j] = quantile_sorted(col, 0.025);
        s.beta_q975[j] = quantile_sorted(col, 0.975);
    }
    s.sigma2_mean = draws.sigma2.mean();
    s.alpha_mean = draws.alpha.mean();
    s.eta_mean = draws.eta.mean();
    return s;
}

}  // namespace gdp
