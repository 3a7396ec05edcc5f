#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gdp/errors.hpp"
#include "gdp/rng.hpp"

namespace gdp {

// Regression data y = X beta + eps with named predictor columns.
struct Dataset {
    Eigen::VectorXd y;
    Eigen::MatrixXd X;
    std::vector<std::string> names;

    int n() const { return static_cast<int>(X.rows()); }
    int p() const { return static_cast<int>(X.cols()); }

    void validate() const {
        if (X.rows() < 2 || X.cols() < 1) throw DataError("Dataset: need n >= 2 and p >= 1");
        if (y.size() != X.rows()) throw DataError("Dataset: y length must match rows of X");
        if (!y.allFinite() || !X.allFinite()) throw DataError("Dataset: non-finite entries");
        if (!names.empty() && static_cast<int>(names.size()) != p())
            throw DataError("Dataset: name count must match p");
    }
};

// Centering/scaling applied before a fit, kept for back-transformation.
struct StandardizationRecord {
    double y_center = 0.0;
    Eigen::VectorXd x_centers;
    Eigen::VectorXd x_scales;  // Euclidean norms of the centered columns
};

// Center y, center each column of X and scale it to unit Euclidean length.
inline std::pair<Dataset, StandardizationRecord> standardize(const Dataset& d) {
    d.validate();
    Dataset out = d;
    StandardizationRecord rec;
    rec.y_center = d.y.mean();
    out.y.array() -= rec.y_center;
    rec.x_centers.resize(d.p());
    rec.x_scales.resize(d.p());
    for (int j = 0; j < d.p(); ++j) {
        rec.x_centers[j] = d.X.col(j).mean();
        out.X.col(j).array() -= rec.x_centers[j];
        double norm = out.X.col(j).norm();
        if (!(norm > 0.0)) {
            std::string name = d.names.empty() ? "column " + std::to_string(j + 1) : d.names[j];
            throw DataError("standardize: constant predictor column '" + name + "'");
        }
        rec.x_scales[j] = norm;
        out.X.col(j) /= norm;
    }
    return {std::move(out), std::move(rec)};
}

// Map coefficients fit on standardized data back to the original scale.
// With intercept_free the original-scale model is taken through the origin
// and only the column scales are undone.
inline std::pair<Eigen::VectorXd, double> destandardize(const Eigen::VectorXd& beta_std,
                                                        bool intercept_free,
                                                        const StandardizationRecord& rec) {
    if (beta_std.size() != rec.x_scales.size())
        throw DataError("destandardize: coefficient length does not match record");
    Eigen::VectorXd beta = beta_std.array() / rec.x_scales.array();
    if (intercept_free) return {beta, 0.0};
    double intercept = rec.y_center - rec.x_centers.dot(beta);
    return {beta, intercept};
}

namespace detail {

// Precomputed Gram form of the least-squares part; shared by the MAP inner
// solver, the EM loops and the Gibbs scan.
struct GramProblem {
    Eigen::MatrixXd G;   // X'X
    Eigen::VectorXd c;   // X'y
    double yty = 0.0;
    int n = 0, p = 0;

    explicit GramProblem(const Dataset& d)
        : G(d.X.transpose() * d.X), c(d.X.transpose() * d.y), yty(d.y.squaredNorm()),
          n(d.n()), p(d.p()) {}

    double rss(const Eigen::VectorXd& beta) const {
        return std::max(0.0, yty - 2.0 * beta.dot(c) + beta.dot(G * beta));
    }
};

}  // namespace detail

// Simulation design: which beta* configuration, problem size, noise level.
struct SimSpec {
    int model_id = 1;  // 1..5
    int n = 50;
    int p = 20;
    double sigma = 3.0;
    std::uint64_t seed = 0;

    void validate() const {
        if (model_id < 1 || model_id > 5) throw DataError("SimSpec: model_id must be in 1..5");
        if (n < 2 || p < 1) throw DataError("SimSpec: need n >= 2 and p >= 1");
        if (!(sigma > 0.0)) throw DataError("SimSpec: sigma must be > 0");
        if ((model_id == 1 || model_id == 2) && p < 5)
            throw DataError("SimSpec: models 1 and 2 require p >= 5");
        if ((model_id == 3 || model_id == 4) && p < 10)
            throw DataError("SimSpec: models 3 and 4 require p >= 10");
    }
};

struct SimData {
    Dataset data;
    Eigen::VectorXd beta_star;
    Eigen::MatrixXd C;  // row covariance that generated X
};

inline Eigen::MatrixXd ar_covariance(int p, double rho = 0.5) {
    Eigen::MatrixXd C(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) C(i, j) = std::pow(rho, std::abs(i - j));
    return C;
}

// Rows of X are i.i.d. N(0, C) with C_{jj'} = 0.5^{|j-j'|}; eps ~ N(0, sigma^2).
// Models 1-4 place {5,5,10,10} randomly chosen entries of beta* at {1,3,1,3};
// model 5 sets every entry to 0.85. The support draw is seeded, so the whole
// dataset is reproducible bit-for-bit from the spec.
inline SimData gen_sim_data(const SimSpec& s) {
    s.validate();
    Rng rng(s.seed);
    SimData out;
    out.C = ar_covariance(s.p);
    Eigen::LLT<Eigen::MatrixXd> llt(out.C);
    if (llt.info() != Eigen::Success) throw NumericError("gen_sim_data: covariance factorization failed");
    Eigen::MatrixXd L = llt.matrixL();

    out.beta_star = Eigen::VectorXd::Zero(s.p);
    if (s.model_id == 5) {
        out.beta_star.setConstant(0.85);
    } else {
        int k = (s.model_id <= 2) ? 5 : 10;
        double value = (s.model_id % 2 == 1) ? 1.0 : 3.0;
        // partial Fisher-Yates: first k slots of a shuffled index list
        std::vector<int> idx(s.p);
        for (int j = 0; j < s.p; ++j) idx[j] = j;
        for (int j = 0; j < k; ++j) {
            int r = j + static_cast<int>(rng.uniform() * (s.p - j));
            if (r >= s.p) r = s.p - 1;
            std::swap(idx[j], idx[r]);
            out.beta_star[idx[j]] = value;
        }
    }

    out.data.X.resize(s.n, s.p);
    Eigen::VectorXd z(s.p);
    for (int i = 0; i < s.n; ++i) {
        for (int j = 0; j < s.p; ++j) z[j] = rng.normal();
        out.data.X.row(i) = (L * z).transpose();
    }
    out.data.y = out.data.X * out.beta_star;
    for (int i = 0; i < s.n; ++i) out.data.y[i] += s.sigma * rng.normal();
    out.data.names.resize(s.p);
    for (int j = 0; j < s.p; ++j) out.data.names[j] = "x" + std::to_string(j + 1);
    return out;
}

}  // namespace gdp
