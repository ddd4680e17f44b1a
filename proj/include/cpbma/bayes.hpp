#pragma once

/**
 * Gaussian linear-model core: segment sufficient statistics, cumulative
 * prefix sums, ridge posteriors with a general Gaussian prior, predictive
 * moments, and exact log-marginal likelihoods.
 *
 * Everything here is a pure function over immutable value types (PrefixSums
 * offers an explicit in-place append for single-writer accumulation).
 * All SPD solves go through Cholesky after a one-shot symmetrization.
 */

#include <cmath>
#include <vector>

#include "cpbma/common.hpp"

namespace cpbma {

/// Sufficient statistics of one data segment: Gram matrix A = sum x x^T,
/// cross-moments b = sum x y, label energy c = sum y^2, and sample count n.
struct SuffStats {
    Matrix A;
    Vector b;
    double c = 0.0;
    int n = 0;

    static SuffStats zero(int dim) {
        return SuffStats{Matrix::Zero(dim, dim), Vector::Zero(dim), 0.0, 0};
    }

    int dim() const { return static_cast<int>(b.size()); }
};

/// Gaussian prior over a weight vector.
struct Prior {
    Vector mean;
    Matrix cov;

    /// N(0, lambda^-1 I), the default weight prior.
    static Prior isotropic(int dim, double lambda) {
        if (lambda <= 0.0) throw ConfigError("prior precision lambda must be > 0");
        return Prior{Vector::Zero(dim), Matrix::Identity(dim, dim) / lambda};
    }
};

/// Posterior N(mu, Sigma) stored as the mean plus the lower Cholesky factor
/// of the precision S0^-1 + sigma^-2 A.
class GaussianPosterior {
public:
    GaussianPosterior(Vector mean, Matrix precision_chol, Prior prior)
        : mean_(std::move(mean)),
          precision_chol_(std::move(precision_chol)),
          prior_(std::move(prior)) {}

    const Vector& mean() const { return mean_; }
    const Matrix& precision_chol() const { return precision_chol_; }
    const Prior& prior() const { return prior_; }
    int dim() const { return static_cast<int>(mean_.size()); }

    /// Dense covariance (precision inverse) via two triangular solves.
    Matrix covariance() const {
        const int d = dim();
        Matrix z = precision_chol_.triangularView<Eigen::Lower>().solve(Matrix::Identity(d, d));
        Matrix cov = precision_chol_.transpose().triangularView<Eigen::Upper>().solve(z);
        return 0.5 * (cov + cov.transpose());
    }

private:
    Vector mean_;
    Matrix precision_chol_;
    Prior prior_;
};

/// Cumulative statistics P_j = sum_{i<=j} (x_i x_i^T, x_i y_i, y_i^2) for
/// j = 0..size(); any segment's statistics follow from one subtraction.
class PrefixSums {
public:
    explicit PrefixSums(int dim) : dim_(dim) {
        if (dim < 1) throw ConfigError("PrefixSums: dimension must be >= 1");
        xx_.push_back(Matrix::Zero(dim, dim));
        xy_.push_back(Vector::Zero(dim));
        yy_.push_back(0.0);
    }

    int dim() const { return dim_; }

    /// Number of accumulated samples (the largest valid position index).
    int size() const { return static_cast<int>(yy_.size()) - 1; }

    /// Appends sample (x, y) as position size()+1. Single-writer.
    void append(const Vector& x, double y) {
        require_dim(x.size() == dim_, "prefix append: x dimension mismatch");
        xx_.push_back(xx_.back() + x * x.transpose());
        xy_.push_back(xy_.back() + x * y);
        yy_.push_back(yy_.back() + y * y);
    }

    const Matrix& xx(int j) const { return xx_.at(static_cast<std::size_t>(j)); }
    const Vector& xy(int j) const { return xy_.at(static_cast<std::size_t>(j)); }
    double yy(int j) const { return yy_.at(static_cast<std::size_t>(j)); }

private:
    int dim_;
    std::vector<Matrix> xx_;
    std::vector<Vector> xy_;
    std::vector<double> yy_;
};

/// Pure form of PrefixSums::append.
inline PrefixSums prefix_update(const PrefixSums& prefix, const Vector& x, double y) {
    PrefixSums next = prefix;
    next.append(x, y);
    return next;
}

/// Statistics of samples (k, t-1], i.e. the post-change segment under a
/// change-point hypothesis k evaluated at time t. Requires 0 <= k <= t-1.
inline SuffStats segment_stats(const PrefixSums& prefix, int k, int t) {
    if (k < 0 || k > t - 1 || t - 1 > prefix.size())
        throw ConfigError("segment_stats: empty or invalid segment [k+1, t-1]");
    SuffStats s;
    s.A = prefix.xx(t - 1) - prefix.xx(k);
    s.A = 0.5 * (s.A + s.A.transpose().eval());  // restore exact symmetry
    s.b = prefix.xy(t - 1) - prefix.xy(k);
    s.c = prefix.yy(t - 1) - prefix.yy(k);
    s.n = t - 1 - k;
    return s;
}

/// Statistics of the inclusive sample range [a, b]; empty when a > b.
inline SuffStats range_stats(const PrefixSums& prefix, int a, int b) {
    if (a > b) return SuffStats::zero(prefix.dim());
    return segment_stats(prefix, a - 1, b + 1);
}

namespace detail {

inline Matrix chol_lower(Matrix m, const char* what) {
    m = 0.5 * (m + m.transpose().eval());
    Eigen::LLT<Matrix> llt(m);
    if (llt.info() != Eigen::Success) throw NumericError(what);
    return llt.matrixL();
}

/// Solves (L L^T) z = rhs.
inline Vector chol_solve(const Matrix& chol_l, const Vector& rhs) {
    Vector z = chol_l.triangularView<Eigen::Lower>().solve(rhs);
    return chol_l.transpose().triangularView<Eigen::Upper>().solve(z);
}

}  // namespace detail

/// Gaussian posterior over the weight vector given segment statistics, a
/// Gaussian prior (m0, S0), and noise variance sigma^2:
/// precision = S0^-1 + sigma^-2 A, mean solves precision*mu = S0^-1 m0 + sigma^-2 b.
inline GaussianPosterior ridge_posterior(const SuffStats& stats, const Prior& prior,
                                         double sigma2, double jitter = 0.0) {
    if (sigma2 <= 0.0) throw ConfigError("ridge_posterior: sigma^2 must be > 0");
    const int d = stats.dim();
    require_dim(prior.mean.size() == d && prior.cov.rows() == d && prior.cov.cols() == d,
                "ridge_posterior: prior dimension mismatch");

    const Matrix prior_chol = detail::chol_lower(prior.cov, "ridge_posterior: prior covariance not SPD");
    // S0^-1 and S0^-1 m0 via triangular solves against chol(S0).
    Matrix z = prior_chol.triangularView<Eigen::Lower>().solve(Matrix::Identity(d, d));
    Matrix prior_precision = prior_chol.transpose().triangularView<Eigen::Upper>().solve(z);
    prior_precision = 0.5 * (prior_precision + prior_precision.transpose().eval());

    Matrix precision = prior_precision + stats.A / sigma2;
    if (jitter > 0.0) precision += jitter * Matrix::Identity(d, d);
    const Matrix chol = detail::chol_lower(precision, "ridge_posterior: precision not SPD");

    const Vector rhs = prior_precision * prior.mean + stats.b / sigma2;
    Vector mean = detail::chol_solve(chol, rhs);
    return GaussianPosterior(std::move(mean), chol, prior);
}

inline GaussianPosterior ridge_posterior(const SuffStats& stats, double lambda, double sigma2) {
    return ridge_posterior(stats, Prior::isotropic(stats.dim(), lambda), sigma2);
}

/// m = x^T mu.
inline double predictive_mean(const GaussianPosterior& post, const Vector& x) {
    require_dim(x.size() == post.mean().size(), "predictive_mean: dimension mismatch");
    return x.dot(post.mean());
}

/// sigma^2 + x^T Sigma x, computed through the precision Cholesky factor.
/// Always >= sigma^2.
inline double predictive_variance(const GaussianPosterior& post, const Vector& x, double sigma2) {
    if (sigma2 <= 0.0) throw ConfigError("predictive_variance: sigma^2 must be > 0");
    require_dim(x.size() == post.mean().size(), "predictive_variance: dimension mismatch");
    const Vector z = post.precision_chol().triangularView<Eigen::Lower>().solve(x);
    return sigma2 + z.squaredNorm();
}

/// Exact log-evidence of a segment under prior w ~ N(0, lambda^-1 I) and
/// noise N(0, sigma^2):
///   -(n/2) log(2 pi sigma^2) - 1/2 logdet(I + sigma^-2 lambda^-1 A)
///   - (1/2 sigma^2) (c - sigma^-2 b^T Sigma b),   Sigma = (lambda I + sigma^-2 A)^-1.
/// Agrees with the marginal density of y ~ N(0, sigma^2 I + lambda^-1 X X^T)
/// for every (lambda, sigma^2); see log_marginal_direct.
inline double log_marginal(const SuffStats& stats, double lambda, double sigma2) {
    if (lambda <= 0.0 || sigma2 <= 0.0)
        throw ConfigError("log_marginal: lambda and sigma^2 must be > 0");
    if (stats.n == 0) return 0.0;
    const int d = stats.dim();

    // logdet via Cholesky of I + A/(lambda sigma^2), never determinant products.
    const Matrix gram_chol =
        detail::chol_lower(Matrix::Identity(d, d) + stats.A / (lambda * sigma2),
                           "log_marginal: Gram term not SPD");
    double logdet = 0.0;
    for (int i = 0; i < d; ++i) logdet += std::log(gram_chol(i, i));
    logdet *= 2.0;

    // Quadratic form sigma^-2 b^T Sigma b through chol(lambda I + sigma^-2 A).
    const Matrix prec_chol =
        detail::chol_lower(lambda * Matrix::Identity(d, d) + stats.A / sigma2,
                           "log_marginal: precision not SPD");
    const Vector z = prec_chol.triangularView<Eigen::Lower>().solve(stats.b);
    const double quad = z.squaredNorm() / sigma2;

    return -0.5 * stats.n * std::log(2.0 * M_PI * sigma2) - 0.5 * logdet -
           0.5 * (stats.c - quad) / sigma2;
}

/// Builds SuffStats from a raw design matrix (rows are samples).
inline SuffStats suff_stats_from_data(const Matrix& x, const Vector& y) {
    require_dim(x.rows() == y.size(), "suff_stats_from_data: row count mismatch");
    SuffStats s = SuffStats::zero(static_cast<int>(x.cols()));
    s.A = x.transpose() * x;
    s.A = 0.5 * (s.A + s.A.transpose().eval());
    s.b = x.transpose() * y;
    s.c = y.squaredNorm();
    s.n = static_cast<int>(x.rows());
    return s;
}

/// Independent oracle for log_marginal: evaluates the multivariate Gaussian
/// log-density of y under y ~ N(0, sigma^2 I_n + lambda^-1 X X^T) directly
/// in the n-dimensional observation space.
inline double log_marginal_direct(const Matrix& x, const Vector& y, double lambda, double sigma2) {
    if (lambda <= 0.0 || sigma2 <= 0.0)
        throw ConfigError("log_marginal_direct: lambda and sigma^2 must be > 0");
    require_dim(x.rows() == y.size(), "log_marginal_direct: row count mismatch");
    const int n = static_cast<int>(x.rows());
    if (n == 0) return 0.0;

    Matrix cov = sigma2 * Matrix::Identity(n, n) + (x * x.transpose()) / lambda;
    const Matrix chol = detail::chol_lower(std::move(cov), "log_marginal_direct: covariance not SPD");
    double logdet = 0.0;
    for (int i = 0; i < n; ++i) logdet += std::log(chol(i, i));
    logdet *= 2.0;
    const Vector z = chol.triangularView<Eigen::Lower>().solve(y);
    return -0.5 * n * std::log(2.0 * M_PI) - 0.5 * logdet - 0.5 * z.squaredNorm();
}

}  // namespace cpbma
