#pragma once

/**
 * Synthetic generators: piecewise-linear regression prompts and
 * piecewise-stable linear dynamical system trajectories, both with a
 * stochastic change point drawn uniformly from a configured support.
 *
 * Generation is pure given (config, seed): the same pair reproduces the
 * same trajectory bit for bit, so trials can be generated from any thread.
 *
 * Sample-index convention (shared by both tasks): sample i is governed by
 * the first regime iff i <= n1_star. For the LDS this means transition
 * i -> i+1 applies A2 as soon as i+1 > n1_star.
 */

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include <Eigen/Eigenvalues>

#include "cpbma/common.hpp"
#include "cpbma/rng.hpp"

namespace cpbma {

enum class TaskLinkKind { Independent, Anticorrelated };

struct RegressionConfig {
    int d = 3;
    int N = 30;
    int cp_lo = 10;
    int cp_hi = 20;
    double noise_std = 0.1;
    double prior_precision = 1.0;  // lambda
    TaskLinkKind link = TaskLinkKind::Independent;
    double link_eps = 0.0;         // w2 = -w1 + eps * eta when Anticorrelated

    void validate() const {
        if (d < 1) throw ConfigError("regression: d must be >= 1");
        if (N < 2) throw ConfigError("regression: N must be >= 2");
        if (!(1 <= cp_lo && cp_lo <= cp_hi && cp_hi <= N - 1))
            throw ConfigError("regression: change-point support must satisfy 1 <= L <= U <= N-1");
        if (noise_std < 0.0) throw ConfigError("regression: noise_std must be >= 0");
        if (prior_precision <= 0.0) throw ConfigError("regression: lambda must be > 0");
        if (link_eps < 0.0) throw ConfigError("regression: link epsilon must be >= 0");
    }
};

struct LdsConfig {
    int d = 4;
    int N = 40;
    int cp_lo = 15;
    int cp_hi = 25;
    double noise_std = 0.1;
    double row_prior_var = 0.0;   // tau^2; <= 0 means the default 1/d
    double spectral_cap = 0.95;   // rho_max

    double resolved_row_prior_var() const {
        return row_prior_var > 0.0 ? row_prior_var : 1.0 / static_cast<double>(d);
    }

    void validate() const {
        if (d < 1) throw ConfigError("lds: d must be >= 1");
        if (N < 2) throw ConfigError("lds: N must be >= 2");
        if (!(1 <= cp_lo && cp_lo <= cp_hi && cp_hi <= N - 1))
            throw ConfigError("lds: change-point support must satisfy 1 <= L <= U <= N-1");
        if (noise_std < 0.0) throw ConfigError("lds: noise_std must be >= 0");
        if (!(spectral_cap > 0.0 && spectral_cap < 1.0))
            throw ConfigError("lds: spectral cap must lie in (0, 1)");
    }
};

struct Trajectory {
    enum class Kind { Regression, Lds };

    Kind kind = Kind::Regression;
    int true_cp = 0;
    std::uint64_t seed = 0;
    Matrix xs;   // N x d inputs (regression) or states (LDS)
    Vector ys;   // N labels, regression only
    Vector w1, w2;   // regression task weights
    Matrix a1, a2;   // LDS system matrices

    int n() const { return static_cast<int>(xs.rows()); }
    int dim() const { return static_cast<int>(xs.cols()); }
};

/// Uniform draw from the inclusive support [lo, hi].
inline int sample_changepoint(int lo, int hi, Rng& rng) {
    if (lo > hi) throw ConfigError("sample_changepoint: empty support");
    return static_cast<int>(rng.uniform_int(lo, hi));
}

namespace detail {

inline Vector normal_vector(Rng& rng, int d) {
    Vector v(d);
    for (int i = 0; i < d; ++i) v(i) = rng.normal();
    return v;
}

}  // namespace detail

/// Random system matrix with entries N(0, tau^2), rescaled by rho_max/rho(A)
/// only when the spectral radius exceeds rho_max. Result satisfies rho <= rho_max.
inline Matrix make_stable_matrix(int d, double tau2, double rho_max, Rng& rng) {
    if (!(rho_max > 0.0 && rho_max < 1.0))
        throw ConfigError("make_stable_matrix: rho_max must lie in (0, 1)");
    Matrix a(d, d);
    const double sd = std::sqrt(tau2);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) a(r, c) = rng.normal(0.0, sd);
    const double rho = a.eigenvalues().cwiseAbs().maxCoeff();
    if (rho > rho_max) a *= rho_max / rho;
    return a;
}

/// Draw order: change point; w1; w2 (fresh normals, or eta for the
/// anticorrelated link); then per sample i: x_i entries, noise.
inline Trajectory gen_regression_trajectory(const RegressionConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    Rng rng(seed);
    Trajectory traj;
    traj.kind = Trajectory::Kind::Regression;
    traj.seed = seed;
    traj.true_cp = sample_changepoint(cfg.cp_lo, cfg.cp_hi, rng);

    const double prior_sd = 1.0 / std::sqrt(cfg.prior_precision);
    traj.w1 = prior_sd * detail::normal_vector(rng, cfg.d);
    if (cfg.link == TaskLinkKind::Independent) {
        traj.w2 = prior_sd * detail::normal_vector(rng, cfg.d);
    } else {
        traj.w2 = -traj.w1 + cfg.link_eps * detail::normal_vector(rng, cfg.d);
    }

    traj.xs.resize(cfg.N, cfg.d);
    traj.ys.resize(cfg.N);
    for (int i = 1; i <= cfg.N; ++i) {
        const Vector x = detail::normal_vector(rng, cfg.d);
        traj.xs.row(i - 1) = x.transpose();
        const Vector& w = (i <= traj.true_cp) ? traj.w1 : traj.w2;
        traj.ys(i - 1) = w.dot(x) + rng.normal(0.0, cfg.noise_std);
    }
    return traj;
}

/// Draw order: change point; A1 entries; A2 entries; x1; per-step noise.
inline Trajectory gen_lds_trajectory(const LdsConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    Rng rng(seed);
    Trajectory traj;
    traj.kind = Trajectory::Kind::Lds;
    traj.seed = seed;
    traj.true_cp = sample_changepoint(cfg.cp_lo, cfg.cp_hi, rng);

    const double tau2 = cfg.resolved_row_prior_var();
    traj.a1 = make_stable_matrix(cfg.d, tau2, cfg.spectral_cap, rng);
    traj.a2 = make_stable_matrix(cfg.d, tau2, cfg.spectral_cap, rng);

    traj.xs.resize(cfg.N, cfg.d);
    traj.xs.row(0) = detail::normal_vector(rng, cfg.d).transpose();
    for (int i = 2; i <= cfg.N; ++i) {
        const Matrix& a = (i <= traj.true_cp) ? traj.a1 : traj.a2;
        const Vector next = a * traj.xs.row(i - 2).transpose() +
                            cfg.noise_std * detail::normal_vector(rng, cfg.d);
        traj.xs.row(i - 1) = next.transpose();
    }
    return traj;
}

/// One record per line with a header row; decimals use the shortest
/// round-trip representation.
inline void write_trajectory_records(const Trajectory& traj, std::ostream& out) {
    out << "t";
    for (int j = 0; j < traj.dim(); ++j) out << ",x" << j;
    if (traj.kind == Trajectory::Kind::Regression) out << ",y";
    out << "\n";
    for (int i = 0; i < traj.n(); ++i) {
        out << (i + 1);
        for (int j = 0; j < traj.dim(); ++j) out << "," << format_double(traj.xs(i, j));
        if (traj.kind == Trajectory::Kind::Regression) out << "," << format_double(traj.ys(i));
        out << "\n";
    }
    if (!out) throw IoError("failed to write trajectory records");
}

/// Sidecar metadata record for a trajectory file.
inline std::string trajectory_metadata_json(const Trajectory& traj) {
    std::string s = "{\"seed\": " + std::to_string(traj.seed) +
                    ", \"n1_star\": " + std::to_string(traj.true_cp) + ", \"kind\": \"" +
                    (traj.kind == Trajectory::Kind::Regression ? "regression" : "lds") +
                    "\", \"d\": " + std::to_string(traj.dim()) +
                    ", \"N\": " + std::to_string(traj.n()) + "}";
    return s;
}

}  // namespace cpbma
