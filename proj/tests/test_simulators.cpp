#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <sstream>

#include "cpbma/simulate.hpp"

using namespace cpbma;
using Catch::Approx;

namespace {

// Independent spectral-radius oracle: Gelfand bound rho(A) <= |A^m|_F^(1/m)
// via repeated squaring with norm scaling. Never calls an eigensolver.
double spectral_radius_upper_bound(Matrix a, int squarings = 14) {
    double log_scale = 0.0;
    for (int i = 0; i < squarings; ++i) {
        const double s = a.norm();
        if (s == 0.0) return 0.0;
        a = (a / s) * (a / s);
        log_scale = 2.0 * (log_scale + std::log(s));
    }
    const double m = std::pow(2.0, squarings);
    return std::exp((log_scale + std::log(a.norm())) / m);
}

}  // namespace

TEST_CASE("sample_changepoint", "[simulators]") {
    SECTION("singleton support") {
        Rng rng(1);
        CHECK(sample_changepoint(12, 12, rng) == 12);
    }
    SECTION("invalid range throws") {
        Rng rng(1);
        CHECK_THROWS_AS(sample_changepoint(7, 3, rng), ConfigError);
    }
    SECTION("uniform frequencies over {10..20}") {
        Rng rng(2);
        const int draws = 100000;
        std::map<int, int> counts;
        for (int i = 0; i < draws; ++i) counts[sample_changepoint(10, 20, rng)] += 1;
        REQUIRE(counts.size() == 11);
        for (const auto& [value, count] : counts) {
            CHECK(value >= 10);
            CHECK(value <= 20);
            CHECK(std::abs(count / static_cast<double>(draws) - 1.0 / 11.0) < 0.01);
        }
    }
    SECTION("empirical mean of {15..25} is 20") {
        Rng rng(3);
        double sum = 0.0;
        const int draws = 100000;
        for (int i = 0; i < draws; ++i) sum += sample_changepoint(15, 25, rng);
        CHECK(sum / draws == Approx(20.0).margin(0.05));
    }
}

TEST_CASE("gen_regression_trajectory", "[simulators]") {
    RegressionConfig cfg;

    SECTION("shape and change-point support") {
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            Trajectory traj = gen_regression_trajectory(cfg, seed);
            REQUIRE(traj.n() == 30);
            REQUIRE(traj.dim() == 3);
            CHECK(traj.true_cp >= 10);
            CHECK(traj.true_cp <= 20);
        }
    }

    SECTION("noiseless labels follow the active weight exactly") {
        cfg.d = 1;
        cfg.noise_std = 0.0;
        Trajectory traj = gen_regression_trajectory(cfg, 7);
        for (int i = 1; i <= traj.n(); ++i) {
            const Vector& w = (i <= traj.true_cp) ? traj.w1 : traj.w2;
            CHECK(traj.ys(i - 1) == w.dot(traj.xs.row(i - 1)));
        }
    }

    SECTION("anticorrelated link with eps=0 gives w2 = -w1") {
        cfg.link = TaskLinkKind::Anticorrelated;
        cfg.link_eps = 0.0;
        Trajectory traj = gen_regression_trajectory(cfg, 9);
        CHECK((traj.w2 + traj.w1).cwiseAbs().maxCoeff() == 0.0);
    }

    SECTION("identical seed reproduces byte-identical serialization") {
        std::ostringstream a, b;
        write_trajectory_records(gen_regression_trajectory(cfg, 1234), a);
        write_trajectory_records(gen_regression_trajectory(cfg, 1234), b);
        CHECK(a.str() == b.str());
        std::ostringstream c;
        write_trajectory_records(gen_regression_trajectory(cfg, 1235), c);
        CHECK(a.str() != c.str());
    }

    SECTION("invalid support rejected") {
        cfg.cp_lo = 0;
        CHECK_THROWS_AS(gen_regression_trajectory(cfg, 1), ConfigError);
        cfg.cp_lo = 10;
        cfg.cp_hi = 30;  // N-1 = 29
        CHECK_THROWS_AS(gen_regression_trajectory(cfg, 1), ConfigError);
    }

    SECTION("empirical variance of w1 matches 1/lambda within 5%") {
        cfg.d = 1;
        cfg.prior_precision = 2.0;
        double sum = 0.0, sumsq = 0.0;
        const int trials = 10000;
        for (int i = 0; i < trials; ++i) {
            const double w = gen_regression_trajectory(cfg, derive_stream_seed(99, i)).w1(0);
            sum += w;
            sumsq += w * w;
        }
        const double mean = sum / trials;
        const double var = sumsq / trials - mean * mean;
        CHECK(var == Approx(0.5).epsilon(0.05));
    }
}

TEST_CASE("make_stable_matrix", "[simulators]") {
    SECTION("scalar rescale hits the cap exactly when the draw is unstable") {
        Rng rng(5);
        // tau^2 large: the raw draw exceeds the cap almost surely.
        const Matrix a = make_stable_matrix(1, 100.0, 0.95, rng);
        CHECK(std::abs(a(0, 0)) == Approx(0.95).epsilon(1e-12));
    }
    SECTION("already-stable scalar draw is returned untouched") {
        // Replicate the internal draw with an identical stream.
        Rng probe(6);
        const double raw = probe.normal(0.0, std::sqrt(0.01));
        REQUIRE(std::abs(raw) < 0.95);
        Rng rng(6);
        const Matrix a = make_stable_matrix(1, 0.01, 0.95, rng);
        CHECK(a(0, 0) == raw);
    }
    SECTION("1000 draws at d=5 all satisfy the cap per the Gelfand oracle") {
        Rng rng(7);
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const Matrix a = make_stable_matrix(5, 0.2, 0.95, rng);
            worst = std::max(worst, spectral_radius_upper_bound(a));
        }
        CHECK(worst <= 0.95 * 1.01);
    }
}

TEST_CASE("gen_lds_trajectory", "[simulators]") {
    LdsConfig cfg;

    SECTION("shape and change-point support") {
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            Trajectory traj = gen_lds_trajectory(cfg, seed);
            REQUIRE(traj.n() == 40);
            REQUIRE(traj.dim() == 4);
            CHECK(traj.true_cp >= 15);
            CHECK(traj.true_cp <= 25);
        }
    }

    SECTION("noiseless scalar system decays geometrically before the change") {
        cfg.d = 1;
        cfg.noise_std = 0.0;
        Trajectory traj = gen_lds_trajectory(cfg, 11);
        const double a1 = traj.a1(0, 0);
        for (int t = 1; t <= traj.true_cp; ++t)
            CHECK(traj.xs(t - 1, 0) ==
                  Approx(std::pow(a1, t - 1) * traj.xs(0, 0)).margin(1e-12));
        // First post-change state uses the second system.
        const int cp = traj.true_cp;
        CHECK(traj.xs(cp, 0) == Approx(traj.a2(0, 0) * traj.xs(cp - 1, 0)).margin(1e-12));
    }

    SECTION("generated system matrices satisfy the spectral cap") {
        for (std::uint64_t seed = 100; seed < 200; ++seed) {
            Trajectory traj = gen_lds_trajectory(cfg, seed);
            CHECK(spectral_radius_upper_bound(traj.a1) <= cfg.spectral_cap * 1.01);
            CHECK(spectral_radius_upper_bound(traj.a2) <= cfg.spectral_cap * 1.01);
        }
    }

    SECTION("identical seed reproduces byte-identical serialization") {
        std::ostringstream a, b;
        write_trajectory_records(gen_lds_trajectory(cfg, 77), a);
        write_trajectory_records(gen_lds_trajectory(cfg, 77), b);
        CHECK(a.str() == b.str());
    }
}

TEST_CASE("trajectory records and metadata", "[simulators]") {
    RegressionConfig cfg;
    cfg.d = 2;
    cfg.N = 4;
    cfg.cp_lo = cfg.cp_hi = 2;
    Trajectory traj = gen_regression_trajectory(cfg, 3);

    std::ostringstream out;
    write_trajectory_records(traj, out);
    std::istringstream in(out.str());
    std::string header;
    std::getline(in, header);
    CHECK(header == "t,x0,x1,y");
    int rows = 0;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 4);

    const std::string meta = trajectory_metadata_json(traj);
    CHECK(meta.find("\"seed\": 3") != std::string::npos);
    CHECK(meta.find("\"n1_star\": 2") != std::string::npos);
    CHECK(meta.find("\"kind\": \"regression\"") != std::string::npos);

    SECTION("record values round-trip exactly") {
        std::istringstream again(out.str());
        std::getline(again, header);
        std::getline(again, line);
        const auto first_comma = line.find(',');
        const auto second_comma = line.find(',', first_comma + 1);
        const double x0 = parse_double(line.substr(first_comma + 1, second_comma - first_comma - 1));
        CHECK(x0 == traj.xs(0, 0));
    }
}
