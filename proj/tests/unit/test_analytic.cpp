#include "doctest.h"

#include <cmath>

#include "ramlift/analytic.hpp"
#include "ramlift/groups.hpp"
#include "test_util.hpp"

using namespace ramlift;
using namespace ramlift::analytic;

namespace {

// Independent quadrature oracle: fixed-step composite Simpson.
double simpson_fixed(double a, double b, std::size_t panels) {
    double h = (b - a) / static_cast<double>(panels);
    double sum = 1.0 / std::log(a) + 1.0 / std::log(b);
    for (std::size_t i = 1; i < panels; ++i)
        sum += (i % 2 ? 4.0 : 2.0) / std::log(a + h * static_cast<double>(i));
    return sum * h / 3.0;
}

} // namespace

TEST_CASE("logint: endpoints, oracle agreement, monotonicity") {
    CHECK(logint(2.0) == 0.0);
    CHECK_THROWS_AS(logint(1.5), domain_error);

    double adaptive = logint(10.0);
    double fixed = simpson_fixed(2.0, 10.0, 1000000);
    CHECK(std::fabs(adaptive - fixed) <= 1e-8 * fixed);

    testutil::Rng rng(41);
    double prev_x = 2.0, prev = 0.0;
    for (int i = 0; i < 20; ++i) {
        double x = prev_x + 1.0 + static_cast<double>(rng.below(1000));
        double v = logint(x);
        CHECK(v > prev);
        prev = v;
        prev_x = x;
    }

    // Incremental segments recompose the whole integral.
    double direct = logint(1e6);
    double pieces = logint_segment(2.0, 1e3) + logint_segment(1e3, 1e6);
    CHECK(std::fabs(direct - pieces) <= 1e-9 * direct);
}

TEST_CASE("split_density is exact rational arithmetic") {
    SplitDensity s = split_density({Rational(1, 100), 5});
    CHECK(s.zero_density == Rational(1, 500));
    CHECK(s.one_density == Rational(1, 125));
    CHECK(s.zero_density + s.one_density == Rational(1, 100));

    // Large p: the one-density tends to d.
    SplitDensity t = split_density({Rational(1, 100), 10007});
    CHECK(t.one_density == Rational(10006, 1000700));
    CHECK(t.zero_density + t.one_density == Rational(1, 100));

    CHECK_THROWS_AS(split_density({Rational(0, 1), 5}), domain_error);
    CHECK_THROWS_AS(split_density({Rational(1, 100), 3}), domain_error);
}

TEST_CASE("split_density agrees with the layer-extended centralizer") {
    // Extending the group by one trace-zero layer multiplies the centralizer
    // of the class by the layer centralizer; the extended-class density is
    // the base density divided by exactly that factor.
    std::int64_t base_centralizer = 100;
    std::int64_t layer = static_cast<std::int64_t>(
        ramlift::groups::layer_centralizer_order(Mat2::from_ints(2, 0, 0, 1, 5, 1)));
    SplitDensity s = split_density({Rational(1, base_centralizer), 5});
    CHECK(s.zero_density == Rational(1, base_centralizer * layer));
}

TEST_CASE("lo_bound formula identities") {
    // Zero class ratio leaves only e1 * log(D).
    CHECK(lo_bound(10.0, 0.0, 100.0, 5.0, 2.0) == doctest::Approx(2.0 * std::log(100.0)));

    // Doubling n_L adds exactly e1 * ratio * sqrt(x) * n_L * log(x).
    double x = 1e4, ratio = 0.3, disc = 50.0, nl = 7.0, e1 = 1.5;
    double base = lo_bound(x, ratio, disc, nl, e1);
    double doubled = lo_bound(x, ratio, disc, 2 * nl, e1);
    CHECK(doubled - base == doctest::Approx(e1 * ratio * std::sqrt(x) * nl * std::log(x)));

    // Monotone in every argument.
    CHECK(lo_bound(2 * x, ratio, disc, nl, e1) > base);
    CHECK(lo_bound(x, 2 * ratio, disc, nl, e1) > base);
    CHECK(lo_bound(x, ratio, 2 * disc, nl, e1) > base);
    CHECK(lo_bound(x, ratio, disc, nl, 2 * e1) > base);

    // bound / li -> 0 along a geometric grid.
    double prev_quot = 1e300;
    for (double xg = 1e6; xg <= 1e30; xg *= 1e6) {
        double quot = lo_bound(xg, ratio, disc, nl, e1) / (xg / std::log(xg));
        CHECK(quot < prev_quot);
        prev_quot = quot;
    }

    CHECK_THROWS_AS(lo_bound(1.0, ratio, disc, nl, e1), domain_error);
    CHECK_THROWS_AS(lo_bound(x, ratio, -1.0, nl, e1), domain_error);
}

TEST_CASE("contradiction_x reaches a crossover with the documented defaults") {
    ContradictionParams params;
    CountingReport report = contradiction_x(params);
    REQUIRE(report.reached);
    CHECK(report.crossover.x > 2.0);
    CHECK(report.crossover.gap > params.safety * report.crossover.budget);
    CHECK(report.error_terms.size() == 5);

    // Consistency: gap == row_main - col_upper, all from one li evaluation.
    for (const auto& pt : report.trajectory)
        CHECK(pt.gap == doctest::Approx(pt.row_main - pt.col_upper).epsilon(1e-12));

    // Ratio strictly increases past the crossover (five recorded points).
    std::size_t cross_idx = 0;
    for (std::size_t i = 0; i < report.trajectory.size(); ++i)
        if (report.trajectory[i].x == report.crossover.x) cross_idx = i;
    REQUIRE(cross_idx + 5 < report.trajectory.size());
    for (std::size_t i = cross_idx; i + 1 < report.trajectory.size(); ++i)
        CHECK(report.trajectory[i + 1].ratio > report.trajectory[i].ratio);

    // Verdict and report are stable under halving the quadrature tolerance.
    ContradictionParams fine = params;
    fine.quad_tol = params.quad_tol / 2.0;
    CountingReport report2 = contradiction_x(fine);
    REQUIRE(report2.reached);
    CHECK(report2.crossover.x == report.crossover.x);
    CHECK(std::fabs(report2.crossover.gap - report.crossover.gap) <=
          1e-6 * report.crossover.gap);
    CHECK(std::fabs(report2.crossover.budget - report.crossover.budget) <=
          1e-6 * report.crossover.budget);

    // p < 5 makes 1 - 2/p nonpositive and must be rejected.
    ContradictionParams bad = params;
    bad.density.p = 3;
    CHECK_THROWS_AS(contradiction_x(bad), domain_error);
}

TEST_CASE("simulate_matrix: degenerate limit and determinism") {
    SimulationParams inf;
    inf.rows = 50;
    inf.p_infinite = true;
    SimulationStats s = simulate_matrix(inf);
    CHECK(s.ones == s.entries);
    CHECK(s.symmetric_pairs == s.pair_count);
    CHECK(s.row_one_density == 1.0);

    SimulationParams params;
    params.rows = 300;
    params.seed = 7;
    SimulationStats a = simulate_matrix(params);
    SimulationStats b = simulate_matrix(params);
    CHECK(a.ones == b.ones);
    CHECK(a.symmetric_pairs == b.symmetric_pairs);
    params.seed = 8;
    SimulationStats c = simulate_matrix(params);
    CHECK(a.ones != c.ones); // different stream
}

TEST_CASE("simulate_matrix: densities within three standard errors") {
    SimulationParams params; // rows=2000, p=5, seed=0
    SimulationStats s = simulate_matrix(params);
    CHECK(std::fabs(s.row_one_density - s.one_density_expected) <= 3.0 * s.one_density_se);
    CHECK(std::fabs(s.col_one_density - s.one_density_expected) <= 3.0 * s.one_density_se);
    CHECK(std::fabs(s.symmetric_freq - s.symmetric_expected) <= 3.0 * s.symmetric_se);
}
