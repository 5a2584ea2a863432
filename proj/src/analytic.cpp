#include "ramlift/analytic.hpp"

#include <cmath>

namespace ramlift::analytic {

namespace {

// theta(x) = sum_{q <= x} log q < THETA_BOUND * x for all x > 0
// (Rosser-Schoenfeld); bounds the log-of-modulus sums explicitly.
constexpr double THETA_BOUND = 1.01624;

double integrand(double t) { return 1.0 / std::log(t); }

double simpson(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive(double a, double b, double fa, double fm, double fb, double whole, double tol,
                int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = integrand(lm), frm = integrand(rm);
    double left = simpson(a, m, fa, flm, fm);
    double right = simpson(m, b, fm, frm, fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

struct Splitmix {
    std::uint64_t state;
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

} // namespace

double logint_segment(double a, double b, double rel_tol) {
    if (a < 2.0 || b < a) throw domain_error("logint: domain requires 2 <= a <= b");
    if (a == b) return 0.0;
    double fa = integrand(a), fb = integrand(b), fm = integrand(0.5 * (a + b));
    double whole = simpson(a, b, fa, fm, fb);
    // Absolute tolerance scaled from a crude magnitude estimate.
    double scale = std::fabs(whole) > 1.0 ? std::fabs(whole) : 1.0;
    return adaptive(a, b, fa, fm, fb, whole, rel_tol * scale, 64);
}

double logint(double x, double rel_tol) {
    if (x < 2.0) throw domain_error("logint: x must be >= 2");
    return logint_segment(2.0, x, rel_tol);
}

SplitDensity split_density(const DensityParams& params) {
    if (params.p < 5) throw domain_error("split_density: p >= 5 required");
    if (params.d.num <= 0 || params.d.value() > 1.0)
        throw domain_error("split_density: density must lie in (0, 1]");
    Rational p(static_cast<std::int64_t>(params.p));
    Rational zero = params.d / p;
    Rational one = params.d * (Rational(1) - Rational(1) / p);
    return {zero, one};
}

double lo_bound_logdisc(double x, double class_ratio, double log_disc, double n_L, double e1) {
    if (x <= 2.0) throw domain_error("lo_bound: x > 2 required");
    if (class_ratio < 0 || n_L <= 0 || e1 <= 0)
        throw domain_error("lo_bound: parameters must be positive");
    return e1 * (class_ratio * std::sqrt(x) * (log_disc + n_L * std::log(x)) + log_disc);
}

double lo_bound(double x, double class_ratio, double disc, double n_L, double e1) {
    if (disc <= 0) throw domain_error("lo_bound: discriminant must be positive");
    return lo_bound_logdisc(x, class_ratio, std::log(disc), n_L, e1);
}

namespace {

// One side's explicit error budget for the x-by-x square, following the
// term-by-term expansion of the per-row bound with D = c1 q^c2:
//   rows * e1 * rho * sqrt(x) * n_L log x        rows = d li(x), rho = d(1-1/p)
// + rows * e1 * rho * sqrt(x) * log c1
// + e1 * rho * sqrt(x) * c2 * Theta x            (sum of log q over the class)
// + rows * e1 * log c1
// + e1 * c2 * Theta x
std::vector<ErrorTerm> side_budget(double x, double li, const DensityParams& dp,
                                   const LOParams& lo) {
    double d = dp.d.value();
    double rho = d * (1.0 - 1.0 / static_cast<double>(dp.p));
    double rows = d * li;
    double sqx = std::sqrt(x);
    double logx = std::log(x);
    double logc1 = std::log(lo.c1);
    double theta_x = THETA_BOUND * x;
    return {
        {"rows*e1*rho*sqrt(x)*nL*log(x)", rows * lo.e1 * rho * sqx * lo.n_L * logx},
        {"rows*e1*rho*sqrt(x)*log(c1)", rows * lo.e1 * rho * sqx * logc1},
        {"e1*rho*sqrt(x)*c2*theta(x)", lo.e1 * rho * sqx * lo.c2 * theta_x},
        {"rows*e1*log(c1)", rows * lo.e1 * logc1},
        {"e1*c2*theta(x)", lo.e1 * lo.c2 * theta_x},
    };
}

double total(const std::vector<ErrorTerm>& terms) {
    double s = 0;
    for (const auto& t : terms) s += t.value;
    return s;
}

} // namespace

CountingReport contradiction_x(const ContradictionParams& params) {
    const DensityParams& dp = params.density;
    if (dp.p < 5) throw domain_error("contradiction_x: p >= 5 required (1 - 2/p must be positive)");
    if (dp.d.num <= 0) throw domain_error("contradiction_x: density must be positive");
    if (params.lo.c1 <= 0 || params.lo.c2 <= 0 || params.lo.e1 <= 0 || params.lo.n_L <= 0)
        throw domain_error("contradiction_x: bound constants must be positive");

    double d = dp.d.value();
    double p = static_cast<double>(dp.p);
    CountingReport report;
    report.density = dp;
    report.lo = params.lo;
    report.safety = params.safety;
    report.quad_tol = params.quad_tol;

    double x = params.x0;
    double li = logint(x, params.quad_tol);
    unsigned extra_left = params.extra_points;
    for (unsigned step = 0; step <= params.max_doublings; ++step) {
        GridPoint pt;
        pt.x = x;
        pt.li = li;
        pt.row_main = d * d * (1.0 - 1.0 / p) * li * li;
        pt.col_upper = d * d / p * li * li;
        pt.gap = d * d * (1.0 - 2.0 / p) * li * li;
        std::vector<ErrorTerm> side = side_budget(x, li, dp, params.lo);
        pt.budget = 2.0 * total(side); // row sum and column sum each carry one
        pt.ratio = pt.gap / (params.safety * pt.budget);
        report.trajectory.push_back(pt);

        if (!report.reached && pt.ratio > 1.0) {
            report.reached = true;
            report.crossover = pt;
            report.error_terms = side;
        } else if (report.reached) {
            if (extra_left == 0) break;
            --extra_left;
        }

        li += logint_segment(x, 2.0 * x, params.quad_tol);
        x *= 2.0;
    }
    return report;
}

SimulationStats simulate_matrix(const SimulationParams& params) {
    if (params.rows == 0) throw domain_error("simulate_matrix: rows must be positive");
    if (!params.p_infinite && params.p < 2)
        throw domain_error("simulate_matrix: p must be at least 2");

    const unsigned n = params.rows;
    std::vector<std::uint8_t> cell(static_cast<std::size_t>(n) * n, 1);
    for (unsigned i = 0; i < n; ++i) {
        Splitmix row_rng{mix_seed(params.seed, i)};
        for (unsigned j = 0; j < n; ++j) {
            if (i == j) continue;
            bool zero = !params.p_infinite && row_rng.next() % params.p == 0;
            cell[static_cast<std::size_t>(i) * n + j] = zero ? 0 : 1;
        }
    }

    SimulationStats stats;
    stats.rows = n;
    stats.seed = params.seed;
    stats.d = params.d;
    stats.entries = static_cast<std::uint64_t>(n) * (n - 1);
    std::uint64_t row_ones = 0, col_ones = 0, sym = 0;
    for (unsigned i = 0; i < n; ++i)
        for (unsigned j = 0; j < n; ++j) {
            if (i == j) continue;
            std::uint8_t v = cell[static_cast<std::size_t>(i) * n + j];
            row_ones += v;
            col_ones += cell[static_cast<std::size_t>(j) * n + i];
            if (i < j && v && cell[static_cast<std::size_t>(j) * n + i]) ++sym;
        }
    stats.ones = row_ones;
    stats.row_one_density = static_cast<double>(row_ones) / static_cast<double>(stats.entries);
    stats.col_one_density = static_cast<double>(col_ones) / static_cast<double>(stats.entries);
    double q1 = params.p_infinite ? 1.0 : 1.0 - 1.0 / static_cast<double>(params.p);
    stats.one_density_expected = q1;
    stats.one_density_se = std::sqrt(q1 * (1.0 - q1) / static_cast<double>(stats.entries));
    stats.pair_count = static_cast<std::uint64_t>(n) * (n - 1) / 2;
    stats.symmetric_pairs = sym;
    stats.symmetric_freq = static_cast<double>(sym) / static_cast<double>(stats.pair_count);
    stats.symmetric_expected = q1 * q1;
    stats.symmetric_se =
        std::sqrt(q1 * q1 * (1.0 - q1 * q1) / static_cast<double>(stats.pair_count));
    return stats;
}

} // namespace ramlift::analytic
