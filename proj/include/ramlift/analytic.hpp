#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ramlift/rational.hpp"

// Prime-counting side of the construction: class densities, the conditional
// effective error bound, and the row/column double count whose main terms
// eventually dwarf every error term.  A seeded Monte Carlo backs the
// null-probability heuristic.

namespace ramlift::analytic {

// Integral of dt/ln(t) from 2 to x, by adaptive Simpson quadrature.
double logint(double x, double rel_tol = 1e-10);

// Same integral over [a, b] with 2 <= a <= b; used for incremental grids.
double logint_segment(double a, double b, double rel_tol = 1e-10);

struct DensityParams {
    Rational d;      // base class density, a reciprocal centralizer order
    std::uint64_t p;
};

struct SplitDensity {
    Rational zero_density; // d / p
    Rational one_density;  // d (1 - 1/p)
};

// Splits the base density by whether the Frobenius also fixes the added
// trace-zero layer: d/p for the extended class, d(1 - 1/p) for the rest.
SplitDensity split_density(const DensityParams& params);

// The conditional Chebotarev error bound
//   e1 * (class_ratio * sqrt(x) * log(D_L * x^n_L) + log(D_L)),
// evaluated through logarithms so large discriminants cannot overflow.
double lo_bound(double x, double class_ratio, double disc, double n_L, double e1);
double lo_bound_logdisc(double x, double class_ratio, double log_disc, double n_L, double e1);

struct LOParams {
    double e1 = 1.0;   // absolute constant of the bound (placeholder default)
    double c1 = 1.0;   // discriminant model: D = c1 * q^c2
    double c2 = 10.0;
    double n_L = 100.0; // field degree
};

struct ContradictionParams {
    DensityParams density{Rational(1, 100), 5};
    LOParams lo{};
    double quad_tol = 1e-10;
    double safety = 2.0;     // contradiction demands gap > safety * budget
    double x0 = 4.0;         // doubling grid start
    unsigned max_doublings = 240;
    unsigned extra_points = 5; // grid points recorded past the crossover
};

struct ErrorTerm {
    std::string label;
    double value;
};

struct GridPoint {
    double x;
    double li;
    double row_main;   // d^2 (1 - 1/p) li^2
    double col_upper;  // (d^2 / p) li^2
    double gap;        // d^2 (1 - 2/p) li^2
    double budget;     // row-sum budget + column-sum budget
    double ratio;      // gap / (safety * budget)
};

struct CountingReport {
    bool reached = false;
    GridPoint crossover{};               // first grid point with ratio > 1
    std::vector<ErrorTerm> error_terms;  // breakdown at the crossover (one side)
    std::vector<GridPoint> trajectory;
    DensityParams density;
    LOParams lo;
    double safety;
    double quad_tol;
};

// Walks the doubling grid computing both counts of the same square from the
// same li(x) evaluation: the row sum d^2(1-1/p)li^2 and the column upper
// bound (d^2/p)li^2, each charged an explicit error budget assembled from the
// per-row conditional bound plus the Chebyshev-bounded sum of log q.  Reports
// the first x where the main-term gap exceeds safety times the total budget.
CountingReport contradiction_x(const ContradictionParams& params);

struct SimulationParams {
    unsigned rows = 2000;
    std::uint64_t p = 5;
    Rational d{1, 100};      // context echo: density of the indexing primes
    std::uint64_t seed = 0;
    bool p_infinite = false; // surrogate for the p -> infinity limit: P(0) = 0
};

struct SimulationStats {
    unsigned rows = 0;
    std::uint64_t entries = 0;          // off-diagonal cells
    std::uint64_t ones = 0;
    double row_one_density = 0;
    double col_one_density = 0;
    double one_density_expected = 0;    // 1 - 1/p
    double one_density_se = 0;
    std::uint64_t pair_count = 0;       // unordered off-diagonal pairs
    std::uint64_t symmetric_pairs = 0;  // 1 in both ij and ji
    double symmetric_freq = 0;
    double symmetric_expected = 0;      // (1 - 1/p)^2
    double symmetric_se = 0;
    std::uint64_t seed = 0;
    Rational d;
};

// Seeded 0/1 matrix with independent off-diagonal entries, P(0) = 1/p; rows
// draw from per-row derived streams, so sharding cannot change the output.
SimulationStats simulate_matrix(const SimulationParams& params);

} // namespace ramlift::analytic
