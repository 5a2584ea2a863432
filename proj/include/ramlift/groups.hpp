#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "ramlift/mat2.hpp"

// Finite matrix-group machinery: breadth-first subgroup closure, the
// exhaustive no-section certificate for GL2(Z/p^2) -> GL2(F_p), semidirect
// products of GL2(Z/p^(k+2)) acting on stacked trace-zero layers, centralizer
// counts, and the two Frobenius conjugacy-class prescriptions used when a new
// prime is added to the level.

namespace ramlift::groups {

// |GL2(Z/p^level)| = (p^2 - 1)(p^2 - p) p^(4(level-1)).
std::uint64_t gl2_order(std::uint64_t p, unsigned level);

struct ClosureResult {
    bool capped;         // true: the subgroup exceeded the cap, order is a lower bound
    std::uint64_t order; // exact order when !capped
};

// Exact order of the subgroup generated by `generators`, abandoning the
// enumeration once more than `cap` elements are seen.  All generators must be
// invertible and share (p, level); entries are packed four-per-word, which
// restricts p^level to 16 bits.
ClosureResult closure(const std::vector<Mat2>& generators, std::uint64_t cap);

// A verified generating pair of GL2(F_p): diag(g, 1) for the least primitive
// root g, and the Weyl-times-unipotent element [[0,-1],[1,1]].  Validated by
// closure == |GL2(F_p)| before use.
std::pair<Mat2, Mat2> gl2_generating_pair(std::uint64_t p);

enum class SectionVerdict { no_section, section_found };

struct SectionSearchOptions {
    unsigned threads = 0;                  // 0: one per hardware thread
    unsigned ambient_level = 2;            // 1 reduces to the split sanity ambient
    std::uint64_t max_candidates = 500000; // refuse larger searches outright
};

struct SectionSearchResult {
    SectionVerdict verdict;
    std::uint64_t candidates_checked;
    std::optional<std::pair<Mat2, Mat2>> witness; // a lift pair generating a section
    double seconds;
};

// Decides whether the reduction GL2(Z/p^ambient_level) -> GL2(F_p) admits a
// group-theoretic section by exhausting every lift pair of the fixed
// generating pair and closing each with an early-abort cap of |GL2(F_p)| + 1.
// Throws budget_error when the candidate space exceeds the budget, so a
// partial search can never masquerade as a negative certificate.
SectionSearchResult section_search(std::uint64_t p, const SectionSearchOptions& opts = {});

// Element of (Ad^0)^layers x| GL2(Z/p^level): the matrix part acts on every
// layer through its reduction mod p, by conjugation.
//   (n, c)(n', c') = (n + c.n', cc')
struct SemidirectElement {
    std::vector<TraceZeroMat> layers; // over F_p, index 0 = bottom
    Mat2 c;
};

SemidirectElement sd_identity(std::uint64_t p, unsigned level, unsigned layer_count);
SemidirectElement sd_mul(const SemidirectElement& x, const SemidirectElement& y);
SemidirectElement sd_inverse(const SemidirectElement& x);
bool sd_equal(const SemidirectElement& x, const SemidirectElement& y);

// Exact multiplicative order; `cap` bounds the order search of the matrix part.
std::uint64_t element_order(const SemidirectElement& x, std::uint64_t cap = 1u << 24);

// Order of the subgroup of the trace-zero layer fixed by conjugation by
// `a_residual` (diagonal with distinct entries mod p), counted exhaustively
// over all p^3 layer elements.
std::uint64_t layer_centralizer_order(const Mat2& a_residual);

enum class Variant { unconditional, grh };

// The Frobenius class prescribed for the primes to be added at stage k:
// the matrix part A over Z/p^(k+2) and the top-layer element B.
struct ChebotarevClassSpec {
    Variant variant;
    std::uint64_t p;
    unsigned k;
    Mat2 A;
    TraceZeroMat B;              // over F_p
    unsigned b_layer;            // B sits in layer k; lower projections vanish
    Residue frobenius_congruence; // primes in the class are == this mod p^(k+2)
};

ChebotarevClassSpec chebotarev_class(Variant variant, std::uint64_t p, unsigned k);

} // namespace ramlift::groups
