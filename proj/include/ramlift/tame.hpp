#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ramlift/fp.hpp"
#include "ramlift/mat2.hpp"

// Local deformation calculus at a tame prime l != p.  The local Galois group
// is topologically generated by a Frobenius sigma and an inertia generator
// tau subject to  sigma tau sigma^-1 = tau^l.  Residually, sigma maps to
// diag(l mod p, 1) and tau to the identity; every lift studied here keeps
// det(sigma) = l and det(tau) = 1.

namespace ramlift::tame {

// Parameters of one tame place.  `l` is the actual (synthetic) prime value,
// meaningful modulo p^precision.  The finite quotient parameters feed the
// brute-force cocycle enumeration: inertia of order tau_order (= p) and a
// Frobenius of order sigma_order (= p * ord_p(l)); the p-divisible Frobenius
// order is what makes the finite quotient reproduce the full tame H^1.
struct TameModel {
    std::uint64_t p;
    std::uint64_t l;
    unsigned precision;
    unsigned tau_order;
    unsigned sigma_order;

    TameModel() : TameModel(5, 7, 1) {}
    TameModel(std::uint64_t p_, std::uint64_t l_, unsigned precision_);

    // Residual Frobenius eigenvalue a = l mod p (never 0 or +-1).
    std::uint32_t residual_eigenvalue() const { return static_cast<std::uint32_t>(l % p); }
    Residue l_at(unsigned level) const { return Residue(l % pow_u64(p, level), p, level); }
};

// Images of (sigma, tau) at one precision level.  Invariants (the tame
// relation, residual shape, determinant pattern) are checked by the
// predicates below rather than enforced at construction, since intermediate
// values of the lifting algorithms pass through unnormalized states.
struct LocalRep {
    TameModel model;
    Mat2 sigma_img;
    Mat2 tau_img;

    unsigned level() const { return sigma_img.level(); }
    LocalRep reduced(unsigned new_level) const {
        return {model, sigma_img.reduced(new_level), tau_img.reduced(new_level)};
    }

    friend bool operator==(const LocalRep& x, const LocalRep& y) {
        return x.sigma_img == y.sigma_img && x.tau_img == y.tau_img;
    }
};

// The exact special shape: sigma = diag(l, 1), tau = [[1, u], [0, 1]].
LocalRep make_special(const TameModel& model, unsigned level, std::uint64_t u_value);

// True iff sigma tau sigma^-1 == tau^l at the representation's level.
bool check_relation(const LocalRep& rep);

// sigma == diag(l, 1) and tau upper unitriangular, as exact matrix equalities.
bool is_special(const LocalRep& rep);

// A 1-cochain on the tame group with values in the trace-zero matrices over
// F_p, recorded by its values on the two generators.
struct Cocycle {
    TraceZeroMat f_sigma;
    TraceZeroMat f_tau;

    Cocycle();
    Cocycle(TraceZeroMat fs, TraceZeroMat ft);

    std::uint64_t p() const { return f_sigma.p(); }
    bool is_zero() const { return f_sigma.is_zero() && f_tau.is_zero(); }

    friend Cocycle operator+(const Cocycle& x, const Cocycle& y);
    friend bool operator==(const Cocycle& x, const Cocycle& y) {
        return x.f_sigma == y.f_sigma && x.f_tau == y.f_tau;
    }
};

Cocycle scale(std::uint32_t c, const Cocycle& f);

// The tame relation forces  Ad(sigma) f(tau) = l * f(tau)  over F_p, i.e.
// f(tau) lies in the l-eigenspace of conjugation by diag(l mod p, 1).
bool satisfies_relation_condition(const Cocycle& f, const TameModel& model);

// Coboundary of a trace-zero matrix M:  g -> M - g.M.
Cocycle coboundary(const TraceZeroMat& m, const TameModel& model);

struct CocycleSpace {
    std::vector<Cocycle> z1_basis; // dimension 4
    std::vector<Cocycle> b1_basis; // dimension 2
    Cocycle r;                     // unramified class: f(sigma) = diag(1,-1), f(tau) = 0
    Cocycle s;                     // null class:       f(sigma) = 0, f(tau) = [[0,1],[0,0]]
};

// Structural computation of Z^1, B^1 and the (r, s) basis of H^1.
CocycleSpace cocycle_space(const TameModel& model);

enum class CocycleKind { coboundary, unramified, null, mixed };

struct CocycleClassification {
    CocycleKind kind;
    std::uint32_t a; // coefficient of [r] in H^1
    std::uint32_t b; // coefficient of [s] in H^1
    bool nonnull() const { return a != 0; }
};

// Coordinates of [f] in the (r, s) basis; constant on cohomology classes.
CocycleClassification classify(const Cocycle& f, const TameModel& model);

// The H^1 action on lifts:  g -> (I + p^e lift(f(g))) * rep(g).
// Cocycle values are lifted with exactly vanishing trace, so determinants are
// preserved mod p^(e+1) always, and exactly when 2e >= level.  The tame
// relation survives at level e+1 whenever f satisfies the relation condition.
LocalRep act(const Cocycle& f, const LocalRep& rep, unsigned exponent);

struct NormalForm {
    Mat2 conjugator;   // == I mod p, diagonal entries exactly 1
    Residue lambda1;   // Frobenius eigenvalue over l mod p
    Residue lambda2;   // Frobenius eigenvalue over 1
    Residue u;         // inertia parameter of the conjugated representation
    LocalRep normalized;
    bool special;      // lambda1 == l exactly
};

// Conjugates by a matrix == I (mod p) so that sigma becomes exactly diagonal;
// the relation then forces tau upper unitriangular.  The representation is
// special up to strict equivalence iff lambda1 == l.
NormalForm normalize_to_special(const LocalRep& rep);

struct Adjustment {
    std::uint32_t alpha;
    LocalRep adjusted;
};

// Given a level-(n+1) lift of a special level-n representation and a nonnull
// class f, finds the unique alpha mod p with (alpha f) . rep special, and
// returns the normalized result.  Null f cannot move the Frobenius eigenvalue
// and is rejected.
Adjustment adjust_to_special(const LocalRep& rep, const Cocycle& f);

// Lifts a special representation one level by lifting u; u_next must reduce
// to the current parameter.
LocalRep special_lift_step(const LocalRep& rep, const Residue& u_next);

// ---------------------------------------------------------------------------
// Brute-force oracle over the finite tame quotient
//   < sigma, tau | tau^T, sigma^S, sigma tau sigma^-1 tau^-l >
// with T = tau_order, S = sigma_order.  Cocycles are determined by their
// generator values, a 6-dimensional coordinate space over F_p ordered as
//   (f_sigma: e+, h, e-,  f_tau: e+, h, e-)
// with e+ = [[0,1],[0,0]], h = [[1,0],[0,-1]], e- = [[0,0],[1,0]].

struct QuotientEnumeration {
    unsigned dim_z1;
    unsigned dim_b1;
    unsigned dim_h1;
    std::uint64_t pairs_checked;            // |G|^2, every pair tested
    std::vector<fp::Vec> z1_basis;          // kernel vectors in the 6-dim space
};

// Extends each candidate linearly along the normal form tau^j sigma^i and
// accumulates the defect f(gh) - f(g) - g.f(h) of every pair (g, h) as a
// linear constraint; Z^1 is the joint kernel.
QuotientEnumeration quotient_cocycle_dims(const TameModel& model);

// Literal sweep over all p^6 generator-value candidates with an early-abort
// all-pairs check; returns the number of candidates that extend to cocycles.
// Only sensible for small p (reference: p = 5, 15625 candidates).
std::uint64_t quotient_cocycle_count_literal(const TameModel& model);

// Coordinates of a cocycle in the 6-dimensional generator-value space.
fp::Vec cocycle_coords(const Cocycle& f);

} // namespace ramlift::tame
