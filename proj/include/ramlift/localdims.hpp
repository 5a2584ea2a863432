#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ramlift/fp.hpp"

// Local cohomology dimensions of the trace-zero adjoint module, by character
// decomposition, local duality and the local Euler characteristic, plus the
// direct-sum decomposition used for the ordinary adjustment at p.

namespace ramlift::localdims {

enum class PlaceKind {
    tame_l,          // unramified split place away from p, Frobenius diag(l, 1)
    multiplicative_v,// place of multiplicative reduction, nontrivial extension class
    ordinary_p       // the place above p, upper-triangular with unramified quotient
};

struct PlaceDescriptor {
    PlaceKind kind;
    std::uint64_t p;
    std::uint64_t l = 0;        // tame_l only: residue class of the prime
    bool star_nontrivial = true;
    unsigned psi_order = 3;     // ordinary_p only: order of the unramified character

    static PlaceDescriptor tame(std::uint64_t p, std::uint64_t l) {
        return {PlaceKind::tame_l, p, l, true, 3};
    }
    static PlaceDescriptor multiplicative(std::uint64_t p, bool star_nontrivial = true) {
        return {PlaceKind::multiplicative_v, p, 0, star_nontrivial, 3};
    }
    static PlaceDescriptor ordinary(std::uint64_t p, bool star_nontrivial, unsigned psi_order = 3) {
        return {PlaceKind::ordinary_p, p, 0, star_nontrivial, psi_order};
    }
};

void validate(const PlaceDescriptor& place);

// One summand of the three-dimensional adjoint module at a tame place.
struct CharacterSummand {
    std::string label;            // "trivial", "cyclotomic", "inverse-cyclotomic"
    std::uint32_t frob_eigenvalue; // mod p
    int twist;                     // exponent of the cyclotomic character
};

struct CharacterDecomposition {
    std::vector<CharacterSummand> summands; // total dimension 3

    unsigned invariant_dim() const {
        unsigned n = 0;
        for (const auto& s : summands) n += s.frob_eigenvalue == 1;
        return n;
    }
};

// Ad^0 at a tame place splits as trivial + cyclotomic + inverse-cyclotomic,
// with Frobenius eigenvalues 1, l, l^-1.
CharacterDecomposition ad0_decomposition(const PlaceDescriptor& place);

// The decomposition twisted by the cyclotomic character (eigenvalues times l).
CharacterDecomposition twist_by_cyclotomic(const CharacterDecomposition& dec, std::uint64_t p,
                                           std::uint64_t l);

struct HDims {
    unsigned h0, h1, h2;
    friend bool operator==(const HDims& a, const HDims& b) {
        return a.h0 == b.h0 && a.h1 == b.h1 && a.h2 == b.h2;
    }
};

// h0 from invariants, h2 by local duality, h1 from the Euler characteristic
// (h1 = h0 + h2 away from p; the module dimension 3 enters at p).
HDims local_h_dims(const PlaceDescriptor& place);

// Dimension of the ordinary subspace of H^1 at p: 1 or 2 as the extension
// class is nontrivial or trivial.
unsigned h1_ord_dim(const PlaceDescriptor& place);

// Splitting of the ambient space at p as U + W with U the image of the
// global restriction map and W the ordinary classes.
struct SubspaceDecompositionProblem {
    std::uint64_t p;
    unsigned ambient_dim;
    std::vector<fp::Vec> u_basis;
    std::vector<fp::Vec> w_basis;
    fp::Vec target;
};

struct SubspaceDecomposition {
    fp::Vec in_u;       // component vector in the ambient space
    fp::Vec in_w;
    fp::Vec u_coords;   // coordinates in the given bases
    fp::Vec w_coords;
};

// Checks U and W are complementary; throws otherwise.
void validate_complementary(std::uint64_t p, unsigned ambient_dim,
                            const std::vector<fp::Vec>& u_basis,
                            const std::vector<fp::Vec>& w_basis);

// Unique decomposition target = f + h with f in U, h in W.
SubspaceDecomposition subspace_decompose(const SubspaceDecompositionProblem& problem);

} // namespace ramlift::localdims
