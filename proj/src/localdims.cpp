#include "ramlift/localdims.hpp"

#include "ramlift/residue.hpp"

namespace ramlift::localdims {

void validate(const PlaceDescriptor& place) {
    if (place.p < 5 || !is_prime_u64(place.p))
        throw config_error("place: p must be a prime >= 5");
    switch (place.kind) {
    case PlaceKind::tame_l: {
        std::uint64_t a = place.l % place.p;
        if (a == 0 || a == 1 || a == place.p - 1)
            throw config_error("place: tame l must not be 0 or +-1 mod p");
        break;
    }
    case PlaceKind::multiplicative_v:
        // The extension class at a multiplicative place is nontrivial in the
        // configurations this calculator supports (nothing determines the
        // dimensions otherwise).
        if (!place.star_nontrivial)
            throw config_error("place: multiplicative place requires a nontrivial extension class");
        break;
    case PlaceKind::ordinary_p:
        if (place.psi_order <= 2)
            throw config_error("place: ordinary place requires psi of order > 2");
        break;
    }
}

CharacterDecomposition ad0_decomposition(const PlaceDescriptor& place) {
    if (place.kind != PlaceKind::tame_l)
        throw domain_error("ad0_decomposition: only tame places decompose by characters here");
    validate(place);
    fp::Elt p = static_cast<fp::Elt>(place.p);
    fp::Elt a = static_cast<fp::Elt>(place.l % place.p);
    return {{{"trivial", 1, 0},
             {"cyclotomic", a, 1},
             {"inverse-cyclotomic", fp::inv(a, p), -1}}};
}

CharacterDecomposition twist_by_cyclotomic(const CharacterDecomposition& dec, std::uint64_t p,
                                           std::uint64_t l) {
    CharacterDecomposition out = dec;
    fp::Elt a = static_cast<fp::Elt>(l % p);
    for (auto& s : out.summands) {
        s.frob_eigenvalue = fp::mul(s.frob_eigenvalue, a, static_cast<fp::Elt>(p));
        s.twist += 1;
    }
    return out;
}

HDims local_h_dims(const PlaceDescriptor& place) {
    validate(place);
    switch (place.kind) {
    case PlaceKind::tame_l: {
        CharacterDecomposition dec = ad0_decomposition(place);
        unsigned h0 = dec.invariant_dim();
        // Local duality: h2 equals the invariants of the twisted module.
        unsigned h2 = twist_by_cyclotomic(dec, place.p, place.l).invariant_dim();
        unsigned h1 = h0 + h2; // Euler characteristic away from p
        return {h0, h1, h2};
    }
    case PlaceKind::multiplicative_v:
        // Nontrivial extension class kills invariants; duality kills h2;
        // Euler characteristic away from p gives h1 = 0.
        return {0, 0, 0};
    case PlaceKind::ordinary_p: {
        unsigned h0 = place.star_nontrivial ? 0 : 1;
        unsigned h2 = 0; // duality with psi^2 nontrivial
        unsigned h1 = h0 + h2 + 3; // Euler characteristic at p adds dim Ad^0
        return {h0, h1, h2};
    }
    }
    throw domain_error("local_h_dims: unreachable");
}

unsigned h1_ord_dim(const PlaceDescriptor& place) {
    if (place.kind != PlaceKind::ordinary_p)
        throw domain_error("h1_ord_dim: only defined at the ordinary place above p");
    validate(place);
    return place.star_nontrivial ? 1 : 2;
}

void validate_complementary(std::uint64_t p, unsigned ambient_dim,
                            const std::vector<fp::Vec>& u_basis,
                            const std::vector<fp::Vec>& w_basis) {
    fp::Elt pe = static_cast<fp::Elt>(p);
    for (const auto& v : u_basis)
        if (v.size() != ambient_dim)
            throw config_error("subspace: U basis vector of wrong dimension");
    for (const auto& v : w_basis)
        if (v.size() != ambient_dim)
            throw config_error("subspace: W basis vector of wrong dimension");
    if (u_basis.size() + w_basis.size() != ambient_dim)
        throw config_error("subspace: dim U + dim W must equal the ambient dimension");
    fp::RowSpace joint(pe);
    for (const auto& v : u_basis)
        if (!joint.insert(v)) throw config_error("subspace: U basis is dependent");
    for (const auto& v : w_basis)
        if (!joint.insert(v)) throw config_error("subspace: U and W are not complementary");
}

SubspaceDecomposition subspace_decompose(const SubspaceDecompositionProblem& problem) {
    validate_complementary(problem.p, problem.ambient_dim, problem.u_basis, problem.w_basis);
    fp::Elt p = static_cast<fp::Elt>(problem.p);
    std::vector<fp::Vec> cols;
    cols.insert(cols.end(), problem.u_basis.begin(), problem.u_basis.end());
    cols.insert(cols.end(), problem.w_basis.begin(), problem.w_basis.end());
    fp::Vec coeffs;
    if (!fp::solve(cols, problem.target, p, coeffs))
        throw domain_error("subspace_decompose: target not expressible (internal)");

    SubspaceDecomposition out;
    out.u_coords.assign(coeffs.begin(), coeffs.begin() + static_cast<long>(problem.u_basis.size()));
    out.w_coords.assign(coeffs.begin() + static_cast<long>(problem.u_basis.size()), coeffs.end());
    out.in_u.assign(problem.ambient_dim, 0);
    out.in_w.assign(problem.ambient_dim, 0);
    for (std::size_t j = 0; j < problem.u_basis.size(); ++j)
        out.in_u = fp::vec_add(out.in_u, fp::vec_scale(out.u_coords[j], problem.u_basis[j], p), p);
    for (std::size_t j = 0; j < problem.w_basis.size(); ++j)
        out.in_w = fp::vec_add(out.in_w, fp::vec_scale(out.w_coords[j], problem.w_basis[j], p), p);
    return out;
}

} // namespace ramlift::localdims
