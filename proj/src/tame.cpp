#include "ramlift/tame.hpp"

#include <utility>

namespace ramlift::tame {

namespace {

// Basis of the trace-zero matrices used throughout:
//   e+ = [[0,1],[0,0]],  h = [[1,0],[0,-1]],  e- = [[0,0],[1,0]].
// Conjugation by diag(a, 1) scales the components by (a, 1, a^-1).
TraceZeroMat basis_eplus(std::uint64_t p) { return TraceZeroMat::from_ints(0, 1, 0, p, 1); }
TraceZeroMat basis_h(std::uint64_t p) { return TraceZeroMat::from_ints(1, 0, 0, p, 1); }
TraceZeroMat basis_eminus(std::uint64_t p) { return TraceZeroMat::from_ints(0, 0, 1, p, 1); }

std::array<std::uint32_t, 3> components(const TraceZeroMat& f) {
    return {static_cast<std::uint32_t>(f.mat().b().value()),
            static_cast<std::uint32_t>(f.mat().a().value()),
            static_cast<std::uint32_t>(f.mat().c().value())};
}

Mat2 residual_frobenius_matrix(const TameModel& model) {
    return Mat2::from_ints(static_cast<std::int64_t>(model.residual_eigenvalue()), 0, 0, 1,
                           model.p, 1);
}

} // namespace

TameModel::TameModel(std::uint64_t p_, std::uint64_t l_, unsigned precision_)
    : p(p_), l(l_), precision(precision_) {
    validate_modulus(p, precision);
    std::uint64_t a = l % p;
    if (a == 0 || a == 1 || a == p - 1)
        throw config_error("TameModel: l must not be 0 or +-1 mod p");
    tau_order = static_cast<unsigned>(p);
    sigma_order = static_cast<unsigned>(p) * fp::order(static_cast<fp::Elt>(a),
                                                       static_cast<fp::Elt>(p));
    // Consistency of the finite quotient: l^sigma_order == 1 mod tau_order.
    if (fp::pow(static_cast<fp::Elt>(a), sigma_order, static_cast<fp::Elt>(tau_order)) != 1 % tau_order)
        throw config_error("TameModel: inconsistent finite quotient orders");
}

LocalRep make_special(const TameModel& model, unsigned level, std::uint64_t u_value) {
    Residue l = model.l_at(level);
    Residue u(u_value, model.p, level);
    if (!u.is_zero() && u.value() % model.p != 0)
        throw domain_error("make_special: inertia parameter must vanish mod p");
    Mat2 sigma = Mat2::diagonal(l, Residue::one(model.p, level));
    Mat2 tau(Residue::one(model.p, level), u, Residue::zero(model.p, level),
             Residue::one(model.p, level));
    return {model, sigma, tau};
}

bool check_relation(const LocalRep& rep) {
    if (!rep.sigma_img.is_invertible()) return false;
    Mat2 lhs = rep.sigma_img * rep.tau_img * rep.sigma_img.inverse();
    Mat2 rhs = rep.tau_img.pow(rep.model.l);
    return lhs == rhs;
}

bool is_special(const LocalRep& rep) {
    unsigned level = rep.level();
    Residue one = Residue::one(rep.model.p, level);
    Residue zero = Residue::zero(rep.model.p, level);
    if (rep.sigma_img != Mat2::diagonal(rep.model.l_at(level), one)) return false;
    const Mat2& t = rep.tau_img;
    return t.a() == one && t.d() == one && t.c() == zero && t.b().value() % rep.model.p == 0;
}

Cocycle::Cocycle() : f_sigma(), f_tau() {}

Cocycle::Cocycle(TraceZeroMat fs, TraceZeroMat ft) : f_sigma(std::move(fs)), f_tau(std::move(ft)) {
    if (f_sigma.p() != f_tau.p())
        throw domain_error("Cocycle: mismatched primes");
    if (f_sigma.level() != 1 || f_tau.level() != 1)
        throw domain_error("Cocycle: values live over F_p (level 1)");
}

Cocycle operator+(const Cocycle& x, const Cocycle& y) {
    return Cocycle(TraceZeroMat(x.f_sigma.mat() + y.f_sigma.mat()),
                   TraceZeroMat(x.f_tau.mat() + y.f_tau.mat()));
}

Cocycle scale(std::uint32_t c, const Cocycle& f) {
    Residue r(c, f.p(), 1);
    return Cocycle(TraceZeroMat(r * f.f_sigma.mat()), TraceZeroMat(r * f.f_tau.mat()));
}

bool satisfies_relation_condition(const Cocycle& f, const TameModel& model) {
    if (f.p() != model.p) throw domain_error("cocycle prime does not match model");
    Mat2 frob = residual_frobenius_matrix(model);
    Mat2 conj = frob * f.f_tau.mat() * frob.inverse();
    Residue lam(model.residual_eigenvalue(), model.p, 1);
    return conj == lam * f.f_tau.mat();
}

Cocycle coboundary(const TraceZeroMat& m, const TameModel& model) {
    Mat2 frob = residual_frobenius_matrix(model);
    Mat2 ds = m.mat() - frob * m.mat() * frob.inverse();
    return Cocycle(TraceZeroMat(ds), TraceZeroMat::zero(model.p, 1));
}

CocycleSpace cocycle_space(const TameModel& model) {
    std::uint64_t p = model.p;
    std::uint64_t a = model.residual_eigenvalue();
    if (a == 1 || a == p - 1)
        throw config_error("cocycle_space: l == +-1 mod p is unsupported");
    CocycleSpace space;
    TraceZeroMat zero = TraceZeroMat::zero(p, 1);
    // Z^1: f(sigma) free in Ad^0, f(tau) confined to the l-eigenline e+.
    space.z1_basis = {Cocycle(basis_eplus(p), zero), Cocycle(basis_h(p), zero),
                      Cocycle(basis_eminus(p), zero), Cocycle(zero, basis_eplus(p))};
    // B^1: coboundaries of e+ and e-; h is fixed by the residual Frobenius.
    space.b1_basis = {coboundary(basis_eplus(p), model), coboundary(basis_eminus(p), model)};
    space.r = Cocycle(basis_h(p), zero);
    space.s = Cocycle(zero, basis_eplus(p));
    return space;
}

CocycleClassification classify(const Cocycle& f, const TameModel& model) {
    if (!satisfies_relation_condition(f, model))
        throw domain_error("classify: cocycle violates the relation-induced condition");
    auto cs = components(f.f_sigma);
    auto ct = components(f.f_tau);
    // The coboundary span is exactly the (e+, e-) part of f(sigma); the class
    // coordinates are the h-coefficient of f(sigma) and the e+ coefficient of
    // f(tau).
    std::uint32_t aa = cs[1];
    std::uint32_t bb = ct[0];
    CocycleKind kind;
    if (aa == 0 && bb == 0)
        kind = CocycleKind::coboundary;
    else if (bb == 0)
        kind = CocycleKind::unramified;
    else if (aa == 0)
        kind = CocycleKind::null;
    else
        kind = CocycleKind::mixed;
    return {kind, aa, bb};
}

LocalRep act(const Cocycle& f, const LocalRep& rep, unsigned exponent) {
    unsigned m = rep.level();
    if (exponent < 1 || exponent >= m)
        throw domain_error("act: exponent must satisfy 1 <= e <= level-1");
    if (f.p() != rep.model.p) throw domain_error("act: mismatched primes");
    Residue scale(pow_u64(rep.model.p, exponent), rep.model.p, m);
    Mat2 id = Mat2::identity(rep.model.p, m);
    Mat2 sigma = (id + scale * f.f_sigma.lifted(m)) * rep.sigma_img;
    Mat2 tau = (id + scale * f.f_tau.lifted(m)) * rep.tau_img;
    return {rep.model, sigma, tau};
}

NormalForm normalize_to_special(const LocalRep& rep) {
    const TameModel& model = rep.model;
    unsigned level = rep.level();
    Mat2 res_sigma = rep.sigma_img.reduced(1);
    Mat2 res_tau = rep.tau_img.reduced(1);
    if (res_sigma != residual_frobenius_matrix(model) || !res_tau.is_identity())
        throw domain_error("normalize_to_special: residual shape violated");
    if (!check_relation(rep))
        throw domain_error("normalize_to_special: tame relation does not hold");

    auto [conj, diag] = hensel_diagonalize(rep.sigma_img);
    Mat2 tau = conj * rep.tau_img * conj.inverse();
    Residue one = Residue::one(model.p, level);
    // Forced unipotence: with sigma exactly diagonal and distinct-unit
    // eigenvalue ratio, the relation pins everything but the upper corner.
    if (tau.a() != one || tau.d() != one || !tau.c().is_zero())
        throw error("normalize_to_special: inertia image failed to normalize (internal)");

    NormalForm out{conj, diag.a(), diag.d(), tau.b(), LocalRep{model, diag, tau},
                   diag.a() == model.l_at(level)};
    return out;
}

Adjustment adjust_to_special(const LocalRep& rep, const Cocycle& f) {
    const TameModel& model = rep.model;
    unsigned level = rep.level();
    if (level < 2) throw domain_error("adjust_to_special: level must be at least 2");
    unsigned n = level - 1;
    CocycleClassification cls = classify(f, model);
    if (!cls.nonnull())
        throw domain_error("adjust_to_special: null class cannot repair the Frobenius eigenvalue");
    if (!is_special(rep.reduced(n)))
        throw domain_error("adjust_to_special: reduction one level down must be special");

    std::uint64_t p = model.p;
    std::uint64_t pn = pow_u64(p, n);
    std::uint64_t l_target = model.l_at(level).value();

    // lambda1(alpha) is linear in alpha modulo p^(n+1); two evaluations pin it.
    auto lambda1 = [&](std::uint32_t alpha) {
        LocalRep moved = alpha == 0 ? rep : act(scale(alpha, f), rep, n);
        return normalize_to_special(moved).lambda1.value();
    };
    std::uint64_t v0 = lambda1(0);
    std::uint64_t v1 = lambda1(1);
    std::uint64_t m = pow_u64(p, level);
    auto digit = [&](std::uint64_t num) { return static_cast<fp::Elt>((num % m) / pn % p); };
    fp::Elt t0 = digit(v0 + m - l_target % m);
    fp::Elt slope = digit(v1 + m - v0);
    if (slope == 0)
        throw error("adjust_to_special: degenerate slope for a nonnull class (internal)");
    std::uint32_t alpha = fp::mul(fp::sub(0, t0, static_cast<fp::Elt>(p)),
                                  fp::inv(slope, static_cast<fp::Elt>(p)),
                                  static_cast<fp::Elt>(p));

    LocalRep moved = alpha == 0 ? rep : act(scale(alpha, f), rep, n);
    NormalForm nf = normalize_to_special(moved);
    if (!nf.special || !is_special(nf.normalized))
        throw error("adjust_to_special: adjusted representation is not special (internal)");
    return {alpha, nf.normalized};
}

LocalRep special_lift_step(const LocalRep& rep, const Residue& u_next) {
    if (!is_special(rep))
        throw domain_error("special_lift_step: representation must be special");
    unsigned level = rep.level();
    if (u_next.level() != level + 1 || u_next.p() != rep.model.p)
        throw domain_error("special_lift_step: u_next must live one level up");
    if (u_next.reduced(level) != rep.tau_img.b())
        throw domain_error("special_lift_step: u_next does not lift the current parameter");
    return make_special(rep.model, level + 1, u_next.value());
}

// ---------------------------------------------------------------------------
// Finite-quotient enumeration

namespace {

// Rank accumulator for rows of length 2 over F_p, heap-free.
struct Rank2 {
    fp::Elt p;
    unsigned rank = 0;
    std::array<std::array<fp::Elt, 2>, 2> rows{};

    explicit Rank2(fp::Elt p_) : p(p_) {}

    void insert(fp::Elt c0, fp::Elt c1) {
        for (unsigned r = 0; r < rank; ++r) {
            unsigned piv = rows[r][0] != 0 ? 0 : 1;
            fp::Elt coef = piv == 0 ? c0 : c1;
            if (coef == 0) continue;
            fp::Elt f = fp::mul(coef, fp::inv(rows[r][piv], p), p);
            c0 = fp::sub(c0, fp::mul(f, rows[r][0], p), p);
            c1 = fp::sub(c1, fp::mul(f, rows[r][1], p), p);
        }
        if (c0 == 0 && c1 == 0) return;
        rows[rank] = {c0, c1};
        ++rank;
    }

    // Kernel of the accumulated rows inside F_p^2.
    std::vector<std::array<fp::Elt, 2>> kernel() const {
        if (rank == 2) return {};
        if (rank == 0) return {{1, 0}, {0, 1}};
        fp::Elt c0 = rows[0][0], c1 = rows[0][1];
        if (c0 != 0) {
            // x0 = -c1/c0 * x1
            return {{fp::mul(fp::sub(0, c1, p), fp::inv(c0, p), p), 1}};
        }
        return {{1, 0}};
    }
};

struct Quotient {
    fp::Elt p;
    unsigned T, S;
    fp::Elt a; // l mod p, also l mod T since T = p
    std::vector<fp::Elt> apow;       // a^i mod p, i < S
    std::vector<fp::Elt> ainvpow;    // a^-i mod p
    std::array<std::vector<fp::Elt>, 3> prefix; // sum_{t<i} lambda_k^t mod p

    explicit Quotient(const TameModel& model)
        : p(static_cast<fp::Elt>(model.p)), T(model.tau_order), S(model.sigma_order),
          a(static_cast<fp::Elt>(model.residual_eigenvalue())) {
        if (T != p)
            throw config_error("quotient enumeration expects tau_order == p");
        fp::Elt ai = fp::inv(a, p);
        apow.resize(S + 1);
        ainvpow.resize(S + 1);
        apow[0] = ainvpow[0] = 1;
        for (unsigned i = 1; i <= S; ++i) {
            apow[i] = fp::mul(apow[i - 1], a, p);
            ainvpow[i] = fp::mul(ainvpow[i - 1], ai, p);
        }
        for (int k = 0; k < 3; ++k) prefix[k].assign(S + 1, 0);
        for (unsigned i = 0; i < S; ++i) {
            prefix[0][i + 1] = fp::add(prefix[0][i], apow[i], p);
            prefix[1][i + 1] = fp::add(prefix[1][i], 1, p);
            prefix[2][i + 1] = fp::add(prefix[2][i], ainvpow[i], p);
        }
    }

    unsigned size() const { return S * T; }
    unsigned idx(unsigned j, unsigned i) const { return j * S + i; }
    unsigned jpart(unsigned g) const { return g / S; }
    unsigned ipart(unsigned g) const { return g % S; }

    // (tau^j1 sigma^i1)(tau^j2 sigma^i2) = tau^(j1 + j2 l^i1) sigma^(i1+i2).
    unsigned mult(unsigned g1, unsigned g2) const {
        unsigned j = (jpart(g1) + jpart(g2) * apow[ipart(g1)]) % T;
        unsigned i = (ipart(g1) + ipart(g2)) % S;
        return idx(j, i);
    }

    // Eigenvalue of Ad(g) on component k.
    fp::Elt eigen(unsigned g, int k) const {
        unsigned i = ipart(g);
        return k == 0 ? apow[i] : (k == 1 ? 1 : ainvpow[i]);
    }

    // Extension of the candidate (fs, ft) (component k) to the group element g.
    fp::Elt value(unsigned g, int k, fp::Elt fs, fp::Elt ft) const {
        unsigned j = jpart(g), i = ipart(g);
        return fp::add(fp::mul(static_cast<fp::Elt>(j % p), ft, p),
                       fp::mul(prefix[static_cast<unsigned>(k)][i], fs, p), p);
    }
};

} // namespace

QuotientEnumeration quotient_cocycle_dims(const TameModel& model) {
    Quotient q(model);
    const unsigned n = q.size();
    std::array<Rank2, 3> acc{Rank2(q.p), Rank2(q.p), Rank2(q.p)};

    // Every pair (g, h) contributes, per component k, the linear constraint
    //   [P_k(i(gh)) - P_k(i(g)) - lambda_k^i(g) P_k(i(h))] * fs_k
    // + [j(gh) - j(g) - lambda_k^i(g) j(h)] * ft_k  == 0.
    std::uint64_t pairs = 0;
    for (unsigned g = 0; g < n; ++g) {
        unsigned jg = q.jpart(g), ig = q.ipart(g);
        for (unsigned h = 0; h < n; ++h) {
            unsigned gh = q.mult(g, h);
            unsigned jh = q.jpart(h), ih = q.ipart(h);
            unsigned jgh = q.jpart(gh), igh = q.ipart(gh);
            for (int k = 0; k < 3; ++k) {
                fp::Elt lam = q.eigen(g, k);
                fp::Elt cs = fp::sub(fp::sub(q.prefix[static_cast<unsigned>(k)][igh],
                                             q.prefix[static_cast<unsigned>(k)][ig], q.p),
                                     fp::mul(lam, q.prefix[static_cast<unsigned>(k)][ih], q.p), q.p);
                fp::Elt ct = fp::sub(fp::sub(static_cast<fp::Elt>(jgh % q.p),
                                             static_cast<fp::Elt>(jg % q.p), q.p),
                                     fp::mul(lam, static_cast<fp::Elt>(jh % q.p), q.p), q.p);
                if (cs | ct) acc[static_cast<unsigned>(k)].insert(cs, ct);
            }
            ++pairs;
        }
    }

    QuotientEnumeration out;
    out.pairs_checked = pairs;
    out.dim_z1 = 0;
    for (int k = 0; k < 3; ++k) {
        auto ker = acc[static_cast<unsigned>(k)].kernel();
        out.dim_z1 += static_cast<unsigned>(ker.size());
        for (auto& kv : ker) {
            fp::Vec v(6, 0);
            v[static_cast<unsigned>(k)] = kv[0];
            v[static_cast<unsigned>(k) + 3] = kv[1];
            out.z1_basis.push_back(std::move(v));
        }
    }

    // Coboundary ranks, measured inside the same 6-dim coordinate space.
    fp::RowSpace bspace(q.p);
    for (const TraceZeroMat& mbase :
         {basis_eplus(model.p), basis_h(model.p), basis_eminus(model.p)}) {
        Cocycle cb = coboundary(mbase, model);
        bspace.insert(cocycle_coords(cb));
    }
    out.dim_b1 = bspace.rank();
    out.dim_h1 = out.dim_z1 - out.dim_b1;
    return out;
}

std::uint64_t quotient_cocycle_count_literal(const TameModel& model) {
    Quotient q(model);
    const unsigned n = q.size();
    const fp::Elt p = q.p;
    std::uint64_t survivors = 0;
    std::array<fp::Elt, 3> fs{}, ft{};
    // Sweep all p^6 generator-value candidates.
    std::uint64_t total = 1;
    for (int i = 0; i < 6; ++i) total *= p;
    for (std::uint64_t cand = 0; cand < total; ++cand) {
        std::uint64_t c = cand;
        for (int k = 0; k < 3; ++k) {
            fs[static_cast<unsigned>(k)] = static_cast<fp::Elt>(c % p);
            c /= p;
        }
        for (int k = 0; k < 3; ++k) {
            ft[static_cast<unsigned>(k)] = static_cast<fp::Elt>(c % p);
            c /= p;
        }
        bool ok = true;
        for (unsigned g = 0; g < n && ok; ++g) {
            for (unsigned h = 0; h < n && ok; ++h) {
                unsigned gh = q.mult(g, h);
                for (int k = 0; k < 3; ++k) {
                    fp::Elt lhs = q.value(gh, k, fs[static_cast<unsigned>(k)],
                                          ft[static_cast<unsigned>(k)]);
                    fp::Elt rhs = fp::add(q.value(g, k, fs[static_cast<unsigned>(k)],
                                                  ft[static_cast<unsigned>(k)]),
                                          fp::mul(q.eigen(g, k),
                                                  q.value(h, k, fs[static_cast<unsigned>(k)],
                                                          ft[static_cast<unsigned>(k)]),
                                                  p),
                                          p);
                    if (lhs != rhs) {
                        ok = false;
                        break;
                    }
                }
            }
        }
        if (ok) ++survivors;
    }
    return survivors;
}

fp::Vec cocycle_coords(const Cocycle& f) {
    auto cs = components(f.f_sigma);
    auto ct = components(f.f_tau);
    return {cs[0], cs[1], cs[2], ct[0], ct[1], ct[2]};
}

} // namespace ramlift::tame
