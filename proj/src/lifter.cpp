#include "ramlift/lifter.hpp"

#include <algorithm>
#include <map>
#include <tuple>
#include <utility>

#include "json.hpp"

#include "ramlift/localdims.hpp"

namespace ramlift::lifter {

using nlohmann::ordered_json;

namespace {

// Independent seeded streams: every draw is keyed by a purpose tag and the
// (stage, level, index) coordinates, so runs are reproducible and no draw
// order dependency can creep in.
enum : std::uint64_t {
    TAG_MODEL = 1,
    TAG_PERTURB_A = 2,
    TAG_PERTURB_B = 3,
    TAG_PCOMP = 4,
};

std::uint64_t mix(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

std::uint64_t draw(std::uint64_t seed, std::uint64_t tag, std::uint64_t a, std::uint64_t b,
                   std::uint64_t c) {
    std::uint64_t h = seed + 0x9e3779b97f4a7c15ULL;
    for (std::uint64_t v : {tag, a, b, c}) h = mix(h ^ (v + 0x9e3779b97f4a7c15ULL));
    return h;
}

tame::Cocycle make_cocycle(std::uint32_t a, std::uint32_t b, std::uint64_t p) {
    return tame::Cocycle(TraceZeroMat::from_ints(a, 0, 0, p, 1),
                         TraceZeroMat::from_ints(0, b, 0, p, 1));
}

struct PrimeRef {
    unsigned stage;
    unsigned slot;
    const PrimeSpec* spec;
};

std::vector<PrimeRef> flatten(const GlobalModel& model) {
    std::vector<PrimeRef> out;
    for (const auto& st : model.stages)
        for (unsigned slot = 0; slot < st.primes.size(); ++slot)
            out.push_back({st.stage, slot, &st.primes[slot]});
    return out;
}

unsigned expected_w_dim(const OrdinaryData& ord) { return ord.star_nontrivial ? 1 : 2; }

} // namespace

void validate_model(const GlobalModel& model) {
    validate_modulus(model.p, model.precision);
    if (model.base_h1_dim != 2)
        throw config_error("model: the base global H^1 is two-dimensional");
    if (model.stages.size() + 2 > model.precision)
        throw config_error("model: k_max + 2 must not exceed the precision cap");

    for (unsigned s = 0; s < model.stages.size(); ++s) {
        const StageSpec& st = model.stages[s];
        if (st.stage != s + 1)
            throw config_error("model: stages must be numbered 1..k_max in order");
        if (st.two_prime && model.variant != Variant::grh)
            throw config_error("model: two-prime stages require the grh variant");
        if (st.primes.size() != (st.two_prime ? 2u : 1u))
            throw config_error("model: stage prime count does not match the two-prime flag");
    }

    std::vector<PrimeRef> primes = flatten(model);
    unsigned total = static_cast<unsigned>(primes.size());
    for (unsigned i = 0; i < total; ++i)
        for (unsigned j = i + 1; j < total; ++j)
            if (primes[i].spec->l == primes[j].spec->l)
                throw config_error("model: prime values must be distinct");

    if (model.variant == Variant::grh) {
        const OrdinaryData& ord = model.ordinary;
        unsigned expect_ambient = ord.star_nontrivial ? 3 : 4;
        if (ord.ambient_dim != expect_ambient)
            throw config_error("model: ambient dimension at p contradicts the star flag");
        if (ord.restriction_basis.size() != model.base_h1_dim)
            throw config_error("model: restriction image must have the base H^1 dimension");
        if (ord.ordinary_basis.size() != expected_w_dim(ord))
            throw config_error("model: ordinary subspace dimension contradicts the star flag");
        localdims::validate_complementary(model.p, ord.ambient_dim, ord.restriction_basis,
                                          ord.ordinary_basis);
    }

    for (unsigned gi = 0; gi < total; ++gi) {
        const PrimeRef& pr = primes[gi];
        const PrimeSpec& ps = *pr.spec;
        unsigned onset = pr.stage + 1;

        tame::TameModel tm(model.p, ps.l, model.precision); // validates l mod p
        groups::ChebotarevClassSpec cls =
            groups::chebotarev_class(model.variant, model.p, pr.stage - 1);
        if (tm.l_at(onset) != cls.frobenius_congruence)
            throw config_error("model: prime is not in the stage's Frobenius congruence class");

        auto check_table = [&](const GlobalClass& cls_data, const char* what) {
            if (cls_data.at_primes.size() != total)
                throw config_error(std::string("model: ") + what +
                                   " restriction table has the wrong length");
            for (unsigned gj = 0; gj < total; ++gj) {
                if (primes[gj].stage > pr.stage && !cls_data.at_primes[gj].is_zero())
                    throw config_error(std::string("model: ") + what +
                                       " must restrict trivially at later-stage primes");
                if (cls_data.at_primes[gj].a >= model.p || cls_data.at_primes[gj].b >= model.p)
                    throw config_error(std::string("model: ") + what +
                                       " restriction coordinates out of range");
            }
        };
        check_table(ps.repair, "repair class");
        check_table(ps.intro, "introduction class");

        const ClassRestriction& own = ps.repair.at_primes[gi];
        if (own.a == 0)
            throw config_error("model: repair class is null at its own prime");
        if (model.variant == Variant::unconditional) {
            if (own.b != 0)
                throw config_error("model: unconditional repair classes are unramified at "
                                   "their own prime");
            if (ps.intro.at_primes[gi].b == 0)
                throw config_error("model: introduction class must be ramified at its prime");
            if (!ps.repair.at_p.empty() || !ps.intro.at_p.empty())
                throw config_error("model: restriction at p is a grh-only feature");
        } else {
            for (const ClassRestriction& cr : ps.intro.at_primes)
                if (!cr.is_zero())
                    throw config_error("model: grh stages introduce ramification through the "
                                       "forced repair, not a separate class");
            if (!ps.intro.at_p.empty())
                throw config_error("model: grh introduction class must be absent");
            if (ps.repair.at_p.size() != model.ordinary.ambient_dim)
                throw config_error("model: repair class needs restriction coordinates at p");
            for (fp::Elt v : ps.repair.at_p)
                if (v >= model.p) throw config_error("model: at_p coordinates out of range");

            const StageSpec& st = model.stages[pr.stage - 1];
            if (st.two_prime) {
                unsigned partner_gi = gi + (pr.slot == 0 ? 1 : 0) - (pr.slot == 1 ? 1 : 0);
                if (own.b != 0)
                    throw config_error("model: crossed repair classes are unramified at their "
                                       "own prime");
                const ClassRestriction& at_partner = ps.repair.at_primes[partner_gi];
                if (at_partner.a != 0 || at_partner.b == 0)
                    throw config_error("model: crossed repair class must be ramified and null "
                                       "at the partner prime");
            } else {
                if (own.b == 0)
                    throw config_error("model: grh single-prime repair class must be ramified "
                                       "at its own prime");
            }
        }
    }
}

GlobalModel make_model(std::uint64_t p, unsigned precision, Variant variant, unsigned k_max,
                       const std::vector<unsigned>& two_prime_stages, std::uint64_t seed) {
    GlobalModel model;
    model.p = p;
    model.precision = precision;
    model.variant = variant;
    model.seed = seed;
    validate_modulus(p, precision);
    if (k_max + 2 > precision)
        throw config_error("make_model: k_max + 2 must not exceed the precision cap");

    auto is_two_prime = [&](unsigned s) {
        return std::find(two_prime_stages.begin(), two_prime_stages.end(), s) !=
               two_prime_stages.end();
    };
    if (!two_prime_stages.empty() && variant != Variant::grh)
        throw config_error("make_model: two-prime stages require the grh variant");

    std::uint64_t gen = 0; // draw counter for the model stream

    auto next = [&](std::uint64_t bound) {
        return draw(seed, TAG_MODEL, gen++, 0, 0) % bound;
    };

    if (variant == Variant::grh) {
        OrdinaryData ord;
        ord.star_nontrivial = true;
        ord.ambient_dim = 3;
        for (int attempt = 0; attempt < 200; ++attempt) {
            ord.restriction_basis.clear();
            ord.ordinary_basis.clear();
            for (unsigned i = 0; i < 2; ++i) {
                fp::Vec v(ord.ambient_dim);
                for (auto& x : v) x = static_cast<fp::Elt>(next(p));
                ord.restriction_basis.push_back(v);
            }
            fp::Vec w(ord.ambient_dim);
            for (auto& x : w) x = static_cast<fp::Elt>(next(p));
            ord.ordinary_basis.push_back(w);
            try {
                localdims::validate_complementary(p, ord.ambient_dim, ord.restriction_basis,
                                                  ord.ordinary_basis);
                break;
            } catch (const config_error&) {
                if (attempt == 199) throw;
            }
        }
        model.ordinary = ord;
    }

    // Count primes first so restriction tables can be sized up front.
    unsigned total = 0;
    for (unsigned s = 1; s <= k_max; ++s) total += is_two_prime(s) ? 2 : 1;

    unsigned gi = 0;
    for (unsigned s = 1; s <= k_max; ++s) {
        StageSpec st;
        st.stage = s;
        st.two_prime = is_two_prime(s);
        unsigned nprimes = st.two_prime ? 2 : 1;
        unsigned first_gi = gi;
        for (unsigned slot = 0; slot < nprimes; ++slot) {
            PrimeSpec ps;
            // A synthetic prime in the stage's congruence class: the class
            // value mod p^(s+1) plus a seeded multiple of p^(s+1), distinct
            // from every prime drawn so far.
            std::uint64_t base = teichmuller(2, p, s + 1).value();
            std::uint64_t step = pow_u64(p, s + 1);
            std::uint64_t room = pow_u64(p, precision - (s + 1));
            do {
                ps.l = base + step * next(room);
            } while ([&] {
                for (const auto& st0 : model.stages)
                    for (const auto& ps0 : st0.primes)
                        if (ps0.l == ps.l) return true;
                for (const auto& ps0 : st.primes)
                    if (ps0.l == ps.l) return true;
                return false;
            }());

            ps.intro.at_primes.assign(total, {});
            ps.repair.at_primes.assign(total, {});
            unsigned own = gi;

            if (variant == Variant::unconditional) {
                ps.intro.at_primes[own] = {static_cast<std::uint32_t>(next(p)),
                                           static_cast<std::uint32_t>(1 + next(p - 1))};
                ps.repair.at_primes[own] = {static_cast<std::uint32_t>(1 + next(p - 1)), 0};
                for (unsigned gj = 0; gj < first_gi; ++gj) {
                    ps.intro.at_primes[gj] = {static_cast<std::uint32_t>(next(p)),
                                              static_cast<std::uint32_t>(next(p))};
                    ps.repair.at_primes[gj] = {static_cast<std::uint32_t>(next(p)),
                                               static_cast<std::uint32_t>(next(p))};
                }
            } else {
                ps.repair.at_p.assign(model.ordinary.ambient_dim, 0);
                for (auto& x : ps.repair.at_p) x = static_cast<fp::Elt>(next(p));
                if (st.two_prime) {
                    unsigned partner = first_gi + (slot ^ 1u);
                    ps.repair.at_primes[own] = {static_cast<std::uint32_t>(1 + next(p - 1)), 0};
                    ps.repair.at_primes[partner] = {0, static_cast<std::uint32_t>(1 + next(p - 1))};
                } else {
                    ps.repair.at_primes[own] = {static_cast<std::uint32_t>(1 + next(p - 1)),
                                                static_cast<std::uint32_t>(1 + next(p - 1))};
                }
                for (unsigned gj = 0; gj < first_gi; ++gj)
                    ps.repair.at_primes[gj] = {static_cast<std::uint32_t>(next(p)),
                                               static_cast<std::uint32_t>(next(p))};
            }
            st.primes.push_back(std::move(ps));
            ++gi;
        }
        model.stages.push_back(std::move(st));
    }
    validate_model(model);
    return model;
}

// --------------------------------------------------------------------------
// JSON serialization

namespace {

ordered_json restriction_to_json(const GlobalClass& c) {
    ordered_json j;
    ordered_json at = ordered_json::array();
    for (const auto& r : c.at_primes) at.push_back({r.a, r.b});
    j["at_primes"] = at;
    j["at_p"] = c.at_p;
    return j;
}

GlobalClass restriction_from_json(const ordered_json& j) {
    GlobalClass c;
    for (const auto& e : j.at("at_primes"))
        c.at_primes.push_back({e.at(0).get<std::uint32_t>(), e.at(1).get<std::uint32_t>()});
    c.at_p = j.at("at_p").get<fp::Vec>();
    return c;
}

ordered_json mat_to_json(const Mat2& m) {
    return {m.a().value(), m.b().value(), m.c().value(), m.d().value()};
}

} // namespace

std::string model_to_json(const GlobalModel& model) {
    ordered_json j;
    j["schema_version"] = 1;
    j["p"] = model.p;
    j["precision"] = model.precision;
    j["variant"] = model.variant == Variant::grh ? "grh" : "uncond";
    j["seed"] = model.seed;
    j["base_h1_dim"] = model.base_h1_dim;
    if (model.variant == Variant::grh) {
        ordered_json ord;
        ord["star_nontrivial"] = model.ordinary.star_nontrivial;
        ord["ambient_dim"] = model.ordinary.ambient_dim;
        ord["restriction_basis"] = model.ordinary.restriction_basis;
        ord["ordinary_basis"] = model.ordinary.ordinary_basis;
        j["ordinary"] = ord;
    }
    ordered_json stages = ordered_json::array();
    for (const auto& st : model.stages) {
        ordered_json js;
        js["stage"] = st.stage;
        js["two_prime"] = st.two_prime;
        ordered_json primes = ordered_json::array();
        for (const auto& ps : st.primes) {
            ordered_json jp;
            jp["l"] = ps.l;
            jp["frobenius"] =
                mat_to_json(groups::chebotarev_class(model.variant, model.p, st.stage - 1).A);
            jp["intro"] = restriction_to_json(ps.intro);
            jp["repair"] = restriction_to_json(ps.repair);
            primes.push_back(jp);
        }
        js["primes"] = primes;
        stages.push_back(js);
    }
    j["stages"] = stages;
    return j.dump(2);
}

GlobalModel model_from_json(const std::string& text) {
    ordered_json j = ordered_json::parse(text);
    if (j.at("schema_version").get<int>() != 1)
        throw config_error("model: unsupported schema version");
    GlobalModel model;
    model.p = j.at("p").get<std::uint64_t>();
    model.precision = j.at("precision").get<unsigned>();
    std::string variant = j.at("variant").get<std::string>();
    if (variant == "grh")
        model.variant = Variant::grh;
    else if (variant == "uncond")
        model.variant = Variant::unconditional;
    else
        throw config_error("model: unknown variant '" + variant + "'");
    model.seed = j.at("seed").get<std::uint64_t>();
    model.base_h1_dim = j.at("base_h1_dim").get<unsigned>();
    if (model.variant == Variant::grh) {
        const auto& ord = j.at("ordinary");
        model.ordinary.star_nontrivial = ord.at("star_nontrivial").get<bool>();
        model.ordinary.ambient_dim = ord.at("ambient_dim").get<unsigned>();
        model.ordinary.restriction_basis = ord.at("restriction_basis").get<std::vector<fp::Vec>>();
        model.ordinary.ordinary_basis = ord.at("ordinary_basis").get<std::vector<fp::Vec>>();
    }
    for (const auto& js : j.at("stages")) {
        StageSpec st;
        st.stage = js.at("stage").get<unsigned>();
        st.two_prime = js.at("two_prime").get<bool>();
        for (const auto& jp : js.at("primes")) {
            PrimeSpec ps;
            ps.l = jp.at("l").get<std::uint64_t>();
            ps.intro = restriction_from_json(jp.at("intro"));
            ps.repair = restriction_from_json(jp.at("repair"));
            // The stored Frobenius matrix must match the stage prescription.
            groups::ChebotarevClassSpec cls =
                groups::chebotarev_class(model.variant, model.p, st.stage - 1);
            if (jp.at("frobenius") != mat_to_json(cls.A))
                throw config_error("model: stored Frobenius matrix contradicts the variant");
            st.primes.push_back(std::move(ps));
        }
        model.stages.push_back(std::move(st));
    }
    validate_model(model);
    return model;
}

// --------------------------------------------------------------------------
// The induction

namespace {

// Applies a global class (times `multiple`) through its restrictions: at
// every tame prime by the cocycle action at the top exponent, at p by
// translating the working component.
void apply_class(const GlobalModel& model, LiftState& state, const GlobalClass& cls,
                 std::uint32_t multiple, unsigned exponent) {
    if (multiple == 0) return;
    const std::uint64_t p = model.p;
    for (auto& ps : state.primes) {
        const ClassRestriction& cr = cls.at_primes[ps.global_index];
        if (cr.is_zero()) continue;
        tame::Cocycle f = make_cocycle(fp::mul(multiple, cr.a, static_cast<fp::Elt>(p)),
                                       fp::mul(multiple, cr.b, static_cast<fp::Elt>(p)), p);
        ps.rep = tame::act(f, ps.rep, exponent);
    }
    if (model.variant == Variant::grh && !cls.at_p.empty()) {
        fp::Vec& comp = state.p_component_by_level[state.level];
        comp = fp::vec_add(comp, fp::vec_scale(multiple, cls.at_p, static_cast<fp::Elt>(p)),
                           static_cast<fp::Elt>(p));
    }
}

} // namespace

void introduce_ramification(const GlobalModel& model, LiftState& state, unsigned stage) {
    if (stage == 0 || stage > model.stages.size())
        throw config_error("introduce_ramification: no such stage in the model");
    if (state.completed_stage != stage - 1)
        throw config_error("introduce_ramification: stages must be processed in order");
    const StageSpec& spec = model.stages[stage - 1];
    const unsigned onset = stage + 1;
    const bool grh = model.variant == Variant::grh;

    if (grh && state.p_component_by_level.empty())
        state.p_component_by_level.assign(model.precision + 1,
                                          fp::Vec(model.ordinary.ambient_dim, 0));

    // Start from the previous representation mod p^onset.
    for (auto& ps : state.primes)
        if (ps.rep.level() < onset)
            throw config_error("introduce_ramification: state below the onset level");
    for (auto& ps : state.primes) ps.rep = ps.rep.reduced(onset);
    if (grh)
        for (unsigned lvl = onset + 1; lvl <= model.precision; ++lvl)
            state.p_component_by_level[lvl].assign(model.ordinary.ambient_dim, 0);
    state.level = onset;

    unsigned first_gi = 0;
    for (unsigned t = 0; t + 1 < stage; ++t)
        first_gi += static_cast<unsigned>(model.stages[t].primes.size());
    for (unsigned slot = 0; slot < spec.primes.size(); ++slot) {
        const PrimeSpec& pspec = spec.primes[slot];
        tame::TameModel tm(model.p, pspec.l, model.precision);
        PrimeState ps;
        ps.stage = stage;
        ps.slot = slot;
        ps.global_index = first_gi + slot;
        ps.l = pspec.l;
        if (model.variant == Variant::unconditional) {
            ps.rep = tame::make_special(tm, onset, 0);
        } else {
            // The prescribed Frobenius image is special one level down but
            // not at the onset level, which forces a nonzero repair multiple.
            groups::ChebotarevClassSpec cls =
                groups::chebotarev_class(Variant::grh, model.p, stage - 1);
            ps.rep = tame::LocalRep{tm, cls.A, Mat2::identity(model.p, onset)};
        }
        state.primes.push_back(std::move(ps));
    }

    // Unconditional introduction: one ramified class per new prime, once.
    if (model.variant == Variant::unconditional)
        for (unsigned slot = 0; slot < spec.primes.size(); ++slot)
            apply_class(model, state, spec.primes[slot].intro, 1, stage);
}

void lift_level(const GlobalModel& model, LiftState& state, unsigned processing_stage) {
    const std::uint64_t p = model.p;
    const unsigned m = state.level + 1;
    if (m > model.precision) throw config_error("lift_level: precision cap reached");
    for (auto& ps : state.primes) {
        Residue u_next(ps.rep.tau_img.b().value(), p, m);
        ps.rep = tame::special_lift_step(ps.rep, u_next);
        std::uint32_t a = static_cast<std::uint32_t>(
            draw(model.seed, TAG_PERTURB_A, processing_stage, m, ps.global_index) % p);
        std::uint32_t b = static_cast<std::uint32_t>(
            draw(model.seed, TAG_PERTURB_B, processing_stage, m, ps.global_index) % p);
        if (a || b) ps.rep = tame::act(make_cocycle(a, b, p), ps.rep, m - 1);
    }
    if (model.variant == Variant::grh) {
        fp::Vec fresh(model.ordinary.ambient_dim);
        for (unsigned k = 0; k < fresh.size(); ++k)
            fresh[k] =
                static_cast<fp::Elt>(draw(model.seed, TAG_PCOMP, processing_stage, m, k) % p);
        state.p_component_by_level[m] = fresh;
    }
    state.level = m;
}

std::vector<std::uint32_t> repair_pass(const GlobalModel& model, LiftState& state) {
    const std::uint64_t p = model.p;
    const unsigned m = state.level;

    std::vector<std::size_t> order(state.primes.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        const PrimeState &a = state.primes[x], &b = state.primes[y];
        if (a.stage != b.stage) return a.stage > b.stage;
        return a.slot < b.slot;
    });

    std::vector<std::uint32_t> alphas(state.primes.size(), 0);
    for (std::size_t idx : order) {
        PrimeState& ps = state.primes[idx];
        const PrimeSpec& pspec = model.stages[ps.stage - 1].primes[ps.slot];
        const ClassRestriction& own = pspec.repair.at_primes[ps.global_index];
        tame::Adjustment adj = tame::adjust_to_special(ps.rep, make_cocycle(own.a, own.b, p));
        alphas[idx] = adj.alpha;
        ps.rep = adj.adjusted;
        if (adj.alpha != 0) {
            for (auto& qs : state.primes) {
                if (qs.global_index == ps.global_index) continue;
                const ClassRestriction& cr = pspec.repair.at_primes[qs.global_index];
                if (cr.is_zero()) continue;
                tame::Cocycle f = make_cocycle(fp::mul(adj.alpha, cr.a, static_cast<fp::Elt>(p)),
                                               fp::mul(adj.alpha, cr.b, static_cast<fp::Elt>(p)),
                                               p);
                qs.rep = tame::act(f, qs.rep, m - 1);
            }
            if (model.variant == Variant::grh && !pspec.repair.at_p.empty()) {
                fp::Vec& comp = state.p_component_by_level[m];
                comp = fp::vec_add(
                    comp, fp::vec_scale(adj.alpha, pspec.repair.at_p, static_cast<fp::Elt>(p)),
                    static_cast<fp::Elt>(p));
            }
        }
    }
    return alphas;
}

OrdinaryEvent ordinary_pass(const GlobalModel& model, LiftState& state) {
    if (model.variant != Variant::grh)
        throw config_error("ordinary_pass: only meaningful for grh models");
    localdims::SubspaceDecompositionProblem prob;
    prob.p = model.p;
    prob.ambient_dim = model.ordinary.ambient_dim;
    prob.u_basis = model.ordinary.restriction_basis;
    prob.w_basis = model.ordinary.ordinary_basis;
    prob.target = state.p_component_by_level[state.level];
    localdims::SubspaceDecomposition dec = localdims::subspace_decompose(prob);
    OrdinaryEvent oe;
    oe.level = state.level;
    oe.pre = prob.target;
    oe.adjustment = dec.u_coords;
    oe.post = dec.in_w;
    state.p_component_by_level[state.level] = dec.in_w;
    return oe;
}

RunResult run(const GlobalModel& model, unsigned k_max) {
    validate_model(model);
    if (k_max > model.stages.size())
        throw config_error("run: k_max exceeds the stages in the model");
    if (k_max + 2 > model.precision)
        throw config_error("run: k_max + 2 must not exceed the precision cap");

    const unsigned N = model.precision;
    const bool grh = model.variant == Variant::grh;

    RunResult result;
    result.trace.model = model;
    result.trace.k_max = k_max;
    LiftState& state = result.state;
    state.level = N;
    if (grh) state.p_component_by_level.assign(N + 1, fp::Vec(model.ordinary.ambient_dim, 0));

    for (unsigned s = 1; s <= k_max; ++s) {
        introduce_ramification(model, state, s);
        for (unsigned m = s + 1; m <= N; ++m) {
            if (m > s + 1) lift_level(model, state, s);

            std::vector<std::pair<Mat2, Mat2>> pre;
            pre.reserve(state.primes.size());
            for (const auto& ps : state.primes) pre.emplace_back(ps.rep.sigma_img, ps.rep.tau_img);

            std::vector<std::uint32_t> alphas = repair_pass(model, state);

            if (grh) {
                OrdinaryEvent oe = ordinary_pass(model, state);
                oe.stage = s;
                result.trace.ordinary_events.push_back(std::move(oe));
            }

            for (std::size_t i = 0; i < state.primes.size(); ++i) {
                const PrimeState& ps = state.primes[i];
                PrimeLevelEvent ev;
                ev.stage = s;
                ev.level = m;
                ev.prime_index = ps.global_index;
                ev.prime_stage = ps.stage;
                ev.l = ps.l;
                ev.pre_sigma = pre[i].first;
                ev.pre_tau = pre[i].second;
                ev.alpha = alphas[i];
                ev.post_sigma = ps.rep.sigma_img;
                ev.post_tau = ps.rep.tau_img;
                ev.u = ps.rep.tau_img.b().value();
                result.trace.events.push_back(std::move(ev));
            }
        }

        StageSnapshot snap;
        snap.stage = s;
        for (const auto& ps : state.primes) {
            snap.prime_stages.push_back(ps.stage);
            snap.prime_ls.push_back(ps.l);
            snap.sigma_images.push_back(ps.rep.sigma_img);
            snap.tau_images.push_back(ps.rep.tau_img);
        }
        result.trace.snapshots.push_back(std::move(snap));
        state.completed_stage = s;
    }
    return result;
}

// --------------------------------------------------------------------------
// Independent audit

VerifyReport verify_chain(const Trace& trace) {
    VerifyReport report;
    const GlobalModel& model = trace.model;
    const std::uint64_t p = model.p;
    const unsigned N = model.precision;
    const bool grh = model.variant == Variant::grh;

    auto flag = [&](std::string code, unsigned stage, unsigned level, int prime,
                    std::string detail) {
        report.violations.push_back({std::move(code), stage, level, prime, std::move(detail)});
    };
    auto check = [&](bool ok, const char* code, unsigned stage, unsigned level, int prime,
                     const std::string& detail) {
        ++report.checks;
        if (!ok) flag(code, stage, level, prime, detail);
    };

    // Index events by (stage, level, prime).
    std::map<std::tuple<unsigned, unsigned, unsigned>, const PrimeLevelEvent*> by_key;
    for (const auto& ev : trace.events)
        by_key[{ev.stage, ev.level, ev.prime_index}] = &ev;

    std::map<unsigned, const StageSnapshot*> snaps;
    for (const auto& sn : trace.snapshots) snaps[sn.stage] = &sn;

    for (const auto& ev : trace.events) {
        tame::TameModel tm(p, ev.l, N);
        tame::LocalRep pre{tm, ev.pre_sigma, ev.pre_tau};
        tame::LocalRep post{tm, ev.post_sigma, ev.post_tau};
        Residue l_here = tm.l_at(ev.level);

        check(tame::check_relation(pre), "relation-pre", ev.stage, ev.level,
              static_cast<int>(ev.prime_index), "tame relation fails before repair");
        check(tame::check_relation(post), "relation-post", ev.stage, ev.level,
              static_cast<int>(ev.prime_index), "tame relation fails after repair");
        check(ev.pre_sigma.det() == l_here && ev.post_sigma.det() == l_here, "det-sigma",
              ev.stage, ev.level, static_cast<int>(ev.prime_index),
              "det(sigma) != l at the working level");
        Residue one = Residue::one(p, ev.level);
        check(ev.pre_tau.det() == one && ev.post_tau.det() == one, "det-tau", ev.stage, ev.level,
              static_cast<int>(ev.prime_index), "det(tau) != 1 at the working level");
        check(tame::is_special(post), "specialness", ev.stage, ev.level,
              static_cast<int>(ev.prime_index), "representation not exactly special after repair");
        check(ev.post_tau.b().value() == ev.u, "u-field", ev.stage, ev.level,
              static_cast<int>(ev.prime_index), "recorded u does not match the matrices");
        check(Residue(ev.u, p, ev.level).valuation() == ev.prime_stage, "u-valuation", ev.stage,
              ev.level, static_cast<int>(ev.prime_index),
              "inertia parameter is not unit * p^stage");

        unsigned onset = ev.stage + 1;
        if (ev.level > onset) {
            auto it = by_key.find({ev.stage, ev.level - 1, ev.prime_index});
            if (it == by_key.end()) {
                flag("events-missing", ev.stage, ev.level - 1, static_cast<int>(ev.prime_index),
                     "no record for the previous level");
            } else {
                check(ev.pre_sigma.reduced(ev.level - 1) == it->second->post_sigma &&
                          ev.pre_tau.reduced(ev.level - 1) == it->second->post_tau,
                      "level-congruence", ev.stage, ev.level, static_cast<int>(ev.prime_index),
                      "pre-image does not reduce to the previous level");
            }
        } else {
            // Onset level of the processing stage.
            if (ev.prime_stage == ev.stage) {
                if (model.variant == Variant::grh)
                    check(ev.alpha != 0, "intro-alpha", ev.stage, ev.level,
                          static_cast<int>(ev.prime_index),
                          "grh introduction requires a nonzero repair multiple");
            } else if (auto sit = snaps.find(ev.stage - 1); sit != snaps.end()) {
                const StageSnapshot& sn = *sit->second;
                for (std::size_t i = 0; i < sn.prime_ls.size(); ++i) {
                    if (sn.prime_ls[i] != ev.l) continue;
                    check(ev.pre_sigma.reduced(ev.stage) == sn.sigma_images[i].reduced(ev.stage) &&
                              ev.pre_tau.reduced(ev.stage) == sn.tau_images[i].reduced(ev.stage),
                          "stage-congruence", ev.stage, ev.level, static_cast<int>(ev.prime_index),
                          "onset image disagrees with the previous stage mod p^stage");
                }
            }
        }
    }

    // Event completeness: every introduced prime has a record at every level
    // from its stage's onset to the cap, for every later processing stage.
    {
        std::vector<unsigned> stage_of_prime;
        for (const auto& st : trace.model.stages)
            stage_of_prime.insert(stage_of_prime.end(), st.primes.size(), st.stage);
        for (unsigned s = 1; s <= trace.k_max; ++s)
            for (unsigned idx = 0; idx < stage_of_prime.size(); ++idx) {
                if (stage_of_prime[idx] > s) continue;
                for (unsigned m = s + 1; m <= N; ++m)
                    check(by_key.count({s, m, idx}) == 1, "events-missing", s, m,
                          static_cast<int>(idx), "missing audit record");
            }
    }

    // Congruence ledger across stages.
    for (unsigned s = 2; s <= trace.k_max; ++s) {
        auto cur = snaps.find(s);
        auto prev = snaps.find(s - 1);
        if (cur == snaps.end() || prev == snaps.end()) {
            flag("snapshot-missing", s, 0, -1, "missing stage snapshot");
            continue;
        }
        const StageSnapshot& a = *prev->second;
        const StageSnapshot& b = *cur->second;
        for (std::size_t i = 0; i < a.prime_ls.size(); ++i) {
            bool found = false;
            for (std::size_t j = 0; j < b.prime_ls.size(); ++j) {
                if (b.prime_ls[j] != a.prime_ls[i]) continue;
                found = true;
                check(b.sigma_images[j].reduced(s) == a.sigma_images[i].reduced(s) &&
                          b.tau_images[j].reduced(s) == a.tau_images[i].reduced(s),
                      "ledger-congruence", s, s, static_cast<int>(j),
                      "stage outputs disagree mod p^stage");
            }
            if (!found) flag("ledger-missing", s, 0, static_cast<int>(i), "prime vanished");
        }
    }

    // Snapshots agree with the final level-N records of their stage.
    for (const auto& sn : trace.snapshots) {
        if (sn.stage > trace.k_max) continue;
        for (std::size_t j = 0; j < sn.prime_ls.size(); ++j) {
            bool matched = false;
            for (const auto& ev : trace.events) {
                if (ev.stage != sn.stage || ev.level != N || ev.l != sn.prime_ls[j]) continue;
                matched = true;
                check(ev.post_sigma == sn.sigma_images[j] && ev.post_tau == sn.tau_images[j],
                      "snapshot-consistency", sn.stage, N, static_cast<int>(j),
                      "snapshot disagrees with the level-N record");
            }
            if (!matched)
                flag("snapshot-consistency", sn.stage, N, static_cast<int>(j),
                     "no level-N record for a snapshot prime");
        }
    }

    // Ordinary bookkeeping at p (grh only).
    if (grh) {
        const OrdinaryData& ord = model.ordinary;
        fp::Elt pe = static_cast<fp::Elt>(p);
        std::map<std::pair<unsigned, unsigned>, const OrdinaryEvent*> okey;
        for (const auto& oe : trace.ordinary_events) okey[{oe.stage, oe.level}] = &oe;
        for (unsigned s = 1; s <= trace.k_max; ++s)
            for (unsigned m = s + 1; m <= N; ++m)
                check(okey.count({s, m}) == 1, "ordinary-missing", s, m, -1,
                      "missing ordinary record");
        for (const auto& oe : trace.ordinary_events) {
            fp::Vec expect = oe.pre;
            bool size_ok = oe.adjustment.size() == ord.restriction_basis.size() &&
                           oe.pre.size() == ord.ambient_dim && oe.post.size() == ord.ambient_dim;
            check(size_ok, "ordinary-shape", oe.stage, oe.level, -1,
                  "ordinary record has wrong dimensions");
            if (!size_ok) continue;
            for (std::size_t jx = 0; jx < oe.adjustment.size(); ++jx)
                expect = fp::vec_sub(
                    expect, fp::vec_scale(oe.adjustment[jx], ord.restriction_basis[jx], pe), pe);
            check(expect == oe.post, "ordinary-arithmetic", oe.stage, oe.level, -1,
                  "post-component is not pre minus the restriction adjustment");
            fp::Vec coeffs;
            check(fp::solve(ord.ordinary_basis, oe.post, pe, coeffs), "ordinary-membership",
                  oe.stage, oe.level, -1, "component at p left the ordinary subspace");
        }
    }

    return report;
}

std::vector<std::string> trace_records(const Trace& trace) {
    std::vector<std::string> out;
    auto mat = [](const Mat2& m) { return mat_to_json(m); };
    for (const auto& ev : trace.events) {
        ordered_json j;
        j["record"] = "prime";
        j["stage"] = ev.stage;
        j["level"] = ev.level;
        j["prime_index"] = ev.prime_index;
        j["prime_stage"] = ev.prime_stage;
        j["l"] = ev.l;
        j["pre_sigma"] = mat(ev.pre_sigma);
        j["pre_tau"] = mat(ev.pre_tau);
        j["alpha"] = ev.alpha;
        j["post_sigma"] = mat(ev.post_sigma);
        j["post_tau"] = mat(ev.post_tau);
        j["u"] = ev.u;
        out.push_back(j.dump());
    }
    for (const auto& oe : trace.ordinary_events) {
        ordered_json j;
        j["record"] = "ordinary";
        j["stage"] = oe.stage;
        j["level"] = oe.level;
        j["pre"] = oe.pre;
        j["adjustment"] = oe.adjustment;
        j["post"] = oe.post;
        out.push_back(j.dump());
    }
    for (const auto& sn : trace.snapshots) {
        ordered_json j;
        j["record"] = "snapshot";
        j["stage"] = sn.stage;
        j["primes"] = sn.prime_ls;
        ordered_json sig = ordered_json::array(), tau = ordered_json::array();
        for (const auto& m : sn.sigma_images) sig.push_back(mat(m));
        for (const auto& m : sn.tau_images) tau.push_back(mat(m));
        j["sigma"] = sig;
        j["tau"] = tau;
        out.push_back(j.dump());
    }
    return out;
}

} // namespace ramlift::lifter
