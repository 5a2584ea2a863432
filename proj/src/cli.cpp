#include "ramlift/cli.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "ramlift/analytic.hpp"
#include "ramlift/groups.hpp"
#include "ramlift/lifter.hpp"
#include "ramlift/localdims.hpp"
#include "ramlift/tame.hpp"

namespace ramlift::cli {

using nlohmann::ordered_json;

namespace {

constexpr int SCHEMA_VERSION = 1;

enum class OutputMode { table, records };

// Every subcommand accumulates records; the human table is rendered from the
// same data, so the records stream never carries less information.
struct Emitter {
    OutputMode mode;
    std::ostream& out;
    std::vector<ordered_json> records;

    void record(ordered_json j) {
        j["schema_version"] = SCHEMA_VERSION;
        records.push_back(std::move(j));
    }

    void table(const std::string& line) {
        if (mode == OutputMode::table) out << line << "\n";
    }

    void flush() {
        if (mode == OutputMode::records)
            for (const auto& r : records) out << r.dump() << "\n";
    }
};

ordered_json mat_json(const Mat2& m) {
    return {m.a().value(), m.b().value(), m.c().value(), m.d().value()};
}

std::string mat_str(const Mat2& m) {
    std::ostringstream os;
    os << "[" << m.a().value() << " " << m.b().value() << "; " << m.c().value() << " "
       << m.d().value() << "]";
    return os.str();
}

Rational parse_rational(const std::string& text) {
    auto slash = text.find('/');
    if (slash == std::string::npos) return Rational(std::stoll(text));
    return Rational(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
}

int run_cohomology(Emitter& em, std::uint64_t p, const std::string& place_kind, std::uint64_t l,
                   bool star, unsigned psi_order) {
    using namespace localdims;
    PlaceDescriptor place = PlaceDescriptor::tame(p, l);
    if (place_kind == "tame")
        place = PlaceDescriptor::tame(p, l);
    else if (place_kind == "multiplicative")
        place = PlaceDescriptor::multiplicative(p, star);
    else if (place_kind == "ordinary")
        place = PlaceDescriptor::ordinary(p, star, psi_order);
    else
        throw config_error("unknown place kind '" + place_kind + "'");

    HDims dims = local_h_dims(place);
    bool ok = true;
    ordered_json j;
    j["record"] = "cohomology";
    j["p"] = p;
    j["place"] = place_kind;
    j["h0"] = dims.h0;
    j["h1"] = dims.h1;
    j["h2"] = dims.h2;
    if (place.kind == PlaceKind::tame_l) {
        CharacterDecomposition dec = ad0_decomposition(place);
        ordered_json eig = ordered_json::array();
        for (const auto& s : dec.summands) eig.push_back(s.frob_eigenvalue);
        j["l"] = l;
        j["frobenius_eigenvalues"] = eig;
        ok = ok && dims.h2 == twist_by_cyclotomic(dec, p, l).invariant_dim();
        ok = ok && dims.h1 == dims.h0 + dims.h2;
    } else {
        j["star_nontrivial"] = star;
        unsigned defect = place.kind == PlaceKind::ordinary_p ? 3 : 0;
        ok = ok && dims.h1 == dims.h0 + dims.h2 + defect;
        if (place.kind == PlaceKind::ordinary_p) {
            unsigned ord_dim = h1_ord_dim(place);
            j["h1_ord"] = ord_dim;
            ok = ok && ord_dim + 2 == dims.h1;
        }
    }
    j["cross_checks_ok"] = ok;
    em.record(j);
    em.table("place=" + place_kind + " p=" + std::to_string(p) + "  (h0, h1, h2) = (" +
             std::to_string(dims.h0) + ", " + std::to_string(dims.h1) + ", " +
             std::to_string(dims.h2) + ")" + (ok ? "" : "  CROSS-CHECK FAILED"));
    return ok ? 0 : 1;
}

int run_tame(Emitter& em, std::uint64_t p, std::uint64_t l, unsigned precision) {
    using namespace tame;
    TameModel model(p, l, precision);
    CocycleSpace sp = cocycle_space(model);
    QuotientEnumeration qe = quotient_cocycle_dims(model);

    ordered_json j;
    j["record"] = "tame";
    j["p"] = p;
    j["l"] = l;
    j["basis_level"] = 1; // cocycle values live over F_p
    j["r_sigma"] = mat_json(sp.r.f_sigma.mat());
    j["r_tau"] = mat_json(sp.r.f_tau.mat());
    j["s_sigma"] = mat_json(sp.s.f_sigma.mat());
    j["s_tau"] = mat_json(sp.s.f_tau.mat());
    j["dim_z1"] = qe.dim_z1;
    j["dim_b1"] = qe.dim_b1;
    j["dim_h1"] = qe.dim_h1;
    j["pairs_checked"] = qe.pairs_checked;

    // Worked demonstration: the unramified perturbation of a special
    // representation and its unique repair multiple.
    LocalRep special = make_special(model, 2, p);
    LocalRep moved = act(sp.r, special, 1);
    Adjustment adj = adjust_to_special(moved, sp.r);
    j["demo_perturbed_sigma"] = mat_json(moved.sigma_img);
    j["demo_alpha"] = adj.alpha;
    j["demo_repaired_sigma"] = mat_json(adj.adjusted.sigma_img);

    bool ok = qe.dim_z1 == 4 && qe.dim_b1 == 2 && qe.dim_h1 == 2 &&
              is_special(adj.adjusted) && classify(sp.r, model).kind == CocycleKind::unramified &&
              classify(sp.s, model).kind == CocycleKind::null;
    j["verified"] = ok;
    em.record(j);

    em.table("tame place p=" + std::to_string(p) + " l=" + std::to_string(l));
    em.table("  r: sigma -> " + mat_str(sp.r.f_sigma.mat()) + ", tau -> 0   (unramified line)");
    em.table("  s: sigma -> 0, tau -> " + mat_str(sp.s.f_tau.mat()) + "   (null line)");
    em.table("  quotient enumeration: dim Z1 = " + std::to_string(qe.dim_z1) +
             ", dim B1 = " + std::to_string(qe.dim_b1) + ", dim H1 = " + std::to_string(qe.dim_h1) +
             " (" + std::to_string(qe.pairs_checked) + " pairs)");
    em.table("  repair demo: sigma " + mat_str(moved.sigma_img) + " -> alpha = " +
             std::to_string(adj.alpha) + " -> " + mat_str(adj.adjusted.sigma_img));
    em.table(ok ? "  verified" : "  VERIFICATION FAILED");
    return ok ? 0 : 1;
}

int run_section_search(Emitter& em, std::uint64_t p, unsigned threads, std::ostream& err) {
    groups::SectionSearchOptions opts;
    opts.threads = threads;
    try {
        groups::SectionSearchResult r = groups::section_search(p, opts);
        ordered_json j;
        j["record"] = "section_search";
        j["p"] = p;
        j["verdict"] = r.verdict == groups::SectionVerdict::no_section ? "NoSection" : "SectionFound";
        j["candidates"] = r.candidates_checked;
        j["seconds"] = r.seconds;
        em.record(j);
        std::ostringstream os;
        os << (r.verdict == groups::SectionVerdict::no_section ? "NoSection" : "SectionFound")
           << " (candidates=" << r.candidates_checked << ", " << r.seconds << " s)";
        em.table(os.str());
        return r.verdict == groups::SectionVerdict::no_section ? 0 : 1;
    } catch (const budget_error& e) {
        err << "partial search: " << e.what() << "\n";
        return 3;
    }
}

int run_group_orders(Emitter& em, std::uint64_t p, unsigned k, const std::string& variant_name) {
    groups::Variant variant =
        variant_name == "grh" ? groups::Variant::grh : groups::Variant::unconditional;
    groups::ChebotarevClassSpec cls = groups::chebotarev_class(variant, p, k);
    groups::SemidirectElement e = groups::sd_identity(p, k + 2, k + 1);
    e.layers[cls.b_layer] = cls.B;
    e.c = cls.A;
    std::uint64_t order = groups::element_order(e);
    std::uint64_t centralizer = groups::layer_centralizer_order(cls.A.reduced(1));

    ordered_json j;
    j["record"] = "group_orders";
    j["p"] = p;
    j["k"] = k;
    j["variant"] = variant_name;
    j["A"] = mat_json(cls.A);
    j["B"] = mat_json(cls.B.mat());
    j["frobenius_congruence"] = cls.frobenius_congruence.value();
    j["element_order"] = order;
    j["layer_centralizer_order"] = centralizer;
    em.record(j);
    em.table("variant=" + variant_name + " p=" + std::to_string(p) + " k=" + std::to_string(k));
    em.table("  A = " + mat_str(cls.A) + ", B = " + mat_str(cls.B.mat()));
    em.table("  class element order = " + std::to_string(order));
    em.table("  layer centralizer order = " + std::to_string(centralizer));
    return 0;
}

int run_lift(Emitter& em, const std::string& model_path, const std::string& write_model,
             const std::string& trace_path, std::uint64_t p, unsigned precision,
             const std::string& variant_name, unsigned k_max,
             const std::vector<unsigned>& two_prime, std::uint64_t seed, bool verify,
             std::ostream& err) {
    lifter::GlobalModel model;
    if (!model_path.empty()) {
        std::ifstream in(model_path);
        if (!in) {
            err << "cannot open model file " << model_path << "\n";
            return 2;
        }
        std::stringstream ss;
        ss << in.rdbuf();
        model = lifter::model_from_json(ss.str());
    } else {
        lifter::Variant variant =
            variant_name == "grh" ? lifter::Variant::grh : lifter::Variant::unconditional;
        model = lifter::make_model(p, precision, variant, k_max, two_prime, seed);
    }
    if (!write_model.empty()) {
        std::ofstream out(write_model);
        out << lifter::model_to_json(model);
        em.table("model written to " + write_model);
    }

    unsigned effective_kmax = std::min<unsigned>(k_max, static_cast<unsigned>(model.stages.size()));
    lifter::RunResult result = lifter::run(model, effective_kmax);

    if (!trace_path.empty()) {
        std::ofstream out(trace_path);
        for (const auto& line : lifter::trace_records(result.trace)) out << line << "\n";
        em.table("trace written to " + trace_path);
    }

    ordered_json j;
    j["record"] = "lift";
    j["p"] = model.p;
    j["precision"] = model.precision;
    j["variant"] = model.variant == lifter::Variant::grh ? "grh" : "uncond";
    j["seed"] = model.seed;
    j["k_max"] = effective_kmax;
    j["primes"] = ordered_json::array();
    for (const auto& ps : result.state.primes) {
        ordered_json pj;
        pj["stage"] = ps.stage;
        pj["l"] = ps.l;
        pj["sigma"] = mat_json(ps.rep.sigma_img);
        pj["tau"] = mat_json(ps.rep.tau_img);
        pj["u_valuation"] = ps.rep.tau_img.b().valuation();
        j["primes"].push_back(pj);
    }

    em.table("lift complete: " + std::to_string(effective_kmax) + " stages, level " +
             std::to_string(result.state.level) + ", " + std::to_string(result.state.primes.size()) +
             " ramified primes");
    for (const auto& ps : result.state.primes)
        em.table("  stage " + std::to_string(ps.stage) + ": l=" + std::to_string(ps.l) +
                 " u-valuation=" + std::to_string(ps.rep.tau_img.b().valuation()));

    int status = 0;
    if (verify) {
        lifter::VerifyReport report = lifter::verify_chain(result.trace);
        j["verify_checks"] = report.checks;
        ordered_json vj = ordered_json::array();
        for (const auto& v : report.violations) {
            ordered_json one;
            one["code"] = v.code;
            one["stage"] = v.stage;
            one["level"] = v.level;
            one["prime"] = v.prime_index;
            one["detail"] = v.detail;
            vj.push_back(one);
        }
        j["violations"] = vj;
        em.table("verify: " + std::to_string(report.checks) + " checks, " +
                 std::to_string(report.violations.size()) + " violations");
        for (const auto& v : report.violations)
            em.table("  violation " + v.code + " stage=" + std::to_string(v.stage) + " level=" +
                     std::to_string(v.level) + ": " + v.detail);
        status = report.ok() ? 0 : 1;
    }
    em.record(j);
    return status;
}

int run_density(Emitter& em, const std::string& d_text, std::uint64_t p, double e1, double c1,
                double c2, double n_L) {
    analytic::DensityParams dp{parse_rational(d_text), p};
    analytic::SplitDensity sd = analytic::split_density(dp);

    analytic::ContradictionParams cp;
    cp.density = dp;
    cp.lo = {e1, c1, c2, n_L};
    analytic::CountingReport report = analytic::contradiction_x(cp);

    ordered_json j;
    j["record"] = "density";
    j["p"] = p;
    std::ostringstream ds, zs, os;
    ds << dp.d;
    zs << sd.zero_density;
    os << sd.one_density;
    j["d"] = ds.str();
    j["zero_density"] = zs.str();
    j["one_density"] = os.str();
    j["e1"] = e1;
    j["c1"] = c1;
    j["c2"] = c2;
    j["n_L"] = n_L;
    j["safety"] = report.safety;
    j["contradiction_reached"] = report.reached;
    if (report.reached) {
        j["x"] = report.crossover.x;
        j["li_x"] = report.crossover.li;
        j["gap"] = report.crossover.gap;
        j["budget"] = report.crossover.budget;
        ordered_json terms = ordered_json::array();
        for (const auto& t : report.error_terms) terms.push_back({t.label, t.value});
        j["error_terms"] = terms;
    }
    em.record(j);

    em.table("densities: d = " + ds.str() + ", extended-class = " + zs.str() +
             ", complement = " + os.str());
    if (report.reached) {
        std::ostringstream line;
        line << "contradiction reached at x = " << report.crossover.x
             << " (gap = " << report.crossover.gap << ", budget = " << report.crossover.budget
             << ", safety factor " << report.safety << ")";
        em.table(line.str());
    } else {
        em.table("contradiction not reached within the grid");
    }
    return report.reached ? 0 : 1;
}

int run_simulate(Emitter& em, unsigned rows, std::uint64_t p, std::uint64_t seed,
                 bool p_infinite) {
    analytic::SimulationParams params;
    params.rows = rows;
    params.p = p;
    params.seed = seed;
    params.p_infinite = p_infinite;
    analytic::SimulationStats s = analytic::simulate_matrix(params);

    bool ok = p_infinite ||
              (std::fabs(s.row_one_density - s.one_density_expected) <= 3.0 * s.one_density_se &&
               std::fabs(s.symmetric_freq - s.symmetric_expected) <= 3.0 * s.symmetric_se);

    ordered_json j;
    j["record"] = "simulate";
    j["rows"] = s.rows;
    j["p"] = p;
    j["seed"] = s.seed;
    j["p_infinite"] = p_infinite;
    j["ones"] = s.ones;
    j["row_one_density"] = s.row_one_density;
    j["col_one_density"] = s.col_one_density;
    j["one_density_expected"] = s.one_density_expected;
    j["one_density_se"] = s.one_density_se;
    j["symmetric_pairs"] = s.symmetric_pairs;
    j["symmetric_freq"] = s.symmetric_freq;
    j["symmetric_expected"] = s.symmetric_expected;
    j["symmetric_se"] = s.symmetric_se;
    j["within_3se"] = ok;
    em.record(j);

    std::ostringstream os;
    os << "rows=" << s.rows << " one-density=" << s.row_one_density << " (expect "
       << s.one_density_expected << " +- " << s.one_density_se << ")";
    em.table(os.str());
    std::ostringstream os2;
    os2 << "symmetric-pair frequency=" << s.symmetric_freq << " (expect " << s.symmetric_expected
        << " +- " << s.symmetric_se << ")";
    em.table(os2.str());
    em.table(ok ? "within 3 standard errors" : "OUTSIDE 3 standard errors");
    return ok ? 0 : 1;
}

} // namespace

int dispatch(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"ramlift: a workbench for ramification-adding deformation lifting"};
    app.require_subcommand(1);
    // Global options remain usable after the subcommand name.
    app.fallthrough();

    std::uint64_t p = 5;
    unsigned precision = 8;
    std::string variant = "uncond";
    std::uint64_t seed = 0;
    std::string output = "table";
    app.add_option("--p", p, "odd prime >= 5")->envname("RAMLIFT_P");
    app.add_option("--N", precision, "working precision level")->envname("RAMLIFT_N");
    app.add_option("--variant", variant, "uncond or grh")
        ->check(CLI::IsMember({"uncond", "grh"}))
        ->envname("RAMLIFT_VARIANT");
    app.add_option("--seed", seed, "seed for every pseudo-random draw")->envname("RAMLIFT_SEED");
    app.add_option("--output", output, "table or records")
        ->check(CLI::IsMember({"table", "records"}))
        ->envname("RAMLIFT_OUTPUT");

    // cohomology
    auto* coh = app.add_subcommand("cohomology", "local cohomology dimension table");
    coh->fallthrough();
    std::string place = "tame";
    std::uint64_t l = 7;
    bool star = true, no_star = false;
    unsigned psi_order = 3;
    coh->add_option("--place", place, "tame, multiplicative or ordinary")
        ->check(CLI::IsMember({"tame", "multiplicative", "ordinary"}));
    coh->add_option("--l", l, "prime value for tame places");
    coh->add_flag("--star", star, "extension class nontrivial (default)");
    coh->add_flag("--no-star", no_star, "extension class trivial");
    coh->add_option("--psi-order", psi_order, "order of the unramified character at p");

    // tame
    auto* tame_cmd = app.add_subcommand("tame", "cocycle bases, classification and repair demo");
    tame_cmd->fallthrough();
    std::uint64_t tame_l = 7;
    tame_cmd->add_option("--l", tame_l, "prime value of the tame place");

    // groups
    auto* grp = app.add_subcommand("groups", "finite group computations");
    grp->fallthrough();
    grp->require_subcommand(1);
    auto* sec = grp->add_subcommand("section-search", "exhaustive no-section certificate");
    sec->fallthrough();
    unsigned threads = 0;
    sec->add_option("--threads", threads, "worker threads (0 = all)");
    auto* ord = grp->add_subcommand("orders", "class element orders and centralizers");
    ord->fallthrough();
    unsigned k = 0;
    ord->add_option("--k", k, "stage index");

    // lift
    auto* lift = app.add_subcommand("lift", "run the staged lifting over a model");
    lift->fallthrough();
    std::string model_path, write_model, trace_path;
    unsigned k_max = 3;
    std::vector<unsigned> two_prime;
    bool verify = false;
    lift->add_option("--model", model_path, "model JSON file (generated when absent)");
    lift->add_option("--write-model", write_model, "write the model JSON here");
    lift->add_option("--trace", trace_path, "write line-delimited trace records here");
    lift->add_option("--kmax", k_max, "stages to run");
    lift->add_option("--two-prime", two_prime, "stages forced onto the two-prime path (grh)");
    lift->add_flag("--verify", verify, "audit the trace after the run");

    // density
    auto* den = app.add_subcommand("density", "class densities, error bound, crossover");
    den->fallthrough();
    std::string d_text = "1/100";
    double e1 = 1.0, c1 = 1.0, c2 = 10.0, n_L = 100.0;
    den->add_option("--d", d_text, "base class density (rational, e.g. 1/100)");
    den->add_option("--e1", e1, "absolute constant of the error bound");
    den->add_option("--c1", c1, "discriminant model constant");
    den->add_option("--c2", c2, "discriminant model exponent");
    den->add_option("--nL", n_L, "field degree");

    // simulate
    auto* sim = app.add_subcommand("simulate", "seeded 0/1 matrix heuristic");
    sim->fallthrough();
    unsigned rows = 2000;
    bool p_infinite = false;
    sim->add_option("--rows", rows, "matrix size");
    sim->add_flag("--p-infinite", p_infinite, "surrogate for the p -> infinity limit");

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << e.what() << "\n";
        return 2;
    }

    Emitter em{output == "records" ? OutputMode::records : OutputMode::table, out, {}};
    int status = 2;
    try {
        if (*coh) {
            status = run_cohomology(em, p, place, l, no_star ? false : star, psi_order);
        } else if (*tame_cmd) {
            status = run_tame(em, p, tame_l, precision);
        } else if (*grp) {
            if (*sec)
                status = run_section_search(em, p, threads, err);
            else
                status = run_group_orders(em, p, k, variant);
        } else if (*lift) {
            status = run_lift(em, model_path, write_model, trace_path, p, precision, variant,
                              k_max, two_prime, seed, verify, err);
        } else if (*den) {
            status = run_density(em, d_text, p, e1, c1, c2, n_L);
        } else if (*sim) {
            status = run_simulate(em, rows, p, seed, p_infinite);
        }
    } catch (const error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    em.flush();
    return status;
}

} // namespace ramlift::cli
