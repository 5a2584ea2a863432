#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ramlift/fp.hpp"
#include "ramlift/groups.hpp"
#include "ramlift/tame.hpp"

// Global lifting over a synthetic model.  The global Galois group is never
// represented: a model is a bundle of per-prime local data plus restriction
// tables for the global cohomology classes, which is everything the staged
// induction actually manipulates.  Each stage adds one prime (or two, in the
// grh two-prime step), introduces ramification at the stage's onset level,
// and then climbs level by level to the precision cap, repairing every prime
// back to the special shape and (grh) recentering the component at p into
// the declared ordinary subspace.

namespace ramlift::lifter {

using groups::Variant;

// Restriction of a global class at one tame prime, in (r, s) coordinates.
struct ClassRestriction {
    std::uint32_t a = 0;
    std::uint32_t b = 0;
    bool is_zero() const { return a == 0 && b == 0; }
};

// A global cohomology class, recorded through its restrictions: one (r, s)
// pair per prime of the model (global prime order), plus the coordinate
// vector of its restriction at p (grh models only).
struct GlobalClass {
    std::vector<ClassRestriction> at_primes;
    fp::Vec at_p;
};

struct PrimeSpec {
    std::uint64_t l = 0;       // == 2* mod p^(stage+1)
    GlobalClass intro;         // unconditional stages only
    GlobalClass repair;
};

struct StageSpec {
    unsigned stage = 1;
    bool two_prime = false;
    std::vector<PrimeSpec> primes;
};

struct OrdinaryData {
    bool star_nontrivial = true;
    unsigned ambient_dim = 3;
    std::vector<fp::Vec> restriction_basis; // U: image of the global restriction, dim 2
    std::vector<fp::Vec> ordinary_basis;    // W: ordinary classes, dim 1 or 2
};

struct GlobalModel {
    std::uint64_t p = 5;
    unsigned precision = 8;
    Variant variant = Variant::unconditional;
    std::uint64_t seed = 0;
    unsigned base_h1_dim = 2;
    OrdinaryData ordinary; // meaningful for grh models
    std::vector<StageSpec> stages;

    unsigned total_primes() const {
        unsigned n = 0;
        for (const auto& s : stages) n += static_cast<unsigned>(s.primes.size());
        return n;
    }
};

// Every PrimeSpec / restriction-table invariant is checked here; run()
// refuses unvalidated models by validating first.
void validate_model(const GlobalModel& model);

// Deterministic model generator: one prime per stage, except the stages
// listed in `two_prime_stages` (grh only), which get the crossed pair.
GlobalModel make_model(std::uint64_t p, unsigned precision, Variant variant, unsigned k_max,
                       const std::vector<unsigned>& two_prime_stages, std::uint64_t seed);

std::string model_to_json(const GlobalModel& model);
GlobalModel model_from_json(const std::string& text);

struct PrimeState {
    unsigned stage = 0; // stage that introduced the prime
    unsigned slot = 0;
    unsigned global_index = 0;
    std::uint64_t l = 0;
    tame::LocalRep rep;
};

struct LiftState {
    unsigned completed_stage = 0;
    unsigned level = 0;
    std::vector<PrimeState> primes;
    std::vector<fp::Vec> p_component_by_level; // grh: index = level, in W after each pass
};

// One audited record per (stage, level, prime): the representation before the
// repair pass, the repair multiple applied at this prime, and the final
// matrices for the level.
struct PrimeLevelEvent {
    unsigned stage = 0;
    unsigned level = 0;
    unsigned prime_index = 0;
    unsigned prime_stage = 0;
    std::uint64_t l = 0;
    Mat2 pre_sigma, pre_tau;
    std::uint32_t alpha = 0;
    Mat2 post_sigma, post_tau;
    std::uint64_t u = 0;
};

struct OrdinaryEvent {
    unsigned stage = 0;
    unsigned level = 0;
    fp::Vec pre;
    fp::Vec adjustment; // coordinates in the restriction basis U
    fp::Vec post;
};

// Level-N images at the end of a stage: the congruence ledger entries.
struct StageSnapshot {
    unsigned stage = 0;
    std::vector<unsigned> prime_stages;
    std::vector<std::uint64_t> prime_ls;
    std::vector<Mat2> sigma_images;
    std::vector<Mat2> tau_images;
};

struct Trace {
    GlobalModel model;
    unsigned k_max = 0;
    std::vector<PrimeLevelEvent> events;
    std::vector<OrdinaryEvent> ordinary_events;
    std::vector<StageSnapshot> snapshots;
};

struct RunResult {
    LiftState state;
    Trace trace;
};

// Stage opening: reduces the state to the onset level stage+1, materializes
// the stage's primes with their prescribed Frobenius images, and (in the
// unconditional variant) applies each introduction class once.  The grh
// variant introduces ramification through the forced repair multiples of the
// following repair_pass instead.
void introduce_ramification(const GlobalModel& model, LiftState& state, unsigned stage);

// Advances the working level by one: every prime takes the canonical special
// lift and then a seeded perturbation (the uncontrolled choice made by the
// ambient global lift); the component at p receives a fresh seeded deviation.
void lift_level(const GlobalModel& model, LiftState& state, unsigned processing_stage);

// One repair pass at the current working level, newest prime first: each
// prime is adjusted back to the exact special shape by the unique multiple of
// its repair class, whose restrictions then act everywhere else they are
// nonzero.  Classes of earlier stages restrict trivially at later primes, so
// a repaired prime is never broken by a repair later in the pass.  Returns
// the multiples, indexed like state.primes.
std::vector<std::uint32_t> repair_pass(const GlobalModel& model, LiftState& state);

// Moves the component at p back into the ordinary subspace by subtracting its
// restriction-image part (grh only); the subtracted class restricts trivially
// at every tame prime of the model, so no repair is disturbed.
OrdinaryEvent ordinary_pass(const GlobalModel& model, LiftState& state);

// The full induction: validate, then per stage introduce ramification at
// level stage+1 and climb to the precision cap with repair and (grh)
// ordinary passes at every level.
RunResult run(const GlobalModel& model, unsigned k_max);

struct Violation {
    std::string code;
    unsigned stage = 0;
    unsigned level = 0;
    int prime_index = -1;
    std::string detail;
};

struct VerifyReport {
    std::vector<Violation> violations;
    std::uint64_t checks = 0;
    bool ok() const { return violations.empty(); }
};

// Independent audit of a trace from the raw matrices: tame relations and
// determinant patterns at every recorded level, exact specialness after
// repair, u-valuations (a stage-s prime carries u = unit * p^s from its onset
// level s+1 on), in-stage level compatibility, the cross-stage congruence
// ledger, forced nonzero introduction multiples in the grh variant, and
// per-level membership of the p-component in the ordinary subspace.
VerifyReport verify_chain(const Trace& trace);

// Line-delimited JSON records of the trace, one line per event.
std::vector<std::string> trace_records(const Trace& trace);

} // namespace ramlift::lifter
