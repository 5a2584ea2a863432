#include "ramlift/groups.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <thread>
#include <unordered_set>

#include "ramlift/fp.hpp"

namespace ramlift::groups {

std::uint64_t gl2_order(std::uint64_t p, unsigned level) {
    std::uint64_t base = (p * p - 1) * (p * p - p);
    for (unsigned i = 1; i < level; ++i) base *= p * p * p * p;
    return base;
}

namespace {

std::uint64_t pack(const Mat2& m) {
    return ((m.a().value() << 16 | m.b().value()) << 16 | m.c().value()) << 16 | m.d().value();
}

} // namespace

ClosureResult closure(const std::vector<Mat2>& generators, std::uint64_t cap) {
    if (generators.empty()) return {false, 1};
    std::uint64_t p = generators[0].p();
    unsigned level = generators[0].level();
    if (pow_u64(p, level) > 0xffff)
        throw config_error("closure: p^level must fit 16 bits per entry");
    for (const Mat2& g : generators) {
        if (g.p() != p || g.level() != level)
            throw domain_error("closure: generators must share (p, level)");
        if (!g.is_invertible())
            throw singular_error("closure: generator is singular");
    }

    std::unordered_set<std::uint64_t> seen;
    std::vector<Mat2> queue;
    seen.reserve(1024);
    Mat2 id = Mat2::identity(p, level);
    seen.insert(pack(id));
    queue.push_back(id);
    for (std::size_t head = 0; head < queue.size(); ++head) {
        Mat2 cur = queue[head];
        for (const Mat2& g : generators) {
            Mat2 next = cur * g;
            if (seen.insert(pack(next)).second) {
                if (seen.size() > cap) return {true, seen.size()};
                queue.push_back(next);
            }
        }
    }
    return {false, seen.size()};
}

std::pair<Mat2, Mat2> gl2_generating_pair(std::uint64_t p) {
    // Least primitive root mod p.
    std::uint64_t g = 0;
    for (std::uint64_t cand = 2; cand < p; ++cand) {
        if (fp::order(static_cast<fp::Elt>(cand), static_cast<fp::Elt>(p)) == p - 1) {
            g = cand;
            break;
        }
    }
    if (g == 0) throw error("gl2_generating_pair: no primitive root found (internal)");
    Mat2 x = Mat2::from_ints(static_cast<std::int64_t>(g), 0, 0, 1, p, 1);
    Mat2 y = Mat2::from_ints(0, -1, 1, 1, p, 1);
    ClosureResult order = closure({x, y}, gl2_order(p, 1) + 1);
    if (order.capped || order.order != gl2_order(p, 1))
        throw error("gl2_generating_pair: candidate pair does not generate GL2(F_p)");
    return {x, y};
}

namespace {

// Fixed-size BFS working set for the section search: elements of
// GL2(Z/p^level) packed as base-q digits, visited flags kept in a
// generation-stamped array so candidates reuse the allocation.
struct SearchScratch {
    std::uint32_t q;
    std::vector<std::uint32_t> stamp;
    std::vector<std::uint32_t> queue;
    std::uint32_t generation = 0;

    explicit SearchScratch(std::uint32_t q_) : q(q_), stamp(q_ * q_ * q_ * q_, 0) {}

    static std::uint32_t pack4(std::uint32_t a, std::uint32_t b, std::uint32_t c,
                               std::uint32_t d, std::uint32_t q) {
        return ((a * q + b) * q + c) * q + d;
    }

    // Returns the closure size, stopping once it exceeds cap.
    std::uint64_t bounded_closure(const std::array<std::uint32_t, 4>& x,
                                  const std::array<std::uint32_t, 4>& y, std::uint64_t cap) {
        ++generation;
        queue.clear();
        auto visit = [&](std::uint32_t key) {
            if (stamp[key] == generation) return false;
            stamp[key] = generation;
            queue.push_back(key);
            return true;
        };
        visit(pack4(1 % q, 0, 0, 1 % q, q));
        std::array<std::array<std::uint32_t, 4>, 2> gens{x, y};
        for (std::size_t head = 0; head < queue.size(); ++head) {
            std::uint32_t key = queue[head];
            std::uint32_t d = key % q, c = key / q % q, b = key / (q * q) % q,
                          a = key / (q * q * q);
            for (const auto& g : gens) {
                std::uint32_t na = (a * g[0] + b * g[2]) % q;
                std::uint32_t nb = (a * g[1] + b * g[3]) % q;
                std::uint32_t nc = (c * g[0] + d * g[2]) % q;
                std::uint32_t nd = (c * g[1] + d * g[3]) % q;
                if (visit(pack4(na, nb, nc, nd, q)) && queue.size() > cap)
                    return queue.size();
            }
        }
        return queue.size();
    }
};

} // namespace

SectionSearchResult section_search(std::uint64_t p, const SectionSearchOptions& opts) {
    auto t0 = std::chrono::steady_clock::now();
    unsigned level = opts.ambient_level;
    if (level < 1) throw config_error("section_search: ambient level must be >= 1");
    std::uint64_t q = pow_u64(p, level);
    // The visited array is indexed by packed matrices, q^4 entries per thread.
    if (q > 64) throw config_error("section_search: p^level too large to enumerate");

    std::uint64_t lift_space = pow_u64(p, 4 * (level - 1));
    std::uint64_t total = lift_space * lift_space;
    if (total > opts.max_candidates)
        throw budget_error("section_search: candidate space exceeds the search budget");

    auto [xbar, ybar] = gl2_generating_pair(p);
    std::uint64_t target = gl2_order(p, 1);

    // All lifts of a residual matrix to level `level`.
    auto lifts_of = [&](const Mat2& base) {
        std::vector<std::array<std::uint32_t, 4>> out;
        out.reserve(lift_space);
        for (std::uint64_t code = 0; code < lift_space; ++code) {
            std::uint64_t cc = code;
            std::array<std::uint32_t, 4> entry{};
            std::uint64_t step = pow_u64(p, level - 1);
            std::uint32_t base_vals[4] = {static_cast<std::uint32_t>(base.a().value()),
                                          static_cast<std::uint32_t>(base.b().value()),
                                          static_cast<std::uint32_t>(base.c().value()),
                                          static_cast<std::uint32_t>(base.d().value())};
            for (int i = 0; i < 4; ++i) {
                entry[static_cast<std::size_t>(i)] =
                    static_cast<std::uint32_t>((base_vals[i] + p * (cc % step)) % q);
                cc /= step;
            }
            out.push_back(entry);
        }
        return out;
    };
    auto xlifts = lifts_of(xbar);
    auto ylifts = lifts_of(ybar);

    unsigned nthreads = opts.threads ? opts.threads : std::thread::hardware_concurrency();
    if (nthreads == 0) nthreads = 1;
    nthreads = std::min<unsigned>(nthreads, static_cast<unsigned>(xlifts.size()));

    std::atomic<std::size_t> next_x{0};
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> found_per_thread(nthreads);
    std::vector<std::thread> workers;
    for (unsigned t = 0; t < nthreads; ++t) {
        workers.emplace_back([&, t] {
            SearchScratch scratch(static_cast<std::uint32_t>(q));
            for (;;) {
                std::size_t i = next_x.fetch_add(1);
                if (i >= xlifts.size()) break;
                for (std::size_t j = 0; j < ylifts.size(); ++j) {
                    std::uint64_t n = scratch.bounded_closure(xlifts[i], ylifts[j], target + 1);
                    // The pair reduces onto a generating pair, so n >= target;
                    // equality certifies a section image.
                    if (n == target) found_per_thread[t].emplace_back(i, j);
                }
            }
        });
    }
    for (auto& w : workers) w.join();

    std::vector<std::pair<std::size_t, std::size_t>> found;
    for (auto& v : found_per_thread) found.insert(found.end(), v.begin(), v.end());
    std::sort(found.begin(), found.end());

    SectionSearchResult result;
    result.candidates_checked = total;
    result.verdict = found.empty() ? SectionVerdict::no_section : SectionVerdict::section_found;
    if (!found.empty()) {
        auto unpack = [&](const std::array<std::uint32_t, 4>& e) {
            return Mat2::from_ints(e[0], e[1], e[2], e[3], p, level);
        };
        result.witness = {unpack(xlifts[found[0].first]), unpack(ylifts[found[0].second])};
    }
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

SemidirectElement sd_identity(std::uint64_t p, unsigned level, unsigned layer_count) {
    SemidirectElement e;
    e.layers.assign(layer_count, TraceZeroMat::zero(p, 1));
    e.c = Mat2::identity(p, level);
    return e;
}

SemidirectElement sd_mul(const SemidirectElement& x, const SemidirectElement& y) {
    if (x.layers.size() != y.layers.size())
        throw domain_error("sd_mul: layer counts differ");
    SemidirectElement out;
    out.c = x.c * y.c;
    Mat2 cbar = x.c.reduced(1);
    Mat2 cbar_inv = cbar.inverse();
    out.layers.reserve(x.layers.size());
    for (std::size_t i = 0; i < x.layers.size(); ++i) {
        Mat2 acted = cbar * y.layers[i].mat() * cbar_inv;
        out.layers.emplace_back(x.layers[i].mat() + acted);
    }
    return out;
}

SemidirectElement sd_inverse(const SemidirectElement& x) {
    SemidirectElement out;
    out.c = x.c.inverse();
    Mat2 cbar_inv = x.c.reduced(1).inverse();
    Mat2 cbar = x.c.reduced(1);
    out.layers.reserve(x.layers.size());
    for (const auto& n : x.layers) {
        Mat2 acted = cbar_inv * n.mat() * cbar;
        out.layers.emplace_back(Mat2::zero(n.p(), 1) - acted);
    }
    return out;
}

bool sd_equal(const SemidirectElement& x, const SemidirectElement& y) {
    if (x.layers.size() != y.layers.size() || x.c != y.c) return false;
    for (std::size_t i = 0; i < x.layers.size(); ++i)
        if (x.layers[i] != y.layers[i]) return false;
    return true;
}

std::uint64_t element_order(const SemidirectElement& x, std::uint64_t cap) {
    // Order of the matrix part first.
    Mat2 id = Mat2::identity(x.c.p(), x.c.level());
    Mat2 acc = x.c;
    std::uint64_t c_order = 1;
    while (acc != id) {
        acc = acc * x.c;
        ++c_order;
        if (c_order > cap) throw budget_error("element_order: matrix order exceeds cap");
    }
    // x^c_order has trivial matrix part; its layer part is p-torsion.
    SemidirectElement power = sd_identity(x.c.p(), x.c.level(), static_cast<unsigned>(x.layers.size()));
    std::uint64_t e = c_order;
    SemidirectElement base = x;
    while (e) {
        if (e & 1) power = sd_mul(power, base);
        base = sd_mul(base, base);
        e >>= 1;
    }
    bool trivial = true;
    for (const auto& n : power.layers) trivial = trivial && n.is_zero();
    return trivial ? c_order : c_order * x.c.p();
}

std::uint64_t layer_centralizer_order(const Mat2& a_residual) {
    if (a_residual.level() != 1)
        throw domain_error("layer_centralizer_order: expected a residual (level-1) matrix");
    if (!a_residual.is_diagonal() || a_residual.a() == a_residual.d())
        throw domain_error("layer_centralizer_order: residual matrix must be diagonal with "
                           "distinct entries");
    std::uint64_t p = a_residual.p();
    Mat2 inv = a_residual.inverse();
    std::uint64_t count = 0;
    for (std::uint64_t a = 0; a < p; ++a)
        for (std::uint64_t b = 0; b < p; ++b)
            for (std::uint64_t c = 0; c < p; ++c) {
                Mat2 f = TraceZeroMat::from_ints(static_cast<std::int64_t>(a),
                                                 static_cast<std::int64_t>(b),
                                                 static_cast<std::int64_t>(c), p, 1)
                             .mat();
                if (a_residual * f * inv == f) ++count;
            }
    return count;
}

ChebotarevClassSpec chebotarev_class(Variant variant, std::uint64_t p, unsigned k) {
    unsigned level = k + 2;
    Residue two_star = teichmuller(2, p, level);
    Residue one = Residue::one(p, level);
    Residue pk1(pow_u64(p, k + 1), p, level);

    ChebotarevClassSpec spec{variant, p, k, Mat2::identity(p, level),
                             TraceZeroMat::zero(p, 1), k, two_star};
    if (variant == Variant::unconditional) {
        spec.A = Mat2::diagonal(two_star, one);
        spec.B = TraceZeroMat::from_ints(1, 0, 0, p, 1);
    } else {
        spec.A = Mat2::diagonal(two_star * (one + pk1), one - pk1);
        spec.B = TraceZeroMat::zero(p, 1);
    }
    if (spec.A.det() != spec.frobenius_congruence)
        throw error("chebotarev_class: determinant drift (internal)");
    return spec;
}

} // namespace ramlift::groups
