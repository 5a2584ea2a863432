#include "doctest.h"

#include <numeric>

#include "ramlift/groups.hpp"
#include "test_util.hpp"

using namespace ramlift;
using namespace ramlift::groups;

TEST_CASE("closure: basic orders") {
    CHECK(closure({Mat2::identity(5, 1)}, 10).order == 1);
    CHECK(closure({Mat2::from_ints(2, 0, 0, 1, 5, 1)}, 10).order == 4); // 2,4,3,1 mod 5

    auto [x, y] = gl2_generating_pair(5);
    ClosureResult full = closure({x, y}, 1000);
    CHECK_FALSE(full.capped);
    CHECK(full.order == 480);
    CHECK(gl2_order(5, 1) == 480);

    ClosureResult capped = closure({x, y}, 100);
    CHECK(capped.capped);

    CHECK_THROWS_AS(closure({Mat2::from_ints(5, 0, 0, 5, 5, 2)}, 10), singular_error);
}

TEST_CASE("closure recovers |GL2(Z/25)| from lifted generators") {
    auto [x, y] = gl2_generating_pair(5);
    std::vector<Mat2> gens;
    gens.push_back(Mat2::from_ints(static_cast<std::int64_t>(x.a().value()),
                                   static_cast<std::int64_t>(x.b().value()),
                                   static_cast<std::int64_t>(x.c().value()),
                                   static_cast<std::int64_t>(x.d().value()), 5, 2));
    gens.push_back(Mat2::from_ints(static_cast<std::int64_t>(y.a().value()),
                                   static_cast<std::int64_t>(y.b().value()),
                                   static_cast<std::int64_t>(y.c().value()),
                                   static_cast<std::int64_t>(y.d().value()), 5, 2));
    gens.push_back(Mat2::from_ints(1, 5, 0, 1, 5, 2));
    gens.push_back(Mat2::from_ints(1, 0, 5, 1, 5, 2));
    gens.push_back(Mat2::from_ints(6, 0, 0, 1, 5, 2));
    ClosureResult r = closure(gens, 400000);
    CHECK_FALSE(r.capped);
    CHECK(r.order == 300000);
    CHECK(gl2_order(5, 2) == 300000);
}

TEST_CASE("section search: split-ambient sanity and budget guard") {
    SectionSearchOptions opts;
    opts.ambient_level = 1;
    SectionSearchResult sanity = section_search(5, opts);
    CHECK(sanity.verdict == SectionVerdict::section_found);
    CHECK(sanity.candidates_checked == 1);
    REQUIRE(sanity.witness.has_value());
    CHECK(sanity.witness->first == gl2_generating_pair(5).first);

    // p = 7 blows the default budget; a partial search must refuse loudly.
    CHECK_THROWS_AS(section_search(7), budget_error);
}

TEST_CASE("section search rejections are genuine: uncapped cross-check") {
    // The canonical lifts of the generating pair are rejected during the
    // search; their uncapped closure must exceed |GL2(F_5)|.
    auto [x, y] = gl2_generating_pair(5);
    testutil::Rng rng(31);
    for (int trial = 0; trial < 4; ++trial) {
        auto lift = [&](const Mat2& base) {
            return Mat2::from_ints(
                static_cast<std::int64_t>(base.a().value() + 5 * rng.below(5)),
                static_cast<std::int64_t>(base.b().value() + 5 * rng.below(5)),
                static_cast<std::int64_t>(base.c().value() + 5 * rng.below(5)),
                static_cast<std::int64_t>(base.d().value() + 5 * rng.below(5)), 5, 2);
        };
        ClosureResult r = closure({lift(x), lift(y)}, 400000);
        CHECK_FALSE(r.capped);
        CHECK(r.order > 480);
        CHECK(r.order % 480 == 0);
    }
}

TEST_CASE("semidirect product laws") {
    testutil::Rng rng(32);
    auto random_element = [&](unsigned layers) {
        SemidirectElement e = sd_identity(5, 2, layers);
        for (auto& n : e.layers)
            n = TraceZeroMat::from_ints(static_cast<std::int64_t>(rng.below(5)),
                                        static_cast<std::int64_t>(rng.below(5)),
                                        static_cast<std::int64_t>(rng.below(5)), 5, 1);
        for (;;) {
            Mat2 c = Mat2::from_ints(static_cast<std::int64_t>(rng.below(25)),
                                     static_cast<std::int64_t>(rng.below(25)),
                                     static_cast<std::int64_t>(rng.below(25)),
                                     static_cast<std::int64_t>(rng.below(25)), 5, 2);
            if (c.is_invertible()) {
                e.c = c;
                break;
            }
        }
        return e;
    };

    SemidirectElement id = sd_identity(5, 2, 2);
    for (int trial = 0; trial < 25; ++trial) {
        SemidirectElement a = random_element(2), b = random_element(2), c = random_element(2);
        CHECK(sd_equal(sd_mul(sd_mul(a, b), c), sd_mul(a, sd_mul(b, c))));
        CHECK(sd_equal(sd_mul(a, sd_inverse(a)), id));
        CHECK(sd_equal(sd_mul(sd_inverse(a), a), id));
        // (n, c)^-1 = (-c^-1 n, c^-1)
        SemidirectElement inv = sd_inverse(a);
        CHECK(inv.c == a.c.inverse());
        Mat2 cbar_inv = a.c.reduced(1).inverse();
        for (std::size_t i = 0; i < a.layers.size(); ++i) {
            Mat2 expect = Mat2::zero(5, 1) - cbar_inv * a.layers[i].mat() * cbar_inv.inverse();
            CHECK(inv.layers[i].mat() == expect);
        }
    }
}

TEST_CASE("element orders in the semidirect product") {
    // The documented pair (A, B) at p = 5, k = 0: order 20 = p * ord(2*).
    ChebotarevClassSpec uncond = chebotarev_class(Variant::unconditional, 5, 0);
    SemidirectElement e = sd_identity(5, 2, 1);
    e.layers[0] = uncond.B;
    e.c = uncond.A;
    CHECK(element_order(e) == 20);

    CHECK(element_order(sd_identity(5, 2, 1)) == 1);

    SemidirectElement translation = sd_identity(5, 2, 1);
    translation.layers[0] = TraceZeroMat::from_ints(0, 3, 1, 5, 1);
    CHECK(element_order(translation) == 5);

    // order((B, A)) == lcm(order(A), p) whenever B != 0 is fixed by the
    // residual conjugation (diagonal trace-zero B, diagonal A).
    testutil::Rng rng(33);
    for (int trial = 0; trial < 20; ++trial) {
        std::uint64_t lam1 = 1 + rng.below(24), lam2 = 1 + rng.below(24);
        if (lam1 % 5 == 0 || lam2 % 5 == 0 || lam1 % 5 == lam2 % 5) continue;
        SemidirectElement x = sd_identity(5, 2, 1);
        x.c = Mat2::from_ints(static_cast<std::int64_t>(lam1), 0, 0,
                              static_cast<std::int64_t>(lam2), 5, 2);
        x.layers[0] = TraceZeroMat::from_ints(1 + static_cast<std::int64_t>(rng.below(4)), 0, 0, 5, 1);
        SemidirectElement conly = sd_identity(5, 2, 1);
        conly.c = x.c;
        std::uint64_t corder = element_order(conly);
        CHECK(element_order(x) == std::lcm<std::uint64_t>(corder, 5));
    }
}

TEST_CASE("layer centralizer orders") {
    CHECK(layer_centralizer_order(Mat2::from_ints(2, 0, 0, 1, 5, 1)) == 5);
    CHECK(layer_centralizer_order(Mat2::from_ints(2, 0, 0, 1, 7, 1)) == 7);
    CHECK(layer_centralizer_order(Mat2::from_ints(3, 0, 0, 4, 5, 1)) == 5);
    CHECK_THROWS_AS(layer_centralizer_order(Mat2::from_ints(2, 0, 0, 2, 5, 1)), domain_error);
    CHECK_THROWS_AS(layer_centralizer_order(Mat2::from_ints(2, 1, 0, 1, 5, 1)), domain_error);
}

TEST_CASE("chebotarev class prescriptions") {
    ChebotarevClassSpec uncond = chebotarev_class(Variant::unconditional, 5, 0);
    CHECK(uncond.A == Mat2::from_ints(7, 0, 0, 1, 5, 2));
    CHECK(uncond.B.mat() == Mat2::from_ints(1, 0, 0, -1, 5, 1));
    CHECK(uncond.b_layer == 0);
    CHECK(uncond.frobenius_congruence.value() == 7);

    ChebotarevClassSpec grh = chebotarev_class(Variant::grh, 5, 0);
    CHECK(grh.A == Mat2::from_ints(17, 0, 0, 21, 5, 2));
    CHECK(grh.B.is_zero());
    CHECK(grh.frobenius_congruence.value() == 7);

    // The grh matrix is not of the special eigenvalue shape (l, 1) mod p^2,
    // but reduces to it mod p; both variants act identically on the layers.
    CHECK(grh.A.a().value() != 7);
    CHECK(grh.A.d().value() != 1);
    CHECK(grh.A.reduced(1) == Mat2::from_ints(2, 0, 0, 1, 5, 1));
    CHECK(grh.A.reduced(1) == uncond.A.reduced(1));

    // det A == the congruence class value in both variants.
    CHECK(uncond.A.det() == uncond.frobenius_congruence);
    CHECK(grh.A.det() == grh.frobenius_congruence);

    ChebotarevClassSpec k2 = chebotarev_class(Variant::grh, 5, 2);
    CHECK(k2.A.level() == 4);
    CHECK(k2.b_layer == 2);
    CHECK(k2.frobenius_congruence == teichmuller(2, 5, 4));
}
