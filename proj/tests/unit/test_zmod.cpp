#include "doctest.h"

#include <optional>

#include "ramlift/mat2.hpp"
#include "ramlift/residue.hpp"
#include "test_util.hpp"

using namespace ramlift;

namespace {

// Independent oracle: scan all residues mod p^N for the unique x == a (mod p)
// with x^(p-1) == 1 (mod p^N).
std::optional<std::uint64_t> teichmuller_by_scan(std::uint64_t a, std::uint64_t p, unsigned level) {
    std::uint64_t m = pow_u64(p, level);
    std::optional<std::uint64_t> found;
    for (std::uint64_t x = 0; x < m; ++x) {
        if (x % p != a) continue;
        if (Residue(x, p, level).pow(p - 1).value() != 1) continue;
        if (found) return std::nullopt; // not unique: oracle failure
        found = x;
    }
    return found;
}

Mat2 random_mat(testutil::Rng& rng, std::uint64_t p, unsigned level) {
    std::uint64_t m = pow_u64(p, level);
    return Mat2::from_ints(static_cast<std::int64_t>(rng.below(m)),
                           static_cast<std::int64_t>(rng.below(m)),
                           static_cast<std::int64_t>(rng.below(m)),
                           static_cast<std::int64_t>(rng.below(m)), p, level);
}

Mat2 random_unit_conjugator(testutil::Rng& rng, std::uint64_t p, unsigned level) {
    // I + p * (random matrix): always invertible, congruent to I mod p.
    std::uint64_t m = pow_u64(p, level);
    Mat2 n = Mat2::from_ints(static_cast<std::int64_t>(p * (rng.below(m / p))),
                             static_cast<std::int64_t>(p * (rng.below(m / p))),
                             static_cast<std::int64_t>(p * (rng.below(m / p))),
                             static_cast<std::int64_t>(p * (rng.below(m / p))), p, level);
    return Mat2::identity(p, level) + n;
}

// Hensel refinement of a root of x^2 - tr*x + det from its residual value.
Residue char_root(const Residue& tr, const Residue& det, std::uint64_t r0) {
    std::uint64_t p = tr.p();
    unsigned level = tr.level();
    Residue x(r0, p, level);
    for (unsigned i = 0; i < level + 2; ++i) {
        Residue f = x * x - tr * x + det;
        Residue fp = x + x - tr;
        x = x - f * fp.inverse();
    }
    return x;
}

} // namespace

TEST_CASE("teichmuller matches exhaustive root-of-unity scan") {
    for (std::uint64_t p : {5ULL, 7ULL}) {
        for (unsigned level = 1; level <= 3; ++level) {
            for (std::uint64_t a = 1; a < p; ++a) {
                auto expect = teichmuller_by_scan(a, p, level);
                REQUIRE(expect.has_value());
                CHECK(teichmuller(a, p, level).value() == *expect);
            }
        }
    }
}

TEST_CASE("teichmuller worked values") {
    CHECK(teichmuller(1, 5, 3).value() == 1);
    CHECK(teichmuller(2, 5, 1).value() == 2);
    CHECK(teichmuller(2, 5, 2).value() == 7);
    CHECK_THROWS_AS(teichmuller(0, 5, 2), domain_error);
    CHECK_THROWS_AS(teichmuller(5, 5, 2), domain_error);
}

TEST_CASE("teichmuller is coherent under level reduction") {
    for (std::uint64_t a = 1; a < 5; ++a)
        for (unsigned level = 2; level <= 8; ++level)
            CHECK(teichmuller(a, 5, level).reduced(level - 1) == teichmuller(a, 5, level - 1));
}

TEST_CASE("residue arithmetic basics") {
    Residue a(17, 5, 2), b(13, 5, 2);
    CHECK((a + b).value() == 5);
    CHECK((a - b).value() == 4);
    CHECK((a * b).value() == (17 * 13) % 25);
    CHECK(a.inverse() * a == Residue::one(5, 2));
    CHECK(Residue(10, 5, 2).is_unit() == false);
    CHECK_THROWS_AS(Residue(10, 5, 2).inverse(), singular_error);
    CHECK_THROWS_AS(Residue(1, 5, 2) + Residue(1, 7, 2), domain_error);
    // Mixed levels reduce to the minimum level.
    CHECK((Residue(117, 5, 3) + Residue(1, 5, 2)).level() == 2);
    CHECK(Residue(75, 5, 3).valuation() == 2);
    CHECK(Residue(0, 5, 3).valuation() == 3);
}

TEST_CASE("config validation rejects oversized moduli") {
    CHECK(max_level(5) == 27);
    CHECK_THROWS_AS(validate_modulus(5, 28), config_error);
    CHECK_THROWS_AS(validate_modulus(4, 2), config_error);
    CHECK_THROWS_AS(validate_modulus(3, 2), config_error);
    validate_modulus(5, 27);
}

TEST_CASE("matrix identity and determinant laws") {
    testutil::Rng rng(1);
    Mat2 id = Mat2::identity(5, 3);
    for (int i = 0; i < 20; ++i) {
        Mat2 m = random_mat(rng, 5, 3);
        CHECK(id * m == m);
        CHECK(m * id == m);
    }
    CHECK(Mat2::from_ints(7, 0, 0, 1, 5, 2).det().value() == 7);
}

TEST_CASE("matrix inverse round trip, 100 random invertibles mod 5^3") {
    testutil::Rng rng(2);
    Mat2 id = Mat2::identity(5, 3);
    int done = 0;
    while (done < 100) {
        Mat2 m = random_mat(rng, 5, 3);
        if (!m.is_invertible()) continue;
        CHECK(m * m.inverse() == id);
        CHECK(m.inverse() * m == id);
        ++done;
    }
    CHECK_THROWS_AS(Mat2::from_ints(5, 0, 0, 5, 5, 3).inverse(), singular_error);
}

TEST_CASE("det(I + p^e F) == 1 mod p^(e+1) for trace-zero F") {
    testutil::Rng rng(3);
    const std::uint64_t p = 5;
    const unsigned level = 6;
    for (int i = 0; i < 50; ++i) {
        TraceZeroMat f =
            TraceZeroMat::from_ints(static_cast<std::int64_t>(rng.below(p)),
                                    static_cast<std::int64_t>(rng.below(p)),
                                    static_cast<std::int64_t>(rng.below(p)), p, 1);
        for (unsigned e = 1; e < level; ++e) {
            Residue scale(pow_u64(p, e), p, level);
            Mat2 pert = Mat2::identity(p, level) + scale * f.lifted(level);
            CHECK(pert.det().reduced(e + 1) == Residue::one(p, e + 1));
        }
    }
}

TEST_CASE("hensel_diagonalize fixes diagonal input") {
    Mat2 m = Mat2::from_ints(7, 0, 0, 1, 5, 2);
    auto [conj, diag] = hensel_diagonalize(m);
    CHECK(conj == Mat2::identity(5, 2));
    CHECK(diag == m);
}

TEST_CASE("hensel_diagonalize round trip on conjugated diagonals") {
    testutil::Rng rng(4);
    Mat2 target = Mat2::from_ints(7, 0, 0, 1, 5, 2);
    for (int i = 0; i < 50; ++i) {
        Mat2 c = random_unit_conjugator(rng, 5, 2);
        Mat2 m = c * target * c.inverse();
        auto [conj, diag] = hensel_diagonalize(m);
        CHECK(diag == target);
        CHECK(conj.reduced(1) == Mat2::identity(5, 1));
        CHECK(conj * m * conj.inverse() == diag);
        CHECK(conj.a() == Residue::one(5, 2));
        CHECK(conj.d() == Residue::one(5, 2));
    }
}

TEST_CASE("hensel_diagonalize agrees with characteristic-root refinement") {
    // diag(2,1) plus a strictly upper-triangular p-multiple: the diagonal
    // entries must be the Hensel refinements of the characteristic roots.
    for (std::int64_t t = 0; t < 5; ++t) {
        Mat2 m = Mat2::from_ints(2, 5 * t, 0, 1, 5, 2) + Mat2::from_ints(5, 0, 0, 10, 5, 2);
        auto [conj, diag] = hensel_diagonalize(m);
        Residue r1 = char_root(m.trace(), m.det(), 2);
        Residue r2 = char_root(m.trace(), m.det(), 1);
        CHECK(diag.a() == r1);
        CHECK(diag.d() == r2);
        CHECK(conj * m * conj.inverse() == diag);
    }
}

TEST_CASE("hensel_diagonalize is idempotent on its own output") {
    testutil::Rng rng(5);
    for (int i = 0; i < 20; ++i) {
        Mat2 c = random_unit_conjugator(rng, 5, 4);
        Mat2 m = c * Mat2::from_ints(7, 0, 0, 1, 5, 4) * c.inverse();
        auto [conj1, diag1] = hensel_diagonalize(m);
        auto [conj2, diag2] = hensel_diagonalize(diag1);
        CHECK(conj2 == Mat2::identity(5, 4));
        CHECK(diag2 == diag1);
    }
}

TEST_CASE("hensel_diagonalize rejects repeated residual eigenvalues") {
    CHECK_THROWS_AS(hensel_diagonalize(Mat2::from_ints(2, 5, 0, 2, 5, 2)), domain_error);
    CHECK_THROWS_AS(hensel_diagonalize(Mat2::from_ints(2, 1, 0, 1, 5, 2)), domain_error);
}
