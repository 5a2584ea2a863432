#pragma once

#include <array>
#include <ostream>
#include <utility>

#include "ramlift/residue.hpp"

// 2x2 matrices over Z/p^N with a shared precision level.  This is the
// substrate for local representations (images of Frobenius and inertia) and
// for the trace-zero adjoint module the cocycles take values in.

namespace ramlift {

class Mat2 {
public:
    Mat2() : Mat2(zero(5, 1)) {}

    Mat2(Residue a, Residue b, Residue c, Residue d) : e_{a, b, c, d} {
        for (int i = 1; i < 4; ++i)
            if (e_[i].p() != e_[0].p() || e_[i].level() != e_[0].level())
                throw domain_error("Mat2: entries must share p and level");
    }

    static Mat2 from_ints(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d,
                          std::uint64_t p, unsigned level) {
        return Mat2(Residue::from_int(a, p, level), Residue::from_int(b, p, level),
                    Residue::from_int(c, p, level), Residue::from_int(d, p, level));
    }

    static Mat2 zero(std::uint64_t p, unsigned level) { return from_ints(0, 0, 0, 0, p, level); }
    static Mat2 identity(std::uint64_t p, unsigned level) { return from_ints(1, 0, 0, 1, p, level); }
    static Mat2 diagonal(Residue a, Residue d) {
        return Mat2(a, Residue::zero(a.p(), a.level()), Residue::zero(a.p(), a.level()), d);
    }

    const Residue& a() const { return e_[0]; }
    const Residue& b() const { return e_[1]; }
    const Residue& c() const { return e_[2]; }
    const Residue& d() const { return e_[3]; }
    const Residue& at(int row, int col) const { return e_[2 * row + col]; }

    std::uint64_t p() const { return e_[0].p(); }
    unsigned level() const { return e_[0].level(); }

    Residue det() const { return e_[0] * e_[3] - e_[1] * e_[2]; }
    Residue trace() const { return e_[0] + e_[3]; }
    bool is_invertible() const { return det().is_unit(); }

    bool is_diagonal() const { return e_[1].is_zero() && e_[2].is_zero(); }
    bool is_identity() const { return *this == identity(p(), level()); }

    Mat2 reduced(unsigned new_level) const {
        return Mat2(e_[0].reduced(new_level), e_[1].reduced(new_level),
                    e_[2].reduced(new_level), e_[3].reduced(new_level));
    }

    friend Mat2 operator+(const Mat2& x, const Mat2& y) {
        return Mat2(x.e_[0] + y.e_[0], x.e_[1] + y.e_[1], x.e_[2] + y.e_[2], x.e_[3] + y.e_[3]);
    }

    friend Mat2 operator-(const Mat2& x, const Mat2& y) {
        return Mat2(x.e_[0] - y.e_[0], x.e_[1] - y.e_[1], x.e_[2] - y.e_[2], x.e_[3] - y.e_[3]);
    }

    friend Mat2 operator*(const Mat2& x, const Mat2& y) {
        return Mat2(x.e_[0] * y.e_[0] + x.e_[1] * y.e_[2], x.e_[0] * y.e_[1] + x.e_[1] * y.e_[3],
                    x.e_[2] * y.e_[0] + x.e_[3] * y.e_[2], x.e_[2] * y.e_[1] + x.e_[3] * y.e_[3]);
    }

    friend Mat2 operator*(const Residue& c, const Mat2& x) {
        return Mat2(c * x.e_[0], c * x.e_[1], c * x.e_[2], c * x.e_[3]);
    }

    Mat2 inverse() const {
        Residue dt = det();
        if (!dt.is_unit())
            throw singular_error("Mat2::inverse: determinant is not a unit");
        Residue di = dt.inverse();
        return Mat2(di * e_[3], di * (-e_[1]), di * (-e_[2]), di * e_[0]);
    }

    Mat2 pow(std::uint64_t n) const {
        Mat2 r = identity(p(), level()), b = *this;
        while (n) {
            if (n & 1) r = r * b;
            b = b * b;
            n >>= 1;
        }
        return r;
    }

    Mat2 conjugate_by(const Mat2& g) const { return g * (*this) * g.inverse(); }

    friend bool operator==(const Mat2& x, const Mat2& y) { return x.e_ == y.e_; }
    friend bool operator!=(const Mat2& x, const Mat2& y) { return !(x == y); }

    friend std::ostream& operator<<(std::ostream& os, const Mat2& m) {
        return os << "[[" << m.e_[0].value() << ", " << m.e_[1].value() << "], ["
                  << m.e_[2].value() << ", " << m.e_[3].value() << "]] mod " << m.p() << "^"
                  << m.level();
    }

private:
    std::array<Residue, 4> e_;
};

// Trace-zero matrix, the value space Ad^0 of all cocycles in this project.
class TraceZeroMat {
public:
    TraceZeroMat() : m_(Mat2::zero(5, 1)) {}

    explicit TraceZeroMat(Mat2 m) : m_(std::move(m)) {
        if (!m_.trace().is_zero())
            throw domain_error("TraceZeroMat: trace must vanish at the stated level");
    }

    static TraceZeroMat from_ints(std::int64_t a, std::int64_t b, std::int64_t c,
                                  std::uint64_t p, unsigned level) {
        return TraceZeroMat(Mat2::from_ints(a, b, c, -a, p, level));
    }

    static TraceZeroMat zero(std::uint64_t p, unsigned level) {
        return TraceZeroMat(Mat2::zero(p, level));
    }

    const Mat2& mat() const { return m_; }
    std::uint64_t p() const { return m_.p(); }
    unsigned level() const { return m_.level(); }
    bool is_zero() const { return m_ == Mat2::zero(m_.p(), m_.level()); }

    // Lift to a higher level with the trace kept exactly zero: the first three
    // entries lift canonically, the bottom-right is forced to -a.
    Mat2 lifted(unsigned new_level) const {
        std::uint64_t p = m_.p();
        Residue a(m_.a().value(), p, new_level);
        Residue b(m_.b().value(), p, new_level);
        Residue c(m_.c().value(), p, new_level);
        return Mat2(a, b, c, -a);
    }

    friend bool operator==(const TraceZeroMat& x, const TraceZeroMat& y) { return x.m_ == y.m_; }
    friend bool operator!=(const TraceZeroMat& x, const TraceZeroMat& y) { return !(x == y); }

private:
    Mat2 m_;
};

// Diagonalizes a matrix whose reduction mod p is diagonal with distinct
// diagonal entries.  Returns (conjugator, diagonal) with
//   conjugator == I (mod p)   and   conjugator * m * conjugator^-1 diagonal.
// The conjugator is normalized to have diagonal entries exactly 1, which pins
// it down uniquely.  Off-diagonal mass is removed one p-power at a time; the
// distinct residual eigenvalues make each correction exact, so the loop
// terminates at full working precision with no tolerance anywhere.
inline std::pair<Mat2, Mat2> hensel_diagonalize(const Mat2& m) {
    std::uint64_t p = m.p();
    unsigned level = m.level();
    Mat2 rbar = m.reduced(1);
    if (!rbar.is_diagonal() || rbar.a() == rbar.d())
        throw domain_error("hensel_diagonalize: residual matrix must be diagonal with "
                           "distinct entries mod p");
    Mat2 cur = m;
    Mat2 conj = Mat2::identity(p, level);
    for (unsigned iter = 0; iter <= 2 * level; ++iter) {
        if (cur.b().is_zero() && cur.c().is_zero()) {
            // Divide out the diagonal part so the conjugator has diagonal
            // entries exactly 1; a diagonal factor commutes with `cur`.
            Mat2 dinv = Mat2::diagonal(conj.a().inverse(), conj.d().inverse());
            return {dinv * conj, cur};
        }
        Residue gap = cur.a() - cur.d(); // unit: distinct residual eigenvalues
        Residue x = cur.b() * gap.inverse();
        Residue y = -(cur.c() * gap.inverse());
        Mat2 step(Residue::one(p, level), x, y, Residue::one(p, level));
        cur = step * cur * step.inverse();
        conj = step * conj;
    }
    throw error("hensel_diagonalize: failed to converge (internal)");
}

} // namespace ramlift
