#pragma once

#include <cstdint>
#include <vector>

#include "ramlift/errors.hpp"

// Small exact linear algebra over the prime field F_p.  Everything here is
// plain Gaussian elimination on dense rows; dimensions in this project never
// exceed a handful.

namespace ramlift::fp {

using Elt = std::uint32_t;
using Vec = std::vector<Elt>;

inline Elt add(Elt a, Elt b, Elt p) { return (a + b) % p; }
inline Elt sub(Elt a, Elt b, Elt p) { return (a + p - b % p) % p; }
inline Elt mul(Elt a, Elt b, Elt p) { return static_cast<Elt>(std::uint64_t(a) * b % p); }

inline Elt pow(Elt a, std::uint64_t e, Elt p) {
    Elt r = 1 % p;
    a %= p;
    while (e) {
        if (e & 1) r = mul(r, a, p);
        a = mul(a, a, p);
        e >>= 1;
    }
    return r;
}

inline Elt inv(Elt a, Elt p) {
    a %= p;
    if (a == 0) throw singular_error("fp::inv: zero is not invertible");
    return pow(a, p - 2, p); // p prime
}

// Multiplicative order of a mod p.
inline unsigned order(Elt a, Elt p) {
    a %= p;
    if (a == 0) throw domain_error("fp::order: zero has no multiplicative order");
    Elt x = a;
    unsigned n = 1;
    while (x != 1) {
        x = mul(x, a, p);
        ++n;
    }
    return n;
}

inline Vec vec_add(const Vec& a, const Vec& b, Elt p) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = add(a[i], b[i], p);
    return r;
}

inline Vec vec_sub(const Vec& a, const Vec& b, Elt p) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = sub(a[i], b[i], p);
    return r;
}

inline Vec vec_scale(Elt c, const Vec& a, Elt p) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = mul(c, a[i], p);
    return r;
}

inline bool vec_is_zero(const Vec& a) {
    for (Elt x : a)
        if (x != 0) return false;
    return true;
}

// Row-reduced basis maintained incrementally.  Rows are kept in reduced
// echelon form; `insert` returns true when the row enlarged the span.
class RowSpace {
public:
    explicit RowSpace(Elt p) : p_(p) {}

    bool insert(Vec row) {
        reduce(row);
        std::size_t piv = pivot(row);
        if (piv == row.size()) return false;
        Elt c = inv(row[piv], p_);
        for (auto& x : row) x = mul(x, c, p_);
        for (auto& r : rows_) {
            if (r[piv] != 0) {
                Elt f = r[piv];
                for (std::size_t i = 0; i < r.size(); ++i)
                    r[i] = sub(r[i], mul(f, row[i], p_), p_);
            }
        }
        rows_.push_back(std::move(row));
        return true;
    }

    bool contains(Vec row) const {
        reduce(row);
        return vec_is_zero(row);
    }

    unsigned rank() const { return static_cast<unsigned>(rows_.size()); }
    const std::vector<Vec>& rows() const { return rows_; }

private:
    static std::size_t pivot(const Vec& row) {
        std::size_t i = 0;
        while (i < row.size() && row[i] == 0) ++i;
        return i;
    }

    void reduce(Vec& row) const {
        for (const auto& r : rows_) {
            std::size_t piv = pivot(r);
            if (row[piv] != 0) {
                Elt f = mul(row[piv], inv(r[piv], p_), p_);
                for (std::size_t i = 0; i < row.size(); ++i)
                    row[i] = sub(row[i], mul(f, r[i], p_), p_);
            }
        }
    }

    Elt p_;
    std::vector<Vec> rows_;
};

// Solves sum_j x_j * cols[j] = target over F_p.  Returns the coefficient
// vector, or an empty optional-like flag via the `ok` output.  The columns
// need not be independent; any solution is returned.
inline bool solve(const std::vector<Vec>& cols, const Vec& target, Elt p, Vec& coeffs_out) {
    if (cols.empty()) {
        coeffs_out.clear();
        return vec_is_zero(target);
    }
    std::size_t m = target.size(), n = cols.size();
    // Augmented matrix, rows indexed by ambient coordinate.
    std::vector<Vec> a(m, Vec(n + 1, 0));
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < m; ++i) a[i][j] = cols[j][i];
    for (std::size_t i = 0; i < m; ++i) a[i][n] = target[i];

    std::vector<std::size_t> pivot_col;
    std::size_t row = 0;
    for (std::size_t col = 0; col < n && row < m; ++col) {
        std::size_t sel = row;
        while (sel < m && a[sel][col] == 0) ++sel;
        if (sel == m) continue;
        std::swap(a[sel], a[row]);
        Elt c = inv(a[row][col], p);
        for (auto& x : a[row]) x = mul(x, c, p);
        for (std::size_t r = 0; r < m; ++r) {
            if (r != row && a[r][col] != 0) {
                Elt f = a[r][col];
                for (std::size_t k = col; k <= n; ++k)
                    a[r][k] = sub(a[r][k], mul(f, a[row][k], p), p);
            }
        }
        pivot_col.push_back(col);
        ++row;
    }
    for (std::size_t r = row; r < m; ++r)
        if (a[r][n] != 0) return false;
    coeffs_out.assign(n, 0);
    for (std::size_t r = 0; r < row; ++r) coeffs_out[pivot_col[r]] = a[r][n];
    return true;
}

inline unsigned rank(const std::vector<Vec>& rows, Elt p) {
    RowSpace rs(p);
    for (const auto& r : rows) rs.insert(r);
    return rs.rank();
}

} // namespace ramlift::fp
