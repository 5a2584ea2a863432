#pragma once

#include <cstdint>
#include <ostream>

#include "ramlift/errors.hpp"

// Exact scalars in Z/p^N for an odd prime p >= 5.  The working value is kept
// reduced into [0, p^N) in a 64-bit word; products go through 128-bit
// intermediates, so the only size restriction is that p^N itself fits in
// 64 bits (p = 5 allows N <= 27).

namespace ramlift {

// Largest exponent N with p^N representable in an unsigned 64-bit word.
inline unsigned max_level(std::uint64_t p) {
    unsigned n = 0;
    unsigned __int128 m = 1;
    while (m * p <= (unsigned __int128)UINT64_MAX) {
        m *= p;
        ++n;
    }
    return n;
}

inline std::uint64_t pow_u64(std::uint64_t p, unsigned n) {
    std::uint64_t m = 1;
    while (n--) m *= p;
    return m;
}

inline bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

// Rejects (p, N) combinations the fixed-width representation cannot hold.
inline void validate_modulus(std::uint64_t p, unsigned level) {
    if (p < 5 || !is_prime_u64(p))
        throw config_error("modulus: p must be a prime >= 5");
    if (level < 1 || level > max_level(p))
        throw config_error("modulus: level out of range for 64-bit storage");
}

class Residue {
public:
    Residue() : value_(0), p_(5), level_(1) {}

    Residue(std::uint64_t value, std::uint64_t p, unsigned level)
        : p_(p), level_(level) {
        validate_modulus(p, level);
        value_ = value % modulus();
    }

    static Residue from_int(std::int64_t value, std::uint64_t p, unsigned level) {
        validate_modulus(p, level);
        std::uint64_t m = pow_u64(p, level);
        std::int64_t r = value % static_cast<std::int64_t>(m);
        if (r < 0) r += static_cast<std::int64_t>(m);
        return Residue(static_cast<std::uint64_t>(r), p, level);
    }

    static Residue zero(std::uint64_t p, unsigned level) { return Residue(0, p, level); }
    static Residue one(std::uint64_t p, unsigned level) { return Residue(1, p, level); }

    std::uint64_t value() const { return value_; }
    std::uint64_t p() const { return p_; }
    unsigned level() const { return level_; }
    std::uint64_t modulus() const { return pow_u64(p_, level_); }

    bool is_zero() const { return value_ == 0; }
    // Unit in Z/p^N  <=>  nonzero mod p.
    bool is_unit() const { return value_ % p_ != 0; }

    // p-adic valuation, capped at the level for the zero residue.
    unsigned valuation() const {
        if (value_ == 0) return level_;
        unsigned v = 0;
        std::uint64_t x = value_;
        while (x % p_ == 0) {
            x /= p_;
            ++v;
        }
        return v;
    }

    Residue reduced(unsigned new_level) const {
        if (new_level > level_)
            throw domain_error("Residue::reduced: cannot raise precision");
        return Residue(value_ % pow_u64(p_, new_level), p_, new_level);
    }

    friend Residue operator+(const Residue& a, const Residue& b) {
        auto [x, y, p, lvl, m] = align(a, b);
        unsigned __int128 s = (unsigned __int128)x + y;
        return Residue(static_cast<std::uint64_t>(s % m), p, lvl);
    }

    friend Residue operator-(const Residue& a, const Residue& b) {
        auto [x, y, p, lvl, m] = align(a, b);
        return Residue((x + m - y) % m, p, lvl);
    }

    friend Residue operator*(const Residue& a, const Residue& b) {
        auto [x, y, p, lvl, m] = align(a, b);
        unsigned __int128 t = (unsigned __int128)x * y;
        return Residue(static_cast<std::uint64_t>(t % m), p, lvl);
    }

    Residue operator-() const { return Residue((modulus() - value_) % modulus(), p_, level_); }

    Residue pow(std::uint64_t e) const {
        Residue r = one(p_, level_), b = *this;
        while (e) {
            if (e & 1) r = r * b;
            b = b * b;
            e >>= 1;
        }
        return r;
    }

    Residue inverse() const {
        if (!is_unit())
            throw singular_error("Residue::inverse: value is not a unit mod p");
        // Extended Euclid against p^N.
        std::int64_t m = static_cast<std::int64_t>(modulus());
        std::int64_t a = static_cast<std::int64_t>(value_), b = m;
        std::int64_t x0 = 1, x1 = 0;
        while (b) {
            std::int64_t q = a / b;
            std::int64_t t = a - q * b;
            a = b;
            b = t;
            t = x0 - q * x1;
            x0 = x1;
            x1 = t;
        }
        if (x0 < 0) x0 += m;
        return Residue(static_cast<std::uint64_t>(x0), p_, level_);
    }

    friend bool operator==(const Residue& a, const Residue& b) {
        return a.p_ == b.p_ && a.level_ == b.level_ && a.value_ == b.value_;
    }
    friend bool operator!=(const Residue& a, const Residue& b) { return !(a == b); }

    friend std::ostream& operator<<(std::ostream& os, const Residue& r) {
        return os << r.value_ << " (mod " << r.p_ << "^" << r.level_ << ")";
    }

private:
    struct Aligned {
        std::uint64_t x, y, p;
        unsigned level;
        std::uint64_t m;
    };

    // Mixed levels reduce to the smaller one; mixed characteristics are an error.
    static Aligned align(const Residue& a, const Residue& b) {
        if (a.p_ != b.p_)
            throw domain_error("Residue: arithmetic between different primes");
        unsigned lvl = a.level_ < b.level_ ? a.level_ : b.level_;
        std::uint64_t m = pow_u64(a.p_, lvl);
        return {a.value_ % m, b.value_ % m, a.p_, lvl, m};
    }

    std::uint64_t value_;
    std::uint64_t p_;
    unsigned level_;
};

// The unique (p-1)-st root of unity in Z/p^N congruent to a mod p, computed
// as a^(p^(N-1)): raising to the p-th power fixes the class mod p and
// contracts toward the root-of-unity line one digit per step.
inline Residue teichmuller(std::uint64_t a, std::uint64_t p, unsigned level) {
    validate_modulus(p, level);
    if (a < 1 || a > p - 1)
        throw domain_error("teichmuller: representative must lie in [1, p-1]");
    Residue x(a, p, level);
    for (unsigned i = 1; i < level; ++i) x = x.pow(p);
    return x;
}

} // namespace ramlift
