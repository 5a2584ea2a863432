#pragma once

#include <cstdint>
#include <numeric>
#include <ostream>

#include "ramlift/errors.hpp"

namespace ramlift {

// Exact rational arithmetic for the density bookkeeping.  Magnitudes stay
// tiny (reciprocals of group orders), so 64-bit components with overflow
// checks are plenty.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n, std::int64_t d) : num(n), den(d) { normalize(); }
    explicit Rational(std::int64_t n) : num(n), den(1) {}

    void normalize() {
        if (den == 0) throw domain_error("Rational: zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }

    static Rational checked(__int128 n, __int128 d) {
        if (d == 0) throw domain_error("Rational: zero denominator");
        __int128 g = 1;
        {
            __int128 a = n < 0 ? -n : n, b = d < 0 ? -d : d;
            while (b) {
                __int128 t = a % b;
                a = b;
                b = t;
            }
            g = a ? a : 1;
        }
        n /= g;
        d /= g;
        if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX || d < INT64_MIN)
            throw domain_error("Rational: overflow");
        return Rational(static_cast<std::int64_t>(n), static_cast<std::int64_t>(d));
    }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return checked((__int128)a.num * b.den + (__int128)b.num * a.den,
                       (__int128)a.den * b.den);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return checked((__int128)a.num * b.den - (__int128)b.num * a.den,
                       (__int128)a.den * b.den);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return checked((__int128)a.num * b.num, (__int128)a.den * b.den);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num == 0) throw domain_error("Rational: division by zero");
        return checked((__int128)a.num * b.den, (__int128)a.den * b.num);
    }
    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num == b.num && a.den == b.den;
    }
    friend std::ostream& operator<<(std::ostream& os, const Rational& r) {
        os << r.num;
        if (r.den != 1) os << "/" << r.den;
        return os;
    }
};

} // namespace ramlift
