#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace halfint {

// Exact arbitrary-precision integers and rationals.  Every arithmetic
// path in the library runs over these types; no floating point is used
// anywhere in a decision procedure.  Expression templates are disabled so
// that every operation yields a plain value; the proxy objects they return
// otherwise dangle in deduced-return-type contexts.
using Int = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>,
                                          boost::multiprecision::et_off>;
using Rat = boost::multiprecision::number<boost::multiprecision::cpp_rational_backend,
                                          boost::multiprecision::et_off>;

inline Int abs_int(const Int& a) { return a < 0 ? Int(-a) : a; }

// Floor division (rounds toward negative infinity, any sign of b != 0).
inline Int floor_div(const Int& a, const Int& b) {
    if (b == 0) throw std::domain_error("floor_div: division by zero");
    Int q = a / b, r = a % b;
    if (r != 0 && ((r < 0) != (b < 0))) --q;
    return q;
}

// Ceiling division.
inline Int ceil_div(const Int& a, const Int& b) {
    return -floor_div(-a, b);
}

// Nonnegative remainder a mod m for m > 0.
inline Int mod_nonneg(const Int& a, const Int& m) {
    if (m <= 0) throw std::domain_error("mod_nonneg: modulus must be positive");
    Int r = a % m;
    if (r < 0) r += m;
    return r;
}

// gcd(a, b) >= 0.
inline Int gcd_int(Int a, Int b) {
    a = abs_int(a);
    b = abs_int(b);
    while (b != 0) {
        Int t = a % b;
        a = b;
        b = t;
    }
    return a;
}

// Extended gcd: returns g >= 0 with g = x*a + y*b.
struct ExtGcd {
    Int g, x, y;
};

inline ExtGcd ext_gcd(const Int& a, const Int& b) {
    Int old_r = a, r = b;
    Int old_s = 1, s = 0;
    Int old_t = 0, t = 1;
    while (r != 0) {
        Int q = old_r / r;  // truncated is fine: invariants hold over Z
        Int tmp;
        tmp = old_r - q * r; old_r = r; r = tmp;
        tmp = old_s - q * s; old_s = s; s = tmp;
        tmp = old_t - q * t; old_t = t; t = tmp;
    }
    if (old_r < 0) { old_r = -old_r; old_s = -old_s; old_t = -old_t; }
    return {old_r, old_s, old_t};
}

// Inverse of a modulo m (m > 1, gcd(a, m) == 1).
inline Int mod_inverse(const Int& a, const Int& m) {
    ExtGcd e = ext_gcd(mod_nonneg(a, m), m);
    if (e.g != 1) throw std::domain_error("mod_inverse: arguments not coprime");
    return mod_nonneg(e.x, m);
}

// Exact integer square root test: returns true and sets root if n is a
// perfect square (n >= 0).
inline bool perfect_square(const Int& n, Int& root) {
    if (n < 0) return false;
    if (n == 0) { root = 0; return true; }
    root = boost::multiprecision::sqrt(n);
    if (root * root == n) return true;
    if ((root + 1) * (root + 1) == n) { ++root; return true; }
    return false;
}

// True if n is square-free (n > 0).  Trial division: the library only
// calls this on knot determinants, which stay far below 64 bits.
inline bool square_free(const Int& n) {
    if (n <= 0) throw std::domain_error("square_free: argument must be positive");
    Int m = n;
    if (m % 4 == 0) return false;
    while (m % 2 == 0) m /= 2;
    for (Int d = 3; d * d <= m; d += 2) {
        if (m % (d * d) == 0) return false;
        while (m % d == 0) m /= d;
    }
    return true;
}

// Converts to int64 with a range check (used at JSON boundaries).
inline std::int64_t to_i64(const Int& a) {
    if (a > Int(INT64_MAX) || a < Int(INT64_MIN))
        throw std::overflow_error("to_i64: value out of range");
    return static_cast<std::int64_t>(a);
}

inline std::string to_string(const Int& a) { return a.str(); }

// Renders a rational as "a/b" in lowest terms, or "a" when b == 1.
inline std::string rat_string(const Rat& r) {
    Int num = boost::multiprecision::numerator(r);
    Int den = boost::multiprecision::denominator(r);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

}  // namespace halfint
