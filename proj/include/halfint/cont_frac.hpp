#pragma once

#include <stdexcept>
#include <vector>

#include "halfint/bigint.hpp"

namespace halfint::cf {

/**
 * Continued-fraction utilities shared by the lens-space and knot modules.
 * All expansions here use the subtractive ("negative") convention
 *   p/q = a_1 - 1/(a_2 - 1/(... - 1/a_m)).
 */

// Negative continued fraction of p/q with all entries >= 2.
// Requires 0 < q < p and gcd(p, q) == 1.
inline std::vector<Int> negative_continued_fraction(Int p, Int q) {
    if (q <= 0 || p <= q || gcd_int(p, q) != 1)
        throw std::invalid_argument(
            "negative_continued_fraction: invalid fraction (need 0 < q < p, gcd 1)");
    std::vector<Int> out;
    while (true) {
        Int a = ceil_div(p, q);
        out.push_back(a);
        Int r = a * q - p;
        if (r == 0) break;
        p = q;
        q = r;
    }
    return out;
}

// Continuant K(a_1, ..., a_m) of the subtractive convention: the numerator
// of the fraction the expansion recomposes to.  K() = 1, K(a) = a, and
// K(a_1..a_m) = a_1 * K(a_2..a_m) - K(a_3..a_m).
inline Int continuant(const std::vector<Int>& a) {
    Int hi = 1, lo = 0;  // K of the empty and the "one past empty" tail
    for (auto it = a.rbegin(); it != a.rend(); ++it) {
        Int next = *it * hi - lo;
        lo = hi;
        hi = next;
    }
    return hi;
}

// Tail continuants R_j = K(a_j, ..., a_m) for j = 1..m+2, returned as a
// vector R with R[j] at index j (index 0 unused), R[m+1] = 1, R[m+2] = 0.
inline std::vector<Int> tail_continuants(const std::vector<Int>& a) {
    std::size_t m = a.size();
    std::vector<Int> r(m + 3, 0);
    r[m + 1] = 1;
    for (std::size_t j = m; j >= 1; --j) {
        r[j] = a[j - 1] * r[j + 1] - r[j + 2];
        if (j == 1) break;
    }
    return r;
}

// Leading continuants P_i = K(a_1, ..., a_i) for i = 0..m (P_0 = 1).
inline std::vector<Int> leading_continuants(const std::vector<Int>& a) {
    std::vector<Int> p(a.size() + 1);
    p[0] = 1;
    Int prev = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        Int next = a[i] * p[i] - prev;
        prev = p[i];
        p[i + 1] = next;
    }
    return p;
}

// Even continued fraction of p/q: all entries even and nonzero, possibly
// negative.  Requires p odd, q even, 0 < q < p, gcd(p, q) == 1.  The
// expansion always has even length and recomposes to p/q exactly.
inline std::vector<Int> even_continued_fraction(Int p, Int q) {
    if (q <= 0 || p <= q || gcd_int(p, q) != 1 || p % 2 == 0 || q % 2 != 0)
        throw std::invalid_argument(
            "even_continued_fraction: need p odd, q even, 0 < q < p, gcd 1");
    std::vector<Int> out;
    while (q != 0) {
        // Nearest even integer to p/q; |p| > |q| keeps every entry nonzero,
        // and a tie |r| == |q| would force q | p, impossible at gcd 1.
        Int a = 2 * floor_div(p + q, 2 * q);
        out.push_back(a);
        Int r = a * q - p;
        p = q;
        q = r;
    }
    return out;
}

// Recomposes an expansion to the rational it denotes (empty -> throws).
inline Rat recompose(const std::vector<Int>& a) {
    if (a.empty()) throw std::invalid_argument("recompose: empty expansion");
    Rat value = a.back();
    for (auto it = std::next(a.rbegin()); it != a.rend(); ++it) {
        if (value == 0) throw std::domain_error("recompose: zero tail value");
        value = Rat(*it) - 1 / value;
    }
    return value;
}

}  // namespace halfint::cf
