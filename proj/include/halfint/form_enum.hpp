#pragma once

#include "halfint/gram.hpp"
#include "halfint/lattice_core.hpp"
#include "halfint/matrix.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <vector>

namespace halfint::forms {

// ---------------------------------------------------------------------------
// Enumeration of half-integer forms of prescribed rank, determinant, and
// even-diagonal count, up to integral congruence.
//
// Every half-integer form [[2I, I], [I, X]] is equivalent data to its
// companion A = 2X - I: a positive definite symmetric matrix congruent to
// the identity mod 2 with det A equal to the full determinant.  Fixing the
// square-2 part, two X blocks give congruent forms exactly when their
// companions are related by V^T A V with V congruent to a permutation
// matrix mod 2.  Enumeration therefore proceeds in two stages:
//
//   1. every GL(r, Z)-class of positive definite rank-r forms of the target
//      determinant, via reduced representatives in a finite box;
//   2. inside each class, every solution of W^T M W = I over F_2, lifted to
//      GL(r, Z); the conjugates A = lift(W)^T M lift(W) sweep out every
//      mod-2-permutation orbit of companions in that class.
//
// Stage 2 is exhaustive because a basis change carrying M to any companion
// A reduces mod 2 to one of the collected solutions, and correcting by the
// lift leaves a transform congruent to the identity mod 2.
// ---------------------------------------------------------------------------

namespace detail {

// Box bound for reduced representatives: a Minkowski-reduced form has
// nondecreasing diagonal, |2 M_ij| <= M_ii, and diagonal product at most
// (4/3)^{r(r-1)/2} det.  The comparison is done exactly: prod * 3^e <= 4^e * det.
inline bool diag_product_admissible(const Int& prod, const Int& det, std::size_t r) {
    std::size_t e = r * (r - 1) / 2;
    Int lhs = prod, rhs = det;
    for (std::size_t i = 0; i < e; ++i) {
        lhs *= 3;
        rhs *= 4;
    }
    return lhs <= rhs;
}

// All symmetric positive definite integer matrices with the given sorted
// diagonal, reduced off-diagonal entries, and determinant det.
template <typename Emit>
void fill_off_diagonal(IntMat& m, std::size_t col, std::size_t row, const Int& det, Emit&& emit) {
    std::size_t r = m.rows();
    if (col == r) {
        if (determinant(m) == det) emit(m);
        return;
    }
    if (row == col) {
        // Column complete: positive leading minor, else this branch dies.
        IntMat sub(col + 1, col + 1);
        for (std::size_t i = 0; i <= col; ++i)
            for (std::size_t j = 0; j <= col; ++j) sub(i, j) = m(i, j);
        if (determinant(sub) <= 0) return;
        fill_off_diagonal(m, col + 1, 0, det, emit);
        return;
    }
    Int cap = m(row, row) / 2;  // |2 M_ij| <= M_ii
    for (Int v = -cap; v <= cap; ++v) {
        m(row, col) = v;
        m(col, row) = v;
        fill_off_diagonal(m, col, row + 1, det, emit);
    }
    m(row, col) = 0;
    m(col, row) = 0;
}

template <typename Emit>
void fill_diagonal(IntMat& m, std::size_t k, const Int& prod, const Int& det, Emit&& emit) {
    std::size_t r = m.rows();
    if (k == r) {
        if (prod >= det)  // Hadamard: det <= product of diagonal entries
            fill_off_diagonal(m, 1, 0, det, emit);
        return;
    }
    Int lo = k == 0 ? Int(1) : m(k - 1, k - 1);
    for (Int v = lo;; ++v) {
        // Even filling the remaining slots with v must stay in the box.
        Int min_completion = prod;
        for (std::size_t i = k; i < r; ++i) min_completion *= v;
        if (!diag_product_admissible(min_completion, det, r)) break;
        m(k, k) = v;
        fill_diagonal(m, k + 1, prod * v, det, emit);
    }
}

// All W over F_2 (entries 0/1) with W^T M W = target mod 2; M and target
// symmetric.  Nondegeneracy of the target forces invertibility, so no rank
// bookkeeping is needed along the way.
inline std::vector<IntMat> congruence_solutions_mod2(const IntMat& m, const IntMat& target) {
    std::size_t r = m.rows();
    std::vector<IntMat> out;
    if (r == 0) {
        out.push_back(IntMat(0, 0));
        return out;
    }
    IntMat w(r, r);
    std::vector<IntVec> cols;
    auto pair_mod2 = [&](const IntVec& a, const IntVec& b) {
        Int s = 0;
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < r; ++j) s += a[i] * m(i, j) * b[j];
        return mod_nonneg(s, 2);
    };
    auto rec = [&](auto&& self, std::size_t k) -> void {
        if (k == r) {
            for (std::size_t j = 0; j < r; ++j)
                for (std::size_t i = 0; i < r; ++i) w(i, j) = cols[j][i];
            out.push_back(w);
            return;
        }
        // Candidate columns: all nonzero 0/1 vectors.
        for (unsigned mask = 1; mask < (1u << r); ++mask) {
            IntVec c(r);
            for (std::size_t i = 0; i < r; ++i) c[i] = (mask >> i) & 1u;
            if (pair_mod2(c, c) != mod_nonneg(target(k, k), 2)) continue;
            bool ok = true;
            for (std::size_t i = 0; i < k && ok; ++i)
                ok = pair_mod2(cols[i], c) == mod_nonneg(target(i, k), 2);
            if (!ok) continue;
            cols.push_back(c);
            self(self, k + 1);
            cols.pop_back();
        }
    };
    rec(rec, 0);
    return out;
}

// Right multiplication by a permutation matrix permutes columns and stays
// within one mod-2-permutation orbit, so one representative per sorted
// column multiset suffices.
inline IntMat sorted_columns_key(const IntMat& w) {
    std::size_t r = w.rows();
    std::vector<IntVec> cols;
    for (std::size_t j = 0; j < r; ++j) cols.push_back(w.col(j));
    std::sort(cols.begin(), cols.end());
    IntMat key(r, r);
    for (std::size_t j = 0; j < r; ++j)
        for (std::size_t i = 0; i < r; ++i) key(i, j) = cols[j][i];
    return key;
}

}  // namespace detail

/**
 * All GL(r, Z)-classes of positive definite rank-r integer forms with the
 * given determinant, as canonical representatives in ascending order.
 */
inline std::vector<GramMatrix> enumerate_plain_classes(std::size_t r, const Int& det) {
    std::vector<GramMatrix> out;
    if (det <= 0) return out;
    if (r == 0) {
        if (det == 1) out.push_back(GramMatrix(IntMat(0, 0)));
        return out;
    }
    std::vector<GramMatrix> classes;
    IntMat m(r, r);
    detail::fill_diagonal(m, 0, Int(1), det, [&](const IntMat& cand) {
        GramMatrix g(cand);
        if (!g.positive_definite()) return;
        GramMatrix canon = core::minkowski_reduce(g).gram;
        for (const GramMatrix& seen : classes)
            if (seen == canon) return;
        classes.push_back(canon);
    });
    std::sort(classes.begin(), classes.end());
    return classes;
}

/**
 * One enumerated half-integer form, presented by its block template
 * [[2I, I], [I, X]]; distinct list entries are pairwise incongruent.
 */
struct EnumeratedForm {
    GramMatrix gram;     // rank 2r, the block template of x_block
    GramMatrix x_block;  // rank r, the X block realizing it
    std::size_t n_even = 0;
};

struct FormEnumResult {
    std::vector<EnumeratedForm> forms;  // ascending by canonical Gram
    bool parity_consistent = true;      // det = (-1)^{n_even} mod 4
    std::string diagnostic;             // reason when no form can exist
};

/**
 * Enumerates, up to integral congruence, every positive definite
 * half-integer form of rank 2r with determinant det and exactly n_even
 * even diagonal entries in its X block.  An unsatisfiable parity request
 * yields an empty list with a diagnostic rather than an error.
 */
inline FormEnumResult enumerate_half_integer_forms(std::size_t r, const Int& det,
                                                   std::size_t n_even) {
    FormEnumResult res;
    if (det <= 0) {
        res.parity_consistent = false;
        res.diagnostic = "determinant must be positive";
        return res;
    }
    if (n_even > r) {
        res.parity_consistent = false;
        res.diagnostic = "even-entry count exceeds the rank parameter";
        return res;
    }
    if (mod_nonneg(det, 2) == 0) {
        res.parity_consistent = false;
        res.diagnostic = "half-integer forms have odd determinant";
        return res;
    }
    Int want = n_even % 2 == 0 ? Int(1) : Int(3);
    if (mod_nonneg(det, 4) != want) {
        res.parity_consistent = false;
        res.diagnostic = "determinant is " + halfint::to_string(mod_nonneg(det, 4)) +
                         " mod 4, incompatible with " + std::to_string(n_even) +
                         " even entries";
        return res;
    }
    if (r == 0) {
        if (det == 1) {
            EnumeratedForm f;
            f.gram = GramMatrix(IntMat(0, 0));
            f.x_block = GramMatrix(IntMat(0, 0));
            res.forms.push_back(f);
        }
        return res;
    }

    IntMat identity = IntMat::identity(r);
    std::vector<EnumeratedForm> found;
    for (const GramMatrix& cls : enumerate_plain_classes(r, det)) {
        IntMat mbar(r, r);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < r; ++j) mbar(i, j) = mod_nonneg(cls(i, j), 2);
        std::vector<IntMat> sols = detail::congruence_solutions_mod2(mbar, identity);
        // Quotient by right multiplication with permutations.
        std::vector<IntMat> keys;
        for (const IntMat& w : sols) {
            IntMat key = detail::sorted_columns_key(w);
            bool dup = false;
            for (const IntMat& k : keys)
                if (k == key) { dup = true; break; }
            if (dup) continue;
            keys.push_back(key);

            IntMat lift = core::lift_gl_mod2(w);
            IntMat a = transpose(lift) * cls.mat() * lift;
            std::size_t even = 0;
            for (std::size_t i = 0; i < r; ++i)
                if (mod_nonneg(a(i, i), 4) == 3) ++even;
            if (even != n_even) continue;
            IntMat x(r, r);
            for (std::size_t i = 0; i < r; ++i)
                for (std::size_t j = 0; j < r; ++j)
                    x(i, j) = (a(i, j) + (i == j ? 1 : 0)) / 2;
            GramMatrix xb(x);
            GramMatrix full = core::half_integer_template(xb);
            bool seen = false;
            for (const EnumeratedForm& f : found)
                if (core::congruent(f.gram, full)) { seen = true; break; }
            if (seen) continue;
            EnumeratedForm f;
            f.gram = full;
            f.x_block = xb;
            f.n_even = even;
            found.push_back(f);
        }
    }
    std::sort(found.begin(), found.end(), [](const EnumeratedForm& a, const EnumeratedForm& b) {
        return a.x_block.mat() < b.x_block.mat();
    });
    res.forms = std::move(found);
    return res;
}

/**
 * Determinants a quotient form may carry: d such that det / d is a perfect
 * square, in descending order (the full determinant first).
 */
inline std::vector<Int> admissible_determinants(const Int& det) {
    std::vector<Int> out;
    if (det <= 0) return out;
    for (Int s = 1; s * s <= det; ++s)
        if (det % (s * s) == 0) out.push_back(det / (s * s));
    std::sort(out.begin(), out.end(), [](const Int& a, const Int& b) { return a > b; });
    return out;
}

}  // namespace halfint::forms
