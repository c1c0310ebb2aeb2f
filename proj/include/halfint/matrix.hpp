#pragma once

#include "halfint/bigint.hpp"

#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <utility>
#include <vector>

namespace halfint {

using IntVec = std::vector<Int>;

/**
 * Dense integer matrix, row-major.  Small and exact: this library works
 * with lattices of rank at most a few dozen, so no attempt is made at
 * sparse or blocked storage.
 */
class IntMat {
public:
    IntMat() : rows_(0), cols_(0) {}
    IntMat(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, Int(0)) {}
    IntMat(std::initializer_list<std::initializer_list<Int>> init) {
        rows_ = init.size();
        cols_ = rows_ == 0 ? 0 : init.begin()->size();
        data_.reserve(rows_ * cols_);
        for (const auto& row : init) {
            if (row.size() != cols_)
                throw std::invalid_argument("IntMat: ragged initializer");
            for (const auto& v : row) data_.push_back(v);
        }
    }

    static IntMat identity(std::size_t n) {
        IntMat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Int& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Int& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    bool operator==(const IntMat& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }
    bool operator!=(const IntMat& o) const { return !(*this == o); }

    // Row-major lexicographic order on (rows, cols, entries); used for
    // deterministic sorting of enumeration output.
    bool operator<(const IntMat& o) const {
        if (rows_ != o.rows_) return rows_ < o.rows_;
        if (cols_ != o.cols_) return cols_ < o.cols_;
        return data_ < o.data_;
    }

    IntVec row(std::size_t i) const {
        IntVec r(cols_);
        for (std::size_t j = 0; j < cols_; ++j) r[j] = (*this)(i, j);
        return r;
    }
    IntVec col(std::size_t j) const {
        IntVec c(rows_);
        for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
        return c;
    }

    void swap_rows(std::size_t a, std::size_t b) {
        if (a == b) return;
        for (std::size_t j = 0; j < cols_; ++j)
            std::swap((*this)(a, j), (*this)(b, j));
    }
    void swap_cols(std::size_t a, std::size_t b) {
        if (a == b) return;
        for (std::size_t i = 0; i < rows_; ++i)
            std::swap((*this)(i, a), (*this)(i, b));
    }
    // row a += c * row b
    void add_row(std::size_t a, std::size_t b, const Int& c) {
        for (std::size_t j = 0; j < cols_; ++j)
            (*this)(a, j) += c * (*this)(b, j);
    }
    // col a += c * col b
    void add_col(std::size_t a, std::size_t b, const Int& c) {
        for (std::size_t i = 0; i < rows_; ++i)
            (*this)(i, a) += c * (*this)(i, b);
    }
    void negate_row(std::size_t a) {
        for (std::size_t j = 0; j < cols_; ++j) (*this)(a, j) = -(*this)(a, j);
    }
    void negate_col(std::size_t a) {
        for (std::size_t i = 0; i < rows_; ++i) (*this)(i, a) = -(*this)(i, a);
    }

private:
    std::size_t rows_, cols_;
    std::vector<Int> data_;
};

inline IntMat transpose(const IntMat& m) {
    IntMat t(m.cols(), m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) t(j, i) = m(i, j);
    return t;
}

inline IntMat operator*(const IntMat& a, const IntMat& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("IntMat: shape mismatch in product");
    IntMat c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const Int& aik = a(i, k);
            if (aik == 0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

inline IntVec operator*(const IntMat& a, const IntVec& v) {
    if (a.cols() != v.size()) throw std::invalid_argument("IntMat: shape mismatch in mat*vec");
    IntVec r(a.rows(), Int(0));
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r[i] += a(i, j) * v[j];
    return r;
}

inline Int dot(const IntVec& a, const IntVec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
    Int s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// v^T M w for a matrix of matching shape.
inline Int bilinear(const IntVec& v, const IntMat& m, const IntVec& w) {
    return dot(v, m * w);
}

/**
 * Exact determinant by fraction-free (Bareiss) elimination with row
 * pivoting.  Square matrices only.
 */
inline Int determinant(const IntMat& mat) {
    if (mat.rows() != mat.cols()) throw std::invalid_argument("determinant: matrix not square");
    std::size_t n = mat.rows();
    if (n == 0) return 1;
    IntMat a = mat;
    Int sign = 1, prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a(k, k) == 0) {
            std::size_t p = k + 1;
            while (p < n && a(p, k) == 0) ++p;
            if (p == n) return 0;
            a.swap_rows(k, p);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j)
                a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
        prev = a(k, k);
    }
    return sign * a(n - 1, n - 1);
}

// Leading principal minors d_1..d_n (d_k = det of the top-left k-by-k block).
inline std::vector<Int> leading_principal_minors(const IntMat& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("leading_principal_minors: not square");
    std::vector<Int> out;
    out.reserve(m.rows());
    for (std::size_t k = 1; k <= m.rows(); ++k) {
        IntMat sub(k, k);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) sub(i, j) = m(i, j);
        out.push_back(determinant(sub));
    }
    return out;
}

/**
 * Smith normal form with full transform tracking:
 *   U * A * V = D,  U in GL(rows, Z), V in GL(cols, Z),
 * D diagonal with d_1 | d_2 | ... >= 0.  Inverses of both transforms are
 * maintained alongside, so callers never invert a matrix themselves.
 */
struct SmithForm {
    IntMat d;      // diagonal (rows x cols)
    IntMat u;      // rows x rows
    IntMat u_inv;
    IntMat v;      // cols x cols
    IntMat v_inv;
    std::size_t rank = 0;
};

inline SmithForm smith_normal_form(const IntMat& a0) {
    SmithForm s;
    s.d = a0;
    std::size_t r = a0.rows(), c = a0.cols();
    s.u = IntMat::identity(r);
    s.u_inv = IntMat::identity(r);
    s.v = IntMat::identity(c);
    s.v_inv = IntMat::identity(c);
    IntMat& d = s.d;

    auto row_swap = [&](std::size_t i, std::size_t j) {
        d.swap_rows(i, j); s.u.swap_rows(i, j); s.u_inv.swap_cols(i, j);
    };
    auto col_swap = [&](std::size_t i, std::size_t j) {
        d.swap_cols(i, j); s.v.swap_cols(i, j); s.v_inv.swap_rows(i, j);
    };
    // row i += q * row j  (left multiply): U gains the same op, U^-1 the inverse.
    auto row_add = [&](std::size_t i, std::size_t j, const Int& q) {
        d.add_row(i, j, q); s.u.add_row(i, j, q); s.u_inv.add_col(j, i, -q);
    };
    auto col_add = [&](std::size_t i, std::size_t j, const Int& q) {
        d.add_col(i, j, q); s.v.add_col(i, j, q); s.v_inv.add_row(j, i, -q);
    };
    auto row_negate = [&](std::size_t i) {
        d.negate_row(i); s.u.negate_row(i); s.u_inv.negate_col(i);
    };

    std::size_t n = std::min(r, c);
    for (std::size_t k = 0; k < n; ++k) {
        // Pick the nonzero entry of least absolute value in the trailing
        // block (first in row-major order on ties) as pivot.
        bool found = false;
        std::size_t pi = k, pj = k;
        Int best = 0;
        for (std::size_t i = k; i < r; ++i)
            for (std::size_t j = k; j < c; ++j) {
                if (d(i, j) == 0) continue;
                Int a = abs_int(d(i, j));
                if (!found || a < best) { found = true; best = a; pi = i; pj = j; }
            }
        if (!found) break;
        row_swap(k, pi);
        col_swap(k, pj);
        bool done = false;
        while (!done) {
            done = true;
            for (std::size_t i = k + 1; i < r; ++i) {
                if (d(i, k) == 0) continue;
                Int q = floor_div(d(i, k), d(k, k));
                row_add(i, k, -q);
                if (d(i, k) != 0) { row_swap(k, i); done = false; }
            }
            for (std::size_t j = k + 1; j < c; ++j) {
                if (d(k, j) == 0) continue;
                Int q = floor_div(d(k, j), d(k, k));
                col_add(j, k, -q);
                if (d(k, j) != 0) { col_swap(k, j); done = false; }
            }
        }
        if (d(k, k) < 0) row_negate(k);
        // Divisibility pass: fold in any trailing entry the pivot misses.
        bool restart = true;
        while (restart) {
            restart = false;
            for (std::size_t i = k + 1; i < r && !restart; ++i)
                for (std::size_t j = k + 1; j < c && !restart; ++j)
                    if (d(i, j) % d(k, k) != 0) {
                        row_add(k, i, 1);
                        // Re-clear row k, then the column, and re-check.
                        bool clear = false;
                        while (!clear) {
                            clear = true;
                            for (std::size_t jj = k + 1; jj < c; ++jj) {
                                if (d(k, jj) == 0) continue;
                                Int q = floor_div(d(k, jj), d(k, k));
                                col_add(jj, k, -q);
                                if (d(k, jj) != 0) { col_swap(k, jj); clear = false; }
                            }
                            for (std::size_t ii = k + 1; ii < r; ++ii) {
                                if (d(ii, k) == 0) continue;
                                Int q = floor_div(d(ii, k), d(k, k));
                                row_add(ii, k, -q);
                                if (d(ii, k) != 0) { row_swap(k, ii); clear = false; }
                            }
                        }
                        if (d(k, k) < 0) row_negate(k);
                        restart = true;
                    }
        }
        if (d(k, k) != 0) ++s.rank;
    }
    return s;
}

/**
 * Saturated basis for the integer kernel of A (vectors v with A v = 0),
 * returned as columns.  Uses the Smith form: the kernel is spanned by the
 * columns of V past the rank.
 */
inline IntMat kernel_basis(const IntMat& a) {
    SmithForm s = smith_normal_form(a);
    std::size_t c = a.cols();
    std::size_t k = c - s.rank;
    IntMat out(c, k);
    for (std::size_t j = 0; j < k; ++j)
        for (std::size_t i = 0; i < c; ++i) out(i, j) = s.v(i, s.rank + j);
    return out;
}

// True if the rows of X span a primitive (saturated) sublattice of Z^cols,
// i.e. the Smith form of X is [I | 0].
inline bool rows_primitive(const IntMat& x) {
    SmithForm s = smith_normal_form(x);
    if (s.rank != x.rows()) return false;
    for (std::size_t k = 0; k < x.rows(); ++k)
        if (s.d(k, k) != 1) return false;
    return true;
}

/**
 * Extends linearly independent rows x_1..x_r spanning a primitive
 * sublattice of Z^n to a full basis of Z^n.  Returns an n-by-n unimodular
 * matrix whose first r rows are exactly the rows of X.
 */
inline IntMat complete_to_basis(const IntMat& x) {
    std::size_t r = x.rows(), n = x.cols();
    SmithForm s = smith_normal_form(x);
    if (s.rank != r) throw std::invalid_argument("complete_to_basis: rows not independent");
    for (std::size_t k = 0; k < r; ++k)
        if (s.d(k, k) != 1)
            throw std::invalid_argument("complete_to_basis: sublattice not primitive");
    // U X V = [I | 0]  =>  X = U^-1 [I | 0] V^-1, so the last n-r rows of
    // V^-1 complete the given rows to a basis.
    IntMat out(n, n);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < n; ++j) out(i, j) = x(i, j);
    for (std::size_t i = r; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out(i, j) = s.v_inv(i, j);
    return out;
}

// Inverse of a unimodular integer matrix (throws if det is not +-1).
inline IntMat inverse_unimodular(const IntMat& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("inverse_unimodular: not square");
    SmithForm s = smith_normal_form(m);
    std::size_t n = m.rows();
    if (s.rank != n) throw std::invalid_argument("inverse_unimodular: singular matrix");
    for (std::size_t k = 0; k < n; ++k)
        if (s.d(k, k) != 1) throw std::invalid_argument("inverse_unimodular: determinant not a unit");
    // U M V = I  =>  M^-1 = V U.
    return s.v * s.u;
}

}  // namespace halfint
