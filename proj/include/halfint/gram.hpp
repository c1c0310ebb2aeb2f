#pragma once

#include "halfint/matrix.hpp"

#include <stdexcept>

namespace halfint {

/**
 * A symmetric integer matrix regarded as the Gram matrix of a bilinear
 * form on Z^n.  Construction validates symmetry; definiteness checks are
 * explicit because several routines legitimately handle indefinite forms
 * (signature computations, for instance).
 */
class GramMatrix {
public:
    GramMatrix() = default;
    explicit GramMatrix(IntMat m) : m_(std::move(m)) {
        if (m_.rows() != m_.cols())
            throw std::invalid_argument("GramMatrix: matrix not square");
        for (std::size_t i = 0; i < m_.rows(); ++i)
            for (std::size_t j = i + 1; j < m_.cols(); ++j)
                if (m_(i, j) != m_(j, i))
                    throw std::invalid_argument("GramMatrix: matrix not symmetric");
    }
    GramMatrix(std::initializer_list<std::initializer_list<Int>> init)
        : GramMatrix(IntMat(init)) {}

    std::size_t rank() const { return m_.rows(); }
    const IntMat& mat() const { return m_; }
    const Int& operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

    bool operator==(const GramMatrix& o) const { return m_ == o.m_; }
    bool operator!=(const GramMatrix& o) const { return m_ != o.m_; }
    bool operator<(const GramMatrix& o) const { return m_ < o.m_; }

    // Q(v, v)
    Int norm(const IntVec& v) const { return bilinear(v, m_, v); }
    // Q(v, w)
    Int pairing(const IntVec& v, const IntVec& w) const { return bilinear(v, m_, w); }

    // Gram matrix of the images of the columns of B, i.e. B^T Q B.
    GramMatrix transformed(const IntMat& b) const {
        return GramMatrix(transpose(b) * m_ * b);
    }

    Int det() const { return determinant(m_); }

    // Sylvester: symmetric and all leading principal minors positive.
    bool positive_definite() const {
        for (const Int& d : leading_principal_minors(m_))
            if (d <= 0) return false;
        return true;
    }

private:
    IntMat m_;
};

// Direct sum Q1 (+) Q2.
inline GramMatrix direct_sum(const GramMatrix& a, const GramMatrix& b) {
    std::size_t n = a.rank(), m = b.rank();
    IntMat out(n + m, n + m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out(i, j) = a(i, j);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) out(n + i, n + j) = b(i, j);
    return GramMatrix(out);
}

// The standard cubic lattice Z^n.
inline GramMatrix standard_lattice(std::size_t n) {
    return GramMatrix(IntMat::identity(n));
}

}  // namespace halfint
