#pragma once

#include "halfint/gram.hpp"
#include "halfint/matrix.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

namespace halfint::core {

using RatVec = std::vector<Rat>;
using RatMat = std::vector<std::vector<Rat>>;

// Nearest integer to a rational (ties round up).
inline Int round_rat(const Rat& r) {
    Int num = boost::multiprecision::numerator(r);
    Int den = boost::multiprecision::denominator(r);  // always > 0
    return floor_div(2 * num + den, 2 * den);
}

// ---------------------------------------------------------------------------
// Exact LLL reduction (delta = 3/4) on a positive definite Gram matrix.
// Works entirely in rational arithmetic; returns the reduced Gram together
// with the unimodular change of basis T (columns are the reduced basis in
// the original coordinates), so reduced = T^T G T.
// ---------------------------------------------------------------------------

struct LllResult {
    GramMatrix gram;
    IntMat transform;
};

namespace detail {

struct GramSchmidt {
    RatMat mu;           // mu[i][j], j < i
    std::vector<Rat> b;  // squared lengths of the orthogonalized vectors
};

inline GramSchmidt gram_schmidt(const IntMat& g) {
    std::size_t n = g.rows();
    GramSchmidt gs;
    gs.mu.assign(n, std::vector<Rat>(n, Rat(0)));
    gs.b.assign(n, Rat(0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            Rat s = Rat(g(i, j));
            for (std::size_t k = 0; k < j; ++k) s -= gs.mu[i][k] * gs.mu[j][k] * gs.b[k];
            if (gs.b[j] == 0)
                throw std::domain_error("gram_schmidt: form is degenerate");
            gs.mu[i][j] = s / gs.b[j];
        }
        Rat bi = Rat(g(i, i));
        for (std::size_t k = 0; k < i; ++k) bi -= gs.mu[i][k] * gs.mu[i][k] * gs.b[k];
        if (bi <= 0)
            throw std::domain_error("gram_schmidt: form is not positive definite");
        gs.b[i] = bi;
    }
    return gs;
}

}  // namespace detail

inline LllResult lll_reduce(const GramMatrix& q) {
    std::size_t n = q.rank();
    IntMat g = q.mat();
    IntMat t = IntMat::identity(n);
    if (n <= 1) return {GramMatrix(g), t};

    // Basis change b_a += c * b_b acts on the Gram matrix on both sides and
    // on the transform's columns.
    auto shear = [&](std::size_t a, std::size_t b, const Int& c) {
        g.add_col(a, b, c);
        g.add_row(a, b, c);
        t.add_col(a, b, c);
    };
    auto swap = [&](std::size_t a, std::size_t b) {
        g.swap_cols(a, b);
        g.swap_rows(a, b);
        t.swap_cols(a, b);
    };

    const Rat delta(3, 4);
    std::size_t k = 1;
    detail::GramSchmidt gs = detail::gram_schmidt(g);
    while (k < n) {
        for (std::size_t j = k; j-- > 0;) {
            Int c = round_rat(gs.mu[k][j]);
            if (c != 0) {
                shear(k, j, -c);
                gs = detail::gram_schmidt(g);
            }
        }
        if (gs.b[k] >= (delta - gs.mu[k][k - 1] * gs.mu[k][k - 1]) * gs.b[k - 1]) {
            ++k;
        } else {
            swap(k, k - 1);
            gs = detail::gram_schmidt(g);
            k = (k > 1) ? k - 1 : 1;
        }
    }
    return {GramMatrix(g), t};
}

// ---------------------------------------------------------------------------
// Short vector and closest vector enumeration (Fincke-Pohst over an exact
// rational LDL^T factorization).
// ---------------------------------------------------------------------------

namespace detail {

struct Ldl {
    RatMat l;           // unit lower triangular
    std::vector<Rat> d; // positive diagonal
};

inline Ldl ldl_decompose(const IntMat& g) {
    std::size_t n = g.rows();
    Ldl f;
    f.l.assign(n, std::vector<Rat>(n, Rat(0)));
    f.d.assign(n, Rat(0));
    for (std::size_t j = 0; j < n; ++j) {
        Rat dj = Rat(g(j, j));
        for (std::size_t k = 0; k < j; ++k) dj -= f.l[j][k] * f.l[j][k] * f.d[k];
        if (dj <= 0) throw std::domain_error("ldl: form is not positive definite");
        f.d[j] = dj;
        f.l[j][j] = 1;
        for (std::size_t i = j + 1; i < n; ++i) {
            Rat s = Rat(g(i, j));
            for (std::size_t k = 0; k < j; ++k) s -= f.l[i][k] * f.l[j][k] * f.d[k];
            f.l[i][j] = s / dj;
        }
    }
    return f;
}

// Enumerates every integer point v with (v + t)^T G (v + t) <= bound where
// G = L D L^T, calling emit(v, value).  The quadratic form splits as
// sum_i d_i s_i^2 with s_i = (v_i + t_i) + sum_{j > i} L_ji (v_j + t_j);
// levels are processed from i = n-1 down to 0, walking each coordinate
// outward from its real center so no square roots are needed.  The bound
// is re-read on every step, so emit may shrink it to prune the search.
template <typename Emit>
void enumerate_ellipsoid(const Ldl& f, const RatVec& t, Rat& bound, Emit&& emit) {
    std::size_t n = f.d.size();
    if (n == 0) return;
    std::vector<Int> v(n, Int(0));
    // partial[i] = sum_{k > i} d_k s_k^2, shift[i] = sum_{j > i} L_ji (v_j + t_j).
    std::vector<Rat> partial(n + 1, Rat(0));
    RatVec shifts(n, Rat(0));

    auto shift_for = [&](std::size_t i) {
        Rat s(0);
        for (std::size_t j = i + 1; j < n; ++j) s += f.l[j][i] * (Rat(v[j]) + t[j]);
        return s;
    };

    auto rec = [&](auto&& self, std::size_t level) -> void {
        std::size_t i = level - 1;
        if (bound - partial[level] < 0) return;
        shifts[i] = shift_for(i);
        Rat center = -(t[i] + shifts[i]);
        auto value_at = [&](const Int& x) -> Rat {
            Rat s = Rat(x) - center;
            return f.d[i] * s * s;
        };
        auto descend = [&](const Int& x) {
            v[i] = x;
            partial[i] = partial[level] + value_at(x);
            if (i == 0) {
                emit(v, partial[0]);
            } else {
                self(self, i);
            }
        };
        Int start = round_rat(center);
        for (Int x = start; value_at(x) <= bound - partial[level]; ++x) descend(x);
        for (Int x = start - 1; value_at(x) <= bound - partial[level]; --x) descend(x);
        v[i] = 0;
    };
    rec(rec, n);
}

}  // namespace detail

/**
 * All nonzero vectors v (in the original coordinates of q) with
 * v^T Q v <= bound, both signs included, sorted by (norm, coordinates).
 */
inline std::vector<IntVec> short_vectors(const GramMatrix& q, const Int& bound) {
    std::size_t n = q.rank();
    std::vector<IntVec> out;
    if (n == 0 || bound <= 0) return out;
    LllResult red = lll_reduce(q);
    detail::Ldl f = detail::ldl_decompose(red.gram.mat());
    RatVec t(n, Rat(0));
    Rat radius(bound);
    std::vector<std::pair<Int, IntVec>> found;
    detail::enumerate_ellipsoid(f, t, radius, [&](const std::vector<Int>& v, const Rat& val) {
        bool zero = true;
        for (const Int& x : v)
            if (x != 0) { zero = false; break; }
        if (zero) return;
        IntVec orig = red.transform * v;
        Int norm = boost::multiprecision::numerator(val);  // integral by construction
        found.emplace_back(norm, std::move(orig));
    });
    std::sort(found.begin(), found.end());
    out.reserve(found.size());
    for (auto& p : found) out.push_back(std::move(p.second));
    return out;
}

/**
 * Exact minimum of (v + t)^T Q (v + t) over integer vectors v, for a
 * rational target t.  Branch-and-bound: the first probe is the rounded
 * center, after which the bound shrinks as better leaves appear.
 */
inline Rat cvp_min(const GramMatrix& q, const RatVec& target) {
    std::size_t n = q.rank();
    if (target.size() != n) throw std::invalid_argument("cvp_min: target length mismatch");
    if (n == 0) return Rat(0);
    LllResult red = lll_reduce(q);
    // v = T v' shifts the target into reduced coordinates: t' = T^-1 t.
    IntMat tinv = inverse_unimodular(red.transform);
    RatVec t(n, Rat(0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) t[i] += Rat(tinv(i, j)) * target[j];

    detail::Ldl f = detail::ldl_decompose(red.gram.mat());

    // Initial upper bound: greedy rounding from the last coordinate down.
    std::vector<Int> v0(n, Int(0));
    for (std::size_t i = n; i-- > 0;) {
        Rat s(0);
        for (std::size_t j = i + 1; j < n; ++j) s += f.l[j][i] * (Rat(v0[j]) + t[j]);
        v0[i] = round_rat(-(t[i] + s));
    }
    Rat best(0);
    {
        RatVec y(n);
        for (std::size_t i = 0; i < n; ++i) y[i] = Rat(v0[i]) + t[i];
        for (std::size_t i = 0; i < n; ++i) {
            Rat s = y[i];
            for (std::size_t j = i + 1; j < n; ++j) s += f.l[j][i] * y[j];
            best += f.d[i] * s * s;
        }
    }
    if (best == 0) return best;
    // Enumerate within the current best radius, shrinking it on improvement.
    Rat radius = best;
    detail::enumerate_ellipsoid(f, t, radius, [&](const std::vector<Int>&, const Rat& val) {
        if (val < best) { best = val; radius = val; }
    });
    return best;
}

// Minimum of u^T Q u over the coset u = w + 2 Z^n.
inline Int coset_min_norm(const GramMatrix& q, const IntVec& w) {
    std::size_t n = q.rank();
    if (w.size() != n) throw std::invalid_argument("coset_min_norm: length mismatch");
    RatVec t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = Rat(w[i], 2);
    Rat m = 4 * cvp_min(q, t);
    if (boost::multiprecision::denominator(m) != 1)
        throw std::logic_error("coset_min_norm: non-integral minimum");
    return boost::multiprecision::numerator(m);
}

// Solves Q x = rhs exactly over the rationals (Q nonsingular).
inline RatVec solve_rational(const IntMat& q, const IntVec& rhs) {
    std::size_t n = q.rows();
    if (q.cols() != n || rhs.size() != n)
        throw std::invalid_argument("solve_rational: shape mismatch");
    RatMat a(n, std::vector<Rat>(n + 1));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) a[i][j] = Rat(q(i, j));
        a[i][n] = Rat(rhs[i]);
    }
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        while (p < n && a[p][k] == 0) ++p;
        if (p == n) throw std::domain_error("solve_rational: singular matrix");
        std::swap(a[k], a[p]);
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k || a[i][k] == 0) continue;
            Rat c = a[i][k] / a[k][k];
            for (std::size_t j = k; j <= n; ++j) a[i][j] -= c * a[k][j];
        }
    }
    RatVec x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = a[i][n] / a[i][i];
    return x;
}

// ---------------------------------------------------------------------------
// Canonical form of a positive definite lattice.
//
// The canonical basis is chosen greedily one vector at a time: at each level
// the next vector minimizes the key (norm, pairings with the chain so far),
// pairings compared entrywise under (|x|, sign) with positive preferred,
// over all chains that complete to a basis of the lattice.  Dead ends are
// handled by backtracking to the next larger key, so the greedy choice is
// exact.  Every quantity entering the key is a congruence invariant, and all
// chains realizing the minimal key prefix are carried forward together, so
// congruent forms produce equal canonical Gram matrices and inequivalent
// forms cannot.
// ---------------------------------------------------------------------------

struct CanonicalForm {
    GramMatrix gram;
    IntMat transform;  // columns give the canonical basis; gram = T^T Q T
};

namespace detail {

struct VecPool {
    const GramMatrix* g = nullptr;
    Int bound = 0;
    // norm -> vectors of exactly that norm (both signs), sorted.
    std::map<Int, std::vector<IntVec>> by_norm;

    void ensure(const Int& b) {
        if (b <= bound && bound > 0) return;
        Int nb = bound > 0 ? bound : Int(0);
        while (nb < b) nb = nb * 2 + 4;
        by_norm.clear();
        for (const IntVec& v : short_vectors(*g, nb)) by_norm[g->norm(v)].push_back(v);
        bound = nb;
    }
};

// Key order on Gram entries: smaller absolute value first, then positive
// before negative.  Makes the canonical form prefer +1 to -1 pairings.
inline int entry_cmp(const Int& a, const Int& b) {
    Int aa = abs_int(a), ab = abs_int(b);
    if (aa != ab) return aa < ab ? -1 : 1;
    bool na = a < 0, nb = b < 0;
    if (na != nb) return na ? 1 : -1;
    return 0;
}

// Extension key: norm first, then the pairing column entrywise.
inline int key_cmp(const Int& na, const std::vector<Int>& ca, const Int& nb,
                   const std::vector<Int>& cb) {
    if (na != nb) return na < nb ? -1 : 1;
    for (std::size_t i = 0; i < ca.size(); ++i) {
        int c = entry_cmp(ca[i], cb[i]);
        if (c != 0) return c;
    }
    return 0;
}

// Whether the rows extend to a basis of Z^n: column-style euclidean
// elimination to a triangular corner, all pivots +-1.  Cheap early-exit
// variant of the Smith form test for hot loops.
inline bool chain_primitive(const std::vector<const IntVec*>& rows, std::size_t n) {
    std::size_t k = rows.size();
    if (k == 0) return true;
    std::vector<std::vector<Int>> m(k, std::vector<Int>(n));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < n; ++j) m[i][j] = (*rows[i])[j];
    std::size_t cols = n;
    for (std::size_t i = 0; i < k; ++i) {
        // Reduce row i's entries in columns i..cols-1 to a single nonzero.
        for (;;) {
            std::size_t piv = cols;
            for (std::size_t j = i; j < cols; ++j)
                if (m[i][j] != 0 && (piv == cols || abs_int(m[i][j]) < abs_int(m[i][piv])))
                    piv = j;
            if (piv == cols) return false;  // dependent rows
            bool clean = true;
            for (std::size_t j = i; j < cols; ++j) {
                if (j == piv || m[i][j] == 0) continue;
                Int q = m[i][j] / m[i][piv];  // truncation is fine here
                if (q != 0)
                    for (std::size_t t = i; t < k; ++t) m[t][j] -= q * m[t][piv];
                if (m[i][j] != 0) clean = false;
            }
            if (clean) {
                if (piv != i)
                    for (std::size_t t = 0; t < k; ++t) std::swap(m[t][i], m[t][piv]);
                break;
            }
        }
        if (abs_int(m[i][i]) != 1) return false;
        // Clear column i below pivot row i (exact multiples now).
        for (std::size_t t = i + 1; t < k; ++t) {
            if (m[t][i] == 0) continue;
            Int q = m[t][i] / m[i][i];
            for (std::size_t j = i; j < n; ++j) m[t][j] -= q * m[i][j];
        }
    }
    return true;
}

// Greedy canonical basis search.  Chains live in a persistent arena; a state
// is the set of chains realizing the minimal key sequence chosen so far.
struct CanonSearch {
    const GramMatrix* g = nullptr;
    std::size_t n = 0;
    VecPool* pool = nullptr;

    struct Node {
        int parent;
        IntVec v;
    };
    std::vector<Node> arena;

    std::vector<const IntVec*> chain_rows(int id) const {
        std::vector<const IntVec*> rows;
        for (int c = id; c >= 0; c = arena[static_cast<std::size_t>(c)].parent)
            rows.push_back(&arena[static_cast<std::size_t>(c)].v);
        std::reverse(rows.begin(), rows.end());
        return rows;
    }

    // Per-vector content: a vector whose entries share a factor never sits
    // inside any basis, so it is skipped before keying.
    static bool content_one(const IntVec& v) {
        Int gcd = 0;
        for (const Int& x : v) gcd = gcd_int(gcd, x);
        return gcd == 1;
    }

    bool search(const std::vector<int>& state, std::size_t k, int& out) {
        // A state with no chain that extends to a basis is dead.
        std::size_t alive = state.size();
        for (std::size_t i = 0; i < state.size(); ++i) {
            if (chain_primitive(chain_rows(state[i]), n)) {
                alive = i;
                break;
            }
        }
        if (alive == state.size()) return false;
        if (k == n) {
            out = state[alive];
            return true;
        }

        // Any completion of the first live chain bounds the next norm.
        Int norm_cap = 1;
        if (k == 0) {
            for (std::size_t i = 0; i < n; ++i) norm_cap = std::max(norm_cap, (*g)(i, i));
        } else {
            std::vector<const IntVec*> rows = chain_rows(state[alive]);
            IntMat rm(k, n);
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = 0; j < n; ++j) rm(i, j) = (*rows[i])[j];
            IntMat completion = complete_to_basis(rm);
            for (std::size_t i = k; i < n; ++i) {
                IntVec w = completion.row(i);
                norm_cap = std::max(norm_cap, g->norm(w));
            }
        }
        pool->ensure(norm_cap);

        std::vector<std::vector<const IntVec*>> state_rows;
        state_rows.reserve(state.size());
        for (int id : state) state_rows.push_back(chain_rows(id));

        // Ascend through candidate keys; almost always the first succeeds.
        Int prev_norm = -1;
        std::vector<Int> prev_col;
        for (;;) {
            bool have_min = false;
            Int min_norm = 0;
            std::vector<Int> min_col;
            std::vector<Int> col(k);
            for (const auto& [norm, vecs] : pool->by_norm) {
                if (norm > norm_cap) break;
                if (have_min && min_norm < norm) break;
                if (prev_norm >= 0 && norm < prev_norm) continue;
                for (const auto& rs : state_rows) {
                    for (const IntVec& v : vecs) {
                        if (!content_one(v)) continue;
                        // Lazy entrywise comparison against the incumbent
                        // minimum and the last failed key.
                        int vs_prev = prev_norm < 0 ? 1 : (norm > prev_norm ? 1 : 0);
                        int vs_min = have_min ? (norm < min_norm ? -1 : 0) : -1;
                        bool viable = true;
                        for (std::size_t i = 0; i < k; ++i) {
                            col[i] = g->pairing(*rs[i], v);
                            if (vs_prev == 0) {
                                int c = entry_cmp(col[i], prev_col[i]);
                                if (c < 0) { viable = false; break; }
                                if (c > 0) vs_prev = 1;
                            }
                            if (vs_min == 0) {
                                int c = entry_cmp(col[i], min_col[i]);
                                if (c > 0) { vs_min = 1; break; }
                                if (c < 0) vs_min = -1;
                            }
                        }
                        if (!viable || vs_prev == 0 || vs_min > 0) continue;
                        if (vs_min < 0 || !have_min) {
                            have_min = true;
                            min_norm = norm;
                            min_col = col;
                        }
                    }
                }
            }
            if (!have_min) return false;

            // Collect every extension realizing the minimal key.  Matches are
            // gathered by value first: growing the arena invalidates the row
            // pointers in state_rows.
            std::vector<std::pair<int, IntVec>> matches;
            const auto& vecs = pool->by_norm.at(min_norm);
            for (std::size_t s = 0; s < state.size(); ++s) {
                for (const IntVec& v : vecs) {
                    if (!content_one(v)) continue;
                    bool eq = true;
                    for (std::size_t i = 0; i < k && eq; ++i)
                        eq = g->pairing(*state_rows[s][i], v) == min_col[i];
                    if (eq) matches.emplace_back(state[s], v);
                }
            }
            std::vector<int> next;
            next.reserve(matches.size());
            for (auto& [id, v] : matches) {
                arena.push_back({id, std::move(v)});
                next.push_back(static_cast<int>(arena.size()) - 1);
            }
            if (search(next, k + 1, out)) return true;
            // The arena only grows, so stale nodes are harmless; rebuild the
            // row pointers in case a deeper call reallocated the arena.
            state_rows.clear();
            for (int id : state) state_rows.push_back(chain_rows(id));
            prev_norm = min_norm;
            prev_col = min_col;
        }
    }
};

}  // namespace detail

inline CanonicalForm minkowski_reduce(const GramMatrix& q0) {
    std::size_t n = q0.rank();
    if (n == 0) return {GramMatrix(IntMat(0, 0)), IntMat(0, 0)};
    if (!q0.positive_definite())
        throw std::domain_error("minkowski_reduce: form is not positive definite");

    // Work on the LLL-reduced form: its diagonal gives small, honest seeds
    // for the vector pools no matter how skewed the input basis was.
    LllResult pre = lll_reduce(q0);
    const GramMatrix& q = pre.gram;

    detail::VecPool pool;
    pool.g = &q;
    detail::CanonSearch search;
    search.g = &q;
    search.n = n;
    search.pool = &pool;

    int out = -1;
    std::vector<int> root{-1};
    if (!search.search(root, 0, out))
        throw std::logic_error("minkowski_reduce: no canonical basis found");

    std::vector<const IntVec*> rows = search.chain_rows(out);
    IntMat t(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) t(i, j) = (*rows[j])[i];
    GramMatrix canon = q.transformed(t);
    return {canon, pre.transform * t};
}

/**
 * Finds an integral congruence carrying form a onto form b, if one exists.
 * Backtracking over images of an LLL basis of a among short vectors of b;
 * the first complete match wins, so highly symmetric forms stay cheap.
 */
inline std::optional<IntMat> find_isometry(const GramMatrix& a, const GramMatrix& b) {
    std::size_t n = a.rank();
    if (n != b.rank()) return std::nullopt;
    if (n == 0) return IntMat(0, 0);
    if (a.det() != b.det()) return std::nullopt;
    if (!a.positive_definite() || !b.positive_definite())
        throw std::domain_error("find_isometry: forms must be positive definite");

    LllResult ra = lll_reduce(a);
    Int max_norm = 0;
    for (std::size_t i = 0; i < n; ++i) max_norm = std::max(max_norm, ra.gram(i, i));

    // Norm histograms of short vectors are congruence invariants; comparing
    // them rejects most inequivalent pairs before any search.
    std::map<Int, std::vector<IntVec>> pool;
    for (const IntVec& v : short_vectors(b, max_norm)) pool[b.norm(v)].push_back(v);
    std::map<Int, std::size_t> hist_a;
    for (const IntVec& v : short_vectors(a, max_norm)) ++hist_a[a.norm(v)];
    std::map<Int, std::size_t> hist_b;
    for (const auto& [nm, vecs] : pool) hist_b[nm] = vecs.size();
    if (hist_a != hist_b) return std::nullopt;

    std::vector<IntVec> image;
    auto rec = [&](auto&& self, std::size_t k) -> bool {
        if (k == n) return true;
        auto it = pool.find(ra.gram(k, k));
        if (it == pool.end()) return false;
        for (const IntVec& w : it->second) {
            bool ok = true;
            for (std::size_t j = 0; j < k && ok; ++j)
                ok = b.pairing(image[j], w) == ra.gram(j, k);
            if (!ok) continue;
            image.push_back(w);
            if (self(self, k + 1)) return true;
            image.pop_back();
        }
        return false;
    };
    if (!rec(rec, 0)) return std::nullopt;

    // Columns of W are the images of the reduced basis: W^T B W = reduced A,
    // and equal determinants force W unimodular.  Undo the reduction.
    IntMat w(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) w(i, j) = image[j][i];
    IntMat t = w * inverse_unimodular(ra.transform);
    return t;  // t^T B t = A
}

// Integral congruence test.
inline bool congruent(const GramMatrix& a, const GramMatrix& b) {
    return find_isometry(a, b).has_value();
}

// ---------------------------------------------------------------------------
// Half-integer bases.
//
// A rank-2r positive definite lattice has half-integer type when it admits
// a basis x_1..x_r, y_1..y_r with pairings x_i.x_j = 2 delta_ij,
// x_i.y_j = delta_ij, giving the block Gram [[2I, I], [I, X]].  The numbers
// m_i = X_ii drive everything downstream; n_even counts the even ones.
// ---------------------------------------------------------------------------

struct HalfIntBasis {
    IntMat x;  // r x 2r, rows are the square-2 vectors
    IntMat y;  // r x 2r, rows are the dual half vectors
};

// Builds [[2I, I], [I, X]] from the symmetric block X.
inline GramMatrix half_integer_template(const GramMatrix& x_block) {
    std::size_t r = x_block.rank();
    IntMat g(2 * r, 2 * r);
    for (std::size_t i = 0; i < r; ++i) {
        g(i, i) = 2;
        g(i, r + i) = 1;
        g(r + i, i) = 1;
        for (std::size_t j = 0; j < r; ++j) g(r + i, r + j) = x_block(i, j);
    }
    return GramMatrix(g);
}

inline bool is_half_integer_gram(const GramMatrix& q) {
    std::size_t n = q.rank();
    if (n % 2 != 0) return false;
    std::size_t r = n / 2;
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) {
            if (q(i, j) != (i == j ? 2 : 0)) return false;
            if (q(i, r + j) != (i == j ? 1 : 0)) return false;
        }
    return true;
}

// The symmetric companion A = 2X - I of the X block; its determinant equals
// det of the full form, it is congruent to I mod 2, and A_ii mod 4 encodes
// the parity of m_i (3 mod 4 exactly when m_i is even).
inline IntMat a_matrix(const GramMatrix& x_block) {
    std::size_t r = x_block.rank();
    IntMat a(r, r);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) a(i, j) = 2 * x_block(i, j) - (i == j ? 1 : 0);
    return a;
}

// X block of a half-integer basis inside the lattice (Q, coordinates).
inline GramMatrix x_block_of(const GramMatrix& q, const HalfIntBasis& b) {
    std::size_t r = b.y.rows();
    IntMat x(r, r);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) x(i, j) = q.pairing(b.y.row(i), b.y.row(j));
    return GramMatrix(x);
}

inline std::vector<Int> m_values(const GramMatrix& q, const HalfIntBasis& b) {
    GramMatrix x = x_block_of(q, b);
    std::vector<Int> m(x.rank());
    for (std::size_t i = 0; i < x.rank(); ++i) m[i] = x(i, i);
    return m;
}

inline std::size_t n_even_count(const GramMatrix& q, const HalfIntBasis& b) {
    std::size_t c = 0;
    for (const Int& m : m_values(q, b))
        if (m % 2 == 0) ++c;
    return c;
}

// Validates that (x, y) really is a half-integer basis of Q.
inline bool valid_half_integer_basis(const GramMatrix& q, const HalfIntBasis& b) {
    std::size_t r = b.x.rows();
    if (b.y.rows() != r || q.rank() != 2 * r) return false;
    if (b.x.cols() != q.rank() || b.y.cols() != q.rank()) return false;
    IntMat full(2 * r, 2 * r);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < 2 * r; ++j) {
            full(i, j) = b.x(i, j);
            full(r + i, j) = b.y(i, j);
        }
    Int d = determinant(full);
    if (d != 1 && d != -1) return false;
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) {
            if (q.pairing(b.x.row(i), b.x.row(j)) != (i == j ? 2 : 0)) return false;
            if (q.pairing(b.x.row(i), b.y.row(j)) != (i == j ? 1 : 0)) return false;
        }
    return true;
}

// ---------------------------------------------------------------------------
// GL(r, F_2) lifting and half-integer basis detection / promotion.
// ---------------------------------------------------------------------------

/**
 * Lifts a matrix invertible over F_2 to a unimodular integer matrix
 * congruent to it mod 2.  The input is reduced mod 2, factored into
 * elementary operations over F_2, and the factorization is replayed over Z.
 */
inline IntMat lift_gl_mod2(const IntMat& mbar) {
    std::size_t r = mbar.rows();
    if (mbar.cols() != r) throw std::invalid_argument("lift_gl_mod2: not square");
    // Reduce a working copy to the identity over F_2, recording the row
    // operations; applying the same operations in reverse to I over Z
    // reconstructs an integral lift.
    IntMat w(r, r);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) w(i, j) = mod_nonneg(mbar(i, j), 2);
    struct Op { bool is_swap; std::size_t a, b; };
    std::vector<Op> ops;
    for (std::size_t k = 0; k < r; ++k) {
        std::size_t p = k;
        while (p < r && w(p, k) == 0) ++p;
        if (p == r) throw std::invalid_argument("lift_gl_mod2: matrix singular mod 2");
        if (p != k) { w.swap_rows(k, p); ops.push_back({true, k, p}); }
        for (std::size_t i = 0; i < r; ++i) {
            if (i == k || w(i, k) == 0) continue;
            // row i += row k (mod 2)
            for (std::size_t j = 0; j < r; ++j) w(i, j) = (w(i, j) + w(k, j)) % 2;
            ops.push_back({false, i, k});
        }
    }
    // w is now I, and (ops in order) * mbar = I over F_2, so the lift is
    // the inverse of the recorded product: apply inverses right-to-left.
    IntMat lift = IntMat::identity(r);
    for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
        if (it->is_swap)
            lift.swap_rows(it->a, it->b);
        else
            lift.add_row(it->a, it->b, Int(-1));  // inverse of "add" over Z
    }
    // The inverse op "subtract" reduces to "add" mod 2, so lift == mbar
    // mod 2 and det(lift) = +-1 by construction.
    return lift;
}

// Inverse over F_2 (entries 0/1).
inline IntMat inverse_mod2(const IntMat& mbar) {
    std::size_t r = mbar.rows();
    IntMat w(r, 2 * r);
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < r; ++j) w(i, j) = mod_nonneg(mbar(i, j), 2);
        w(i, r + i) = 1;
    }
    for (std::size_t k = 0; k < r; ++k) {
        std::size_t p = k;
        while (p < r && w(p, k) == 0) ++p;
        if (p == r) throw std::invalid_argument("inverse_mod2: matrix singular mod 2");
        w.swap_rows(k, p);
        for (std::size_t i = 0; i < r; ++i) {
            if (i == k || w(i, k) == 0) continue;
            for (std::size_t j = 0; j < 2 * r; ++j) w(i, j) = (w(i, j) + w(k, j)) % 2;
        }
    }
    IntMat inv(r, r);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) inv(i, j) = w(i, r + j);
    return inv;
}

namespace detail {

// Given the square-2 rows X (primitive, pairwise orthogonal, norm 2),
// tries to complete them to a half-integer basis of Q.  Succeeds exactly
// when the pairing block of any basis completion has odd determinant.
inline std::optional<HalfIntBasis> complete_x_set(const GramMatrix& q, const IntMat& x) {
    std::size_t r = x.rows(), n = q.rank();
    IntMat basis = complete_to_basis(x);  // rows: x_1..x_r, w_1..w_{n-r}
    // Pairing block a_ij = x_i . w_j.
    IntMat a(r, n - r);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < n - r; ++j)
            a(i, j) = q.pairing(x.row(i), basis.row(r + j));
    if (n - r != r) return std::nullopt;
    Int da = determinant(a);
    if (mod_nonneg(da, 2) == 0) return std::nullopt;
    // Choose d = lift of a^-1 mod 2, c = (I - a d) / 2; then
    // y_j = sum_i c_ij x_i + sum_i d_ij w_i has x_i . y_j = delta exactly.
    IntMat d = lift_gl_mod2(inverse_mod2(a));
    IntMat ad = a * d;
    IntMat c(r, r);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) {
            Int num = (i == j ? Int(1) : Int(0)) - ad(i, j);
            if (mod_nonneg(num, 2) != 0)
                throw std::logic_error("complete_x_set: parity correction failed");
            c(i, j) = num / 2;
        }
    HalfIntBasis out;
    out.x = x;
    out.y = IntMat(r, n);
    for (std::size_t j = 0; j < r; ++j)
        for (std::size_t col = 0; col < n; ++col) {
            Int s = 0;
            for (std::size_t i = 0; i < r; ++i)
                s += c(i, j) * basis(i, col) + d(i, j) * basis(r + i, col);
            out.y(j, col) = s;
        }
    return out;
}

template <typename Accept>
bool search_x_sets(const GramMatrix& q, Accept&& accept) {
    std::size_t n = q.rank();
    if (n % 2 != 0) return false;
    std::size_t r = n / 2;
    if (r == 0) {
        HalfIntBasis empty;
        empty.x = IntMat(0, 0);
        empty.y = IntMat(0, 0);
        return accept(empty);
    }
    // One representative per +-pair: first nonzero coordinate positive.
    std::vector<IntVec> sq2;
    for (const IntVec& v : short_vectors(q, 2)) {
        if (q.norm(v) != 2) continue;
        bool pos = false;
        for (const Int& c : v) {
            if (c != 0) { pos = c > 0; break; }
        }
        if (pos) sq2.push_back(v);
    }
    if (sq2.size() < r) return false;
    std::vector<std::size_t> pick;
    auto rec = [&](auto&& self, std::size_t from) -> bool {
        if (pick.size() == r) {
            IntMat x(r, n);
            for (std::size_t i = 0; i < r; ++i)
                for (std::size_t j = 0; j < n; ++j) x(i, j) = sq2[pick[i]][j];
            if (!rows_primitive(x)) return false;
            auto basis = complete_x_set(q, x);
            if (!basis) return false;
            return accept(*basis);
        }
        for (std::size_t i = from; i < sq2.size(); ++i) {
            bool orth = true;
            for (std::size_t p : pick)
                if (q.pairing(sq2[p], sq2[i]) != 0) { orth = false; break; }
            if (!orth) continue;
            pick.push_back(i);
            if (self(self, i + 1)) return true;
            pick.pop_back();
        }
        return false;
    };
    return rec(rec, 0);
}

}  // namespace detail

/**
 * Decides whether Q admits a half-integer basis, returning one if so.
 * Searches over all sets of r pairwise orthogonal square-2 vectors; a set
 * completes to such a basis iff it is primitive and the pairing block of a
 * basis completion is odd, which does not depend on the completion chosen.
 */
inline std::optional<HalfIntBasis> detect_half_integer_type(const GramMatrix& q) {
    std::optional<HalfIntBasis> found;
    detail::search_x_sets(q, [&](const HalfIntBasis& b) {
        found = b;
        return true;
    });
    return found;
}

// Variant fixing the number of even m_i (an invariant of the square-2 set
// used, though different sets in one lattice may realize different counts).
inline std::optional<HalfIntBasis> detect_half_integer_type_with_parity(const GramMatrix& q,
                                                                        std::size_t n_even) {
    std::optional<HalfIntBasis> found;
    detail::search_x_sets(q, [&](const HalfIntBasis& b) {
        if (n_even_count(q, b) != n_even) return false;
        found = b;
        return true;
    });
    return found;
}

/**
 * Pairing normalization.  Input: a basis of Q given as rows (x_1..x_r,
 * z_1..z_r) whose Gram matrix is congruent mod 2 to the half-integer
 * template, with the x block exactly 2I (orthogonal square-2 vectors).
 * Output: the half-integer basis (x, y) obtained by correcting the z part,
 * with the full X block preserved mod 2 entry by entry.
 */
inline HalfIntBasis normalize_mod2_block(const GramMatrix& q, const IntMat& basis_rows) {
    std::size_t n = q.rank();
    if (basis_rows.rows() != n || basis_rows.cols() != n || n % 2 != 0)
        throw std::invalid_argument("normalize_mod2_block: bad basis shape");
    std::size_t r = n / 2;
    IntMat x(r, n), z(r, n);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            x(i, j) = basis_rows(i, j);
            z(i, j) = basis_rows(r + i, j);
        }
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j)
            if (q.pairing(x.row(i), x.row(j)) != (i == j ? 2 : 0))
                throw std::invalid_argument("normalize_mod2_block: x block is not 2I");
    // a_ij = x_i . z_j must be congruent to the identity mod 2.
    IntMat a(r, r), t(r, r);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) {
            a(i, j) = q.pairing(x.row(i), z.row(j));
            Int num = (i == j ? Int(1) : Int(0)) - a(i, j);
            if (mod_nonneg(num, 2) != 0)
                throw std::invalid_argument("normalize_mod2_block: pairing block not I mod 2");
            t(i, j) = num / 2;
        }
    // y_j = z_j + 2 sum_k S_kj z_k + sum_k C_kj x_k with S strictly lower,
    // S_kj = (t_kj + t_jk) mod 2, C = t - a S.  The S term cancels the
    // off-diagonal mod-2 drift that the naive correction (S = 0) causes.
    IntMat s(r, r);
    for (std::size_t k = 0; k < r; ++k)
        for (std::size_t j = 0; j < k; ++j) s(k, j) = mod_nonneg(t(k, j) + t(j, k), 2);
    IntMat c = t;
    IntMat as = a * s;
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) c(i, j) -= as(i, j);
    HalfIntBasis out;
    out.x = x;
    out.y = IntMat(r, n);
    for (std::size_t j = 0; j < r; ++j)
        for (std::size_t col = 0; col < n; ++col) {
            Int v = z(j, col);
            for (std::size_t k = 0; k < r; ++k)
                v += 2 * s(k, j) * z(k, col) + c(k, j) * x(k, col);
            out.y(j, col) = v;
        }
    return out;
}

/**
 * Odd-index basis extension.  Given a finite odd-index sublattice L of
 * (Z^2r, Q) spanned by the rows of sub_basis, and a half-integer basis of
 * L (coordinates relative to sub_basis rows), produces a basis of the full
 * lattice, with the same square-2 vectors, whose Gram matrix is congruent
 * mod 2 to L's half-integer Gram [[2I, I], [I, X_L]].
 */
inline IntMat extend_basis_odd_index(const GramMatrix& q, const IntMat& sub_basis,
                                     const HalfIntBasis& sub_half) {
    std::size_t n = q.rank();
    if (sub_basis.rows() != n || sub_basis.cols() != n)
        throw std::invalid_argument("extend_basis_odd_index: sublattice basis must be square");
    Int idx = abs_int(determinant(sub_basis));
    if (idx == 0 || idx % 2 == 0)
        throw std::invalid_argument("extend_basis_odd_index: index must be finite and odd");
    std::size_t r = n / 2;
    if (sub_half.x.rows() != r || n % 2 != 0)
        throw std::invalid_argument("extend_basis_odd_index: rank mismatch");

    // The half-integer basis of L expressed in ambient coordinates.
    IntMat f(n, n);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            Int sx = 0, sy = 0;
            for (std::size_t k = 0; k < n; ++k) {
                sx += sub_half.x(i, k) * sub_basis(k, j);
                sy += sub_half.y(i, k) * sub_basis(k, j);
            }
            f(i, j) = sx;
            f(r + i, j) = sy;
        }
    // Extract the square-2 rows; odd index makes them primitive in the
    // ambient lattice.
    IntMat x(r, n);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < n; ++j) x(i, j) = f(i, j);
    if (!rows_primitive(x))
        throw std::logic_error("extend_basis_odd_index: square-2 set is not primitive");
    IntMat basis = complete_to_basis(x);  // rows x_1..x_r, w_1..w_r
    // f = [[I, 0], [s', r']] * basis with det r' = +-index (odd).
    IntMat k = f * inverse_unimodular(basis);
    IntMat rp(r, r), sp(r, r);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) {
            sp(i, j) = k(r + i, j);
            rp(i, j) = k(r + i, r + j);
        }
    // Replace r' by a unimodular lift of its mod-2 reduction; the new rows
    // z = s' x + r~ w stay congruent to L's y rows mod 2 in every pairing.
    IntMat rt = lift_gl_mod2(rp);
    IntMat out(n, n);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            out(i, j) = x(i, j);
            Int v = 0;
            for (std::size_t l = 0; l < r; ++l)
                v += sp(i, l) * basis(l, j) + rt(i, l) * basis(r + l, j);
            out(r + i, j) = v;
        }
    return out;
}

/**
 * Full promotion: a half-integer basis for the ambient lattice with the
 * same square-2 vectors as the sublattice's and with every m_i parity
 * preserved in order.
 */
inline HalfIntBasis promote_half_integer(const GramMatrix& q, const IntMat& sub_basis,
                                         const HalfIntBasis& sub_half) {
    IntMat rows = extend_basis_odd_index(q, sub_basis, sub_half);
    return normalize_mod2_block(q, rows);
}

}  // namespace halfint::core
