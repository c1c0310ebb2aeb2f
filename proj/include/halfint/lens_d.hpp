#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "halfint/bigint.hpp"
#include "halfint/cont_frac.hpp"

namespace halfint::lens {

/**
 * Heegaard Floer correction terms (d-invariants) of lens spaces, with
 * explicit spin-c bookkeeping.
 *
 * Conventions.  L(p, q) with the default orientation bounds the
 * positive-definite linear plumbing on the chain [a_1, ..., a_m] given by
 * the negative continued fraction of p/q.  Spin-c structures correspond to
 * characteristic vectors K of the chain form T (K_j == a_j mod 2) modulo
 * K ~ K + 2Tv, and are labelled by the class invariant
 *     t(K) = sum_j (-1)^(j+1) R_(j+1) K_j  (mod 2p),
 * where R_j is the tail continuant K(a_j..a_m).  The map K -> t is a
 * bijection from classes onto { t_0 + 2i : i = 0..p-1 } (t_0 = label of
 * the all-parities base vector), and index i identifies the structure
 * with label (t_0 + 2i) mod 2p.  Conjugation negates t, so i -> -t_0 - i.
 *
 * With mu(i) = min { K T^{-1} K : K in class i }, the invariant is
 *     d(i) = (mu(i) - m) / 4,
 * negated when the orientation is reversed.
 */

enum class Orientation { as_bounding_positive_plumbing, reversed };

struct LensSpace {
    Int p;
    Int q;
    Orientation orientation = Orientation::as_bounding_positive_plumbing;
};

inline LensSpace lens_space(const Int& p, const Int& q,
                            Orientation o = Orientation::as_bounding_positive_plumbing) {
    if (p < 1) throw std::invalid_argument("lens_space: order must be >= 1");
    if (p == 1) {
        if (q != 1) throw std::invalid_argument("lens_space: L(1, q) requires q == 1");
    } else if (q <= 0 || q >= p || gcd_int(p, q) != 1) {
        throw std::invalid_argument("lens_space: need 0 < q < p with gcd(p, q) == 1");
    }
    return LensSpace{p, q, o};
}

inline LensSpace reverse(const LensSpace& y) {
    LensSpace r = y;
    r.orientation = y.orientation == Orientation::reversed
                        ? Orientation::as_bounding_positive_plumbing
                        : Orientation::reversed;
    return r;
}

inline const char* orientation_name(Orientation o) {
    return o == Orientation::reversed ? "reversed" : "as_bounding_positive_plumbing";
}

namespace detail {

// Defining chain of L(p, q) together with the labelling data derived from
// it: tail continuants and the base label t_0 (label of the vector of
// diagonal parities).  Valid for p >= 2.
struct ChainLabels {
    std::vector<Int> a;  // chain weights, all >= 2
    std::vector<Int> r;  // r[j] = K(a_j..a_m), r[1] = p, r[m+1] = 1
    Int t0 = 0;          // base label, reduced into [0, 2p)
};

inline ChainLabels chain_labels(const Int& p, const Int& q) {
    ChainLabels c;
    c.a = cf::negative_continued_fraction(p, q);
    c.r = cf::tail_continuants(c.a);
    Int t0 = 0;
    for (std::size_t j = 1; j <= c.a.size(); ++j) {
        if (c.a[j - 1] % 2 != 0) {
            if (j % 2 == 1)
                t0 += c.r[j + 1];
            else
                t0 -= c.r[j + 1];
        }
    }
    c.t0 = mod_nonneg(t0, 2 * p);
    return c;
}

inline std::size_t as_index(const Int& v) { return static_cast<std::size_t>(to_i64(v)); }

}  // namespace detail

/** Full d-invariant table of one lens space, index = spin-c label. */
struct DTable {
    LensSpace space;
    std::vector<Rat> values;  // size p, entry i = d of structure i
    Int t0 = 0;               // labelling anchor (orientation-independent)

    const Rat& at(const Int& i) const {
        if (i < 0 || i >= space.p) throw std::out_of_range("DTable::at: bad spin-c index");
        return values[detail::as_index(i)];
    }

    // Spin-c conjugation on indices; an involution with one fixed point
    // when p is odd.
    Int conjugate(const Int& i) const {
        if (i < 0 || i >= space.p) throw std::out_of_range("DTable::conjugate: bad index");
        return mod_nonneg(-t0 - i, space.p);
    }

    std::string to_json() const {
        std::string s = "{\"p\":" + space.p.str() + ",\"q\":" + space.q.str() +
                        ",\"orientation\":\"" + orientation_name(space.orientation) +
                        "\",\"values\":[";
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) s += ',';
            s += '"';
            s += rat_string(values[i]);
            s += '"';
        }
        s += "]}";
        return s;
    }
};

namespace detail {

// Minimum of K T^{-1} K per spin-c class, computed by peeling the chain
// head: with t the scaled head coordinate, level j holds
//   M_j(tau) = min over t == tau (mod 2 R_j), t^2 <= UB R_j R_(j+1)
//              of t^2/(R_j R_(j+1)) + M_(j+1)((a_j R_(j+1) - t) mod 2 R_(j+1)),
// with base M_(m+1)(sigma in Z/2) = 0 if sigma is even.  UB = sum of the
// chain weights bounds every class minimum (greedy head reduction), so the
// windows are complete and the extraction below cannot miss an optimum.
//
// Every partial value is the inverse chain form on an integer vector, so
// its denominator divides the suffix determinant R_j; the recursion runs
// on the integer scalings S_j = R_j M_j and only divides out R_1 = p at
// the end.
inline std::vector<Rat> class_minima_peel(const ChainLabels& c) {
    const std::size_t m = c.a.size();
    const Int p = c.r[1];
    Int ub = 0;
    for (const Int& w : c.a) ub += w;

    std::vector<std::optional<Int>> next(2);
    next[0] = Int(0);
    for (std::size_t j = m; j >= 1; --j) {
        const Int rj = c.r[j];
        const Int rj1 = c.r[j + 1];
        const Int two_rj = 2 * rj;
        const Int lim = ub * rj * rj1;  // window: t^2 <= lim
        std::vector<std::optional<Int>> cur(as_index(two_rj));
        for (Int tau = 0; tau < two_rj; ++tau) {
            std::optional<Int> best;
            auto consider = [&](const Int& t) {
                // walk is ordered by |t| and tails are >= 0, so once the
                // head term alone reaches the incumbent we are done
                if (best && t * t >= *best * rj1) return false;
                Int sigma = mod_nonneg(c.a[j - 1] * rj1 - t, 2 * rj1);
                const std::optional<Int>& tail = next[as_index(sigma)];
                if (tail) {
                    Int num = t * t + *tail * rj;
                    Int val = num / rj1;
                    if (val * rj1 != num)
                        throw std::logic_error("d-invariants: scaled value not integral");
                    if (!best || val < *best) best = std::move(val);
                }
                return true;
            };
            Int up = tau > rj ? Int(tau - two_rj) : tau;  // representative in (-rj, rj]
            Int down = up - two_rj;
            while (true) {
                bool take_up = up * up <= down * down;
                Int& t = take_up ? up : down;
                if (t * t > lim || !consider(t)) break;
                if (take_up)
                    up += two_rj;
                else
                    down -= two_rj;
            }
            cur[as_index(tau)] = std::move(best);
        }
        next = std::move(cur);
        if (j == 1) break;
    }

    std::vector<Rat> mu(as_index(p));
    for (Int i = 0; i < p; ++i) {
        Int tau = mod_nonneg(c.t0 + 2 * i, 2 * p);
        const std::optional<Int>& v = next[as_index(tau)];
        if (!v) throw std::logic_error("d-invariants: head recursion window exhausted");
        mu[as_index(i)] = Rat(*v) / p;
    }
    return mu;
}

inline DTable table_from_minima(const LensSpace& y, const ChainLabels& c,
                                const std::vector<Rat>& mu) {
    DTable t;
    t.space = y;
    t.t0 = c.t0;
    t.values.reserve(mu.size());
    const Rat rank = Rat(static_cast<long>(c.a.size()));
    for (const Rat& v : mu) {
        Rat d = (v - rank) / 4;
        t.values.push_back(y.orientation == Orientation::reversed ? Rat(-d) : d);
    }
    return t;
}

inline DTable sphere_table(const LensSpace& y) {
    DTable t;
    t.space = y;
    t.t0 = 0;
    t.values = {Rat(0)};
    return t;
}

}  // namespace detail

// Primary computation: head-peel recursion over the defining chain.
inline DTable d_invariants(const LensSpace& y) {
    if (y.p == 1) return detail::sphere_table(y);
    detail::ChainLabels c = detail::chain_labels(y.p, y.q);
    return detail::table_from_minima(y, c, detail::class_minima_peel(c));
}

// Independent oracle: bounded forward search over the plumbing lattice.
// The chain is traversed from the far end (so the class label appears in
// the final state), and each level keeps every reachable scaled coordinate
//   W_i = P_(i-1) v_i   (v = the triangular change of basis, P = leading
// continuants of the reversed chain) inside the certified window
// W_i^2 <= UB P_(i-1) P_i.  Costs accumulate exactly; per-class minima are
// read off the final states, whose value mod 2p is the class label.
inline DTable d_oracle_plumbing(const LensSpace& y) {
    if (y.p < 2)
        throw std::invalid_argument("d_oracle_plumbing: requires order >= 2");
    detail::ChainLabels c = detail::chain_labels(y.p, y.q);
    const std::size_t m = c.a.size();
    const Int p = y.p;

    std::vector<Int> rev(c.a.rbegin(), c.a.rend());
    std::vector<Int> lead = cf::leading_continuants(rev);
    Int ub = 0;
    for (const Int& w : rev) ub += w;

    // Costs scaled by the leading continuant stay integral: a prefix cost
    // is the inverse form of the truncated chain on an integer vector, so
    // its denominator divides the truncated determinant P_i.
    struct Level {
        Int lo;                                 // smallest state value
        std::vector<std::optional<Int>> cost;   // index (W - lo)/2, scaled by P_i
    };
    auto window = [&](std::size_t i) {  // bound for |W_i|, i = 1..m
        return boost::multiprecision::sqrt(ub * lead[i - 1] * lead[i]);
    };

    Level cur;
    {
        Int b = window(1);
        Int lo = -b;
        if (mod_nonneg(lo, 2) != mod_nonneg(rev[0], 2)) lo += 1;
        cur.lo = lo;
        cur.cost.assign(detail::as_index((b - lo) / 2) + 1, std::nullopt);
        for (Int w = lo; w <= b; w += 2)
            cur.cost[detail::as_index((w - lo) / 2)] = w * w;  // cost w^2/P_1, scaled
    }
    for (std::size_t i = 2; i <= m; ++i) {
        Int b = window(i);
        const Int step = 2 * lead[i - 1];
        const Int budget = ub * lead[i - 1];  // prefix scale at the source level
        Level nxt;
        nxt.lo = -b;
        // states at level i keep the parity of P_(i-1) a_i - W (all W at a
        // level share one parity, so this is well defined)
        {
            Int sample = lead[i - 1] * rev[i - 1] - cur.lo;
            if (mod_nonneg(nxt.lo, 2) != mod_nonneg(sample, 2)) nxt.lo += 1;
        }
        nxt.cost.assign(detail::as_index((b - nxt.lo) / 2) + 1, std::nullopt);
        for (std::size_t s = 0; s < cur.cost.size(); ++s) {
            if (!cur.cost[s]) continue;
            const Int& base = *cur.cost[s];
            if (base > budget) continue;  // cannot prefix an optimal path
            Int w = cur.lo + 2 * Int(static_cast<long>(s));
            Int res = mod_nonneg(lead[i - 1] * rev[i - 1] - w, step);
            // shrink the window by the budget the prefix has already spent
            Int bs = boost::multiprecision::sqrt(Int((budget - base) * lead[i]));
            if (bs > b) bs = b;
            Int first = -bs + mod_nonneg(res + bs, step);  // least admissible >= -bs
            for (Int t = first; t <= bs; t += step) {
                Int num = base * lead[i] + t * t;
                Int val = num / lead[i - 1];
                if (val * lead[i - 1] != num)
                    throw std::logic_error("d_oracle_plumbing: scaled cost not integral");
                auto& slot = nxt.cost[detail::as_index((t - nxt.lo) / 2)];
                if (!slot || val < *slot) slot = std::move(val);
            }
        }
        cur = std::move(nxt);
    }

    // Bucket final states by class label W mod 2p and keep the minima.
    std::vector<std::optional<Int>> by_class(detail::as_index(2 * p));
    for (std::size_t s = 0; s < cur.cost.size(); ++s) {
        if (!cur.cost[s]) continue;
        Int w = cur.lo + 2 * Int(static_cast<long>(s));
        std::size_t tau = detail::as_index(mod_nonneg(w, 2 * p));
        auto& slot = by_class[tau];
        if (!slot || *cur.cost[s] < *slot) slot = *cur.cost[s];
    }
    std::vector<Rat> mu;
    mu.reserve(detail::as_index(p));
    for (Int i = 0; i < p; ++i) {
        Int tau = mod_nonneg(c.t0 + 2 * i, 2 * p);
        const std::optional<Int>& v = by_class[detail::as_index(tau)];
        if (!v)
            throw std::logic_error("d_oracle_plumbing: search bound exhausted before class " +
                                   i.str());
        mu.push_back(Rat(*v) / p);  // final scale P_m = p
    }
    return detail::table_from_minima(y, c, mu);
}

// Spin-c conjugation on indices without building a table.
inline Int conjugate(const LensSpace& y, const Int& i) {
    if (i < 0 || i >= y.p) throw std::out_of_range("conjugate: bad spin-c index");
    if (y.p == 1) return 0;
    detail::ChainLabels c = detail::chain_labels(y.p, y.q);
    return mod_nonneg(-c.t0 - i, y.p);
}

// Table of the oppositely oriented space: same labels, negated values.
inline DTable reverse_orientation(const DTable& t) {
    DTable r = t;
    r.space = reverse(t.space);
    for (Rat& v : r.values) v = -v;
    return r;
}

}  // namespace halfint::lens
