#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <future>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "halfint/bigint.hpp"
#include "halfint/form_enum.hpp"
#include "halfint/gram.hpp"
#include "halfint/knots.hpp"
#include "halfint/lattice_core.hpp"
#include "halfint/lens_d.hpp"
#include "halfint/matrix.hpp"

namespace halfint::obstruct {

/**
 * Correction-term test for half-integer surgery forms.
 *
 * A positive definite form Q that a rational homology sphere Y bounds must
 * satisfy, for every characteristic covector class [c] and the spin-c
 * structure s it restricts to,
 *
 *     min { c'.c' : c' in [c] }  -  rank(Q)  >=  4 d(Y, s),
 *
 * with the two sides differing by an even integer.  The identification of
 * classes with spin-c structures is not canonical: it is some group
 * isomorphism coker(Q) -> H_1(Y) composed with a translation, so the test
 * quantifies over all of them and the form is obstructed only when every
 * identification fails.
 */

// One characteristic covector class of a positive definite form: the
// squares c.c are computed in the dual pairing c Q^{-1} c.
struct CharClassData {
    GramMatrix form;
    IntVec class_label;      // residues of the class in Smith coordinates
    IntVec representative;   // one characteristic covector in the class
    Rat min_square;          // min of c Q^{-1} c over the class (>= 0)
    Rat square_mod8;         // class invariant: any square, reduced into [0, 8)
};

/** All characteristic classes of one form, with conjugation bookkeeping. */
struct CharClassSet {
    GramMatrix form;
    Int order;                           // number of classes == det(form)
    std::vector<Int> divisors;           // Smith divisors of the form
    bool cyclic = true;                  // coker(form) cyclic?
    std::vector<CharClassData> classes;  // indexed by mixed-radix label
    std::vector<std::size_t> conjugate;  // index of the class of -c
    Int base_label = 0;                  // cyclic label of the diagonal-parity class

    // Cyclic-group label of class k; only meaningful when cyclic is set.
    Int label_of(std::size_t k) const {
        return classes[k].class_label.empty() ? Int(0) : classes[k].class_label.back();
    }
};

namespace detail {

inline std::string json_matrix(const IntMat& m) {
    std::string s = "[";
    for (std::size_t i = 0; i < m.rows(); ++i) {
        if (i) s += ',';
        s += '[';
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j) s += ',';
            s += m(i, j).str();
        }
        s += ']';
    }
    s += "]";
    return s;
}

// Reduces a nonnegative rational into [0, 8).
inline Rat reduce_mod8(const Rat& r) {
    Int num = boost::multiprecision::numerator(r);
    Int den = boost::multiprecision::denominator(r);
    return r - Rat(8) * Rat(floor_div(num, 8 * den));
}

}  // namespace detail

// Enumerates the characteristic covector classes of a positive definite
// form.  Classes are indexed by their Smith-coordinate residues in
// mixed-radix order (last coordinate fastest), so for a cyclic cokernel
// the index of a class equals its cyclic label.
inline CharClassSet characteristic_classes(const GramMatrix& q) {
    if (!q.positive_definite())
        throw std::invalid_argument("characteristic classes: form must be positive definite");
    std::size_t n = q.rank();

    CharClassSet out;
    out.form = q;
    if (n == 0) {
        out.order = 1;
        out.classes.push_back({q, IntVec{}, IntVec{}, Rat(0), Rat(0)});
        out.conjugate.push_back(0);
        return out;
    }

    SmithForm snf = smith_normal_form(q.mat());
    std::vector<Int> d(n);
    std::size_t nontrivial = 0;
    Int order = 1;
    for (std::size_t i = 0; i < n; ++i) {
        d[i] = snf.d(i, i);
        if (d[i] > 1) ++nontrivial;
        order *= d[i];
    }
    out.order = order;
    out.divisors = d;
    out.cyclic = nontrivial <= 1;

    // Diagonal parities give the base characteristic vector c0; classes are
    // c = c0 + 2w with w running over coker(Q), labelled by (U w) mod d.
    IntVec c0(n);
    for (std::size_t i = 0; i < n; ++i) c0[i] = mod_nonneg(q.mat()(i, i), Int(2));
    IntVec rho0(n);
    for (std::size_t i = 0; i < n; ++i) {
        Int s = 0;
        for (std::size_t j = 0; j < n; ++j) s += snf.u(i, j) * c0[j];
        rho0[i] = mod_nonneg(s, d[i]);
    }
    out.base_label = rho0[n - 1];

    auto index_of = [&](const IntVec& rho) {
        std::size_t idx = 0;
        for (std::size_t i = 0; i < n; ++i)
            idx = idx * static_cast<std::size_t>(to_i64(d[i])) +
                  static_cast<std::size_t>(to_i64(rho[i]));
        return idx;
    };

    std::size_t count = static_cast<std::size_t>(to_i64(order));
    out.classes.reserve(count);
    out.conjugate.resize(count);

    IntVec rho(n, Int(0));
    for (std::size_t k = 0; k < count; ++k) {
        // Preimage w of the label rho, then the representative covector.
        IntVec w(n, Int(0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) w[i] += snf.u_inv(i, j) * rho[j];
        IntVec c(n);
        for (std::size_t i = 0; i < n; ++i) c[i] = c0[i] + 2 * w[i];

        // min c.c over the class: c + 2Qv squares to 4 (v + Q^{-1}c/2) Q (..).
        core::RatVec target = core::solve_rational(q.mat(), c);
        for (Rat& t : target) t /= 2;
        Rat min_square = 4 * core::cvp_min(q, target);

        IntVec conj_rho(n);
        for (std::size_t i = 0; i < n; ++i) conj_rho[i] = mod_nonneg(-rho0[i] - rho[i], d[i]);
        out.conjugate[k] = index_of(conj_rho);
        out.classes.push_back({q, rho, c, min_square, detail::reduce_mod8(min_square)});

        for (std::size_t i = n; i-- > 0;) {  // advance mixed-radix counter
            if (++rho[i] < d[i]) break;
            rho[i] = 0;
        }
    }
    return out;
}

/** Identification of classes with spin-c indices: l -> (shift + unit*l) mod p. */
struct Matching {
    Int unit;
    Int shift;
};

/** Why one identification failed: the first class violating a condition. */
struct Refutation {
    Matching matching;
    Int class_label;
    Int target;          // spin-c index the class was sent to
    const char* reason;  // "inequality" or "parity"
};

/** Outcome of testing one form against one oriented space's d-invariants. */
struct FormVerdict {
    GramMatrix form;
    lens::LensSpace space;
    bool obstructed = true;
    Int total_matchings = 0;             // identifications examined
    std::optional<Matching> witness;     // a passing identification, if any
    std::vector<Int> witness_targets;    // spin-c index per class under the witness
    std::vector<Refutation> refutations; // one per failed identification
    std::string note;

    std::string to_json() const {
        std::string s = "{\"gram\":" + detail::json_matrix(form.mat());
        s += ",\"space\":{\"p\":" + space.p.str() + ",\"q\":" + space.q.str() +
             ",\"orientation\":\"" + lens::orientation_name(space.orientation) + "\"}";
        s += ",\"verdict\":\"";
        s += obstructed ? "obstructed" : "not obstructed";
        s += "\",\"total_matchings\":" + total_matchings.str();
        if (witness) {
            s += ",\"witness\":{\"unit\":" + witness->unit.str() +
                 ",\"shift\":" + witness->shift.str() + "}";
        } else {
            s += ",\"witness\":null";
        }
        if (!note.empty()) s += ",\"note\":\"" + knots::detail::json_escape(note) + "\"";
        s += "}";
        return s;
    }
};

struct CheckOptions {
    bool require_conjugation_symmetry = false;  // admit only conjugation-equivariant maps
    bool allow_square_quotient = false;         // admit det(Q) * t^2 == p via monomorphisms
};

// Tests one form against one d-invariant table.  Accepts |coker Q| == p
// (isomorphisms Z/det -> Z/p twisted by translations) and, with the
// square-quotient option, det * t^2 == p (monomorphisms, image index t^2).
inline FormVerdict check_form(const GramMatrix& q, const lens::DTable& d,
                              const CheckOptions& opts = {}) {
    const Int p = d.space.p;
    CharClassSet cls = characteristic_classes(q);
    const Int det = cls.order;

    FormVerdict v;
    v.form = q;
    v.space = d.space;

    // The admissible units: multipliers of injective homomorphisms
    // Z/det -> Z/p carrying class labels to spin-c indices.
    std::vector<Int> units;
    if (det == p) {
        for (Int u = 0; u < p; ++u)
            if (gcd_int(u, p) == 1) units.push_back(u);
    } else if (opts.allow_square_quotient && p % det == 0) {
        Int t2 = p / det, t;
        if (!perfect_square(t2, t))
            throw std::invalid_argument(
                "check_form: spin-c count / determinant is not a perfect square");
        for (Int u = 0; u < det; ++u)
            if (gcd_int(u, det) == 1) units.push_back(mod_nonneg(t2 * u, p));
    } else {
        throw std::invalid_argument(
            "check_form: form determinant " + det.str() + " does not match the spin-c count " +
            p.str() + (opts.allow_square_quotient ? " up to a square factor" : ""));
    }

    if (!cls.cyclic) {
        // A non-cyclic cokernel never embeds in the cyclic H_1, so no
        // identification exists and the form is obstructed outright.
        v.obstructed = true;
        v.note = "cokernel is not cyclic: no compatible identification of spin-c structures";
        return v;
    }

    const std::size_t count = cls.classes.size();
    const Rat b2 = Rat(Int(q.rank()));
    std::vector<Rat> lhs(count);  // min square minus rank, per class
    for (std::size_t k = 0; k < count; ++k) lhs[k] = cls.classes[k].min_square - b2;

    std::vector<Int> targets(count);
    for (const Int& u : units) {
        for (Int b = 0; b < p; ++b) {
            if (opts.require_conjugation_symmetry) {
                // phi must intertwine class conjugation with spin-c conjugation.
                bool sym = true;
                for (std::size_t k = 0; k < count && sym; ++k) {
                    Int img = mod_nonneg(b + u * cls.label_of(k), p);
                    Int img_conj = mod_nonneg(b + u * cls.label_of(cls.conjugate[k]), p);
                    sym = img_conj == d.conjugate(img);
                }
                if (!sym) continue;
            }
            v.total_matchings += 1;
            if (!v.obstructed) continue;  // witness found; only counting remains

            bool pass = true;
            for (std::size_t k = 0; k < count; ++k) {
                Int target = mod_nonneg(b + u * cls.label_of(k), p);
                targets[k] = target;
                Rat rhs = 4 * d.at(target);
                if (lhs[k] < rhs) {
                    v.refutations.push_back({{u, b}, cls.label_of(k), target, "inequality"});
                    pass = false;
                    break;
                }
                Rat diff = lhs[k] - rhs;
                if (boost::multiprecision::denominator(diff) != 1 ||
                    boost::multiprecision::numerator(diff) % 2 != 0) {
                    v.refutations.push_back({{u, b}, cls.label_of(k), target, "parity"});
                    pass = false;
                    break;
                }
            }
            if (pass) {
                v.obstructed = false;
                v.witness = Matching{u, b};
                v.witness_targets = targets;
            }
        }
    }
    return v;
}

inline FormVerdict check_form(const GramMatrix& q, const lens::DTable& d,
                              bool require_conjugation_symmetry) {
    CheckOptions opts;
    opts.require_conjugation_symmetry = require_conjugation_symmetry;
    return check_form(q, d, opts);
}

struct SliceOptions {
    bool require_conjugation_symmetry = false;
    bool allow_square_quotient = false;  // explore determinants det(K)/t^2
    unsigned threads = 1;                // independent form checks run concurrently
};

/** One candidate form with its verdicts under every tested orientation. */
struct FormOutcome {
    Int form_det;
    forms::EnumeratedForm form;
    std::vector<FormVerdict> verdicts;
    bool obstructed = false;  // obstructed under every tested orientation
};

/** Full decision record for one slicing query. */
struct ObstructionReport {
    knots::KnotRecord knot;
    Int p_pos;
    Int n_neg;
    std::vector<Int> determinants_tried;
    std::vector<std::string> diagnostics;
    std::vector<FormOutcome> forms;
    bool obstructed = false;   // every candidate form is obstructed (and established)
    bool established = true;   // false when square quotients were left unexplored
    std::string conclusion;
    long long wall_time_ms = 0;

    std::string to_json() const {
        std::string s = "{\"knot\":" + knots::to_json(knot);
        s += ",\"p\":" + p_pos.str() + ",\"n\":" + n_neg.str();
        s += ",\"determinants_tried\":[";
        for (std::size_t i = 0; i < determinants_tried.size(); ++i) {
            if (i) s += ',';
            s += determinants_tried[i].str();
        }
        s += "],\"forms\":[";
        for (std::size_t i = 0; i < forms.size(); ++i) {
            if (i) s += ',';
            const FormOutcome& f = forms[i];
            s += "{\"determinant\":" + f.form_det.str();
            s += ",\"gram\":" + detail::json_matrix(f.form.gram.mat());
            s += ",\"n_even\":" + std::to_string(f.form.n_even);
            s += ",\"obstructed\":";
            s += f.obstructed ? "true" : "false";
            s += ",\"verdicts\":[";
            for (std::size_t j = 0; j < f.verdicts.size(); ++j) {
                if (j) s += ',';
                s += f.verdicts[j].to_json();
            }
            s += "]}";
        }
        s += "],\"diagnostics\":[";
        for (std::size_t i = 0; i < diagnostics.size(); ++i) {
            if (i) s += ',';
            s += '"' + knots::detail::json_escape(diagnostics[i]) + '"';
        }
        s += "],\"obstructed\":";
        s += obstructed ? "true" : "false";
        s += ",\"established\":";
        s += established ? "true" : "false";
        s += ",\"conclusion\":\"" + knots::detail::json_escape(conclusion) + "\"";
        s += ",\"wall_time_ms\":" + std::to_string(wall_time_ms);
        s += "}";
        return s;
    }
};

// Decides whether the correction terms obstruct slicing the queried knot by
// p_pos positive and n_neg negative crossing changes.  Candidate forms have
// rank 2(p+n), exactly n_neg even framing values, and determinant equal to
// det(K) divided by a square (only 1 unless the square-quotient option is
// on).  For signature zero both orientations of the double cover are
// eligible, so a form counts as obstructed only when both orientations
// refuse it.
inline ObstructionReport slicing_obstruction(const knots::SliceQuery& query,
                                             const SliceOptions& opts = {}) {
    auto start = std::chrono::steady_clock::now();

    ObstructionReport rep;
    rep.knot = query.knot;
    rep.p_pos = query.p_pos;
    rep.n_neg = query.n_neg;

    if (!query.knot.two_bridge)
        throw std::invalid_argument(
            "slicing obstruction: the knot record carries no double-cover description");

    const Int det_k = query.knot.determinant;
    const std::size_t r = static_cast<std::size_t>(to_i64(query.p_pos + query.n_neg));
    const std::size_t n_even = static_cast<std::size_t>(to_i64(query.n_neg));

    // Determinants of candidate forms: det(K)/t^2 for every square divisor.
    for (Int t = 1; t * t <= det_k; ++t)
        if (det_k % (t * t) == 0) {
            if (t > 1 && !opts.allow_square_quotient) {
                rep.established = false;
                continue;
            }
            rep.determinants_tried.push_back(det_k / (t * t));
        }

    lens::LensSpace cover = knots::branched_double_cover(*query.knot.two_bridge);
    std::vector<lens::DTable> tables;
    tables.push_back(lens::d_invariants(cover));
    if (query.knot.signature == 0 && cover.p > 1)
        tables.push_back(lens::d_invariants(lens::reverse(cover)));

    CheckOptions check_opts;
    check_opts.require_conjugation_symmetry = opts.require_conjugation_symmetry;
    check_opts.allow_square_quotient = opts.allow_square_quotient;

    for (const Int& det_q : rep.determinants_tried) {
        forms::FormEnumResult res = forms::enumerate_half_integer_forms(r, det_q, n_even);
        if (!res.parity_consistent) {
            rep.diagnostics.push_back("determinant " + det_q.str() + ": " + res.diagnostic);
            continue;
        }
        std::size_t first = rep.forms.size();
        for (const forms::EnumeratedForm& f : res.forms)
            rep.forms.push_back({det_q, f, {}, false});

        auto check_one = [&](FormOutcome& out) {
            out.obstructed = true;
            for (const lens::DTable& d : tables) {
                out.verdicts.push_back(check_form(out.form.gram, d, check_opts));
                if (!out.verdicts.back().obstructed) out.obstructed = false;
            }
        };
        // Forms are independent; run them in waves of the requested width.
        std::size_t width = opts.threads > 1 ? opts.threads : 1;
        for (std::size_t i = first; i < rep.forms.size(); i += width) {
            std::size_t j_end = std::min(rep.forms.size(), i + width);
            std::vector<std::future<void>> wave;
            for (std::size_t j = i + 1; j < j_end; ++j)
                wave.push_back(std::async(std::launch::async, check_one, std::ref(rep.forms[j])));
            check_one(rep.forms[i]);
            for (auto& w : wave) w.get();
        }
    }

    bool all_obstructed = true;
    for (const FormOutcome& f : rep.forms)
        if (!f.obstructed) all_obstructed = false;

    const std::string changes =
        "(" + rep.p_pos.str() + " positive, " + rep.n_neg.str() + " negative)";
    if (!rep.established && all_obstructed) {
        rep.obstructed = false;
        rep.conclusion = "no conclusion: determinant " + det_k.str() +
                         " has square divisors left unexplored; rerun with the "
                         "square-quotient mode to decide " +
                         changes;
    } else if (all_obstructed) {
        rep.obstructed = true;
        rep.conclusion = "obstructed: no candidate form admits a passing identification, "
                         "so the knot cannot be unknotted by " +
                         changes + " crossing changes";
    } else {
        rep.obstructed = false;
        rep.conclusion = "not obstructed: a candidate form admits a passing identification "
                         "for " + changes + " crossing changes";
    }

    auto stop = std::chrono::steady_clock::now();
    rep.wall_time_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(stop - start).count();
    return rep;
}

}  // namespace halfint::obstruct
