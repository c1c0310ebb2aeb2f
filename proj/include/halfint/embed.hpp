#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "halfint/bigint.hpp"
#include "halfint/cont_frac.hpp"
#include "halfint/gram.hpp"
#include "halfint/knots.hpp"
#include "halfint/lattice_core.hpp"
#include "halfint/matrix.hpp"

namespace halfint::embed {

/**
 * Diagonalisation route: embeddings of plumbing lattices into cubic
 * lattices, orthogonal complements, and the maximal-rank search for
 * half-integer surgery sublattices.
 *
 * A positive definite filling X of a lens space glues against the dual
 * positive plumbing to a closed positive definite manifold, whose form is
 * the cubic lattice Z^m.  The plumbing lattice therefore embeds in Z^m
 * with the filling form inside its orthogonal complement; the rank cap on
 * half-integer surgery sublattices of that complement rules fillings out.
 */

/** Weights a_1..a_m of a linear plumbing graph. */
struct PlumbingSpec {
    std::vector<Int> weights;
};

inline PlumbingSpec linear_plumbing(std::vector<Int> weights) {
    if (weights.empty())
        throw std::invalid_argument("linear plumbing: weight list must be nonempty");
    return {std::move(weights)};
}

inline PlumbingSpec four_chain(std::size_t count) {
    return linear_plumbing(std::vector<Int>(count, Int(4)));
}

// Tridiagonal Gram matrix of the linear plumbing: diagonal = weights,
// adjacent vertices pair to 1.
inline GramMatrix plumbing_gram(const PlumbingSpec& s) {
    if (s.weights.empty())
        throw std::invalid_argument("plumbing_gram: weight list must be nonempty");
    std::size_t m = s.weights.size();
    IntMat g(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        g(i, i) = s.weights[i];
        if (i + 1 < m) {
            g(i, i + 1) = 1;
            g(i + 1, i) = 1;
        }
    }
    return GramMatrix(g);
}

/** Images of the lattice basis in Z^ambient, one vector per basis element. */
struct ZnEmbedding {
    std::size_t ambient = 0;
    std::vector<IntVec> vectors;

    bool operator==(const ZnEmbedding& o) const {
        return ambient == o.ambient && vectors == o.vectors;
    }
    bool operator<(const ZnEmbedding& o) const {
        if (ambient != o.ambient) return ambient < o.ambient;
        return vectors < o.vectors;
    }

    std::string to_json() const {
        std::string s = "[";
        for (std::size_t i = 0; i < vectors.size(); ++i) {
            if (i) s += ',';
            s += '[';
            for (std::size_t c = 0; c < vectors[i].size(); ++c) {
                if (c) s += ',';
                s += vectors[i][c].str();
            }
            s += ']';
        }
        s += "]";
        return s;
    }
};

// Gram matrix realized by an embedding (standard dot products of images).
inline GramMatrix embedding_gram(const ZnEmbedding& e) {
    std::size_t n = e.vectors.size();
    IntMat g(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            Int s = 0;
            for (std::size_t c = 0; c < e.ambient; ++c) s += e.vectors[i][c] * e.vectors[j][c];
            g(i, j) = s;
        }
    return GramMatrix(g);
}

namespace detail {

// Canonical representative under the automorphisms of Z^m (signed
// coordinate permutations): every coordinate column is sign-normalized to
// make its first nonzero entry positive, then columns are sorted.  Two
// embeddings are equivalent iff their canonical forms coincide.
inline void canonicalize(ZnEmbedding& e) {
    std::size_t n = e.vectors.size(), m = e.ambient;
    std::vector<std::vector<Int>> cols(m, std::vector<Int>(n, Int(0)));
    for (std::size_t c = 0; c < m; ++c) {
        for (std::size_t i = 0; i < n; ++i) cols[c][i] = e.vectors[i][c];
        for (std::size_t i = 0; i < n; ++i) {
            if (cols[c][i] == 0) continue;
            if (cols[c][i] < 0)
                for (std::size_t k = 0; k < n; ++k) cols[c][k] = -cols[c][k];
            break;
        }
    }
    std::sort(cols.begin(), cols.end(), std::greater<>());
    for (std::size_t c = 0; c < m; ++c)
        for (std::size_t i = 0; i < n; ++i) e.vectors[i][c] = cols[c][i];
}

struct EmbedSearch {
    const GramMatrix& q;
    std::size_t m;
    std::vector<IntVec> images;
    std::vector<std::size_t> support_end;  // past-the-end support of each image
    std::size_t used = 0;                  // coordinates touched so far
    std::set<ZnEmbedding> found;

    explicit EmbedSearch(const GramMatrix& gram, std::size_t ambient) : q(gram), m(ambient) {}

    void run() {
        if (q.rank() == 0) {
            found.insert(ZnEmbedding{m, {}});
            return;
        }
        IntVec v(m, Int(0));
        grow_vector(0, v, 0, q(0, 0), std::vector<Int>());
    }

    // Extends the partial embedding by one more image, enumerated
    // coordinate by coordinate.  Coordinates never touched before may only
    // be claimed in increasing order with a positive entry (a sound prune:
    // every class has a representative of this shape).
    void grow_vector(std::size_t level, IntVec& v, std::size_t c, const Int& rem,
                     std::vector<Int> dots) {
        // Frozen pairings: once past an earlier image's support, its dot
        // product cannot change (later coordinates are fresh or zero there).
        for (std::size_t j = 0; j < level; ++j)
            if (support_end[j] == c && dots[j] != q(level, j)) return;

        if (c == m || (c >= used && rem == 0)) {
            if (rem != 0) return;
            for (std::size_t j = 0; j < level; ++j)
                if (dots[j] != q(level, j)) return;
            place(level, v);
            return;
        }

        Int bound = boost::multiprecision::sqrt(rem);
        bool fresh = c >= used;
        // Fresh coordinates: claiming value 0 means no later coordinate may
        // be touched either, so jump straight to completion above.
        Int lo = fresh ? Int(1) : -bound;
        for (Int val = lo; val <= bound; ++val) {
            if (!fresh && val == 0) {
                v[c] = 0;
                grow_vector(level, v, c + 1, rem, dots);
                continue;
            }
            v[c] = val;
            std::vector<Int> next = dots;
            for (std::size_t j = 0; j < level; ++j)
                if (c < support_end[j]) next[j] += val * images[j][c];
            grow_vector(level, v, c + 1, rem - val * val, std::move(next));
        }
        v[c] = 0;
        if (fresh) grow_vector(level, v, m, rem, std::move(dots));  // stop claiming
    }

    void place(std::size_t level, const IntVec& v) {
        std::size_t end = 0;
        for (std::size_t c = 0; c < m; ++c)
            if (v[c] != 0) end = c + 1;
        images.push_back(v);
        support_end.push_back(end);
        std::size_t prev_used = used;
        used = std::max(used, end);

        if (level + 1 == q.rank()) {
            ZnEmbedding e{m, images};
            canonicalize(e);
            found.insert(std::move(e));
        } else {
            IntVec next(m, Int(0));
            grow_vector(level + 1, next, 0, q(level + 1, level + 1),
                        std::vector<Int>(level + 1, Int(0)));
        }

        images.pop_back();
        support_end.pop_back();
        used = prev_used;
    }
};

}  // namespace detail

// All embeddings of the form into the cubic lattice Z^m, up to signed
// coordinate permutations.  Exhaustive backtracking; an empty result is a
// proof that no embedding exists.
inline std::vector<ZnEmbedding> embed_in_zn(const GramMatrix& q, std::size_t m) {
    if (!q.positive_definite() && q.rank() > 0)
        throw std::invalid_argument("embed_in_zn: form must be positive definite");
    detail::EmbedSearch search(q, m);
    search.run();
    std::vector<ZnEmbedding> out(search.found.begin(), search.found.end());
    return out;
}

// Gram matrix of the full orthogonal complement of the embedded lattice
// in Z^m (saturated, via the Smith form of the pairing matrix).
inline GramMatrix orth_complement(const ZnEmbedding& e) {
    std::size_t n = e.vectors.size(), m = e.ambient;
    for (const IntVec& v : e.vectors)
        if (v.size() != m) throw std::invalid_argument("orth_complement: malformed embedding");
    if (n == 0) return standard_lattice(m);
    IntMat a(n, m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < m; ++c) a(i, c) = e.vectors[i][c];
    IntMat b = kernel_basis(a);
    std::size_t k = b.cols();
    IntMat g(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            Int s = 0;
            for (std::size_t c = 0; c < m; ++c) s += b(c, i) * b(c, j);
            g(i, j) = s;
        }
    return GramMatrix(g);
}

// Maximum rank 2r over sublattices of half-integer surgery type: r
// pairwise-orthogonal vectors of square 2 whose pairing map v -> (x_i . v)
// hits all of Z^r (that surjectivity is exactly the existence of dual
// vectors y_i, and the resulting 2r vectors are independent since the
// companion determinant is odd).
inline std::size_t max_half_integer_rank(const GramMatrix& q) {
    if (q.rank() == 0) return 0;
    if (!q.positive_definite())
        throw std::invalid_argument("max_half_integer_rank: form must be positive definite");

    std::vector<IntVec> cands;
    for (const IntVec& v : core::short_vectors(q, 2)) {
        if (q.norm(v) != 2) continue;
        for (const Int& x : v) {  // one representative per +- pair
            if (x == 0) continue;
            if (x > 0) cands.push_back(v);
            break;
        }
    }

    std::size_t n = q.rank();
    auto pairing_rows = [&](const std::vector<std::size_t>& chosen) {
        IntMat rows(chosen.size(), n);
        for (std::size_t i = 0; i < chosen.size(); ++i)
            for (std::size_t c = 0; c < n; ++c) {
                Int s = 0;
                for (std::size_t j = 0; j < n; ++j) s += cands[chosen[i]][j] * q(j, c);
                rows(i, c) = s;
            }
        return rows;
    };

    std::size_t best = 0;
    std::vector<std::size_t> chosen;
    auto extend = [&](auto&& self, std::size_t from) -> void {
        best = std::max(best, chosen.size());
        for (std::size_t i = from; i < cands.size(); ++i) {
            bool ok = true;
            for (std::size_t j : chosen)
                if (q.pairing(cands[i], cands[j]) != 0) { ok = false; break; }
            if (!ok) continue;
            chosen.push_back(i);
            // Surjectivity is inherited by subsets, so pruning on failure
            // here cannot miss a larger surjective family.
            if (rows_primitive(pairing_rows(chosen))) self(self, i + 1);
            chosen.pop_back();
        }
    };
    extend(extend, 0);
    return 2 * best;
}

/** Certification of the diagonalisation obstruction for one family member. */
struct DonaldsonReport {
    std::size_t n = 0;        // family index (sigma = 2n)
    std::size_t r = 0;        // total crossing budget p + n
    std::size_t k_budget = 0; // certified Z^k padding range

    struct RankCert {
        std::size_t r;                  // this budget split
        std::size_t ambient;            // Z^m used by the gluing
        std::size_t k;                  // complement padding 2r - 2n
        std::size_t embedding_classes;  // dual plumbing embeddings found
        bool complement_matches;        // some class realizes the model complement: cover + Z^k
        std::size_t max_half_rank;      // over all embedding complements
        bool obstructed;                // max_half_rank < 2r in every class
    };
    std::vector<RankCert> certs;
    std::vector<std::size_t> padded_half_ranks;  // max_half_integer_rank(L + Z^j), j <= k_budget
    bool certified = false;  // every split fit inside the k budget
    bool obstructed = false; // certified and every split refuted
    std::string note;

    std::string to_json() const {
        std::string s = "{\"n\":" + std::to_string(n) + ",\"r\":" + std::to_string(r) +
                        ",\"k_budget\":" + std::to_string(k_budget) + ",\"certs\":[";
        for (std::size_t i = 0; i < certs.size(); ++i) {
            if (i) s += ',';
            const RankCert& c = certs[i];
            s += "{\"r\":" + std::to_string(c.r) + ",\"ambient\":" + std::to_string(c.ambient) +
                 ",\"k\":" + std::to_string(c.k) +
                 ",\"embedding_classes\":" + std::to_string(c.embedding_classes) +
                 ",\"complement_matches\":" + (c.complement_matches ? "true" : "false") +
                 ",\"max_half_rank\":" + std::to_string(c.max_half_rank) +
                 ",\"obstructed\":" + (c.obstructed ? "true" : "false") + "}";
        }
        s += "],\"padded_half_ranks\":[";
        for (std::size_t i = 0; i < padded_half_ranks.size(); ++i) {
            if (i) s += ',';
            s += std::to_string(padded_half_ranks[i]);
        }
        s += "],\"certified\":";
        s += certified ? "true" : "false";
        s += ",\"obstructed\":";
        s += obstructed ? "true" : "false";
        s += ",\"note\":\"" + knots::detail::json_escape(note) + "\"}";
        return s;
    }
};

// Decides by lattice embeddings whether the family knot with signature 2n
// can be sliced by p positive and n negative crossing changes for any
// p <= r - n.  A filling with b_2 = 2r glues against the dual plumbing of
// the double cover into Z^{2r + dim}, so the filling form lives in the
// orthogonal complement of the dual plumbing lattice; the complement's cap
// on half-integer surgery ranks refutes it.  Everything is certified by
// exhaustive search at the requested sizes and reported as such.
inline DonaldsonReport donaldson_slicing_obstruction(std::size_t n, std::size_t r,
                                                     std::size_t k_budget = 6) {
    if (n == 0) throw std::invalid_argument("donaldson_slicing_obstruction: family index >= 1");
    if (r < n)
        throw std::invalid_argument(
            "donaldson_slicing_obstruction: budget r = p + n cannot be below n");

    DonaldsonReport rep;
    rep.n = n;
    rep.r = r;
    rep.k_budget = k_budget;

    knots::TwoBridgeKnot kn = knots::kn_family(Int(static_cast<long>(n)));
    // Dual plumbing: the cover with reversed orientation bounds the chain
    // of p/(p - q); the cover itself bounds the all-fours chain of p/q.
    std::vector<Int> dual_chain = cf::negative_continued_fraction(kn.p, kn.p - kn.q);
    GramMatrix dual = plumbing_gram(linear_plumbing(dual_chain));
    GramMatrix cover = plumbing_gram(four_chain(2 * n));

    // Lemma-scale sweep: the padded cover lattice never hosts half-integer
    // surgery sublattices beyond the padding rank.
    bool sweep_ok = true;
    for (std::size_t j = 0; j <= k_budget; ++j) {
        GramMatrix padded = j ? direct_sum(cover, standard_lattice(j)) : cover;
        std::size_t h = max_half_integer_rank(padded);
        rep.padded_half_ranks.push_back(h);
        if (h > j) sweep_ok = false;
    }

    rep.certified = true;
    bool all_obstructed = true;
    for (std::size_t rr = n; rr <= r; ++rr) {
        DonaldsonReport::RankCert cert;
        cert.r = rr;
        cert.k = 2 * rr - 2 * n;
        cert.ambient = 2 * rr + dual.rank();
        if (cert.k > k_budget) {
            rep.certified = false;
            rep.note = "padding k = " + std::to_string(cert.k) + " at r = " + std::to_string(rr) +
                       " exceeds the certified budget " + std::to_string(k_budget);
            break;
        }
        auto embeddings = embed_in_zn(dual, cert.ambient);
        cert.embedding_classes = embeddings.size();
        // The staircase embedding class realizes the expected complement;
        // folded classes give other complements, each refuted on its own.
        cert.complement_matches = false;
        cert.max_half_rank = 0;
        cert.obstructed = true;
        GramMatrix expected =
            cert.k ? direct_sum(cover, standard_lattice(cert.k)) : cover;
        for (const ZnEmbedding& e : embeddings) {
            GramMatrix comp = orth_complement(e);
            if (core::congruent(comp, expected)) cert.complement_matches = true;
            std::size_t h = max_half_integer_rank(comp);
            cert.max_half_rank = std::max(cert.max_half_rank, h);
            if (h >= 2 * rr) cert.obstructed = false;
        }
        if (!cert.obstructed) all_obstructed = false;
        rep.certs.push_back(cert);
    }

    rep.obstructed = rep.certified && all_obstructed && sweep_ok;
    if (rep.note.empty()) {
        rep.note = rep.obstructed
                       ? "every filling form up to rank " + std::to_string(2 * r) +
                             " is refuted by the complement's half-integer rank cap"
                       : "obstruction not established at the requested sizes";
    }
    return rep;
}

}  // namespace halfint::embed
