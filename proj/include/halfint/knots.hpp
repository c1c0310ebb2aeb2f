#pragma once

#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "halfint/bigint.hpp"
#include "halfint/cont_frac.hpp"
#include "halfint/lens_d.hpp"

namespace halfint::knots {

using cf::negative_continued_fraction;

/**
 * Two-bridge knots S(p, q), their classical invariants, and table
 * ingestion.  Knots are stored with q canonicalized to min(q, q^{-1} mod p)
 * (the two parameters give the same knot), and mirror images are S(p, p-q).
 * The library-wide convention keeps signatures nonnegative: every record
 * is normalized to the mirror with sigma >= 0, and the flag remembers when
 * the input named the other one.
 */
struct TwoBridgeKnot {
    Int p;
    Int q;
};

inline bool operator==(const TwoBridgeKnot& a, const TwoBridgeKnot& b) {
    return a.p == b.p && a.q == b.q;
}

inline TwoBridgeKnot two_bridge(const Int& p, const Int& q) {
    if (p < 1 || p % 2 == 0)
        throw std::invalid_argument(
            "two_bridge: p must be odd and positive (even p describes a two-component link)");
    if (p == 1) {
        if (q != 1) throw std::invalid_argument("two_bridge: the unknot is S(1, 1)");
        return {Int(1), Int(1)};
    }
    if (q <= 0 || q >= p || gcd_int(p, q) != 1)
        throw std::invalid_argument("two_bridge: need 0 < q < p with gcd(p, q) == 1");
    Int qi = mod_inverse(q, p);
    return {p, q < qi ? q : qi};
}

inline bool is_unknot(const TwoBridgeKnot& k) { return k.p == 1; }

inline TwoBridgeKnot mirror(const TwoBridgeKnot& k) {
    if (k.p == 1) return k;
    return two_bridge(k.p, k.p - k.q);
}

// Signed signature of the stored representative, by the counting form of
// the Gordon-Litherland formula for the alternating two-bridge diagram:
//   sigma = - sum_{k=1}^{p-1} chi(k) chi(kq mod p),
// chi(x) = +1 when 0 < x < p/2 and -1 when p/2 < x < p.  Mirroring negates
// the sum exactly (chi(-x) = -chi(x)), which the tests exercise.
inline Int signature_signed(const TwoBridgeKnot& k) {
    if (k.p == 1) return 0;
    Int acc = 0;
    for (Int i = 1; i < k.p; ++i) {
        Int j = mod_nonneg(i * k.q, k.p);
        bool low_i = 2 * i < k.p;
        bool low_j = 2 * j < k.p;
        acc += (low_i == low_j) ? 1 : -1;
    }
    return -acc;
}

// Mirror-normalized signature: that of the nonnegative-signature mirror.
inline Int signature(const TwoBridgeKnot& k) {
    Int s = signature_signed(k);
    return s < 0 ? Int(-s) : s;
}

struct NormalizedKnot {
    TwoBridgeKnot knot;
    bool mirrored = false;  // true when the input named the sigma < 0 mirror
};

inline NormalizedKnot normalize_positive(const TwoBridgeKnot& k) {
    if (signature_signed(k) < 0) return {mirror(k), true};
    return {k, false};
}

inline Int determinant(const TwoBridgeKnot& k) { return k.p; }

// Branched double cover: S(p, q) covers to L(p, q), oriented as the
// boundary of the positive plumbing on its defining chain.  Callers that
// need the cover of the nonnegative-signature representative should
// normalize the knot first.
inline lens::LensSpace branched_double_cover(const TwoBridgeKnot& k) {
    return lens::lens_space(k.p, k.q);
}

// The family K_n: two-bridge knot of the chain [4, 4, ..., 4] (2n fours).
// Numerators obey p_k = 4 p_(k-1) - p_(k-2) with p_0 = 1, p_1 = 4.
inline TwoBridgeKnot kn_family(const Int& n) {
    if (n < 1) throw std::invalid_argument("kn_family: index must be >= 1");
    std::vector<Int> chain(static_cast<std::size_t>(to_i64(2 * n)), Int(4));
    Int p = cf::continuant(chain);
    chain.erase(chain.begin());
    Int q = cf::continuant(chain);
    return two_bridge(p, q);
}

struct KnotRecord {
    std::string name;
    Int determinant;
    Int signature;  // nonnegative by module convention
    std::optional<TwoBridgeKnot> two_bridge;
    bool mirrored = false;
    std::optional<Int> slice_genus;
};

inline KnotRecord make_record(std::string name, const Int& det, const Int& sigma,
                              std::optional<TwoBridgeKnot> tb = std::nullopt,
                              std::optional<Int> genus = std::nullopt) {
    if (name.empty()) throw std::invalid_argument("knot record: empty name");
    if (det <= 0 || det % 2 == 0)
        throw std::invalid_argument("knot record: determinant must be odd and positive");
    if (sigma % 2 != 0)
        throw std::invalid_argument("knot record: signature must be even");
    if (sigma < 0)
        throw std::invalid_argument(
            "knot record: signature must be nonnegative (store the mirror with sigma >= 0)");
    if (mod_nonneg(det - sigma - 1, 4) != 0)
        throw std::invalid_argument(
            "knot record: determinant == signature + 1 (mod 4) violated");
    if (genus && *genus < 0)
        throw std::invalid_argument("knot record: slice genus must be nonnegative");
    KnotRecord r;
    r.name = std::move(name);
    r.determinant = det;
    r.signature = sigma;
    r.slice_genus = genus;
    if (tb) {
        if (det != tb->p)
            throw std::invalid_argument("knot record: determinant differs from two-bridge p");
        NormalizedKnot n = normalize_positive(*tb);
        if (signature_signed(n.knot) != sigma)
            throw std::invalid_argument(
                "knot record: signature column does not match the two-bridge pair");
        r.two_bridge = n.knot;
        r.mirrored = n.mirrored;
    }
    return r;
}

struct SliceQuery {
    KnotRecord knot;
    Int p_pos;
    Int n_neg;
};

// Queries are only posed on the obstruction's boundary case n = sigma/2.
inline SliceQuery slice_query(KnotRecord knot, const Int& p_pos, const Int& n_neg) {
    if (p_pos < 0 || n_neg < 0)
        throw std::invalid_argument("slice query: crossing counts must be nonnegative");
    if (2 * n_neg != knot.signature)
        throw std::invalid_argument(
            "slice query: the obstruction applies to n = signature/2 exactly");
    return {std::move(knot), p_pos, n_neg};
}

namespace detail {

inline std::string trim(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t'))
        s.pop_back();
    std::size_t b = 0;
    while (b < s.size() && (s[b] == ' ' || s[b] == '\t')) ++b;
    return s.substr(b);
}

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(trim(cur));
    return out;
}

inline Int parse_int(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("empty integer field");
    std::size_t b = (s[0] == '-') ? 1 : 0;
    if (b == s.size()) throw std::invalid_argument("bad integer '" + s + "'");
    for (std::size_t i = b; i < s.size(); ++i)
        if (s[i] < '0' || s[i] > '9')
            throw std::invalid_argument("bad integer '" + s + "'");
    return Int(s.c_str());
}

}  // namespace detail

inline constexpr const char* kTableHeader =
    "name,determinant,signature,two_bridge_p,two_bridge_q,slice_genus";

// Reads the knot-table CSV (header row required; see kTableHeader).  An
// empty stream yields an empty table.  Every invalid row is reported by
// line number in a single exception.
inline std::vector<KnotRecord> ingest_table(std::istream& in) {
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    while (!lines.empty() && detail::trim(lines.back()).empty()) lines.pop_back();
    if (lines.empty()) return {};

    std::vector<std::string> errors;
    if (detail::trim(lines[0]) != kTableHeader)
        throw std::runtime_error("ingest_table: line 1: expected header '" +
                                 std::string(kTableHeader) + "'");

    std::vector<KnotRecord> out;
    for (std::size_t ln = 2; ln <= lines.size(); ++ln) {
        const std::string& raw = lines[ln - 1];
        if (detail::trim(raw).empty()) continue;
        auto report = [&](const std::string& what) {
            errors.push_back("line " + std::to_string(ln) + ": " + what);
        };
        std::vector<std::string> f = detail::split_csv(raw);
        if (f.size() != 6) {
            report("expected 6 fields, got " + std::to_string(f.size()));
            continue;
        }
        try {
            Int det = detail::parse_int(f[1]);
            Int sigma = detail::parse_int(f[2]);
            std::optional<TwoBridgeKnot> tb;
            if (!f[3].empty() || !f[4].empty()) {
                if (f[3].empty() || f[4].empty())
                    throw std::invalid_argument("two_bridge_p and two_bridge_q must both be set");
                tb = two_bridge(detail::parse_int(f[3]), detail::parse_int(f[4]));
            }
            std::optional<Int> genus;
            if (!f[5].empty()) genus = detail::parse_int(f[5]);
            out.push_back(make_record(f[0], det, sigma, tb, genus));
        } catch (const std::exception& e) {
            report(e.what());
        }
    }
    if (!errors.empty()) {
        std::string msg = "ingest_table: rejected rows:";
        for (const std::string& e : errors) msg += "\n  " + e;
        throw std::runtime_error(msg);
    }
    return out;
}

inline std::vector<KnotRecord> ingest_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("ingest_file: cannot open " + path);
    return ingest_table(in);
}

namespace detail {

inline std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char ch : s) {
        switch (ch) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default: out += ch;
        }
    }
    return out;
}

}  // namespace detail

inline std::string to_json(const KnotRecord& k) {
    std::string s = "{\"name\":\"" + detail::json_escape(k.name) + "\"";
    s += ",\"determinant\":" + k.determinant.str();
    s += ",\"signature\":" + k.signature.str();
    if (k.two_bridge) {
        s += ",\"two_bridge\":{\"p\":" + k.two_bridge->p.str() + ",\"q\":" +
             k.two_bridge->q.str() + "}";
    } else {
        s += ",\"two_bridge\":null";
    }
    s += ",\"mirrored\":";
    s += k.mirrored ? "true" : "false";
    s += ",\"slice_genus\":";
    s += k.slice_genus ? k.slice_genus->str() : std::string("null");
    s += "}";
    return s;
}

}  // namespace halfint::knots
