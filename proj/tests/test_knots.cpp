#include <catch2/catch_amalgamated.hpp>

#include <halfint/cont_frac.hpp>
#include <halfint/knots.hpp>

#include <random>
#include <sstream>
#include <vector>

#include "oracles.hpp"

using namespace halfint;
using namespace halfint::knots;
using Catch::Matchers::ContainsSubstring;

namespace {

std::vector<Int> fours(std::size_t k) { return std::vector<Int>(k, Int(4)); }

}  // namespace

TEST_CASE("negative continued fractions", "[knots]") {
    REQUIRE(cf::negative_continued_fraction(15, 4) == std::vector<Int>{4, 4});
    REQUIRE(cf::negative_continued_fraction(2, 1) == std::vector<Int>{2});
    REQUIRE(cf::negative_continued_fraction(51, 35) == std::vector<Int>{2, 2, 7, 2, 2});
    REQUIRE(cf::recompose(cf::negative_continued_fraction(51, 35)) == Rat(51) / 35);
    REQUIRE_THROWS_AS(cf::negative_continued_fraction(4, 2), std::invalid_argument);
    REQUIRE_THROWS_AS(cf::negative_continued_fraction(3, 5), std::invalid_argument);
    REQUIRE_THROWS_AS(cf::negative_continued_fraction(5, 0), std::invalid_argument);
}

TEST_CASE("random fractions recompose exactly", "[knots][property]") {
    std::mt19937_64 rng(20240915);
    std::uniform_int_distribution<long> dp(2, 10000);
    int cases = 0;
    while (cases < 300) {
        long p = dp(rng);
        long q = std::uniform_int_distribution<long>(1, p - 1)(rng);
        if (gcd_int(p, q) != 1) continue;
        ++cases;
        std::vector<Int> a = cf::negative_continued_fraction(p, q);
        for (const Int& e : a) REQUIRE(e >= 2);
        REQUIRE(cf::recompose(a) == Rat(p) / q);
    }
}

TEST_CASE("continuants", "[knots]") {
    REQUIRE(cf::continuant({}) == 1);
    REQUIRE(cf::continuant({Int(7)}) == 7);
    REQUIRE(cf::continuant(fours(2)) == 15);
    REQUIRE(cf::continuant(fours(4)) == 209);
    REQUIRE(cf::continuant(fours(6)) == 2911);
    for (std::size_t k = 1; k <= 10; ++k)
        REQUIRE(cf::continuant(std::vector<Int>(k, Int(2))) == Int(static_cast<long>(k + 1)));
}

TEST_CASE("even continued fractions", "[knots]") {
    REQUIRE(cf::even_continued_fraction(5, 2) == std::vector<Int>{2, -2});
    REQUIRE(cf::even_continued_fraction(15, 4) == std::vector<Int>{4, 4});
    for (long p = 3; p <= 61; p += 2) {
        for (long q = 2; q < p; q += 2) {
            if (gcd_int(p, q) != 1) continue;
            std::vector<Int> a = cf::even_continued_fraction(p, q);
            for (const Int& e : a) {
                REQUIRE(e != 0);
                REQUIRE(e % 2 == 0);
            }
            REQUIRE(cf::recompose(a) == Rat(p) / q);
        }
    }
    REQUIRE_THROWS_AS(cf::even_continued_fraction(15, 7), std::invalid_argument);  // odd q
    REQUIRE_THROWS_AS(cf::even_continued_fraction(14, 4), std::invalid_argument);  // even p
}

TEST_CASE("two-bridge construction canonicalizes", "[knots]") {
    TwoBridgeKnot k = two_bridge(15, 4);
    REQUIRE(k.p == 15);
    REQUIRE(k.q == 4);
    // q and its inverse mod p name the same knot
    REQUIRE(two_bridge(15, 2) == two_bridge(15, 8));
    REQUIRE(two_bridge(15, 2).q == 2);
    REQUIRE(two_bridge(1, 1).p == 1);
    REQUIRE(is_unknot(two_bridge(1, 1)));
    REQUIRE_FALSE(is_unknot(k));
    REQUIRE_THROWS_AS(two_bridge(2, 1), std::invalid_argument);   // even p is a link
    REQUIRE_THROWS_AS(two_bridge(15, 3), std::invalid_argument);  // gcd 3
    REQUIRE_THROWS_AS(two_bridge(15, 0), std::invalid_argument);
    REQUIRE_THROWS_AS(two_bridge(15, 15), std::invalid_argument);
    REQUIRE_THROWS_AS(two_bridge(-3, 1), std::invalid_argument);
}

TEST_CASE("signatures of named knots", "[knots]") {
    REQUIRE(signature_signed(two_bridge(3, 1)) == -2);
    REQUIRE(signature_signed(two_bridge(15, 4)) == 2);
    REQUIRE(signature_signed(two_bridge(15, 11)) == -2);
    REQUIRE(signature_signed(two_bridge(51, 35)) == -6);
    REQUIRE(signature_signed(two_bridge(51, 16)) == 6);
    REQUIRE(signature_signed(two_bridge(5, 2)) == 0);
    REQUIRE(signature_signed(two_bridge(1, 1)) == 0);
    // the public convention reports the nonnegative-signature mirror
    REQUIRE(signature(two_bridge(15, 4)) == 2);
    REQUIRE(signature(two_bridge(15, 11)) == 2);
    REQUIRE(signature(two_bridge(51, 35)) == 6);
}

TEST_CASE("mirroring negates the signed signature", "[knots][property]") {
    for (long p = 3; p <= 61; p += 2) {
        for (long q = 1; q < p; ++q) {
            if (gcd_int(p, q) != 1) continue;
            TwoBridgeKnot k = two_bridge(p, q);
            REQUIRE(mirror(mirror(k)) == k);
            REQUIRE(signature_signed(mirror(k)) == -signature_signed(k));
        }
    }
}

TEST_CASE("counting formula matches the Seifert-form oracle", "[knots][property]") {
    for (long p = 3; p <= 101; p += 2) {
        for (long q = 1; q < p; ++q) {
            if (gcd_int(p, q) != 1) continue;
            REQUIRE(signature_signed(two_bridge(p, q)) == oracles::seifert_signature(p, q));
        }
    }
}

TEST_CASE("normalization picks the nonnegative mirror", "[knots]") {
    NormalizedKnot n = normalize_positive(two_bridge(15, 11));
    REQUIRE(n.mirrored);
    REQUIRE(n.knot == two_bridge(15, 4));
    NormalizedKnot m = normalize_positive(two_bridge(15, 4));
    REQUIRE_FALSE(m.mirrored);
    REQUIRE(m.knot == two_bridge(15, 4));
    // signature zero: already canonical
    REQUIRE_FALSE(normalize_positive(two_bridge(5, 2)).mirrored);
}

TEST_CASE("the twist family", "[knots]") {
    REQUIRE(kn_family(1) == two_bridge(15, 4));
    REQUIRE(kn_family(2) == two_bridge(209, 56));
    REQUIRE(kn_family(3).p == 2911);
    REQUIRE(kn_family(3).q == 780);
    REQUIRE_THROWS_AS(kn_family(0), std::invalid_argument);
    REQUIRE_THROWS_AS(kn_family(-2), std::invalid_argument);

    // determinants follow p_k = 4 p_(k-1) - p_(k-2) on the chain lengths
    std::vector<Int> pk{1, 4};
    for (std::size_t k = 2; k <= 12; ++k) pk.push_back(4 * pk[k - 1] - pk[k - 2]);
    for (long n = 1; n <= 6; ++n) {
        TwoBridgeKnot k = kn_family(n);
        REQUIRE(k.p == pk[static_cast<std::size_t>(2 * n)]);
        REQUIRE(determinant(k) == k.p);
    }
    for (long n = 1; n <= 4; ++n) REQUIRE(signature(kn_family(n)) == 2 * Int(n));
}

TEST_CASE("branched double covers", "[knots]") {
    lens::LensSpace y = branched_double_cover(two_bridge(15, 4));
    REQUIRE(y.p == 15);
    REQUIRE(y.q == 4);
    REQUIRE(y.orientation == lens::Orientation::as_bounding_positive_plumbing);
    lens::LensSpace z = branched_double_cover(two_bridge(51, 35));
    REQUIRE(z.p == 51);
    REQUIRE(z.q == 35);
    lens::LensSpace s3 = branched_double_cover(two_bridge(1, 1));
    REQUIRE(s3.p == 1);
    for (long p = 3; p <= 41; p += 2)
        for (long q = 1; q < p; ++q) {
            if (gcd_int(p, q) != 1) continue;
            TwoBridgeKnot k = two_bridge(p, q);
            REQUIRE(branched_double_cover(k).p == determinant(k));
        }
}

TEST_CASE("record validation", "[knots]") {
    KnotRecord r = make_record("7_4", 15, 2, two_bridge(15, 4), Int(1));
    REQUIRE(r.name == "7_4");
    REQUIRE(r.determinant == 15);
    REQUIRE(r.signature == 2);
    REQUIRE_FALSE(r.mirrored);
    REQUIRE(r.two_bridge == two_bridge(15, 4));
    REQUIRE(r.slice_genus == Int(1));

    // both fraction names of the same knot are accepted and canonicalized
    KnotRecord m = make_record("11a365", 51, 6, two_bridge(51, 35), Int(3));
    REQUIRE(m.mirrored);
    REQUIRE(m.two_bridge == two_bridge(51, 16));

    KnotRecord g = make_record("generic", 21, 4);
    REQUIRE_FALSE(g.two_bridge.has_value());
    REQUIRE_FALSE(g.slice_genus.has_value());

    REQUIRE_THROWS_WITH(make_record("x", 15, 4), ContainsSubstring("Murasugi") ||
                                                     ContainsSubstring("mod 4"));
    REQUIRE_THROWS_AS(make_record("x", 15, -2), std::invalid_argument);
    REQUIRE_THROWS_AS(make_record("x", 15, 3), std::invalid_argument);
    REQUIRE_THROWS_AS(make_record("x", 16, 2), std::invalid_argument);
    REQUIRE_THROWS_AS(make_record("", 15, 2), std::invalid_argument);
    REQUIRE_THROWS_AS(make_record("x", 15, 2, two_bridge(17, 4)), std::invalid_argument);
    REQUIRE_THROWS_AS(make_record("x", 15, 6, two_bridge(15, 4)), std::invalid_argument);
    REQUIRE_THROWS_AS(make_record("x", 15, 2, two_bridge(15, 4), Int(-1)),
                      std::invalid_argument);
}

TEST_CASE("murasugi congruence holds for constructed records", "[knots][property]") {
    for (long p = 3; p <= 101; p += 2) {
        for (long q = 1; q < p; ++q) {
            if (gcd_int(p, q) != 1) continue;
            TwoBridgeKnot k = two_bridge(p, q);
            REQUIRE(mod_nonneg(determinant(k) - signature(k) - 1, 4) == 0);
        }
    }
    for (long n = 1; n <= 6; ++n) {
        TwoBridgeKnot k = kn_family(n);
        REQUIRE(mod_nonneg(determinant(k) - signature(k) - 1, 4) == 0);
    }
}

TEST_CASE("slice queries sit on the obstruction boundary", "[knots]") {
    KnotRecord r = make_record("7_4", 15, 2, two_bridge(15, 4), Int(1));
    SliceQuery q = slice_query(r, 0, 1);
    REQUIRE(q.p_pos == 0);
    REQUIRE(q.n_neg == 1);
    REQUIRE_THROWS_AS(slice_query(r, 0, 2), std::invalid_argument);
    REQUIRE_THROWS_AS(slice_query(r, -1, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(slice_query(r, 0, -1), std::invalid_argument);
}

TEST_CASE("table ingestion", "[knots]") {
    SECTION("valid table") {
        std::istringstream in(
            "name,determinant,signature,two_bridge_p,two_bridge_q,slice_genus\n"
            "unknot,1,0,1,1,0\n"
            "7_4,15,2,15,4,1\n"
            "\n"
            "11a365,51,6,51,35,3\n"
            "generic,21,4,,,\n");
        std::vector<KnotRecord> rows = ingest_table(in);
        REQUIRE(rows.size() == 4);
        REQUIRE(rows[0].name == "unknot");
        REQUIRE(rows[0].two_bridge == two_bridge(1, 1));
        REQUIRE(rows[1].two_bridge == two_bridge(15, 4));
        REQUIRE(rows[1].slice_genus == Int(1));
        REQUIRE(rows[2].two_bridge == two_bridge(51, 16));  // canonical mirror
        REQUIRE(rows[2].mirrored);
        REQUIRE_FALSE(rows[3].two_bridge.has_value());
    }
    SECTION("empty and header-only input") {
        std::istringstream empty("");
        REQUIRE(ingest_table(empty).empty());
        std::istringstream header_only(std::string(kTableHeader) + "\n");
        REQUIRE(ingest_table(header_only).empty());
    }
    SECTION("bad header is rejected") {
        std::istringstream in("name,det\nunknot,1\n");
        REQUIRE_THROWS_WITH(ingest_table(in), ContainsSubstring("header"));
    }
    SECTION("bad rows are reported with line numbers") {
        std::istringstream in(
            "name,determinant,signature,two_bridge_p,two_bridge_q,slice_genus\n"
            "good,15,2,15,4,1\n"
            "murasugi_violation,15,4,,,\n"
            "bad_int,15,two,,,\n"
            "half_pair,15,2,15,,\n"
            "short_row,15,2\n");
        REQUIRE_THROWS_WITH(ingest_table(in),
                            ContainsSubstring("line 3") && ContainsSubstring("line 4") &&
                                ContainsSubstring("line 5") && ContainsSubstring("line 6"));
        std::istringstream again(
            "name,determinant,signature,two_bridge_p,two_bridge_q,slice_genus\n"
            "sig_mismatch,15,2,15,11,1\n");
        REQUIRE_NOTHROW(ingest_table(again));  // S(15,11) normalizes to signature +2
    }
    SECTION("missing file") {
        REQUIRE_THROWS_WITH(ingest_file("/nonexistent/knots.csv"),
                            ContainsSubstring("cannot open"));
    }
}
