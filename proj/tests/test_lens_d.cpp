#include <catch2/catch_amalgamated.hpp>

#include <halfint/lens_d.hpp>

#include <map>
#include <set>
#include <vector>

#include "oracles.hpp"

using namespace halfint;
using namespace halfint::lens;

namespace {

Rat rq(long num, long den) { return Rat(num) / Rat(den); }

std::multiset<Rat> value_multiset(const DTable& t) {
    return {t.values.begin(), t.values.end()};
}

bool denominator_divides(const Rat& v, const Int& d) {
    return d % Int(boost::multiprecision::denominator(v)) == 0;
}

}  // namespace

TEST_CASE("lens space construction validates its input", "[lens_d]") {
    REQUIRE_NOTHROW(lens_space(1, 1));
    REQUIRE_NOTHROW(lens_space(2, 1));
    REQUIRE_NOTHROW(lens_space(15, 4));
    REQUIRE_THROWS_AS(lens_space(0, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(lens_space(1, 2), std::invalid_argument);
    REQUIRE_THROWS_AS(lens_space(15, 0), std::invalid_argument);
    REQUIRE_THROWS_AS(lens_space(15, 15), std::invalid_argument);
    REQUIRE_THROWS_AS(lens_space(15, 18), std::invalid_argument);
    REQUIRE_THROWS_AS(lens_space(15, 3), std::invalid_argument);  // gcd 3
}

TEST_CASE("d of the three-sphere is zero", "[lens_d]") {
    DTable t = d_invariants(lens_space(1, 1));
    REQUIRE(t.values == std::vector<Rat>{Rat(0)});
    REQUIRE(t.t0 == 0);
    REQUIRE(t.conjugate(0) == 0);
    // the plumbing oracle needs an actual chain
    REQUIRE_THROWS_AS(d_oracle_plumbing(lens_space(1, 1)), std::invalid_argument);
}

TEST_CASE("frozen small tables", "[lens_d]") {
    SECTION("L(2,1)") {
        DTable t = d_invariants(lens_space(2, 1));
        REQUIRE(t.t0 == 0);
        REQUIRE(t.values == std::vector<Rat>{rq(-1, 4), rq(1, 4)});
        REQUIRE(value_multiset(t) == std::multiset<Rat>{rq(-1, 4), rq(1, 4)});
    }
    SECTION("L(3,1)") {
        DTable t = d_invariants(lens_space(3, 1));
        REQUIRE(t.t0 == 1);
        REQUIRE(t.values == std::vector<Rat>{rq(-1, 6), rq(1, 2), rq(-1, 6)});
        for (const Rat& v : t.values) REQUIRE(denominator_divides(v, 12));
    }
    SECTION("L(7,2)") {
        DTable t = d_invariants(lens_space(7, 2));
        REQUIRE(t.t0 == 0);
        REQUIRE(t.values == std::vector<Rat>{rq(-1, 2), rq(1, 14), rq(-3, 14), rq(9, 14),
                                             rq(9, 14), rq(-3, 14), rq(1, 14)});
    }
    SECTION("L(15,4)") {
        DTable t = d_invariants(lens_space(15, 4));
        REQUIRE(t.t0 == 0);
        REQUIRE(t.values ==
                std::vector<Rat>{rq(-1, 2), rq(-7, 30), rq(17, 30), rq(-1, 10), rq(-7, 30),
                                 rq(1, 6), rq(11, 10), rq(17, 30), rq(17, 30), rq(11, 10),
                                 rq(1, 6), rq(-7, 30), rq(-1, 10), rq(17, 30), rq(-7, 30)});
    }
}

TEST_CASE("recursion agrees with the plumbing oracle and euclid recursion", "[lens_d][sweep]") {
    for (long p = 2; p <= 60; ++p) {
        for (long q = 1; q < p; ++q) {
            if (gcd_int(p, q) != 1) continue;
            for (Orientation o :
                 {Orientation::as_bounding_positive_plumbing, Orientation::reversed}) {
                LensSpace y = lens_space(p, q, o);
                DTable fast = d_invariants(y);
                DTable slow = d_oracle_plumbing(y);
                REQUIRE(fast.t0 == slow.t0);
                REQUIRE(fast.values == slow.values);
            }
            DTable t = d_invariants(lens_space(p, q));
            // euclid recursion has its own index convention: compare as multisets
            std::multiset<Rat> ref;
            for (long i = 0; i < p; ++i) ref.insert(oracles::euclid_d(p, q, i));
            REQUIRE(value_multiset(t) == ref);
            for (Int i = 0; i < p; ++i) {
                REQUIRE(t.at(t.conjugate(i)) == t.at(i));
                REQUIRE(denominator_divides(t.values[static_cast<std::size_t>(i)], 4 * Int(p)));
            }
        }
    }
}

TEST_CASE("conjugation is an involution with the right orbit count", "[lens_d]") {
    SECTION("L(15,4) has 8 orbits") {
        DTable t = d_invariants(lens_space(15, 4));
        std::set<Int> fixed;
        std::set<std::pair<Int, Int>> orbits;
        for (Int i = 0; i < 15; ++i) {
            Int j = t.conjugate(i);
            REQUIRE(t.conjugate(j) == i);
            if (i == j)
                fixed.insert(i);
            else
                orbits.insert({std::min(i, j), std::max(i, j)});
        }
        REQUIRE(fixed.size() == 1);                  // odd order: one fixed point
        REQUIRE(fixed.size() + orbits.size() == 8);  // (15 + 1) / 2
    }
    SECTION("involution on L(51,35)") {
        LensSpace y = lens_space(51, 35);
        for (Int i = 0; i < 51; ++i) {
            REQUIRE(conjugate(y, conjugate(y, i)) == i);
        }
        DTable t = d_invariants(y);
        for (Int i = 0; i < 51; ++i) REQUIRE(t.conjugate(i) == conjugate(y, i));
    }
    SECTION("bad index is rejected") {
        DTable t = d_invariants(lens_space(7, 2));
        REQUIRE_THROWS_AS(t.at(7), std::out_of_range);
        REQUIRE_THROWS_AS(t.conjugate(-1), std::out_of_range);
        REQUIRE_THROWS_AS(conjugate(lens_space(7, 2), 7), std::out_of_range);
    }
}

TEST_CASE("orientation reversal negates the table", "[lens_d]") {
    for (auto [p, q] : std::vector<std::pair<long, long>>{{2, 1}, {7, 2}, {15, 4}, {12, 5}}) {
        LensSpace y = lens_space(p, q);
        DTable t = d_invariants(y);
        DTable r = reverse_orientation(t);
        REQUIRE(r.space.orientation == Orientation::reversed);
        REQUIRE(r.t0 == t.t0);
        Rat total = 0;
        for (std::size_t i = 0; i < t.values.size(); ++i) {
            REQUIRE(r.values[i] == -t.values[i]);
            total += t.values[i] + r.values[i];
        }
        REQUIRE(total == 0);
        // reversal of the table equals the table of the reversed space
        DTable direct = d_invariants(reverse(y));
        REQUIRE(direct.values == r.values);
        REQUIRE(direct.t0 == r.t0);
        // and reversing twice restores the original
        DTable rr = reverse_orientation(r);
        REQUIRE(rr.values == t.values);
        REQUIRE(rr.space.orientation == t.space.orientation);
    }
}

TEST_CASE("d-table serializes to json", "[lens_d]") {
    DTable t = d_invariants(lens_space(2, 1));
    REQUIRE(t.to_json() ==
            "{\"p\":2,\"q\":1,\"orientation\":\"as_bounding_positive_plumbing\","
            "\"values\":[\"-1/4\",\"1/4\"]}");
    DTable r = d_invariants(lens_space(3, 1, Orientation::reversed));
    REQUIRE(r.to_json() ==
            "{\"p\":3,\"q\":1,\"orientation\":\"reversed\","
            "\"values\":[\"1/6\",\"-1/2\",\"1/6\"]}");
}
