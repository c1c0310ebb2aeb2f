#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <cstdio>
#include <cstring>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "halfint/embed.hpp"
#include "halfint/form_enum.hpp"
#include "halfint/knots.hpp"
#include "halfint/lens_d.hpp"
#include "halfint/obstruct.hpp"
#include "halfint/pipeline.hpp"
#include "oracles.hpp"

using halfint::GramMatrix;
using halfint::Int;
using halfint::IntMat;
using halfint::Rat;
namespace core = halfint::core;
namespace embed = halfint::embed;
namespace forms = halfint::forms;
namespace knots = halfint::knots;
namespace lens = halfint::lens;
namespace obstruct = halfint::obstruct;
namespace pipeline = halfint::pipeline;

namespace {

/**
 * Collects the checks of one acceptance criterion and emits exactly one
 * summary line (plus one indented line per failed check, if any).
 */
class Criterion {
public:
    Criterion(std::string id, std::string what)
        : id_(std::move(id)), what_(std::move(what)),
          start_(std::chrono::steady_clock::now()) {}

    void require(bool cond, const std::string& detail) {
        ++checked_;
        if (!cond) failures_.push_back(detail);
    }

    long long elapsed_ms() const {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now() - start_)
            .count();
    }

    // Prints the verdict line; true when every check passed.
    bool finish() const {
        double secs = static_cast<double>(elapsed_ms()) / 1000.0;
        std::printf("ACCEPTANCE %s (%s): %s (%.1fs, %d checks)\n", id_.c_str(), what_.c_str(),
                    failures_.empty() ? "PASS" : "FAIL", secs, checked_);
        for (const std::string& f : failures_) std::printf("  - %s\n", f.c_str());
        std::fflush(stdout);
        return failures_.empty();
    }

private:
    std::string id_, what_;
    std::chrono::steady_clock::time_point start_;
    std::vector<std::string> failures_;
    int checked_ = 0;
};

std::string gram_key(const GramMatrix& g) {
    std::string s = "[";
    for (std::size_t i = 0; i < g.rank(); ++i) {
        if (i) s += ';';
        for (std::size_t j = 0; j < g.rank(); ++j) {
            if (j) s += ',';
            s += g(i, j).str();
        }
    }
    return s + "]";
}

std::string canon_key(const GramMatrix& g) { return gram_key(core::minkowski_reduce(g).gram); }

}  // namespace

TEST_CASE("determinant 15 benchmark with one negative change", "[c1]") {
    Criterion c("c1", "7_4 slice-check, exact, under one second");

    auto rec = knots::make_record("7_4", 15, 2, knots::two_bridge(15, 4), Int(1));
    auto rep = obstruct::slicing_obstruction(knots::slice_query(rec, 0, 1));

    c.require(rep.obstructed, "report must conclude obstructed");
    c.require(rep.established, "verdict must be established, not provisional");
    c.require(rep.forms.size() == 1,
              "expected exactly one candidate form, got " + std::to_string(rep.forms.size()));
    if (rep.forms.size() == 1) {
        const obstruct::FormOutcome& f = rep.forms[0];
        c.require(f.form.gram == GramMatrix{{2, 1}, {1, 8}},
                  "candidate form must be [[2,1],[1,8]], got " + gram_key(f.form.gram));
        c.require(f.obstructed, "the single candidate must be obstructed");
        c.require(f.verdicts.size() == 1, "one oriented cover should be tested");
        for (const obstruct::FormVerdict& v : f.verdicts) {
            c.require(v.total_matchings == 120,
                      "expected 120 identifications, got " + v.total_matchings.str());
            c.require(v.refutations.size() == 120, "every identification must be refused");
            c.require(!v.witness.has_value(), "no identification may pass");
            for (const obstruct::Refutation& r : v.refutations)
                c.require(std::strcmp(r.reason, "inequality") == 0 ||
                              std::strcmp(r.reason, "parity") == 0,
                          std::string("unexpected refutation reason: ") + r.reason);
        }
    }

    // Same query through the command pipeline.
    pipeline::RunConfig cfg;
    cfg.knot = "7_4";
    cfg.p_pos = 0;
    cfg.n_neg = Int(1);
    std::ostringstream out, err;
    int code = pipeline::cmd_slice_check(cfg, out, err);
    c.require(code == 0, "slice-check exit code must be 0, got " + std::to_string(code));
    c.require(out.str().find("obstructed") != std::string::npos,
              "pipeline summary must report the obstruction");

    c.require(c.elapsed_ms() < 1000,
              "budget 1s exceeded: " + std::to_string(c.elapsed_ms()) + "ms");
    bool ok = c.finish();
    REQUIRE(ok);
}

TEST_CASE("rank 6 determinant 51 sweep refuses three negative changes", "[c2]") {
    Criterion c("c2", "11a365 rank-6 enumeration, all candidates obstructed");

    auto rec = knots::make_record("11a365", 51, 6, knots::two_bridge(51, 35), Int(3));
    auto rep = obstruct::slicing_obstruction(knots::slice_query(rec, 0, 3));

    c.require(rep.obstructed, "report must conclude obstructed");
    c.require(rep.established, "verdict must be established");
    c.require(rep.forms.size() == 4,
              "expected 4 candidate forms, got " + std::to_string(rep.forms.size()));
    for (const obstruct::FormOutcome& f : rep.forms) {
        c.require(f.form_det == 51, "candidate determinant must be 51");
        c.require(f.form.gram.rank() == 6, "candidate rank must be 6");
        c.require(f.form.n_even == 3, "candidates need three even framing values");
        c.require(f.obstructed, "every candidate must be obstructed");
        for (const obstruct::FormVerdict& v : f.verdicts) {
            c.require(v.total_matchings == 1632,
                      "expected 1632 identifications per candidate, got " +
                          v.total_matchings.str());
            c.require(!v.witness.has_value(), "no identification may pass");
        }
    }

    c.require(c.elapsed_ms() < 600000,
              "budget 10min exceeded: " + std::to_string(c.elapsed_ms()) + "ms");
    bool ok = c.finish();
    REQUIRE(ok);
}

TEST_CASE("twisted family certificates at small rank budgets", "[c3]") {
    Criterion c("c3", "K_n diagonalisation certificates, n = 1, 2, 3");

    for (std::size_t n = 1; n <= 3; ++n) {
        embed::DonaldsonReport rep = embed::donaldson_slicing_obstruction(n, 3, 6);
        std::string tag = "n=" + std::to_string(n) + ": ";
        c.require(rep.certified, tag + "all rank budgets must be certified");
        c.require(rep.obstructed, tag + "family member must be obstructed");
        c.require(rep.certs.size() == 4 - n,
                  tag + "expected " + std::to_string(4 - n) + " rank certificates, got " +
                      std::to_string(rep.certs.size()));
        for (const embed::DonaldsonReport::RankCert& cert : rep.certs) {
            c.require(cert.obstructed, tag + "every rank certificate must refuse all classes");
            c.require(cert.embedding_classes > 0, tag + "embedding classes must exist");
            c.require(cert.max_half_rank < 2 * cert.r,
                      tag + "half-integer rank cap must fall below twice the rank parameter");
        }
    }

    c.require(c.elapsed_ms() < 300000,
              "budget 5min exceeded: " + std::to_string(c.elapsed_ms()) + "ms");
    bool ok = c.finish();
    REQUIRE(ok);
}

TEST_CASE("square quotient mode exhibits a non obstruction", "[c4]") {
    Criterion c("c4", "determinant 45 input passes through a determinant 5 form");

    auto rec = knots::make_record("s45_8", 45, 0, knots::two_bridge(45, 8), std::nullopt);
    obstruct::SliceOptions opts;
    opts.allow_square_quotient = true;
    auto rep = obstruct::slicing_obstruction(knots::slice_query(rec, 1, 0), opts);

    bool tried5 = false, tried45 = false;
    for (const Int& d : rep.determinants_tried) {
        if (d == 5) tried5 = true;
        if (d == 45) tried45 = true;
    }
    c.require(tried5, "determinant 5 = 45/9 must be explored");
    c.require(tried45, "determinant 45 itself must be explored");

    bool found_pass = false;
    for (const obstruct::FormOutcome& f : rep.forms) {
        if (f.form_det != 5 || f.obstructed) continue;
        for (const obstruct::FormVerdict& v : f.verdicts)
            if (v.witness.has_value()) found_pass = true;
    }
    c.require(found_pass, "a determinant-5 form must pass with an explicit identification");
    c.require(!rep.obstructed, "overall verdict must be not obstructed");
    c.require(rep.established, "square-quotient exploration must leave no gap");

    // The pipeline surfaces the same verdict as exit code 1.
    pipeline::RunConfig cfg;
    cfg.two_bridge = std::make_pair(Int(45), Int(8));
    cfg.p_pos = 1;
    cfg.n_neg = Int(0);
    cfg.experimental_square_quotient = true;
    std::ostringstream out, err;
    int code = pipeline::cmd_slice_check(cfg, out, err);
    c.require(code == 1, "slice-check exit code must be 1, got " + std::to_string(code));

    bool ok = c.finish();
    REQUIRE(ok);
}

TEST_CASE("arithmetic property suites", "[c5]") {
    Criterion c("c5", "four randomized invariant suites, 1000 cases each");
    std::mt19937_64 rng(26081604);

    // Suite 1: the determinant of a positive-definite half-integer form is
    // congruent to (-1)^(number of even framing values) mod 4.
    {
        std::uniform_int_distribution<int> off(-2, 2), diag(1, 5);
        int done = 0, bad = 0;
        while (done < 1000) {
            std::size_t r = 1 + static_cast<std::size_t>(done % 4);
            IntMat xm(r, r);
            for (std::size_t i = 0; i < r; ++i) {
                xm(i, i) = diag(rng);
                for (std::size_t j = i + 1; j < r; ++j) xm(i, j) = xm(j, i) = off(rng);
            }
            GramMatrix full = core::half_integer_template(GramMatrix(xm));
            if (!full.positive_definite()) continue;
            ++done;
            std::size_t even = 0;
            for (std::size_t i = 0; i < r; ++i)
                if (xm(i, i) % 2 == 0) ++even;
            Int want = even % 2 == 0 ? 1 : 3;
            if (halfint::mod_nonneg(full.det(), 4) != want) ++bad;
        }
        c.require(bad == 0, "determinant congruence failed in " + std::to_string(bad) +
                                " of 1000 generated forms");
    }

    // Suite 2: matrices invertible mod 2 lift to unimodular integer
    // matrices congruent to the input mod 2.
    {
        std::uniform_int_distribution<int> bit(0, 1);
        int done = 0, bad = 0;
        while (done < 1000) {
            std::size_t r = 1 + static_cast<std::size_t>(done % 6);
            IntMat mbar(r, r);
            for (std::size_t i = 0; i < r; ++i)
                for (std::size_t j = 0; j < r; ++j) mbar(i, j) = bit(rng);
            if (halfint::mod_nonneg(halfint::determinant(mbar), 2) == 0) continue;
            ++done;
            IntMat lifted = core::lift_gl_mod2(mbar);
            Int d = halfint::determinant(lifted);
            bool good = (d == 1 || d == -1);
            for (std::size_t i = 0; i < r && good; ++i)
                for (std::size_t j = 0; j < r; ++j)
                    if (halfint::mod_nonneg(lifted(i, j) - mbar(i, j), 2) != 0) {
                        good = false;
                        break;
                    }
            if (!good) ++bad;
        }
        c.require(bad == 0,
                  "mod-2 lift failed in " + std::to_string(bad) + " of 1000 matrices");
    }

    // Suite 3: promotion along an odd-index sublattice keeps the square-2
    // vectors and every framing parity, and the promoted basis revalidates
    // through detection with the same even count.
    {
        std::uniform_int_distribution<int> off(-1, 1), diag(1, 5), oddpick(0, 1);
        int done = 0, bad = 0;
        while (done < 1000) {
            std::size_t r = 1 + static_cast<std::size_t>(done % 2);
            IntMat xm(r, r);
            for (std::size_t i = 0; i < r; ++i) {
                xm(i, i) = diag(rng);
                for (std::size_t j = i + 1; j < r; ++j) xm(i, j) = xm(j, i) = off(rng);
            }
            GramMatrix q = core::half_integer_template(GramMatrix(xm));
            if (!q.positive_definite()) continue;
            ++done;
            IntMat sub = IntMat::identity(2 * r);
            std::size_t pick = std::uniform_int_distribution<std::size_t>(0, r - 1)(rng);
            Int scale = oddpick(rng) == 0 ? 3 : 5;
            for (std::size_t j = 0; j < 2 * r; ++j) sub(r + pick, j) *= scale;
            sub = oracles::random_unimodular(rng, 2 * r, 10) * sub;

            GramMatrix ql(sub * q.mat() * halfint::transpose(sub));
            auto hl = core::detect_half_integer_type(ql);
            if (!hl || !core::valid_half_integer_basis(ql, *hl)) {
                ++bad;
                continue;
            }
            core::HalfIntBasis promoted = core::promote_half_integer(q, sub, *hl);
            bool good = core::valid_half_integer_basis(q, promoted);
            good = good && (hl->x * sub == promoted.x);
            auto ml = core::m_values(ql, *hl);
            auto mm = core::m_values(q, promoted);
            good = good && ml.size() == mm.size();
            for (std::size_t i = 0; good && i < ml.size(); ++i)
                good = halfint::mod_nonneg(ml[i], 2) == halfint::mod_nonneg(mm[i], 2);
            std::size_t even = core::n_even_count(q, promoted);
            good = good && even == core::n_even_count(ql, *hl);
            good = good && core::detect_half_integer_type_with_parity(q, even).has_value();
            if (!good) ++bad;
        }
        c.require(bad == 0,
                  "promotion failed in " + std::to_string(bad) + " of 1000 sublattices");
    }

    // Suite 4: determinant-signature congruence det = sigma + 1 mod 4 for
    // random two-bridge knots (the even signature makes its sign immaterial).
    {
        std::uniform_int_distribution<long long> half(1, 1200);
        int done = 0, bad = 0;
        while (done < 1000) {
            Int p = 2 * half(rng) + 1;
            Int q = std::uniform_int_distribution<long long>(1, halfint::to_i64(p) - 1)(rng);
            if (halfint::gcd_int(p, q) != 1) continue;
            ++done;
            auto k = knots::two_bridge(p, q);
            Int s = knots::signature_signed(k);
            if (halfint::mod_nonneg(p - s - 1, 4) != 0) ++bad;
        }
        c.require(bad == 0, "determinant-signature congruence failed in " +
                                std::to_string(bad) + " of 1000 knots");
    }

    bool ok = c.finish();
    REQUIRE(ok);
}

TEST_CASE("correction term recursion against the plumbing oracle", "[c6]") {
    Criterion c("c6", "all L(p,q) with p <= 200: recursion, oracle, conjugation");

    long long mismatches = 0, asym = 0, tables = 0;
    std::string first_bad;
    for (Int p = 2; p <= 200; ++p) {
        for (Int q = 1; q < p; ++q) {
            if (halfint::gcd_int(p, q) != 1) continue;
            lens::LensSpace y = lens::lens_space(p, q);
            lens::DTable fast = lens::d_invariants(y);
            lens::DTable slow = lens::d_oracle_plumbing(y);
            ++tables;
            if (fast.values != slow.values || fast.t0 != slow.t0) {
                ++mismatches;
                if (first_bad.empty())
                    first_bad = "first mismatch at L(" + p.str() + "," + q.str() + ")";
            }
            for (Int i = 0; i < p; ++i)
                if (fast.at(i) != fast.at(fast.conjugate(i))) {
                    ++asym;
                    break;
                }
        }
    }

    c.require(tables == 12231,
              "expected 12231 coprime pairs, saw " + std::to_string(tables));
    c.require(mismatches == 0, std::to_string(mismatches) +
                                   " recursion/oracle disagreements; " + first_bad);
    c.require(asym == 0,
              "conjugation symmetry failed for " + std::to_string(asym) + " tables");
    c.require(c.elapsed_ms() < 120000,
              "budget 2min exceeded: " + std::to_string(c.elapsed_ms()) + "ms");
    bool ok = c.finish();
    REQUIRE(ok);
}

TEST_CASE("dual chain embeddings and padded rank caps", "[c7]") {
    Criterion c("c7", "one model-complement class per family member; padded caps");

    const std::size_t expected_classes[3] = {3, 8, 21};
    for (std::size_t n = 1; n <= 3; ++n) {
        std::string tag = "n=" + std::to_string(n) + ": ";
        auto kn = knots::kn_family(n);
        auto weights = halfint::cf::negative_continued_fraction(kn.p, kn.p - kn.q);
        GramMatrix dual = embed::plumbing_gram(embed::linear_plumbing(weights));
        c.require(dual.rank() == 4 * n + 1, tag + "dual chain must have rank 4n+1");
        c.require(dual.det() == kn.p, tag + "dual chain determinant must equal p");

        auto classes = embed::embed_in_zn(dual, 6 * n + 1);
        c.require(classes.size() == expected_classes[n - 1],
                  tag + "expected " + std::to_string(expected_classes[n - 1]) +
                      " embedding classes, got " + std::to_string(classes.size()));

        GramMatrix model = embed::plumbing_gram(embed::four_chain(2 * n));
        std::size_t matches = 0;
        for (const embed::ZnEmbedding& e : classes)
            if (core::congruent(embed::orth_complement(e), model)) ++matches;
        c.require(matches == 1,
                  tag + "exactly one class may have the four-chain complement, got " +
                      std::to_string(matches));

        for (std::size_t k = 0; k <= 6; ++k) {
            GramMatrix padded = halfint::direct_sum(model, halfint::standard_lattice(k));
            std::size_t h = embed::max_half_integer_rank(padded);
            c.require(h <= k, tag + "half-integer rank cap " + std::to_string(h) +
                                  " exceeds padding " + std::to_string(k));
            c.require(h == 2 * (k / 2),
                      tag + "pad " + std::to_string(k) + " should realize cap " +
                          std::to_string(2 * (k / 2)) + ", got " + std::to_string(h));
        }
    }

    c.require(c.elapsed_ms() < 180000,
              "budget 3min exceeded: " + std::to_string(c.elapsed_ms()) + "ms");
    bool ok = c.finish();
    REQUIRE(ok);
}

TEST_CASE("enumeration completeness against a box oracle", "[c8]") {
    Criterion c("c8", "rank <= 4 forms, determinant <= 60: optimized equals brute force");

    // Library results first; their framing blocks also calibrate the box so
    // that every returned representative is certain to be re-enumerated.
    std::map<std::pair<int, std::size_t>, std::set<std::string>> lib1, lib2;
    Int max_diag = 0, max_off = 0;
    for (int det = 1; det <= 60; ++det) {
        for (std::size_t ne = 0; ne <= 2; ++ne) {
            if (ne <= 1) {
                auto res = forms::enumerate_half_integer_forms(1, det, ne);
                auto& bucket = lib1[{det, ne}];
                for (const forms::EnumeratedForm& f : res.forms) {
                    bucket.insert(canon_key(f.gram));
                    if (f.x_block(0, 0) > max_diag) max_diag = f.x_block(0, 0);
                }
                c.require(bucket.size() == res.forms.size(),
                          "rank-2 list holds congruent duplicates at det " +
                              std::to_string(det));
            }
            auto res = forms::enumerate_half_integer_forms(2, det, ne);
            auto& bucket = lib2[{det, ne}];
            for (const forms::EnumeratedForm& f : res.forms) {
                bucket.insert(canon_key(f.gram));
                for (std::size_t i = 0; i < 2; ++i) {
                    if (f.x_block(i, i) > max_diag) max_diag = f.x_block(i, i);
                    Int o = halfint::abs_int(f.x_block(i, 1 - i));
                    if (o > max_off) max_off = o;
                }
            }
            c.require(bucket.size() == res.forms.size(),
                      "rank-4 list holds congruent duplicates at det " + std::to_string(det));
        }
    }

    // Box bounds: a reduced companion [[2a-1, 2b], [2b, 2c-1]] of
    // determinant <= 60 satisfies 2a-1 <= sqrt(80), |2b| <= (2a-1)/2 and
    // 2c-1 <= det + (2b)^2, so a <= 4, |b| <= 2, c <= 30 already cover one
    // representative of every class; the library maxima widen the box until
    // its own representatives are inside, making set equality meaningful.
    long long diag_hi = std::max<long long>(31, halfint::to_i64(max_diag) + 1);
    long long off_hi = std::max<long long>(3, halfint::to_i64(max_off) + 1);

    std::map<std::pair<int, std::size_t>, std::set<std::string>> brute1, brute2;
    for (long long x = 1; x <= diag_hi; ++x) {
        Int d = 2 * x - 1;
        if (d > 60) break;
        GramMatrix g = core::half_integer_template(GramMatrix(IntMat{{Int(x)}}));
        std::size_t ne = x % 2 == 0 ? 1 : 0;
        brute1[{static_cast<int>(halfint::to_i64(d)), ne}].insert(canon_key(g));
    }
    for (long long a = 1; a <= diag_hi; ++a) {
        for (long long cc = 1; cc <= diag_hi; ++cc) {
            for (long long b = -off_hi; b <= off_hi; ++b) {
                Int da = (2 * Int(a) - 1) * (2 * Int(cc) - 1) - 4 * Int(b) * Int(b);
                if (da <= 0 || da > 60) continue;
                IntMat xm{{Int(a), Int(b)}, {Int(b), Int(cc)}};
                GramMatrix g = core::half_integer_template(GramMatrix(xm));
                if (!g.positive_definite()) continue;
                std::size_t ne = (a % 2 == 0 ? 1 : 0) + (cc % 2 == 0 ? 1 : 0);
                brute2[{static_cast<int>(halfint::to_i64(da)), ne}].insert(canon_key(g));
            }
        }
    }

    int compared = 0;
    for (int det = 1; det <= 60; ++det) {
        for (std::size_t ne = 0; ne <= 2; ++ne) {
            if (ne <= 1) {
                ++compared;
                if (lib1[{det, ne}] != brute1[{det, ne}])
                    c.require(false, "rank-2 mismatch at det " + std::to_string(det) +
                                         ", " + std::to_string(ne) + " even");
            }
            ++compared;
            if (lib2[{det, ne}] != brute2[{det, ne}])
                c.require(false, "rank-4 mismatch at det " + std::to_string(det) + ", " +
                                     std::to_string(ne) + " even");
        }
    }
    c.require(compared == 300, "expected 300 bucket comparisons");

    std::size_t total2 = 0;
    for (const auto& [key, bucket] : lib2) total2 += bucket.size();
    c.require(total2 > 0, "the rank-4 sweep must produce at least one class");

    bool ok = c.finish();
    REQUIRE(ok);
}
