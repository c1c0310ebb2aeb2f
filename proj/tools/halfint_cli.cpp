#include <CLI11.hpp>

#include <cstddef>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "halfint/pipeline.hpp"

namespace pipeline = halfint::pipeline;
using halfint::Int;

namespace {

Int parse_big(const std::string& s, const char* what) {
    if (s.empty()) throw CLI::ValidationError(std::string(what) + ": empty value");
    std::size_t b = (s[0] == '-') ? 1 : 0;
    if (b == s.size()) throw CLI::ValidationError(std::string(what) + ": bad integer '" + s + "'");
    for (std::size_t i = b; i < s.size(); ++i)
        if (s[i] < '0' || s[i] > '9')
            throw CLI::ValidationError(std::string(what) + ": bad integer '" + s + "'");
    return Int(s.c_str());
}

std::pair<Int, Int> parse_fraction(const std::string& s, const char* what) {
    std::size_t slash = s.find('/');
    if (slash == std::string::npos || slash == 0 || slash + 1 == s.size())
        throw CLI::ValidationError(std::string(what) + ": expected p/q, got '" + s + "'");
    return {parse_big(s.substr(0, slash), what), parse_big(s.substr(slash + 1), what)};
}

std::vector<Int> parse_weights(const std::string& s) {
    std::vector<Int> out;
    std::string cur;
    for (char ch : s) {
        if (ch == ',') {
            out.push_back(parse_big(cur, "--plumbing"));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(parse_big(cur, "--plumbing"));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Slicing obstructions from half-integer surgery forms and lens-space "
                 "d-invariants"};
    app.require_subcommand(1);

    pipeline::RunConfig cfg;
    app.add_option("--cache-dir", cfg.cache_dir, "content-addressed report cache directory");
    app.add_flag("--json", cfg.json_output, "print the JSON report instead of a summary");
    app.add_option("--threads", cfg.threads, "concurrent form checks")->check(CLI::Range(1, 64));
    app.add_flag("--experimental-square-quotient", cfg.experimental_square_quotient,
                 "also try determinants det/t^2 for square divisors t^2");
    app.add_flag("--require-conjugation-symmetry", cfg.require_conjugation_symmetry,
                 "restrict to conjugation-equivariant spin-c identifications");
    app.add_option("--output", cfg.output_path, "also write the JSON report to this file");

    std::string knot_name, two_bridge_str, lens_str, plumbing_str, ingest_path;
    long long p_pos = 0, n_neg = 0;
    std::size_t rank = 0, n_even = 0, family = 0, budget_r = 3, budget_k = 6, ambient = 0;
    std::string det_str;
    bool reversed = false, check_donaldson = false;

    CLI::App* slice = app.add_subcommand(
        "slice-check", "decide whether p positive / n negative crossing changes can slice");
    slice->add_option("--knot", knot_name, "catalog or table name (unknot, 7_4, 11a365, ...)");
    slice->add_option("--two-bridge", two_bridge_str, "two-bridge fraction p/q");
    slice->add_option("--table", cfg.table_path, "CSV knot table extending the catalog");
    slice->add_option("--p", p_pos, "positive crossing changes")->check(CLI::NonNegativeNumber);
    CLI::Option* n_opt =
        slice->add_option("--n", n_neg, "negative crossing changes (default: signature/2)")
            ->check(CLI::NonNegativeNumber);
    slice->add_flag("--forms-only", cfg.forms_only,
                    "only enumerate candidate forms (no d-invariant tests)");
    slice->fallthrough();

    CLI::App* enumf = app.add_subcommand("enum-forms",
                                         "enumerate half-integer forms by rank and determinant");
    enumf->add_option("--rank", rank, "form rank 2(p+n)")->required();
    enumf->add_option("--det", det_str, "determinant")->required();
    enumf->add_option("--n-even", n_even, "even framing values in the X block")->required();
    enumf->fallthrough();

    CLI::App* dinv = app.add_subcommand("dinv", "d-invariant table of a lens space");
    dinv->add_option("--lens", lens_str, "lens space p/q")->required();
    dinv->add_flag("--reversed", reversed, "reverse the orientation");
    dinv->fallthrough();

    CLI::App* embed = app.add_subcommand(
        "embed", "embeddings of a linear plumbing lattice into a cubic lattice");
    embed->add_option("--plumbing", plumbing_str, "comma-separated vertex weights")->required();
    embed->add_option("--ambient", ambient, "rank of the cubic lattice")->required();
    embed->fallthrough();

    CLI::App* kn = app.add_subcommand("kn", "the twisted family K_n = S(p_n, q_n)");
    kn->add_option("--n", family, "family index (signature 2n)")->required();
    kn->add_flag("--check-donaldson", check_donaldson,
                 "certify the embedding obstruction for all budgets p + n <= r");
    kn->add_option("--r", budget_r, "largest crossing-change budget p + n");
    kn->add_option("--k", budget_k, "certified padding budget for the rank cap");
    kn->fallthrough();

    CLI::App* ingest = app.add_subcommand("ingest", "validate and echo a knot-table CSV");
    ingest->add_option("path", ingest_path, "CSV file (see data/knots.csv)")->required();
    ingest->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        cfg.p_pos = Int(p_pos);
        if (n_opt->count()) cfg.n_neg = Int(n_neg);
        if (*slice) {
            cfg.knot = knot_name;
            if (!two_bridge_str.empty())
                cfg.two_bridge = parse_fraction(two_bridge_str, "--two-bridge");
            if (knot_name.empty() && !cfg.two_bridge) {
                std::cerr << "error: pass --knot NAME or --two-bridge p/q\n";
                return 2;
            }
            return pipeline::cmd_slice_check(cfg, std::cout, std::cerr);
        }
        if (*enumf)
            return pipeline::cmd_enum_forms(rank, parse_big(det_str, "--det"), n_even, cfg,
                                            std::cout, std::cerr);
        if (*dinv) {
            auto [p, q] = parse_fraction(lens_str, "--lens");
            return pipeline::cmd_dinv(p, q, reversed, cfg, std::cout, std::cerr);
        }
        if (*embed)
            return pipeline::cmd_embed(parse_weights(plumbing_str), ambient, cfg, std::cout,
                                       std::cerr);
        if (*kn)
            return pipeline::cmd_kn(family, check_donaldson, budget_r, budget_k, cfg, std::cout,
                                    std::cerr);
        if (*ingest) return pipeline::cmd_ingest(ingest_path, cfg, std::cout, std::cerr);
        std::cerr << "error: no subcommand\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
