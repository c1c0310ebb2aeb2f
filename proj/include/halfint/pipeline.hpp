#pragma once

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "halfint/bigint.hpp"
#include "halfint/embed.hpp"
#include "halfint/form_enum.hpp"
#include "halfint/knots.hpp"
#include "halfint/lens_d.hpp"
#include "halfint/obstruct.hpp"

namespace halfint::pipeline {

/**
 * Orchestration layer: command implementations behind the CLI, a built-in
 * knot catalog, and a content-addressed file cache for reports.
 *
 * Every command renders both a human-readable summary and a JSON report;
 * rerunning a command against a warm cache replays the stored bytes, so
 * reports are reproducible across runs.
 */

// Bump when any algorithm changes observable output; cache keys include it,
// so stale entries are never replayed across versions.
inline constexpr const char* kAlgorithmVersion = "1";

inline std::string fnv1a64(const std::string& s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    static const char* hex = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = hex[h & 0xf];
        h >>= 4;
    }
    return out;
}

inline std::string cache_key(const std::vector<std::string>& parts) {
    std::string joined = kAlgorithmVersion;
    for (const std::string& p : parts) {
        joined += '|';
        joined += p;
    }
    return fnv1a64(joined);
}

namespace detail {

inline std::string iso_now() {
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline std::string json_unescape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '\\' || i + 1 == s.size()) {
            out.push_back(s[i]);
            continue;
        }
        switch (s[++i]) {
            case 'n': out.push_back('\n'); break;
            case 't': out.push_back('\t'); break;
            case 'r': out.push_back('\r'); break;
            default: out.push_back(s[i]);
        }
    }
    return out;
}

}  // namespace detail

/**
 * Flat content-addressed store: one JSON file per entry, named by key.
 * Entries are immutable and version-stamped; writes go through a temp
 * file and an atomic rename.
 */
class FileCache {
  public:
    FileCache() = default;
    explicit FileCache(std::string dir) : dir_(std::move(dir)) {
        if (!dir_.empty()) std::filesystem::create_directories(dir_);
    }

    bool enabled() const { return !dir_.empty(); }

    std::string path_of(const std::string& key) const {
        return (std::filesystem::path(dir_) / (key + ".json")).string();
    }

    std::optional<std::string> lookup(const std::string& key) const {
        if (!enabled()) return std::nullopt;
        std::ifstream in(path_of(key), std::ios::binary);
        if (!in) return std::nullopt;
        std::ostringstream buf;
        buf << in.rdbuf();
        std::string entry = buf.str();
        const std::string marker = "\n\"value\":";
        std::size_t pos = entry.find(marker);
        if (pos == std::string::npos) return std::nullopt;
        std::string value = entry.substr(pos + marker.size());
        while (!value.empty() && (value.back() == '\n' || value.back() == ' ')) value.pop_back();
        if (value.empty() || value.back() != '}') return std::nullopt;
        value.pop_back();  // closing brace of the entry wrapper
        return value;
    }

    void store(const std::string& key, const std::string& value_json) const {
        if (!enabled()) return;
        std::filesystem::path target(path_of(key));
        if (std::filesystem::exists(target)) return;  // immutable once written
        std::string entry = "{\"key\":\"" + key + "\",\"version\":\"" + kAlgorithmVersion +
                            "\",\"created_at\":\"" + detail::iso_now() + "\",\n\"value\":" +
                            value_json + "}\n";
        std::random_device rd;
        std::filesystem::path tmp =
            target.parent_path() / (key + ".tmp." + std::to_string(rd()));
        {
            std::ofstream out(tmp, std::ios::binary);
            out << entry;
        }
        std::filesystem::rename(tmp, target);
    }

  private:
    std::string dir_;
};

/** One resolved command invocation: everything the slice checker needs. */
struct RunConfig {
    std::string knot;  // catalog or table name; empty when two_bridge is used
    std::optional<std::pair<Int, Int>> two_bridge;
    std::string table_path;  // optional CSV extending the built-in catalog
    Int p_pos = 0;
    std::optional<Int> n_neg;  // defaults to signature/2
    bool require_conjugation_symmetry = false;
    bool experimental_square_quotient = false;
    bool forms_only = false;
    unsigned threads = 1;
    std::string cache_dir;
    std::string output_path;  // extra copy of the JSON report
    bool json_output = false;
};

// Built-in records: the unknot and the worked two-bridge benchmarks.
inline const std::vector<knots::KnotRecord>& knot_catalog() {
    static const std::vector<knots::KnotRecord> table = [] {
        std::vector<knots::KnotRecord> t;
        t.push_back(knots::make_record("unknot", 1, 0, knots::two_bridge(1, 1), Int(0)));
        t.push_back(knots::make_record("7_4", 15, 2, knots::two_bridge(15, 4), Int(1)));
        t.push_back(knots::make_record("11a365", 51, 6, knots::two_bridge(51, 35), Int(3)));
        knots::TwoBridgeKnot k2 = knots::kn_family(2);
        t.push_back(knots::make_record("K_2", k2.p, 4, k2, Int(2)));
        knots::TwoBridgeKnot k3 = knots::kn_family(3);
        t.push_back(knots::make_record("K_3", k3.p, 6, k3, Int(3)));
        return t;
    }();
    return table;
}

inline knots::KnotRecord resolve_knot(const RunConfig& cfg) {
    if (cfg.two_bridge) {
        knots::TwoBridgeKnot tb = knots::two_bridge(cfg.two_bridge->first, cfg.two_bridge->second);
        Int sigma = knots::signature_signed(tb);
        if (sigma < 0) sigma = -sigma;
        std::string name =
            "S(" + cfg.two_bridge->first.str() + "," + cfg.two_bridge->second.str() + ")";
        return knots::make_record(name, tb.p, sigma, tb);
    }
    for (const knots::KnotRecord& r : knot_catalog())
        if (r.name == cfg.knot) return r;
    if (!cfg.table_path.empty())
        for (const knots::KnotRecord& r : knots::ingest_file(cfg.table_path))
            if (r.name == cfg.knot) return r;
    std::string known;
    for (const knots::KnotRecord& r : knot_catalog()) known += " " + r.name;
    throw std::runtime_error("unknown knot '" + cfg.knot + "'; built-in names are" + known +
                             " (extend with --table, or use --two-bridge p/q)");
}

namespace detail {

struct RunOutput {
    int exit_code = 0;
    std::string summary;      // human-readable, newline-terminated
    std::string report_json;  // machine report
};

inline std::string wrap_run(const RunOutput& r) {
    return "{\"exit\":" + std::to_string(r.exit_code) + ",\"summary\":\"" +
           knots::detail::json_escape(r.summary) + "\",\"report\":" + r.report_json + "}";
}

inline std::optional<RunOutput> unwrap_run(const std::string& v) {
    const std::string head = "{\"exit\":";
    if (v.rfind(head, 0) != 0) return std::nullopt;
    std::size_t pos = head.size();
    std::size_t comma = v.find(',', pos);
    if (comma == std::string::npos) return std::nullopt;
    RunOutput out;
    out.exit_code = std::stoi(v.substr(pos, comma - pos));
    const std::string skey = "\"summary\":\"";
    if (v.compare(comma + 1, skey.size(), skey) != 0) return std::nullopt;
    std::size_t s = comma + 1 + skey.size(), i = s;
    std::string raw;
    while (i < v.size() && v[i] != '"') {
        if (v[i] == '\\' && i + 1 < v.size()) raw += v[i++];
        raw += v[i++];
    }
    out.summary = json_unescape(raw);
    const std::string rkey = "\",\"report\":";
    if (v.compare(i, rkey.size(), rkey) != 0) return std::nullopt;
    out.report_json = v.substr(i + rkey.size(), v.size() - (i + rkey.size()) - 1);
    return out;
}

// Shared emit path: consult the cache, compute on miss, store, then print
// the summary (or the JSON report) and mirror the report to output_path.
inline int emit(const FileCache& cache, const std::string& key, bool json,
                const std::string& output_path, std::ostream& out,
                const std::function<RunOutput()>& compute) {
    RunOutput r;
    bool have = false;
    if (cache.enabled()) {
        if (auto hit = cache.lookup(key)) {
            if (auto parsed = unwrap_run(*hit)) {
                r = *parsed;
                have = true;
            }
        }
    }
    if (!have) {
        r = compute();
        cache.store(key, wrap_run(r));
    }
    if (json)
        out << r.report_json << "\n";
    else
        out << r.summary;
    if (!output_path.empty()) {
        std::ofstream f(output_path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write report to " + output_path);
        f << r.report_json << "\n";
    }
    return r.exit_code;
}

inline std::string lens_name(const lens::LensSpace& y) {
    std::string s = "L(" + y.p.str() + "," + y.q.str() + ")";
    s += y.orientation == lens::Orientation::as_bounding_positive_plumbing ? "+" : "-";
    return s;
}

inline std::string summarize(const obstruct::ObstructionReport& rep) {
    std::ostringstream s;
    s << "knot: " << rep.knot.name << " (determinant " << rep.knot.determinant << ", signature "
      << rep.knot.signature;
    if (rep.knot.two_bridge)
        s << ", double cover L(" << rep.knot.two_bridge->p << "," << rep.knot.two_bridge->q << ")";
    if (rep.knot.mirrored) s << ", mirrored";
    s << ")\n";
    s << "query: " << rep.p_pos << " positive and " << rep.n_neg
      << " negative crossing changes\n";
    s << "determinants tried:";
    for (const Int& d : rep.determinants_tried) s << " " << d;
    s << "\n";
    for (const std::string& d : rep.diagnostics) s << "note: " << d << "\n";
    for (const obstruct::FormOutcome& f : rep.forms) {
        s << "form " << obstruct::detail::json_matrix(f.form.gram.mat()) << " (det "
          << f.form_det << "):";
        for (const obstruct::FormVerdict& v : f.verdicts) {
            s << " vs " << lens_name(v.space) << " ";
            if (v.obstructed)
                s << "obstructed (" << v.total_matchings << " identifications refused)";
            else if (v.witness)
                s << "passes (unit " << v.witness->unit << ", shift " << v.witness->shift
                  << " of " << v.total_matchings << " identifications)";
            else
                s << "passes";
            s << ";";
        }
        s << "\n";
    }
    s << "conclusion: " << rep.conclusion << "\n";
    return s.str();
}

inline std::vector<Int> square_divisors(const Int& det) {
    std::vector<Int> ts;
    for (Int t = 1; t * t <= det; ++t)
        if (det % (t * t) == 0) ts.push_back(t);
    return ts;
}

}  // namespace detail

// Candidate-form listing when no double-cover d-invariant table applies
// (or on request): enumeration only, so the verdict is decisive exactly
// when no form exists at all.
inline detail::RunOutput forms_only_run(const knots::KnotRecord& rec, const Int& p_pos,
                                        const Int& n_neg, bool square_quotient) {
    std::size_t r = static_cast<std::size_t>(to_i64(p_pos + n_neg));
    std::size_t n_even = static_cast<std::size_t>(to_i64(n_neg));
    std::vector<Int> ts = square_quotient ? detail::square_divisors(rec.determinant)
                                          : std::vector<Int>{Int(1)};
    std::string forms_json;
    std::string diags_json;
    std::string summary;
    std::vector<Int> dets;
    std::size_t total = 0;
    for (const Int& t : ts) {
        Int det = rec.determinant / (t * t);
        dets.push_back(det);
        forms::FormEnumResult res = forms::enumerate_half_integer_forms(r, det, n_even);
        for (const forms::EnumeratedForm& f : res.forms) {
            if (total) forms_json += ',';
            forms_json += "{\"determinant\":" + det.str() +
                          ",\"gram\":" + obstruct::detail::json_matrix(f.gram.mat()) +
                          ",\"x_block\":" + obstruct::detail::json_matrix(f.x_block.mat()) + "}";
            summary += "candidate form " + obstruct::detail::json_matrix(f.gram.mat()) +
                       " (det " + det.str() + ")\n";
            ++total;
        }
        if (!res.diagnostic.empty()) {
            if (!diags_json.empty()) diags_json += ',';
            diags_json += '"' + knots::detail::json_escape("det " + det.str() + ": " +
                                                           res.diagnostic) +
                          '"';
            summary += "note: det " + det.str() + ": " + res.diagnostic + "\n";
        }
    }
    detail::RunOutput out;
    std::string conclusion;
    if (total == 0) {
        conclusion = "obstructed: no positive definite half-integer form matches the "
                     "determinant and parity constraints";
        out.exit_code = 0;
    } else {
        conclusion = "no conclusion: " + std::to_string(total) +
                     " candidate form(s) exist; testing them needs a double-cover "
                     "d-invariant table";
        out.exit_code = 1;
    }
    std::string dets_json;
    for (std::size_t i = 0; i < dets.size(); ++i) {
        if (i) dets_json += ',';
        dets_json += dets[i].str();
    }
    out.report_json = "{\"knot\":" + knots::to_json(rec) + ",\"p\":" + p_pos.str() +
                      ",\"n\":" + n_neg.str() + ",\"forms_only\":true,\"determinants_tried\":[" +
                      dets_json + "],\"forms\":[" + forms_json + "],\"diagnostics\":[" +
                      diags_json + "],\"obstructed\":" + (total == 0 ? "true" : "false") +
                      ",\"conclusion\":\"" + knots::detail::json_escape(conclusion) + "\"}";
    out.summary = "knot: " + rec.name + " (determinant " + rec.determinant.str() +
                  ", signature " + rec.signature.str() + ")\nquery: " + p_pos.str() +
                  " positive and " + n_neg.str() + " negative crossing changes (forms only)\n" +
                  summary + "conclusion: " + conclusion + "\n";
    return out;
}

// Full slicing decision; exit 0 = obstructed, 1 = not obstructed (or not
// established), 2 = error.
inline int cmd_slice_check(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    knots::KnotRecord rec = resolve_knot(cfg);
    Int half = rec.signature / 2;
    Int n = cfg.n_neg.value_or(half);
    if (n < half) {
        err << "warning: n = " << n << " is below the signature bound n >= sigma/2 = " << half
            << "; no slicing sequence with fewer negative changes exists\n";
        obstruct::ObstructionReport rep;
        rep.knot = rec;
        rep.p_pos = cfg.p_pos;
        rep.n_neg = n;
        rep.obstructed = true;
        rep.conclusion = "obstructed: slicing needs at least sigma/2 = " + half.str() +
                         " negative crossing changes, but only " + n.str() + " were allowed";
        detail::RunOutput r{0, detail::summarize(rep), rep.to_json()};
        if (cfg.json_output)
            out << r.report_json << "\n";
        else
            out << r.summary;
        if (!cfg.output_path.empty()) {
            std::ofstream f(cfg.output_path, std::ios::binary);
            if (!f) throw std::runtime_error("cannot write report to " + cfg.output_path);
            f << r.report_json << "\n";
        }
        return 0;
    }
    if (n > half) {
        err << "error: the obstruction applies to n = sigma/2 = " << half << " exactly; n = "
            << n << " is outside its hypotheses\n";
        return 2;
    }
    if (!rec.two_bridge && !cfg.forms_only) {
        err << "error: '" << rec.name
            << "' carries no two-bridge double-cover description; rerun with --forms-only to "
               "list candidate forms without testing them\n";
        return 2;
    }

    FileCache cache(cfg.cache_dir);
    std::string tb = rec.two_bridge
                         ? rec.two_bridge->p.str() + "/" + rec.two_bridge->q.str()
                         : "-";
    std::string key = cache_key({cfg.forms_only ? "forms-only" : "slice", rec.name,
                                 rec.determinant.str(), rec.signature.str(), tb,
                                 rec.mirrored ? "m" : "", cfg.p_pos.str(), n.str(),
                                 cfg.require_conjugation_symmetry ? "sym" : "",
                                 cfg.experimental_square_quotient ? "quot" : ""});
    return detail::emit(cache, key, cfg.json_output, cfg.output_path, out, [&] {
        if (cfg.forms_only)
            return forms_only_run(rec, cfg.p_pos, n, cfg.experimental_square_quotient);
        knots::SliceQuery query = knots::slice_query(rec, cfg.p_pos, n);
        obstruct::SliceOptions opts;
        opts.require_conjugation_symmetry = cfg.require_conjugation_symmetry;
        opts.allow_square_quotient = cfg.experimental_square_quotient;
        opts.threads = cfg.threads;
        obstruct::ObstructionReport rep = obstruct::slicing_obstruction(query, opts);
        return detail::RunOutput{rep.obstructed ? 0 : 1, detail::summarize(rep), rep.to_json()};
    });
}

inline int cmd_enum_forms(std::size_t full_rank, const Int& det, std::size_t n_even,
                          const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (full_rank % 2 != 0) {
        err << "error: half-integer forms have even rank; got " << full_rank << "\n";
        return 2;
    }
    FileCache cache(cfg.cache_dir);
    std::string key = cache_key(
        {"forms", std::to_string(full_rank), det.str(), std::to_string(n_even)});
    return detail::emit(cache, key, cfg.json_output, cfg.output_path, out, [&] {
        forms::FormEnumResult res =
            forms::enumerate_half_integer_forms(full_rank / 2, det, n_even);
        detail::RunOutput r;
        std::string rows;
        for (std::size_t i = 0; i < res.forms.size(); ++i) {
            if (i) rows += ',';
            rows += "{\"gram\":" + obstruct::detail::json_matrix(res.forms[i].gram.mat()) +
                    ",\"x_block\":" + obstruct::detail::json_matrix(res.forms[i].x_block.mat()) +
                    "}";
            r.summary += obstruct::detail::json_matrix(res.forms[i].gram.mat()) + "\n";
        }
        if (!res.diagnostic.empty()) r.summary += "note: " + res.diagnostic + "\n";
        r.summary += std::to_string(res.forms.size()) + " form(s) of rank " +
                     std::to_string(full_rank) + ", determinant " + det.str() + ", " +
                     std::to_string(n_even) + " even framing value(s)\n";
        r.report_json = "{\"rank\":" + std::to_string(full_rank) + ",\"determinant\":" +
                        det.str() + ",\"n_even\":" + std::to_string(n_even) +
                        ",\"parity_consistent\":" + (res.parity_consistent ? "true" : "false") +
                        ",\"diagnostic\":\"" + knots::detail::json_escape(res.diagnostic) +
                        "\",\"forms\":[" + rows + "]}";
        r.exit_code = 0;
        return r;
    });
}

inline int cmd_dinv(const Int& p, const Int& q, bool reversed, const RunConfig& cfg,
                    std::ostream& out, std::ostream& /*err*/) {
    lens::LensSpace y = lens::lens_space(p, q);
    if (reversed) y = lens::reverse(y);
    FileCache cache(cfg.cache_dir);
    std::string key = cache_key({"dinv", p.str(), q.str(), reversed ? "rev" : ""});
    return detail::emit(cache, key, cfg.json_output, cfg.output_path, out, [&] {
        lens::DTable t = lens::d_invariants(y);
        detail::RunOutput r;
        r.report_json = t.to_json();
        std::ostringstream s;
        s << "d-invariants of " << detail::lens_name(y) << ":\n";
        for (std::size_t i = 0; i < t.values.size(); ++i)
            s << i << "\t" << t.values[i] << "\n";
        r.summary = s.str();
        r.exit_code = 0;
        return r;
    });
}

inline int cmd_embed(const std::vector<Int>& weights, std::size_t ambient, const RunConfig& cfg,
                     std::ostream& out, std::ostream& /*err*/) {
    GramMatrix q = embed::plumbing_gram(embed::linear_plumbing(weights));
    std::vector<embed::ZnEmbedding> classes = embed::embed_in_zn(q, ambient);
    std::string rows;
    std::string summary;
    for (std::size_t i = 0; i < classes.size(); ++i) {
        GramMatrix comp = embed::orth_complement(classes[i]);
        std::size_t h = embed::max_half_integer_rank(comp);
        if (i) rows += ',';
        rows += "{\"vectors\":" + classes[i].to_json() +
                ",\"complement\":" + obstruct::detail::json_matrix(comp.mat()) +
                ",\"max_half_integer_rank\":" + std::to_string(h) + "}";
        summary += "class " + std::to_string(i + 1) + ": " + classes[i].to_json() +
                   " (complement caps half-integer rank at " + std::to_string(h) + ")\n";
    }
    std::string w;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (i) w += ',';
        w += weights[i].str();
    }
    std::string report = "{\"weights\":[" + w + "],\"ambient\":" + std::to_string(ambient) +
                         ",\"classes\":[" + rows + "]}";
    summary = std::to_string(classes.size()) + " embedding class(es) of P(" + w + ") into Z^" +
              std::to_string(ambient) + "\n" + summary;
    if (cfg.json_output)
        out << report << "\n";
    else
        out << summary;
    if (!cfg.output_path.empty()) {
        std::ofstream f(cfg.output_path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write report to " + cfg.output_path);
        f << report << "\n";
    }
    return 0;
}

inline int cmd_kn(std::size_t n, bool check_donaldson, std::size_t r, std::size_t k,
                  const RunConfig& cfg, std::ostream& out, std::ostream& /*err*/) {
    knots::TwoBridgeKnot kn = knots::kn_family(Int(static_cast<long>(n)));
    std::string info = "{\"name\":\"K_" + std::to_string(n) + "\",\"p\":" + kn.p.str() +
                       ",\"q\":" + kn.q.str() + ",\"determinant\":" + kn.p.str() +
                       ",\"signature\":" + std::to_string(2 * n) +
                       ",\"slice_genus\":" + std::to_string(n) + "}";
    std::string summary = "K_" + std::to_string(n) + " = S(" + kn.p.str() + "," + kn.q.str() +
                          "): determinant " + kn.p.str() + ", signature " +
                          std::to_string(2 * n) + ", slice genus " + std::to_string(n) + "\n";
    int code = 0;
    std::string report = info;
    if (check_donaldson) {
        embed::DonaldsonReport rep = embed::donaldson_slicing_obstruction(n, r, k);
        report = "{\"knot\":" + info + ",\"donaldson\":" + rep.to_json() + "}";
        for (const auto& cert : rep.certs)
            summary += "budget p + n = " + std::to_string(cert.r) + ": " +
                       std::to_string(cert.embedding_classes) + " embedding class(es) in Z^" +
                       std::to_string(cert.ambient) + ", half-integer rank cap " +
                       std::to_string(cert.max_half_rank) + " < " + std::to_string(2 * cert.r) +
                       (cert.obstructed ? " -- obstructed" : " -- not obstructed") + "\n";
        summary += "verdict: " + std::string(rep.obstructed ? "obstructed" : "not obstructed") +
                   " (" + rep.note + ")\n";
        code = rep.obstructed ? 0 : 1;
    }
    if (cfg.json_output)
        out << report << "\n";
    else
        out << summary;
    if (!cfg.output_path.empty()) {
        std::ofstream f(cfg.output_path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write report to " + cfg.output_path);
        f << report << "\n";
    }
    return code;
}

inline int cmd_ingest(const std::string& path, const RunConfig& cfg, std::ostream& out,
                      std::ostream& /*err*/) {
    std::vector<knots::KnotRecord> records = knots::ingest_file(path);
    std::string rows;
    std::string summary;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (i) rows += ',';
        rows += knots::to_json(records[i]);
        const knots::KnotRecord& r = records[i];
        summary += r.name + ": determinant " + r.determinant.str() + ", signature " +
                   r.signature.str();
        if (r.two_bridge)
            summary += ", S(" + r.two_bridge->p.str() + "," + r.two_bridge->q.str() + ")" +
                       (r.mirrored ? " (mirrored)" : "");
        if (r.slice_genus) summary += ", slice genus " + r.slice_genus->str();
        summary += "\n";
    }
    summary += std::to_string(records.size()) + " record(s) ingested from " + path + "\n";
    std::string report = "[" + rows + "]";
    if (cfg.json_output)
        out << report << "\n";
    else
        out << summary;
    if (!cfg.output_path.empty()) {
        std::ofstream f(cfg.output_path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write report to " + cfg.output_path);
        f << report << "\n";
    }
    return 0;
}

}  // namespace halfint::pipeline
