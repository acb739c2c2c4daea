// psprog: detection, counting, density, gap, discrepancy and sweep
// experiments for polynomial progressions in floor-function sequences
// floor(f(n)), with exact rational/certified arithmetic underneath.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "psprog/discrepancy.hpp"
#include "psprog/experiments.hpp"
#include "psprog/io.hpp"
#include "psprog/parallel.hpp"

#ifndef PSPROG_VERSION
#define PSPROG_VERSION "0.1.0"
#endif

namespace {

using namespace psprog;

// ------------------------------------------------------------------ grids

long parse_long_token(const std::string& tok) {
    auto caret = tok.find('^');
    if (caret != std::string::npos) {
        long base = std::stol(tok.substr(0, caret));
        long expn = std::stol(tok.substr(caret + 1));
        long v = 1;
        for (long i = 0; i < expn; ++i) v *= base;
        return v;
    }
    auto e = tok.find_first_of("eE");
    if (e != std::string::npos) {
        long mant = std::stol(tok.substr(0, e));
        long expn = std::stol(tok.substr(e + 1));
        long v = mant;
        for (long i = 0; i < expn; ++i) v *= 10;
        return v;
    }
    return std::stol(tok);
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    size_t start = 0;
    while (true) {
        auto pos = text.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(text.substr(start));
            return out;
        }
        out.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
}

// "a,b,c" with 10^k / 1e6 tokens, or "log:lo:hi:count" for a log-spaced
// integer grid.
std::vector<long> parse_long_grid(const std::string& text) {
    std::vector<long> grid;
    if (text.rfind("log:", 0) == 0) {
        auto parts = split(text, ':');
        if (parts.size() != 4)
            throw std::invalid_argument("grid '" + text + "': want log:lo:hi:count");
        long lo = parse_long_token(parts[1]);
        long hi = parse_long_token(parts[2]);
        long count = parse_long_token(parts[3]);
        if (lo < 1 || hi <= lo || count < 2)
            throw std::invalid_argument("grid '" + text + "': bad log range");
        double llo = std::log(static_cast<double>(lo));
        double lhi = std::log(static_cast<double>(hi));
        for (long i = 0; i < count; ++i) {
            double t = llo + (lhi - llo) * i / (count - 1);
            long v = std::lround(std::exp(t));
            if (grid.empty() || v > grid.back()) grid.push_back(v);
        }
        return grid;
    }
    for (const auto& tok : split(text, ','))
        if (!tok.empty()) grid.push_back(parse_long_token(tok));
    return grid;
}

// "B+i/D,i=lo..hi" (exact rationals), or a comma list of rationals.
std::vector<Rational> parse_alpha_grid(const std::string& text) {
    auto comma = text.find(",i=");
    if (comma != std::string::npos) {
        std::string expr = text.substr(0, comma);
        std::string range = text.substr(comma + 3);
        auto plus = expr.find('+');
        auto slash = expr.find('/', plus);
        auto dots = range.find("..");
        if (plus == std::string::npos || slash == std::string::npos ||
            dots == std::string::npos || expr.substr(plus + 1, 1) != "i")
            throw std::invalid_argument("alpha grid '" + text +
                                        "': want B+i/D,i=lo..hi");
        Rational base = parse_rational(expr.substr(0, plus));
        long den = parse_long_token(expr.substr(slash + 1));
        long lo = parse_long_token(range.substr(0, dots));
        long hi = parse_long_token(range.substr(dots + 2));
        if (den < 1 || hi < lo)
            throw std::invalid_argument("alpha grid '" + text + "': bad range");
        std::vector<Rational> grid;
        for (long i = lo; i <= hi; ++i) grid.push_back(base + make_rational(i, den));
        return grid;
    }
    std::vector<Rational> grid;
    for (const auto& tok : split(text, ','))
        if (!tok.empty()) grid.push_back(parse_rational(tok));
    return grid;
}

// ------------------------------------------------------------- run context

struct OutputSink {
    std::string format = "csv";  // csv | json
    std::string out_path;        // empty: stdout
    std::string svg_path;
    std::string manifest_path;
    std::vector<std::pair<std::string, std::string>> written;  // path -> fnv hex

    void emit(const std::string& csv_text, const std::string& json_text) {
        const std::string& payload = format == "json" ? json_text : csv_text;
        char hex[32];
        std::snprintf(hex, sizeof hex, "%016llx",
                      static_cast<unsigned long long>(fnv1a64(payload)));
        if (out_path.empty()) {
            std::cout << payload;
            written.emplace_back("-", hex);
        } else {
            write_file(out_path, payload);
            written.emplace_back(out_path, hex);
        }
    }

    void emit_svg(const std::string& svg) {
        if (svg_path.empty()) return;
        write_file(svg_path, svg);
        char hex[32];
        std::snprintf(hex, sizeof hex, "%016llx",
                      static_cast<unsigned long long>(fnv1a64(svg)));
        written.emplace_back(svg_path, hex);
    }
};

struct RunTimer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    std::string started = iso8601_utc_now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    }
};

void finish_manifest(const std::string& command,
                     std::vector<std::pair<std::string, std::string>> config,
                     const RunTimer& timer, OutputSink& sink) {
    if (sink.manifest_path.empty()) return;
    RunManifest m;
    m.command = command;
    m.config = std::move(config);
    m.version = PSPROG_VERSION;
    m.started_at = timer.started;
    m.finished_at = iso8601_utc_now();
    m.wall_seconds = timer.seconds();
    m.outputs = sink.written;
    write_file(sink.manifest_path, manifest_json(m));
}

std::string fmt_long(long v) { return std::to_string(v); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"polynomial progressions in floor(f(n)) sequences: exact "
                 "detection, densities, polytope volumes, gaps, discrepancy"};
    app.set_version_flag("--version", PSPROG_VERSION);
    app.set_config("--config", "", "flat key=value config file; flags override");
    app.require_subcommand(1);
    // Global flags (--format/--out/--manifest/--threads) may follow the
    // subcommand's own options.
    app.fallthrough(true);

    int threads = 0;
    app.add_option("--threads", threads, "worker threads (default: PSPROG_THREADS or all cores)");

    OutputSink sink;
    app.add_option("--format", sink.format, "output format: csv | json")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--out", sink.out_path, "write the report here instead of stdout");
    app.add_option("--manifest", sink.manifest_path, "write a reproducibility manifest");

    // ---- volume ----
    auto* c_vol = app.add_subcommand("volume", "exact volume of the C_{k,d+1} family");
    int vk = 3, vd = 1;
    std::string variant = "C";
    std::string veps = "0";
    bool v_mc = false, v_json_full = false;
    long long v_samples = 1000000;
    long v_seed = 1;
    c_vol->add_option("--k", vk, "progression length k >= d+2")->required();
    c_vol->add_option("--d", vd, "polynomial degree d >= 1")->required();
    c_vol->add_option("--variant", variant, "C | C- | C+ | Cprime")
        ->check(CLI::IsMember({"C", "C-", "C+", "Cprime"}));
    c_vol->add_option("--eps", veps, "epsilon for the C-/C+ variants (rational)");
    c_vol->add_flag("--mc", v_mc, "also run the Monte-Carlo cross-check");
    c_vol->add_option("--mc-samples", v_samples, "Monte-Carlo sample count");
    c_vol->add_option("--seed", v_seed, "Monte-Carlo seed");
    c_vol->add_flag("--full", v_json_full, "print the polytope JSON (faces, vertices, volume)");

    // ---- detect ----
    auto* c_det = app.add_subcommand("detect", "classify single n or a range");
    std::string d_f = "pow:3/2";
    int dk = 3, dd = 0;
    long dr = 1, d_n = -1, d_begin = -1, d_end = -1;
    bool d_brute = false;
    c_det->add_option("--f", d_f, "function: pow:3/2 xlog:2 x2log:1 x2loglog:1 xlogx");
    c_det->add_option("--k", dk)->required();
    c_det->add_option("--d", dd);
    c_det->add_option("--r", dr);
    c_det->add_option("--n", d_n, "single start n");
    c_det->add_option("--n-begin", d_begin);
    c_det->add_option("--n-end", d_end);
    c_det->add_flag("--brute", d_brute, "also evaluate the floors directly");

    // ---- density ----
    auto* c_den = app.add_subcommand("density", "fixed-r density over an N grid");
    std::string den_f = "pow:3/2";
    int den_k = 3, den_d = 0;
    long den_r = 1;
    std::string den_grid;
    long den_n = 0;
    bool den_accel = false;
    c_den->add_option("--f", den_f);
    c_den->add_option("--k", den_k)->required();
    c_den->add_option("--d", den_d, "degree (default: the function's d)");
    c_den->add_option("--r", den_r);
    c_den->add_option("--n", den_n, "single N");
    c_den->add_option("--n-grid", den_grid, "comma list or log:lo:hi:count");
    c_den->add_flag("--accel", den_accel, "use the criterion classifier as a filter");
    std::string den_svg;
    c_den->add_option("--svg", den_svg, "write an SVG plot of density vs N");

    // ---- short ----
    auto* c_short = app.add_subcommand("short", "density over a short interval [N, N+L)");
    std::string sh_f = "pow:3/2";
    int sh_k = 3;
    long sh_r = 1, sh_n = 0, sh_l = 0;
    c_short->add_option("--f", sh_f);
    c_short->add_option("--k", sh_k)->required();
    c_short->add_option("--r", sh_r);
    c_short->add_option("--n", sh_n)->required();
    c_short->add_option("--L", sh_l)->required();

    // ---- vary-r ----
    auto* c_vr = app.add_subcommand("vary-r", "count progressions over all (n, r)");
    std::string vr_alpha = "3/2";
    int vr_k = 3, vr_d = 1;
    std::string vr_grid;
    c_vr->add_option("--alpha", vr_alpha)->required();
    c_vr->add_option("--k", vr_k)->required();
    c_vr->add_option("--d", vr_d);
    c_vr->add_option("--n-grid", vr_grid)->required();

    // ---- gaps ----
    auto* c_gap = app.add_subcommand("gaps", "gap lengths to the next progression start");
    std::string gp_alpha = "3/2";
    int gp_k = 3;
    long gp_r = 1;
    std::string gp_grid;
    c_gap->add_option("--alpha", gp_alpha)->required();
    c_gap->add_option("--k", gp_k)->required();
    c_gap->add_option("--r", gp_r);
    c_gap->add_option("--x-grid", gp_grid, "comma list or log:lo:hi:count")->required();

    // ---- sweep ----
    auto* c_sw = app.add_subcommand("sweep", "density as a function of alpha at fixed N");
    int sw_k = 3;
    long sw_r = 1, sw_n = 1000;
    std::string sw_grid = "1+i/1000,i=1..999";
    std::string sw_svg;
    c_sw->add_option("--k", sw_k)->required();
    c_sw->add_option("--r", sw_r);
    c_sw->add_option("--n", sw_n)->required();
    c_sw->add_option("--alpha-grid", sw_grid, "B+i/D,i=lo..hi or comma list");
    c_sw->add_option("--svg", sw_svg, "write an SVG line plot");

    // ---- discrepancy ----
    auto* c_dis = app.add_subcommand("discrepancy",
                                     "extreme discrepancy of the (f(n), r f'(n)) orbit");
    std::string di_f = "pow:3/2";
    long di_r = 1, di_n = 1000, di_l = 512;
    std::string di_mode = "auto";
    int di_grid = 1024, di_h = 16, di_bits = 96;
    c_dis->add_option("--f", di_f, "power kind, e.g. pow:3/2");
    c_dis->add_option("--r", di_r);
    c_dis->add_option("--N", di_n)->required();
    c_dis->add_option("--L", di_l)->required();
    c_dis->add_option("--mode", di_mode, "exact | grid | auto")
        ->check(CLI::IsMember({"exact", "grid", "auto"}));
    c_dis->add_option("--grid", di_grid, "grid resolution for grid mode");
    c_dis->add_option("--H", di_h, "frequency cutoff for the ETK bound");
    c_dis->add_option("--bits", di_bits, "working precision for the orbit");

    // ---- xlogx-band ----
    auto* c_xb = app.add_subcommand("xlogx-band", "x log x density band experiment");
    int xb_k = 3;
    long xb_r = 1;
    std::string xb_grid;
    c_xb->add_option("--k", xb_k)->required();
    c_xb->add_option("--r", xb_r);
    c_xb->add_option("--n-grid", xb_grid)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    RunTimer timer;
    ExperimentOptions opts;
    opts.threads = threads;

    try {
        if (c_vol->parsed()) {
            PolytopeLabel label = PolytopeLabel::kC;
            if (variant == "C-") label = PolytopeLabel::kCminus;
            if (variant == "C+") label = PolytopeLabel::kCplus;
            if (variant == "Cprime") label = PolytopeLabel::kCprime;
            Polytope p = build_C(vk, vd, label, parse_rational(veps));
            if (v_json_full) {
                std::string js = polytope_json(p, true, true);
                sink.emit(js, js);
            } else {
                VolumeResult vr = volume_exact(p);
                nlohmann::json j;
                j["k"] = vk;
                j["d"] = vd;
                j["variant"] = variant;
                j["volume"] = format_rational(vr.volume);
                j["volume_decimal"] = to_double(vr.volume);
                j["vertex_count"] = vr.vertex_count;
                j["simplex_count"] = vr.simplex_count;
                j["lower_bound"] = format_rational(lower_bound_volume(vk, vd));
                std::string text = format_rational(vr.volume) + "\n";
                if (v_mc) {
                    auto mc = volume_montecarlo(p, v_samples,
                                                static_cast<std::uint64_t>(v_seed),
                                                threads);
                    j["mc_estimate"] = mc.estimate;
                    j["mc_std_error"] = mc.std_error;
                    char buf[128];
                    std::snprintf(buf, sizeof buf, "mc %.9f +- %.9f\n", mc.estimate,
                                  mc.std_error);
                    text += buf;
                }
                sink.emit(text, j.dump(2) + "\n");
            }
            finish_manifest("volume",
                            {{"k", fmt_long(vk)},
                             {"d", fmt_long(vd)},
                             {"variant", variant},
                             {"eps", veps},
                             {"mc", v_mc ? "1" : "0"},
                             {"mc_samples", fmt_long(static_cast<long>(v_samples))},
                             {"seed", fmt_long(v_seed)}},
                            timer, sink);
        } else if (c_det->parsed()) {
            FunctionSpec f = parse_function(d_f);
            if (dd == 0) dd = f.d;
            ProgressionQuery q(dk, dd, dr, f);
            long lo = d_n >= 0 ? d_n : d_begin;
            long hi = d_n >= 0 ? d_n : d_end;
            if (lo < 0 || hi < lo)
                throw std::invalid_argument("detect: give --n or --n-begin/--n-end");
            std::ostringstream csv;
            csv << "n,verdict,shift,eps" << (d_brute ? ",brute\n" : "\n");
            nlohmann::json rows = nlohmann::json::array();
            for (long n = lo; n <= hi; ++n) {
                auto c = criterion_classify(q, n);
                std::string shift;
                if (c.shift) {
                    for (size_t i = 0; i < c.shift->size(); ++i)
                        shift += (i ? ";" : "") + std::to_string((*c.shift)[i]);
                }
                csv << n << ',' << to_string(c.verdict) << ',' << shift << ','
                    << format_decimal(c.eps_used, 6);
                nlohmann::json row;
                row["n"] = n;
                row["verdict"] = to_string(c.verdict);
                row["shift"] = shift;
                row["eps"] = to_double(c.eps_used);
                if (d_brute) {
                    bool b = brute_force_test(q, n);
                    csv << ',' << (b ? 1 : 0);
                    row["brute"] = b;
                }
                csv << '\n';
                rows.push_back(row);
            }
            nlohmann::json j;
            j["function"] = f.to_string();
            j["k"] = dk;
            j["d"] = dd;
            j["r"] = dr;
            j["rows"] = rows;
            sink.emit(csv.str(), j.dump(2) + "\n");
            finish_manifest("detect",
                            {{"f", d_f},
                             {"k", fmt_long(dk)},
                             {"d", fmt_long(dd)},
                             {"r", fmt_long(dr)},
                             {"n_begin", fmt_long(lo)},
                             {"n_end", fmt_long(hi)},
                             {"brute", d_brute ? "1" : "0"}},
                            timer, sink);
        } else if (c_den->parsed()) {
            FunctionSpec f = parse_function(den_f);
            int d = den_d > 0 ? den_d : f.d;
            ProgressionQuery q(den_k, d, den_r, f);
            std::vector<long> grid =
                den_grid.empty() ? std::vector<long>{den_n} : parse_long_grid(den_grid);
            opts.use_criterion = den_accel;
            auto rep = density_fixed_r(q, grid, opts);
            sink.emit(density_csv(rep), density_json(rep) + "\n");
            if (!den_svg.empty()) {
                PlotSeries s;
                s.name = "k=" + std::to_string(den_k) + " r=" + std::to_string(den_r);
                for (size_t i = 0; i < rep.grid.size(); ++i)
                    s.points.emplace_back(static_cast<double>(rep.grid[i]),
                                          to_double(rep.densities[i]));
                sink.svg_path = den_svg;
                sink.emit_svg(svg_line_plot("density vs N (" + rep.function + ")",
                                            "N", "density", {s},
                                            {to_double(rep.target)}));
            }
            finish_manifest("density",
                            {{"f", den_f},
                             {"k", fmt_long(den_k)},
                             {"d", fmt_long(d)},
                             {"r", fmt_long(den_r)},
                             {"n_grid", den_grid.empty() ? fmt_long(den_n) : den_grid},
                             {"accel", den_accel ? "1" : "0"}},
                            timer, sink);
        } else if (c_short->parsed()) {
            FunctionSpec f = parse_function(sh_f);
            ProgressionQuery q(sh_k, f.d, sh_r, f);
            auto rep = density_short_interval(q, sh_n, sh_l, opts);
            sink.emit(short_interval_csv(rep), short_interval_json(rep) + "\n");
            finish_manifest("short",
                            {{"f", sh_f},
                             {"k", fmt_long(sh_k)},
                             {"r", fmt_long(sh_r)},
                             {"n", fmt_long(sh_n)},
                             {"L", fmt_long(sh_l)}},
                            timer, sink);
        } else if (c_vr->parsed()) {
            auto rep = count_variable_r(parse_rational(vr_alpha), vr_k, vr_d,
                                        parse_long_grid(vr_grid), opts);
            sink.emit(variable_r_csv(rep), variable_r_json(rep) + "\n");
            finish_manifest("vary-r",
                            {{"alpha", vr_alpha},
                             {"k", fmt_long(vr_k)},
                             {"d", fmt_long(vr_d)},
                             {"n_grid", vr_grid}},
                            timer, sink);
        } else if (c_gap->parsed()) {
            auto rep = gap_lengths(parse_rational(gp_alpha), gp_k, gp_r,
                                   parse_long_grid(gp_grid), opts);
            sink.emit(gaps_csv(rep), gaps_json(rep) + "\n");
            finish_manifest("gaps",
                            {{"alpha", gp_alpha},
                             {"k", fmt_long(gp_k)},
                             {"r", fmt_long(gp_r)},
                             {"x_grid", gp_grid}},
                            timer, sink);
        } else if (c_sw->parsed()) {
            auto rep = alpha_sweep(sw_k, sw_r, sw_n, parse_alpha_grid(sw_grid), opts);
            sink.emit(sweep_csv(rep), sweep_json(rep) + "\n");
            if (!sw_svg.empty()) {
                PlotSeries s;
                s.name = "k=" + std::to_string(sw_k) + " r=" + std::to_string(sw_r) +
                         " N=" + std::to_string(sw_n);
                for (size_t i = 0; i < rep.alpha_grid.size(); ++i)
                    s.points.emplace_back(to_double(rep.alpha_grid[i]),
                                          rep.densities[i]);
                sink.svg_path = sw_svg;
                sink.emit_svg(svg_line_plot("density sweep over alpha", "alpha",
                                            "density", {s},
                                            {1.0 / (sw_k - 1)}));
            }
            finish_manifest("sweep",
                            {{"k", fmt_long(sw_k)},
                             {"r", fmt_long(sw_r)},
                             {"n", fmt_long(sw_n)},
                             {"alpha_grid", sw_grid}},
                            timer, sink);
        } else if (c_dis->parsed()) {
            FunctionSpec f = parse_function(di_f);
            if (f.kind != FunctionKind::kPower)
                throw std::invalid_argument("discrepancy: --f must be a pow: kind");
            PointSet2D ps = orbit(f, di_r, di_n, di_l, di_bits);
            DiscrepancyMode mode = DiscrepancyMode::kExact;
            if (di_mode == "grid" ||
                (di_mode == "auto" && di_l > kExactDiscrepancyCap))
                mode = DiscrepancyMode::kGrid;
            auto dr = extreme_discrepancy(ps, mode, di_grid, threads);
            auto etk = etk_bound(ps, di_h, threads);
            auto tb = theory_bound(f.param, di_r, di_n, di_l);
            double iso = isotropic_bound(std::min(1.0, dr.value + dr.error_radius), 2);
            std::string js = discrepancy_json(ps, dr, etk, tb, iso, f.param) + "\n";
            sink.emit(js, js);
            finish_manifest("discrepancy",
                            {{"f", di_f},
                             {"r", fmt_long(di_r)},
                             {"N", fmt_long(di_n)},
                             {"L", fmt_long(di_l)},
                             {"mode", di_mode},
                             {"grid", fmt_long(di_grid)},
                             {"H", fmt_long(di_h)},
                             {"bits", fmt_long(di_bits)}},
                            timer, sink);
        } else if (c_xb->parsed()) {
            auto rep = xlogx_band(xb_k, xb_r, parse_long_grid(xb_grid), opts);
            sink.emit(xlogx_csv(rep), xlogx_json(rep) + "\n");
            finish_manifest("xlogx-band",
                            {{"k", fmt_long(xb_k)},
                             {"r", fmt_long(xb_r)},
                             {"n_grid", xb_grid}},
                            timer, sink);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "computation error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
