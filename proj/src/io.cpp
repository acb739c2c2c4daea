#include "psprog/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace psprog {

namespace {

std::string fmt(double v, const char* spec = "%.15g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string hex64(std::uint64_t v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string density_csv(const DensityReport& rep) {
    std::ostringstream out;
    out << "N,count,density,density_decimal,target,target_decimal,bound_F\n";
    for (size_t i = 0; i < rep.grid.size(); ++i) {
        out << rep.grid[i] << ',' << rep.counts[i] << ','
            << format_rational(rep.densities[i]) << ','
            << format_decimal(rep.densities[i]) << ','
            << format_rational(rep.target) << ',' << format_decimal(rep.target)
            << ',';
        if (i < rep.bound_big_o.size()) out << fmt(rep.bound_big_o[i]);
        out << '\n';
    }
    return out.str();
}

std::string short_interval_csv(const ShortIntervalReport& rep) {
    std::ostringstream out;
    out << "N,L,count,density,density_decimal,target,bound_case1,bound_case2,"
           "bound_case3,bound_best,bound_best_case\n";
    out << rep.N << ',' << rep.L << ',' << rep.count << ','
        << format_rational(rep.density) << ',' << format_decimal(rep.density) << ','
        << format_rational(rep.target) << ',' << fmt(rep.bound_case1) << ','
        << fmt(rep.bound_case2) << ',' << fmt(rep.bound_case3) << ','
        << fmt(rep.bound_best) << ',' << rep.bound_best_case << '\n';
    return out.str();
}

std::string variable_r_csv(const VariableRReport& rep) {
    std::ostringstream out;
    out << "N,pairs,normalized,a_tilde,b_tilde,prune_from\n";
    for (size_t i = 0; i < rep.grid.size(); ++i) {
        out << rep.grid[i] << ',' << rep.pair_counts[i] << ','
            << fmt(rep.normalized[i]) << ',' << fmt(rep.a_tilde) << ','
            << fmt(rep.b_tilde) << ',' << rep.prune_from << '\n';
    }
    return out.str();
}

std::string gaps_csv(const GapReport& rep) {
    std::ostringstream out;
    out << "x,L,censored,ratio_pow,ratio_conj,appendix_lower\n";
    const std::string lower =
        rep.k >= 4 ? format_rational(rep.appendix_lower) : std::string();
    for (size_t i = 0; i < rep.x_grid.size(); ++i) {
        out << rep.x_grid[i] << ',' << rep.lengths[i] << ','
            << (rep.censored[i] ? 1 : 0) << ',' << fmt(rep.ratios[i]) << ',';
        if (!rep.ratios_conj.empty()) out << fmt(rep.ratios_conj[i]);
        out << ',' << lower << '\n';
    }
    return out.str();
}

std::string sweep_csv(const SweepReport& rep) {
    std::ostringstream out;
    out << "alpha,alpha_decimal,density\n";
    for (size_t i = 0; i < rep.alpha_grid.size(); ++i) {
        out << format_rational(rep.alpha_grid[i]) << ','
            << format_decimal(rep.alpha_grid[i]) << ',' << fmt(rep.densities[i])
            << '\n';
    }
    return out.str();
}

std::string xlogx_csv(const XLogXBandReport& rep) {
    std::ostringstream out;
    out << "N,count,density,density_decimal,band_lo,band_hi\n";
    for (size_t i = 0; i < rep.grid.size(); ++i) {
        out << rep.grid[i] << ',' << rep.counts[i] << ','
            << format_rational(rep.densities[i]) << ','
            << format_decimal(rep.densities[i]) << ',' << fmt(rep.band_lo_outer)
            << ',' << fmt(rep.band_hi_outer) << '\n';
    }
    return out.str();
}

namespace {

nlohmann::json density_json_obj(const DensityReport& rep) {
    nlohmann::json j;
    j["function"] = rep.function;
    j["k"] = rep.k;
    j["d"] = rep.d;
    j["r"] = rep.r;
    j["target"] = format_rational(rep.target);
    j["target_decimal"] = to_double(rep.target);
    j["target_is_limit"] = rep.target_is_limit;
    nlohmann::json rows = nlohmann::json::array();
    for (size_t i = 0; i < rep.grid.size(); ++i) {
        nlohmann::json row;
        row["N"] = rep.grid[i];
        row["count"] = rep.counts[i];
        row["density"] = format_rational(rep.densities[i]);
        row["density_decimal"] = to_double(rep.densities[i]);
        if (i < rep.bound_big_o.size()) row["bound_F"] = rep.bound_big_o[i];
        rows.push_back(row);
    }
    j["rows"] = rows;
    return j;
}

}  // namespace

std::string density_json(const DensityReport& rep) {
    return density_json_obj(rep).dump(2);
}

std::string short_interval_json(const ShortIntervalReport& rep) {
    nlohmann::json j;
    j["function"] = rep.function;
    j["k"] = rep.k;
    j["r"] = rep.r;
    j["N"] = rep.N;
    j["L"] = rep.L;
    j["count"] = rep.count;
    j["density"] = format_rational(rep.density);
    j["density_decimal"] = to_double(rep.density);
    j["target"] = format_rational(rep.target);
    auto put = [&](const char* key, double v) {
        if (std::isnan(v))
            j[key] = nullptr;
        else
            j[key] = v;
    };
    put("bound_case1", rep.bound_case1);
    put("bound_case2", rep.bound_case2);
    put("bound_case3", rep.bound_case3);
    j["bound_best"] = rep.bound_best;
    j["bound_best_case"] = rep.bound_best_case;
    return j.dump(2);
}

std::string variable_r_json(const VariableRReport& rep) {
    nlohmann::json j;
    j["alpha"] = format_rational(rep.alpha);
    j["k"] = rep.k;
    j["d"] = rep.d;
    j["a_tilde"] = rep.a_tilde;
    j["b_tilde"] = rep.b_tilde;
    j["prune_from"] = rep.prune_from;
    nlohmann::json rows = nlohmann::json::array();
    for (size_t i = 0; i < rep.grid.size(); ++i) {
        nlohmann::json row;
        row["N"] = rep.grid[i];
        row["pairs"] = rep.pair_counts[i];
        row["normalized"] = rep.normalized[i];
        rows.push_back(row);
    }
    j["rows"] = rows;
    return j.dump(2);
}

std::string gaps_json(const GapReport& rep) {
    nlohmann::json j;
    j["alpha"] = format_rational(rep.alpha);
    j["k"] = rep.k;
    j["r"] = rep.r;
    if (rep.k >= 4) j["appendix_lower"] = format_rational(rep.appendix_lower);
    nlohmann::json rows = nlohmann::json::array();
    for (size_t i = 0; i < rep.x_grid.size(); ++i) {
        nlohmann::json row;
        row["x"] = rep.x_grid[i];
        row["L"] = rep.lengths[i];
        row["censored"] = static_cast<bool>(rep.censored[i]);
        row["ratio_pow"] = rep.ratios[i];
        if (!rep.ratios_conj.empty()) row["ratio_conj"] = rep.ratios_conj[i];
        rows.push_back(row);
    }
    j["rows"] = rows;
    return j.dump(2);
}

std::string sweep_json(const SweepReport& rep) {
    nlohmann::json j;
    j["k"] = rep.k;
    j["r"] = rep.r;
    j["N"] = rep.N;
    nlohmann::json rows = nlohmann::json::array();
    for (size_t i = 0; i < rep.alpha_grid.size(); ++i) {
        nlohmann::json row;
        row["alpha"] = format_rational(rep.alpha_grid[i]);
        row["alpha_decimal"] = to_double(rep.alpha_grid[i]);
        row["density"] = rep.densities[i];
        rows.push_back(row);
    }
    j["rows"] = rows;
    return j.dump(2);
}

std::string xlogx_json(const XLogXBandReport& rep) {
    nlohmann::json j;
    j["k"] = rep.k;
    j["r"] = rep.r;
    j["band_lo"] = rep.band_lo_outer;
    j["band_lo_inner"] = rep.band_lo_inner;
    j["band_hi_inner"] = rep.band_hi_inner;
    j["band_hi"] = rep.band_hi_outer;
    nlohmann::json rows = nlohmann::json::array();
    for (size_t i = 0; i < rep.grid.size(); ++i) {
        nlohmann::json row;
        row["N"] = rep.grid[i];
        row["count"] = rep.counts[i];
        row["density"] = format_rational(rep.densities[i]);
        row["density_decimal"] = to_double(rep.densities[i]);
        rows.push_back(row);
    }
    j["rows"] = rows;
    return j.dump(2);
}

std::string discrepancy_json(const PointSet2D& ps, const DiscrepancyResult& dr,
                             const EtkResult& etk, const TheoryBound& tb,
                             double isotropic, const Rational& alpha) {
    nlohmann::json j;
    j["L"] = ps.L;
    j["N"] = ps.N;
    j["alpha"] = format_rational(alpha);
    j["r"] = ps.r;
    j["function"] = ps.function;
    j["coord_error"] = ps.coord_error;
    j["unresolved"] = ps.unresolved;
    nlohmann::json d;
    d["value"] = dr.value;
    d["mode"] = dr.mode == DiscrepancyMode::kExact ? "exact" : "grid";
    d["error_radius"] = dr.error_radius;
    if (!dr.exact_fraction.empty()) d["fraction"] = dr.exact_fraction;
    if (dr.grid_size > 0) d["grid"] = dr.grid_size;
    j["D"] = d;
    nlohmann::json e;
    e["H"] = etk.H;
    e["value"] = etk.value;
    e["fp_error"] = etk.fp_error;
    e["admissible_constant"] = kEtkConstant;
    j["etk"] = e;
    nlohmann::json t;
    t["case"] = tb.best_case;
    t["value"] = tb.best;
    t["case1"] = tb.case1;
    if (!std::isnan(tb.case2)) t["case2"] = tb.case2;
    if (!std::isnan(tb.case3)) t["case3"] = tb.case3;
    j["theory"] = t;
    j["isotropic"] = isotropic;
    return j.dump(2);
}

std::string svg_line_plot(const std::string& title, const std::string& x_label,
                          const std::string& y_label,
                          const std::vector<PlotSeries>& series,
                          const std::vector<double>& hlines) {
    constexpr double W = 960, H = 540;
    constexpr double ML = 70, MR = 24, MT = 34, MB = 48;
    const double PW = W - ML - MR, PH = H - MT - MB;

    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series)
        for (const auto& [x, y] : s.points) {
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    for (double h : hlines) {
        ymin = std::min(ymin, h);
        ymax = std::max(ymax, h);
    }
    if (xmin > xmax) {
        xmin = 0;
        xmax = 1;
    }
    if (ymin > ymax) {
        ymin = 0;
        ymax = 1;
    }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    auto px = [&](double x) { return ML + (x - xmin) / (xmax - xmin) * PW; };
    auto py = [&](double y) { return MT + PH - (y - ymin) / (ymax - ymin) * PH; };

    static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b"};
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << W << " "
        << H << "\" font-family=\"sans-serif\" font-size=\"13\">\n";
    out << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\">" << title
        << "</text>\n";
    out << "<rect x=\"" << ML << "\" y=\"" << MT << "\" width=\"" << PW
        << "\" height=\"" << PH << "\" fill=\"none\" stroke=\"#333\"/>\n";
    for (int t = 0; t <= 6; ++t) {
        double xv = xmin + (xmax - xmin) * t / 6;
        double yv = ymin + (ymax - ymin) * t / 6;
        out << "<line x1=\"" << px(xv) << "\" y1=\"" << MT + PH << "\" x2=\""
            << px(xv) << "\" y2=\"" << MT + PH + 5 << "\" stroke=\"#333\"/>\n";
        out << "<text x=\"" << px(xv) << "\" y=\"" << MT + PH + 18
            << "\" text-anchor=\"middle\">" << fmt(xv, "%.4g") << "</text>\n";
        out << "<line x1=\"" << ML - 5 << "\" y1=\"" << py(yv) << "\" x2=\"" << ML
            << "\" y2=\"" << py(yv) << "\" stroke=\"#333\"/>\n";
        out << "<text x=\"" << ML - 8 << "\" y=\"" << py(yv) + 4
            << "\" text-anchor=\"end\">" << fmt(yv, "%.4g") << "</text>\n";
    }
    out << "<text x=\"" << ML + PW / 2 << "\" y=\"" << H - 8
        << "\" text-anchor=\"middle\">" << x_label << "</text>\n";
    out << "<text x=\"16\" y=\"" << MT + PH / 2
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << MT + PH / 2
        << ")\">" << y_label << "</text>\n";
    for (double h : hlines) {
        out << "<line x1=\"" << ML << "\" y1=\"" << py(h) << "\" x2=\"" << ML + PW
            << "\" y2=\"" << py(h)
            << "\" stroke=\"#888\" stroke-dasharray=\"5,4\"/>\n";
    }
    int ci = 0;
    for (const auto& s : series) {
        const char* color = kColors[ci % 6];
        out << "<polyline fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1\" points=\"";
        for (const auto& [x, y] : s.points)
            out << fmt(px(x), "%.2f") << ',' << fmt(py(y), "%.2f") << ' ';
        out << "\"/>\n";
        if (!s.name.empty()) {
            out << "<text x=\"" << ML + 10 << "\" y=\"" << MT + 16 + 16 * ci
                << "\" fill=\"" << color << "\">" << s.name << "</text>\n";
        }
        ++ci;
    }
    out << "</svg>\n";
    return out.str();
}

std::string manifest_json(const RunManifest& m) {
    nlohmann::json j;
    j["command"] = m.command;
    nlohmann::json cfg = nlohmann::json::object();
    for (const auto& [k, v] : m.config) cfg[k] = v;
    j["config"] = cfg;
    j["version"] = m.version;
    j["started_at"] = m.started_at;
    j["finished_at"] = m.finished_at;
    j["wall_seconds"] = m.wall_seconds;
    j["input_hash"] = hex64(config_hash(m.config));
    nlohmann::json outs = nlohmann::json::array();
    for (const auto& [path, hash] : m.outputs) {
        nlohmann::json o;
        o["path"] = path;
        o["fnv64"] = hash;
        outs.push_back(o);
    }
    j["outputs"] = outs;
    return j.dump(2);
}

std::uint64_t config_hash(
    const std::vector<std::pair<std::string, std::string>>& config) {
    std::string canon;
    for (const auto& [k, v] : config) {
        canon += k;
        canon += '=';
        canon += v;
        canon += '\n';
    }
    return fnv1a64(canon);
}

std::string iso8601_utc_now() {
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace psprog
