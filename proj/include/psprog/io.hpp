#ifndef PSPROG_IO_HPP
#define PSPROG_IO_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "psprog/discrepancy.hpp"
#include "psprog/experiments.hpp"

namespace psprog {

std::uint64_t fnv1a64(const std::string& bytes);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

// CSV renderings: header line + typed columns; rationals appear both as
// "p/q" and as a 15-significant-digit decimal column.
std::string density_csv(const DensityReport& rep);
std::string short_interval_csv(const ShortIntervalReport& rep);
std::string variable_r_csv(const VariableRReport& rep);
std::string gaps_csv(const GapReport& rep);
std::string sweep_csv(const SweepReport& rep);
std::string xlogx_csv(const XLogXBandReport& rep);

// JSON renderings of the same reports.
std::string density_json(const DensityReport& rep);
std::string short_interval_json(const ShortIntervalReport& rep);
std::string variable_r_json(const VariableRReport& rep);
std::string gaps_json(const GapReport& rep);
std::string sweep_json(const SweepReport& rep);
std::string xlogx_json(const XLogXBandReport& rep);
std::string discrepancy_json(const PointSet2D& ps, const DiscrepancyResult& dr,
                             const EtkResult& etk, const TheoryBound& tb,
                             double isotropic, const Rational& alpha);

struct PlotSeries {
    std::string name;
    std::vector<std::pair<double, double>> points;
};

// Self-contained SVG line/scatter plot (no external renderer).
std::string svg_line_plot(const std::string& title, const std::string& x_label,
                          const std::string& y_label,
                          const std::vector<PlotSeries>& series,
                          const std::vector<double>& hlines = {});

struct RunManifest {
    std::string command;
    std::vector<std::pair<std::string, std::string>> config;  // resolved key=value
    std::string version;
    std::string started_at;
    std::string finished_at;
    double wall_seconds = 0;
    std::vector<std::pair<std::string, std::string>> outputs;  // path -> fnv64 hex
};

std::string manifest_json(const RunManifest& m);

// Canonical hash of the resolved configuration (order-sensitive).
std::uint64_t config_hash(const std::vector<std::pair<std::string, std::string>>& config);

std::string iso8601_utc_now();

}  // namespace psprog

#endif  // PSPROG_IO_HPP
