#include <doctest.h>

#include "psprog/io.hpp"

using namespace psprog;

TEST_CASE("fnv1a64 known values") {
    CHECK(fnv1a64("") == 14695981039346656037ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("hello") != fnv1a64("hellp"));
}

TEST_CASE("csv shapes carry both exact and decimal columns") {
    ProgressionQuery q(3, 1, 1, FunctionSpec::power(make_rational(3, 2)));
    auto rep = density_fixed_r(q, {200, 400});
    auto csv = density_csv(rep);
    CHECK(csv.rfind("N,count,density,density_decimal,target,", 0) == 0);
    CHECK(csv.find("1/2,0.5") != std::string::npos);
    auto js = density_json(rep);
    CHECK(js.find("\"target\": \"1/2\"") != std::string::npos);

    auto gaps = gap_lengths(make_rational(3, 2), 3, 1, {100, 200});
    auto gcsv = gaps_csv(gaps);
    CHECK(gcsv.rfind("x,L,censored,", 0) == 0);
    CHECK(gcsv.find("\n100,") != std::string::npos);
}

TEST_CASE("svg plot is self-contained") {
    PlotSeries s;
    s.name = "k=3 r=1";
    for (int i = 0; i <= 10; ++i)
        s.points.emplace_back(1.0 + i / 10.0, 0.5 + 0.1 * ((i % 3) - 1));
    auto svg = svg_line_plot("density sweep", "alpha", "density", {s}, {0.5});
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("<polyline") != std::string::npos);
    CHECK(svg.find("stroke-dasharray") != std::string::npos);  // the hline
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("density sweep") != std::string::npos);
}

TEST_CASE("manifest json and config hash stability") {
    RunManifest m;
    m.command = "density";
    m.config = {{"f", "pow:3/2"}, {"k", "3"}, {"n", "1000"}};
    m.version = "0.1.0";
    m.started_at = "2026-01-01T00:00:00Z";
    m.finished_at = "2026-01-01T00:00:01Z";
    m.wall_seconds = 1.0;
    m.outputs = {{"out.csv", "00deadbeef001122"}};
    auto js = manifest_json(m);
    CHECK(js.find("\"command\": \"density\"") != std::string::npos);
    CHECK(js.find("\"input_hash\"") != std::string::npos);
    CHECK(js.find("out.csv") != std::string::npos);
    CHECK(config_hash(m.config) == config_hash(m.config));
    auto other = m.config;
    other[2].second = "2000";
    CHECK(config_hash(m.config) != config_hash(other));
}
