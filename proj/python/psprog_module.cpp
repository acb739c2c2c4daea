#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "psprog/discrepancy.hpp"
#include "psprog/experiments.hpp"
#include "psprog/io.hpp"

namespace py = pybind11;
using namespace psprog;

namespace {

py::int_ big(const Integer& z) {
    return py::reinterpret_steal<py::int_>(
        PyLong_FromString(z.get_str().c_str(), nullptr, 10));
}

PolytopeLabel label_from(const std::string& variant) {
    if (variant == "C") return PolytopeLabel::kC;
    if (variant == "C-") return PolytopeLabel::kCminus;
    if (variant == "C+") return PolytopeLabel::kCplus;
    if (variant == "Cprime") return PolytopeLabel::kCprime;
    throw std::invalid_argument("variant must be C, C-, C+ or Cprime");
}

ProgressionQuery make_query(const std::string& f, int k, int d, long r) {
    FunctionSpec spec = parse_function(f);
    return ProgressionQuery(k, d > 0 ? d : spec.d, r, spec);
}

}  // namespace

PYBIND11_MODULE(_psprog, m) {
    m.doc() = "polynomial progressions in floor(f(n)) sequences: exact floors, "
              "polytope volumes, densities, gaps, discrepancy";
    m.attr("__version__") = "0.1.0";

    m.def("stirling2", [](int l, int i) { return big(stirling2(l, i).get_num()); },
          py::arg("l"), py::arg("i"),
          "Stirling number of the second kind S(l, i)");
    m.def("binomial", [](long n, long l) { return big(binomial(n, l).get_num()); },
          py::arg("n"), py::arg("l"));

    m.def("floor_f",
          [](const std::string& f, long x) { return big(floor_f(parse_function(f), x)); },
          py::arg("f"), py::arg("x"), "exact floor of f(x), e.g. floor_f('pow:3/2', 3)");
    m.def("exact_integer_check",
          [](const std::string& f, long x) -> py::object {
              auto v = exact_integer_check(parse_function(f), x);
              if (!v) return py::none();
              return big(*v);
          },
          py::arg("f"), py::arg("x"));
    m.def("eval_enclosure",
          [](const std::string& f, int order, long x, int bits) {
              auto e = eval(parse_function(f), order, x, bits);
              return py::make_tuple(e.lower_double(), e.upper_double());
          },
          py::arg("f"), py::arg("order"), py::arg("x"), py::arg("bits") = 128,
          "certified enclosure of f^(order)(x) as (lower, upper)");

    m.def("is_in_pkd",
          [](const std::vector<long long>& seq, int d) {
              auto r = is_in_pkd(seq, d);
              py::dict out;
              out["in_pkd"] = r.in_pkd;
              out["newton"] = r.newton_coeffs;
              return out;
          },
          py::arg("seq"), py::arg("d"));

    m.def("brute_force_test",
          [](const std::string& f, int k, int d, long r, long n) {
              return brute_force_test(make_query(f, k, d, r), n);
          },
          py::arg("f"), py::arg("k"), py::arg("d"), py::arg("r"), py::arg("n"));

    m.def("classify",
          [](const std::string& f, int k, int d, long r, long n) {
              auto c = criterion_classify(make_query(f, k, d, r), n);
              py::dict out;
              out["verdict"] = to_string(c.verdict);
              if (c.shift)
                  out["shift"] = *c.shift;
              else
                  out["shift"] = py::none();
              out["eps"] = to_double(c.eps_used);
              return out;
          },
          py::arg("f"), py::arg("k"), py::arg("d"), py::arg("r"), py::arg("n"));

    m.def("volume_exact",
          [](int k, int d, const std::string& variant, const std::string& eps) {
              auto vr = volume_exact(build_C(k, d, label_from(variant),
                                             parse_rational(eps)));
              py::dict out;
              out["volume"] = format_rational(vr.volume);
              out["value"] = to_double(vr.volume);
              out["vertex_count"] = vr.vertex_count;
              out["simplex_count"] = vr.simplex_count;
              return out;
          },
          py::arg("k"), py::arg("d"), py::arg("variant") = "C", py::arg("eps") = "0");

    m.def("volume_montecarlo",
          [](int k, int d, long long samples, long seed, const std::string& variant,
             const std::string& eps) {
              auto mc = volume_montecarlo(
                  build_C(k, d, label_from(variant), parse_rational(eps)), samples,
                  static_cast<std::uint64_t>(seed));
              py::dict out;
              out["estimate"] = mc.estimate;
              out["std_error"] = mc.std_error;
              out["hits"] = mc.hits;
              return out;
          },
          py::arg("k"), py::arg("d"), py::arg("samples") = 1000000,
          py::arg("seed") = 1, py::arg("variant") = "C", py::arg("eps") = "0");

    m.def("lower_bound",
          [](int k, int d) { return format_rational(lower_bound_volume(k, d)); },
          py::arg("k"), py::arg("d"));

    m.def("density",
          [](const std::string& f, int k, long r, const std::vector<long>& grid,
             int d, bool accel, int threads) {
              ExperimentOptions opts;
              opts.use_criterion = accel;
              opts.threads = threads;
              auto rep = density_fixed_r(make_query(f, k, d, r), grid, opts);
              py::dict out;
              out["target"] = format_rational(rep.target);
              out["target_value"] = to_double(rep.target);
              out["counts"] = rep.counts;
              py::list dens;
              for (const auto& q : rep.densities) dens.append(to_double(q));
              out["densities"] = dens;
              return out;
          },
          py::arg("f"), py::arg("k"), py::arg("r"), py::arg("grid"),
          py::arg("d") = 0, py::arg("accel") = false, py::arg("threads") = 0);

    m.def("short_interval",
          [](const std::string& f, int k, long r, long N, long L) {
              auto rep = density_short_interval(make_query(f, k, 0, r), N, L);
              py::dict out;
              out["count"] = rep.count;
              out["density"] = to_double(rep.density);
              out["bound_best"] = rep.bound_best;
              out["bound_best_case"] = rep.bound_best_case;
              return out;
          },
          py::arg("f"), py::arg("k"), py::arg("r"), py::arg("N"), py::arg("L"));

    m.def("vary_r",
          [](const std::string& alpha, int k, int d, const std::vector<long>& grid) {
              auto rep = count_variable_r(parse_rational(alpha), k, d, grid);
              py::dict out;
              out["pairs"] = rep.pair_counts;
              out["normalized"] = rep.normalized;
              out["a_tilde"] = rep.a_tilde;
              out["b_tilde"] = rep.b_tilde;
              out["prune_from"] = rep.prune_from;
              return out;
          },
          py::arg("alpha"), py::arg("k"), py::arg("d"), py::arg("grid"));

    m.def("gaps",
          [](const std::string& alpha, int k, long r, const std::vector<long>& xs) {
              auto rep = gap_lengths(parse_rational(alpha), k, r, xs);
              py::dict out;
              out["lengths"] = rep.lengths;
              out["censored"] = std::vector<int>(rep.censored.begin(), rep.censored.end());
              out["ratios"] = rep.ratios;
              if (k >= 4) out["appendix_lower"] = to_double(rep.appendix_lower);
              return out;
          },
          py::arg("alpha"), py::arg("k"), py::arg("r"), py::arg("x_grid"));

    m.def("sweep",
          [](int k, long r, long N, const std::vector<std::string>& alphas,
             int threads) {
              std::vector<Rational> grid;
              grid.reserve(alphas.size());
              for (const auto& a : alphas) grid.push_back(parse_rational(a));
              ExperimentOptions opts;
              opts.threads = threads;
              auto rep = alpha_sweep(k, r, N, grid, opts);
              return rep.densities;
          },
          py::arg("k"), py::arg("r"), py::arg("N"), py::arg("alphas"),
          py::arg("threads") = 0);

    m.def("xlogx_band",
          [](int k, long r, const std::vector<long>& grid) {
              auto rep = xlogx_band(k, r, grid);
              py::dict out;
              py::list dens;
              for (const auto& q : rep.densities) dens.append(to_double(q));
              out["densities"] = dens;
              out["band_lo"] = rep.band_lo_outer;
              out["band_hi"] = rep.band_hi_outer;
              return out;
          },
          py::arg("k"), py::arg("r"), py::arg("grid"));

    m.def("discrepancy",
          [](const std::string& f, long r, long N, long L, const std::string& mode,
             int grid, int H, int bits) {
              FunctionSpec spec = parse_function(f);
              PointSet2D ps = orbit(spec, r, N, L, bits);
              DiscrepancyMode dm = DiscrepancyMode::kExact;
              if (mode == "grid" || (mode == "auto" && L > kExactDiscrepancyCap))
                  dm = DiscrepancyMode::kGrid;
              auto dr = extreme_discrepancy(ps, dm, grid);
              auto etk = etk_bound(ps, H);
              py::dict out;
              out["D"] = dr.value;
              out["error_radius"] = dr.error_radius;
              out["mode"] = dr.mode == DiscrepancyMode::kExact ? "exact" : "grid";
              out["etk"] = etk.value;
              out["etk_constant"] = kEtkConstant;
              out["isotropic"] =
                  isotropic_bound(std::min(1.0, dr.value + dr.error_radius), 2);
              if (spec.kind == FunctionKind::kPower) {
                  auto tb = theory_bound(spec.param, r, N, L);
                  out["theory_best"] = tb.best;
                  out["theory_case"] = tb.best_case;
              }
              return out;
          },
          py::arg("f"), py::arg("r"), py::arg("N"), py::arg("L"),
          py::arg("mode") = "auto", py::arg("grid") = 1024, py::arg("H") = 16,
          py::arg("bits") = 96);
}
