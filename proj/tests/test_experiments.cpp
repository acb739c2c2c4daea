#include <doctest.h>

#include <cmath>

#include "psprog/experiments.hpp"

using namespace psprog;

namespace {

ProgressionQuery q32(int k = 3, long r = 1) {
    return ProgressionQuery(k, 1, r, FunctionSpec::power(make_rational(3, 2)));
}

}  // namespace

TEST_CASE("density report basics and target") {
    auto rep = density_fixed_r(q32(), {100, 1000, 5000});
    CHECK(rep.target == make_rational(1, 2));
    CHECK(rep.counts.size() == 3);
    CHECK(rep.counts[0] <= rep.counts[1]);
    CHECK(rep.counts[1] <= rep.counts[2]);
    for (const auto& d : rep.densities) {
        CHECK(d >= 0);
        CHECK(d <= 1);
    }
    // Already near 1/2 at N = 5000.
    CHECK(std::abs(to_double(rep.densities[2]) - 0.5) < 0.05);
    CHECK(rep.bound_big_o.size() == 3);

    auto rep4 = density_fixed_r(q32(4), {2000});
    CHECK(rep4.target == make_rational(1, 3));
}

TEST_CASE("criterion acceleration is a pure optimization") {
    ExperimentOptions plain;
    ExperimentOptions accel;
    accel.use_criterion = true;
    for (int k : {3, 4}) {
        auto a = density_fixed_r(q32(k), {200, 600, 1200}, plain);
        auto b = density_fixed_r(q32(k), {200, 600, 1200}, accel);
        CHECK(a.counts == b.counts);
    }
}

TEST_CASE("short interval density and window additivity") {
    const long N = 5000, L = 500;
    auto left = density_short_interval(q32(), N, L);
    auto right = density_short_interval(q32(), N + L, L);
    auto both = density_short_interval(q32(), N, 2 * L);
    CHECK(left.count + right.count == both.count);

    // L = N splits a long window into two density windows.
    auto d2 = density_fixed_r(q32(), {N, 2 * N});
    auto tail = density_short_interval(q32(), N + 1, N);
    CHECK(d2.counts[1] - d2.counts[0] == tail.count);
}

TEST_CASE("short interval bound-case selection follows alpha") {
    auto qa = [](const char* a) {
        return ProgressionQuery(3, 1, 1, FunctionSpec::power(parse_rational(a)));
    };
    auto r12 = density_short_interval(qa("1.2"), 10000, 10000);
    CHECK(r12.bound_best_case == 1);
    auto r14 = density_short_interval(qa("1.4"), 10000, 10000);
    CHECK(r14.bound_best_case == 2);
    auto r16 = density_short_interval(qa("1.6"), 10000, 10000);
    CHECK(r16.bound_best_case == 3);
    CHECK(std::isnan(r16.bound_case2));
    CHECK(std::isnan(r12.bound_case3));
}

TEST_CASE("variable-r: pruned equals the unpruned oracle") {
    auto alpha = make_rational(3, 2);
    for (long N : {200L, 700L, 2000L}) {
        auto rep = count_variable_r(alpha, 3, 1, {N});
        CHECK(rep.pair_counts[0] == count_variable_r_unpruned(alpha, 3, 1, N));
    }
    // Distinct thread counts agree.
    ExperimentOptions one;
    one.threads = 1;
    ExperimentOptions two;
    two.threads = 2;
    auto a = count_variable_r(alpha, 3, 1, {1500}, one);
    auto b = count_variable_r(alpha, 3, 1, {1500}, two);
    CHECK(a.pair_counts == b.pair_counts);
}

TEST_CASE("variable-r explicit coefficients") {
    // Analytic oracle for k=3, d=1: integrating out y1 gives
    // vol(C^-_{3,2}(x)) = (1 - x - x^2/2)/2, so the sup of vol * sqrt(x)
    // sits at the root of 5x^2 + 6x - 2, x* = (sqrt(19)-3)/5.
    double xstar = (std::sqrt(19.0) - 3.0) / 5.0;
    double expect = (1 - xstar - xstar * xstar / 2) / 2 * std::sqrt(xstar);
    double ckd = variable_r_sup_coefficient(3, 1);
    CHECK(ckd == doctest::Approx(expect).epsilon(1e-5));

    auto rep = count_variable_r(make_rational(3, 2), 3, 1, {300});
    // b~ = (2/((3/2)(1/2)*1))^{1/2} * 1/(2 - 3/4)
    CHECK(rep.b_tilde ==
          doctest::Approx(std::sqrt(8.0 / 3.0) * 0.8).epsilon(1e-12));
    CHECK(rep.a_tilde ==
          doctest::Approx(expect * std::sqrt(8.0 / 3.0) * 0.8).epsilon(1e-5));
    CHECK(rep.a_tilde < rep.b_tilde);
    CHECK(rep.prune_from > 1);
}

TEST_CASE("gap lengths: witnesses and ratios") {
    auto rep = gap_lengths(make_rational(3, 2), 3, 1, {100, 500, 1000, 5000});
    FloorTable table(FunctionSpec::power(make_rational(3, 2)));
    table.ensure(6000);
    for (size_t i = 0; i < rep.x_grid.size(); ++i) {
        CHECK_FALSE(rep.censored[i]);
        long x = rep.x_grid[i], L = rep.lengths[i];
        CHECK(table.test_progression(x + L, 1, 3, 1));
        for (long n = x; n < x + L; ++n)
            CHECK_FALSE(table.test_progression(n, 1, 3, 1));
        CHECK(rep.ratios[i] ==
              doctest::Approx(L / std::pow(static_cast<double>(x), 0.5)));
        CHECK(rep.ratios_conj[i] ==
              doctest::Approx(L / std::pow(static_cast<double>(x), 0.25)));
    }

    auto rep4 = gap_lengths(make_rational(3, 2), 4, 1, {1000, 4000});
    CHECK(rep4.appendix_lower == Rational(1) / (make_rational(3, 2) *
                                                make_rational(1, 2) * Rational(3)));
    CHECK(rep4.ratios_conj.empty());
}

TEST_CASE("gap dense fraction is already high at small scale") {
    double frac = gap_dense_fraction(make_rational(3, 2), 1, 2000);
    CHECK(frac > 0.8);
    CHECK(frac <= 1.0);
}

TEST_CASE("alpha sweep: shape, mean, and boundary robustness") {
    std::vector<Rational> grid;
    for (int i = 1; i <= 49; ++i) grid.push_back(Rational(1) + make_rational(i, 50));
    auto rep = alpha_sweep(3, 1, 400, grid);
    CHECK(rep.densities.size() == grid.size());
    double mean = 0;
    for (double dv : rep.densities) {
        CHECK(dv >= 0);
        CHECK(dv <= 1);
        mean += dv;
    }
    mean /= static_cast<double>(rep.densities.size());
    CHECK(std::abs(mean - 0.5) < 0.08);

    // near the alpha -> 1+ endpoint: no crash, sane value
    auto edge = alpha_sweep(3, 1, 200, {Rational(1) + make_rational(1, 1000)});
    CHECK(edge.densities[0] >= 0);
    CHECK(edge.densities[0] <= 1);

    CHECK_THROWS_AS(alpha_sweep(3, 1, 100, {Rational(1)}), std::invalid_argument);

    // Determinism across thread counts.
    ExperimentOptions one;
    one.threads = 1;
    ExperimentOptions two;
    two.threads = 2;
    auto s1 = alpha_sweep(3, 1, 300, grid, one);
    auto s2 = alpha_sweep(3, 1, 300, grid, two);
    CHECK(s1.densities == s2.densities);
}

TEST_CASE("x log x band endpoints and empirical density") {
    double lo_o, lo_i, hi_i, hi_o;
    xlogx_band_endpoints(3, 1, &lo_o, &lo_i, &hi_i, &hi_o);
    const double e = std::exp(1.0);
    CHECK(lo_o == doctest::Approx(1.0 / (2 * (e - 1))).epsilon(1e-12));
    CHECK(hi_o == doctest::Approx(e / (2 * (e - 1))).epsilon(1e-12));
    CHECK(lo_o <= lo_i);
    CHECK(hi_i <= hi_o);

    // Both endpoints converge to 1/(k-1) as r grows, monotonically.
    double prev_lo = 0, prev_hi = 1;
    for (long r = 1; r <= 20; ++r) {
        double lo, hi;
        xlogx_band_endpoints(3, r, &lo, nullptr, nullptr, &hi);
        CHECK(lo > prev_lo);
        CHECK(hi < prev_hi);
        prev_lo = lo;
        prev_hi = hi;
    }
    CHECK(std::abs(prev_lo - 0.5) < 0.02);
    CHECK(std::abs(prev_hi - 0.5) < 0.02);

    auto rep = xlogx_band(3, 1, {2000, 6000});
    for (const auto& d : rep.densities) {
        double dv = to_double(d);
        CHECK(dv >= rep.band_lo_inner);
        CHECK(dv <= rep.band_hi_inner);
    }
}

TEST_CASE("alpha sweep rejects a non-increasing grid") {
    CHECK_THROWS_AS(
        alpha_sweep(3, 1, 100, {make_rational(3, 2), make_rational(3, 2)}),
        std::invalid_argument);
    CHECK_THROWS_AS(
        alpha_sweep(3, 1, 100, {make_rational(7, 4), make_rational(3, 2)}),
        std::invalid_argument);
}
