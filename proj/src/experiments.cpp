#include "psprog/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>

#include "psprog/parallel.hpp"

namespace psprog {

namespace {

void require_ascending(const std::vector<long>& grid, const char* what) {
    if (grid.empty()) throw std::invalid_argument(std::string(what) + ": empty grid");
    for (size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] < 1 || (i > 0 && grid[i] <= grid[i - 1]))
            throw std::invalid_argument(std::string(what) +
                                        ": grid must be strictly increasing and >= 1");
    }
}

// Smallest n >= n0 with eps(n) < 1/2; eps decreases along the catalog.
long criterion_start(const ProgressionQuery& q) {
    long n = q.f.n0;
    const Rational half = make_rational(1, 2);
    while (true) {
        TaylorVector tv = taylor_vector(q, n, kPrecisionStart);
        if (tv.eps < half) return n;
        n = n < 16 ? n + 1 : n + n / 4;
        if (n > (1L << 40))
            throw std::runtime_error("criterion_start: eps never drops below 1/2");
    }
}

long long count_window(const ProgressionQuery& q, FloorTable& table, long lo, long hi,
                       const ExperimentOptions& opts) {
    if (hi < lo) return 0;
    table.ensure(hi + q.r * (q.k - 1), opts.threads);
    long long count = 0;
    if (opts.use_criterion && q.d == q.f.d) {
        const long start = std::max(lo, criterion_start(q));
        for (long n = lo; n < start && n <= hi; ++n)
            count += table.test_progression(n, q.r, q.k, q.d);
        for (long n = start; n <= hi; ++n) {
            auto c = criterion_classify(q, n);
            if (c.verdict == Verdict::kCertainlyIn)
                ++count;
            else if (c.verdict == Verdict::kUncertain)
                count += table.test_progression(n, q.r, q.k, q.d);
        }
    } else {
        for (long n = lo; n <= hi; ++n)
            count += table.test_progression(n, q.r, q.k, q.d);
    }
    return count;
}

double convergence_rate_bound(const Rational& alpha, long N) {
    const double a = to_double(alpha);
    const double x = static_cast<double>(N);
    if (a < 1.25) return std::pow(x, (1 - a) / 2);
    if (a < 11.0 / 6.0) return std::pow(x, (a - 3) / 14) * std::sqrt(std::log(x));
    return std::pow(x, (a - 2) / 6) * std::sqrt(std::log(x));
}

// One-sided C^-(x) without the public eps < 1/2 precondition; the sup over
// x in (0,1) needs the upper half of the range too.
Polytope cminus_unclamped(int k, int d, const Rational& eps) {
    Polytope p;
    p.dim = d + 1;
    p.label = PolytopeLabel::kCminus;
    p.k = k;
    p.d = d;
    p.eps = eps;
    for (int j = 0; j < k; ++j) {
        RationalVec normal(d + 1, Rational(0));
        for (int i = 0; i <= d && i <= j; ++i) normal[i] = binomial(j, i);
        Rational hi = (j >= 1) ? Rational(1) - eps : Rational(1);
        p.halfspaces.push_back({normal, Rational(0)});
        RationalVec neg(normal.size());
        for (size_t i = 0; i < normal.size(); ++i) neg[i] = -normal[i];
        p.halfspaces.push_back({neg, -hi});
    }
    return p;
}

}  // namespace

DensityReport density_fixed_r(const ProgressionQuery& q, std::vector<long> grid,
                              const ExperimentOptions& opts) {
    require_ascending(grid, "density_fixed_r");
    DensityReport rep;
    rep.function = q.f.to_string();
    rep.k = q.k;
    rep.d = q.d;
    rep.r = q.r;
    rep.grid = grid;
    rep.target_is_limit = q.f.equidistributed();
    rep.target = volume_exact(build_C(q.k, q.d, PolytopeLabel::kC)).volume;

    FloorTable table(q.f);
    long long running = 0;
    long prev = q.f.n0 - 1;
    for (long N : grid) {
        running += count_window(q, table, prev + 1, N, opts);
        prev = N;
        rep.counts.push_back(running);
        rep.densities.push_back(make_rational(1, N) * Rational(static_cast<long>(running)));
        if (q.f.kind == FunctionKind::kPower && q.d == 1)
            rep.bound_big_o.push_back(convergence_rate_bound(q.f.param, N));
    }
    return rep;
}

ShortIntervalReport density_short_interval(const ProgressionQuery& q, long N, long L,
                                           const ExperimentOptions& opts) {
    if (L < 1) throw std::invalid_argument("density_short_interval: L must be >= 1");
    if (N < q.f.n0) throw std::invalid_argument("density_short_interval: N below n0");
    ShortIntervalReport rep;
    rep.function = q.f.to_string();
    rep.k = q.k;
    rep.r = q.r;
    rep.N = N;
    rep.L = L;
    rep.target = volume_exact(build_C(q.k, q.d, PolytopeLabel::kC)).volume;

    FloorTable table(q.f);
    rep.count = count_window(q, table, N, N + L - 1, opts);
    rep.density = make_rational(1, L) * Rational(static_cast<long>(rep.count));

    const double a = to_double(q.f.param);
    const double n = static_cast<double>(N);
    const double l = static_cast<double>(L);
    const double logn = std::log(n);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    rep.bound_case1 = std::pow(n, (a - 2) / 6) * std::sqrt(logn) +
                      std::pow(n, (2 - a) / 2) / std::sqrt(l);
    rep.bound_case2 = (a < 1.5) ? std::pow(n, (a - 3) / 14) * std::sqrt(logn) +
                                      std::pow(n, (2 - a) / 2) / std::sqrt(l)
                                : nan;
    rep.bound_case3 = (a >= 1.5 && a < 11.0 / 6.0)
                          ? (std::pow(n, (a - 3) / 14) +
                             std::pow(n, (3 - a) / 6) / std::sqrt(l)) *
                                std::sqrt(logn)
                          : nan;
    rep.bound_best = rep.bound_case1;
    rep.bound_best_case = 1;
    if (!std::isnan(rep.bound_case2) && rep.bound_case2 < rep.bound_best) {
        rep.bound_best = rep.bound_case2;
        rep.bound_best_case = 2;
    }
    if (!std::isnan(rep.bound_case3) && rep.bound_case3 < rep.bound_best) {
        rep.bound_best = rep.bound_case3;
        rep.bound_best_case = 3;
    }
    return rep;
}

double variable_r_sup_coefficient(int k, int d) {
    // Maximize g(x) = vol(C^-(x)) x^{1/(d+1)} over (0,1) by grid refinement.
    auto g = [&](const Rational& x) {
        double vol = to_double(volume_exact(cminus_unclamped(k, d, x)).volume);
        return vol * std::pow(to_double(x), 1.0 / (d + 1));
    };
    Rational lo(0), hi(1);
    Rational best_x = make_rational(1, 4);
    double best = 0;
    for (int round = 0; round < 4; ++round) {
        const int steps = 32;
        Rational width = (hi - lo) / steps;
        for (int i = 1; i < steps; ++i) {
            Rational x = lo + width * i;
            if (x <= 0 || x >= 1) continue;
            double v = g(x);
            if (v > best) {
                best = v;
                best_x = x;
            }
        }
        Rational nlo = best_x - width, nhi = best_x + width;
        lo = nlo > 0 ? nlo : Rational(0);
        hi = nhi < 1 ? nhi : Rational(1);
    }
    return best;
}

namespace {

struct VariableRContext {
    int k = 0, d = 0;
    double r_cap_coeff = 0;  // upper bound of the R(n) prefactor
    double r_cap_exp = 0;    // (d+1-alpha)/(d+1)
    long prune_from = 0;
};

long r_cap(const VariableRContext& cx, long n) {
    double cap = cx.r_cap_coeff * std::pow(static_cast<double>(n), cx.r_cap_exp);
    return static_cast<long>(std::ceil(cap)) + 1;
}

VariableRContext make_variable_r_context(const Rational& alpha, int k, int d) {
    VariableRContext cx;
    cx.k = k;
    cx.d = d;
    // R(n) = (2^d c(1/2)/(k-d-1))^{1/(d+1)} f^{(d+1)}(n)^{-1/(d+1)} with
    // c(1/2) = 2^{d+1-alpha}; every progression start past the regime
    // threshold has r < R(n), so pruning with an upper bound of R is sound.
    const Rational inv_d1 = make_rational(1, d + 1);
    CertifiedReal c_half =
        CertifiedReal::from_long(2, 256).pow(Rational(d + 1) - alpha);
    CertifiedReal base = (CertifiedReal::from_long(1L << d, 256) * c_half)
                             .mul_rational(make_rational(1, k - d - 1));
    CertifiedReal ff =
        CertifiedReal::from_rational(falling_factorial(alpha, d + 1), 256);
    CertifiedReal coeff =
        base.pow(inv_d1) * (CertifiedReal::from_long(1, 256) / ff.pow(inv_d1));
    cx.r_cap_coeff = coeff.upper_double() * (1 + 1e-9);
    cx.r_cap_exp = to_double(Rational(d + 1) - alpha) / (d + 1);

    long n = 2;
    while ((k - 1) * r_cap(cx, n) >= n) {
        ++n;
        if (n > (1L << 30))
            throw std::runtime_error("count_variable_r: no pruning threshold found");
    }
    cx.prune_from = n;
    return cx;
}

}  // namespace

VariableRReport count_variable_r(const Rational& alpha, int k, int d,
                                 std::vector<long> grid,
                                 const ExperimentOptions& opts) {
    require_ascending(grid, "count_variable_r");
    if (d < 1 || k < d + 2)
        throw std::invalid_argument("count_variable_r: need k >= d+2, d >= 1");
    FunctionSpec f = FunctionSpec::power(alpha);
    if (f.d != d)
        throw std::invalid_argument("count_variable_r: alpha must lie in (d, d+1)");

    VariableRContext cx = make_variable_r_context(alpha, k, d);

    VariableRReport rep;
    rep.alpha = alpha;
    rep.k = k;
    rep.d = d;
    rep.grid = grid;
    rep.prune_from = cx.prune_from;

    FloorTable table(f);
    table.ensure(grid.back(), opts.threads);

    for (long N : grid) {
        std::vector<long long> partial;
        std::mutex mu;
        parallel_for(1, N + 1, opts.threads, [&](long a, long b) {
            long long local = 0;
            for (long n = a; n < b; ++n) {
                long r_hi = (N - n) / (k - 1);
                if (n >= cx.prune_from) r_hi = std::min(r_hi, r_cap(cx, n));
                for (long r = 1; r <= r_hi; ++r)
                    local += table.test_progression(n, r, k, d);
            }
            std::lock_guard<std::mutex> lock(mu);
            partial.push_back(local);
        });
        long long total = 0;
        for (long long p : partial) total += p;
        rep.pair_counts.push_back(total);
        rep.normalized.push_back(static_cast<double>(total) /
                                 std::pow(static_cast<double>(N),
                                          2.0 - to_double(alpha) / (d + 1)));
    }

    const double a = to_double(alpha);
    const double fall = to_double(falling_factorial(alpha, d + 1));
    const double tail = 1.0 / (2.0 - a / (d + 1));
    rep.b_tilde =
        std::pow(std::pow(2.0, d) / (fall * (k - d - 1)), 1.0 / (d + 1)) * tail;
    double ckd = variable_r_sup_coefficient(k, d);
    rep.a_tilde =
        ckd * std::pow(to_double(Rational(factorial(d + 1))) / fall, 1.0 / (d + 1)) *
        tail;
    return rep;
}

long long count_variable_r_unpruned(const Rational& alpha, int k, int d, long N) {
    FunctionSpec f = FunctionSpec::power(alpha);
    FloorTable table(f);
    table.ensure(N);
    long long total = 0;
    for (long n = 1; n <= N; ++n)
        for (long r = 1; n + (k - 1) * r <= N; ++r)
            total += table.test_progression(n, r, k, d);
    return total;
}

GapReport gap_lengths(const Rational& alpha, int k, long r, std::vector<long> x_grid,
                      const ExperimentOptions& opts) {
    require_ascending(x_grid, "gap_lengths");
    if (k < 3) throw std::invalid_argument("gap_lengths: k must be >= 3");
    if (alpha <= 1 || alpha >= 2)
        throw std::invalid_argument("gap_lengths: alpha must lie in (1,2)");
    FunctionSpec f = FunctionSpec::power(alpha);

    GapReport rep;
    rep.alpha = alpha;
    rep.k = k;
    rep.r = r;
    rep.x_grid = x_grid;
    rep.scan_cap_base = 1000;
    if (k >= 4)
        rep.appendix_lower = Rational(k - 3) / (alpha * (alpha - 1) * Rational(r) *
                                                Rational(static_cast<long>(k - 1)));

    const double a = to_double(alpha);
    auto cap_for = [&](long x) {
        return rep.scan_cap_base +
               static_cast<long>(
                   std::ceil(10.0 * k * std::pow(static_cast<double>(x), 2.0 - a)));
    };
    const long max_x = x_grid.back();
    FloorTable table(f);
    table.ensure(max_x + cap_for(max_x) + r * (k - 1) + 1, opts.threads);

    rep.lengths.assign(x_grid.size(), 0);
    rep.censored.assign(x_grid.size(), false);
    rep.ratios.assign(x_grid.size(), 0.0);
    if (k == 3) rep.ratios_conj.assign(x_grid.size(), 0.0);

    parallel_for(0, static_cast<long>(x_grid.size()), opts.threads,
                 [&](long lo, long hi) {
                     for (long i = lo; i < hi; ++i) {
                         const long x = x_grid[i];
                         const long cap = cap_for(x);
                         long L = -1;
                         for (long n = x; n <= x + cap; ++n) {
                             if (table.test_progression(n, r, k, 1)) {
                                 L = n - x;
                                 break;
                             }
                         }
                         if (L < 0) {
                             rep.censored[i] = true;
                             L = cap;  // lower bound, flagged, never silent
                         }
                         rep.lengths[i] = L;
                         rep.ratios[i] = static_cast<double>(L) /
                                         std::pow(static_cast<double>(x), 2.0 - a);
                         if (k == 3)
                             rep.ratios_conj[i] =
                                 static_cast<double>(L) /
                                 std::pow(static_cast<double>(x), 1.0 - a / 2);
                     }
                 });
    return rep;
}

double gap_dense_fraction(const Rational& alpha, long r, long M,
                          const ExperimentOptions& opts) {
    if (M < 1) throw std::invalid_argument("gap_dense_fraction: M must be >= 1");
    FunctionSpec f = FunctionSpec::power(alpha);
    const double a = to_double(alpha);
    auto bound_for = [&](long N) {
        return std::pow(static_cast<double>(N), 1.0 - a / 2) *
               std::log(static_cast<double>(N));
    };
    FloorTable table(f);
    long max_cap = static_cast<long>(std::ceil(bound_for(M))) + 2;
    table.ensure(M + max_cap + r * 2 + 1, opts.threads);

    std::atomic<long> hits{0};
    parallel_for(1, M + 1, opts.threads, [&](long lo, long hi) {
        long local = 0;
        for (long N = lo; N < hi; ++N) {
            const double bound = bound_for(N);
            const long cap = static_cast<long>(std::floor(bound));
            for (long n = N; n <= N + cap; ++n) {
                if (table.test_progression(n, r, 3, 1)) {
                    if (static_cast<double>(n - N) <= bound) ++local;
                    break;
                }
            }
        }
        hits += local;
    });
    return static_cast<double>(hits.load()) / static_cast<double>(M);
}

SweepReport alpha_sweep(int k, long r, long N, std::vector<Rational> alpha_grid,
                        const ExperimentOptions& opts) {
    if (alpha_grid.empty()) throw std::invalid_argument("alpha_sweep: empty grid");
    for (size_t i = 0; i < alpha_grid.size(); ++i) {
        const auto& a = alpha_grid[i];
        if (a <= 1 || a >= 2)
            throw std::invalid_argument(
                "alpha_sweep: grid must lie strictly inside (1,2)");
        if (i > 0 && a <= alpha_grid[i - 1])
            throw std::invalid_argument("alpha_sweep: grid must strictly increase");
    }
    SweepReport rep;
    rep.k = k;
    rep.r = r;
    rep.N = N;
    rep.alpha_grid = alpha_grid;
    rep.densities.assign(alpha_grid.size(), 0.0);

    parallel_for(
        0, static_cast<long>(alpha_grid.size()), opts.threads, [&](long lo, long hi) {
            std::vector<long long> floors;
            std::vector<long long> window;
            for (long i = lo; i < hi; ++i) {
                FunctionSpec f = FunctionSpec::power(alpha_grid[i]);
                const long top = N + r * (k - 1);
                floors.assign(top + 1, 0);
                for (long n = 1; n <= top; ++n) floors[n] = floor_f(f, n).get_si();
                long long count = 0;
                window.assign(k, 0);
                for (long n = 1; n <= N; ++n) {
                    bool ok = true;
                    for (int j = 0; j < k; ++j) window[j] = floors[n + r * j];
                    for (int j = 1; j < k && ok; ++j)
                        if (window[j] <= window[j - 1]) ok = false;
                    if (!ok) continue;
                    long long delta = window[1] - window[0];
                    for (int j = 2; j < k && ok; ++j)
                        if (window[j] - window[j - 1] != delta) ok = false;
                    if (ok) ++count;
                }
                rep.densities[i] =
                    static_cast<double>(count) / static_cast<double>(N);
            }
        });
    return rep;
}

void xlogx_band_endpoints(int k, long r, double* lo_outer, double* lo_inner,
                          double* hi_inner, double* hi_outer) {
    if (k < 3 || r < 1) throw std::invalid_argument("xlogx_band: need k >= 3, r >= 1");
    CertifiedReal e_pow = CertifiedReal::from_rational(make_rational(1, r), 256).exp();
    CertifiedReal denom = (e_pow - CertifiedReal::from_long(1, 256))
                              .mul_rational(Rational(r) * Rational(k - 1));
    CertifiedReal lo = CertifiedReal::from_long(1, 256) / denom;
    CertifiedReal hi = e_pow / denom;
    if (lo_outer) *lo_outer = lo.lower_double();
    if (lo_inner) *lo_inner = lo.upper_double();
    if (hi_inner) *hi_inner = hi.lower_double();
    if (hi_outer) *hi_outer = hi.upper_double();
}

XLogXBandReport xlogx_band(int k, long r, std::vector<long> grid,
                           const ExperimentOptions& opts) {
    require_ascending(grid, "xlogx_band");
    ProgressionQuery q(k, 1, r, FunctionSpec::x_log_x());
    XLogXBandReport rep;
    rep.k = k;
    rep.r = r;
    rep.grid = grid;
    xlogx_band_endpoints(k, r, &rep.band_lo_outer, &rep.band_lo_inner,
                         &rep.band_hi_inner, &rep.band_hi_outer);

    FloorTable table(q.f);
    long long running = 0;
    long prev = q.f.n0 - 1;
    for (long N : grid) {
        running += count_window(q, table, prev + 1, N, opts);
        prev = N;
        rep.counts.push_back(running);
        rep.densities.push_back(make_rational(1, N) * Rational(static_cast<long>(running)));
    }
    return rep;
}

}  // namespace psprog
