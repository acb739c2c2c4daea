#include "psprog/discrepancy.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <stdexcept>

#include "psprog/certified.hpp"
#include "psprog/parallel.hpp"

namespace psprog {

namespace {

using I128 = __int128;

constexpr std::uint64_t kScale = 1ULL << kCoordBits;
const I128 kP80 = I128(1) << (2 * kCoordBits);

std::string i128_to_string(I128 v) {
    if (v == 0) return "0";
    bool neg = v < 0;
    unsigned __int128 u = neg ? static_cast<unsigned __int128>(-v)
                              : static_cast<unsigned __int128>(v);
    std::string s;
    while (u > 0) {
        s.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
        u /= 10;
    }
    if (neg) s.push_back('-');
    std::reverse(s.begin(), s.end());
    return s;
}

std::uint64_t quantize_rational(const Rational& frac) {
    // round(frac * 2^40), clamped into [0, 2^40).
    Rational scaled = frac * Rational(static_cast<long>(kScale));
    Integer num = scaled.get_num(), den = scaled.get_den();
    Integer q;
    Integer two_num_plus_den = 2 * num + den;
    Integer two_den = 2 * den;
    mpz_fdiv_q(q.get_mpz_t(), two_num_plus_den.get_mpz_t(), two_den.get_mpz_t());
    if (q < 0) return 0;
    if (q >= static_cast<long>(kScale)) return kScale - 1;
    return static_cast<std::uint64_t>(q.get_ui());
}

std::uint64_t quantize_double(double frac) {
    double t = frac * static_cast<double>(kScale);
    long long q = std::llround(t);
    if (q < 0) q = 0;
    if (q >= static_cast<long long>(kScale)) q = static_cast<long long>(kScale) - 1;
    return static_cast<std::uint64_t>(q);
}

}  // namespace

PointSet2D orbit(const FunctionSpec& f, long r, long N, long L, int bits) {
    if (L < 1) throw std::invalid_argument("orbit: L must be >= 1");
    if (r < 1) throw std::invalid_argument("orbit: r must be >= 1");
    if (N < f.n0) throw std::invalid_argument("orbit: N below n0");
    PointSet2D ps;
    ps.function = f.to_string();
    ps.r = r;
    ps.N = N;
    ps.L = L;
    ps.points.reserve(L);
    double max_width = 0;

    for (long n = N; n < N + L; ++n) {
        std::uint64_t qx = 0, qy = 0;
        // First coordinate: {f(n)}.
        if (f.kind == FunctionKind::kPower) {
            Integer m = floor_f(f, n);
            if (auto v = detail::power_derivative_rational(f.param, 0, n)) {
                qx = quantize_rational(*v - Rational(m));
            } else {
                CertifiedReal frac = eval(f, 0, n, bits).sub_integer(m);
                max_width = std::max(max_width, frac.width_double());
                qx = quantize_double(frac.midpoint_double());
            }
        } else {
            try {
                Integer m = floor_f(f, n);
                CertifiedReal frac = eval(f, 0, n, bits).sub_integer(m);
                max_width = std::max(max_width, frac.width_double());
                qx = quantize_double(frac.midpoint_double());
            } catch (const UnresolvedFloorError&) {
                ++ps.unresolved;
            }
        }
        // Second coordinate: {r f'(n)}.
        std::optional<Rational> deriv_exact;
        if (f.kind == FunctionKind::kPower)
            deriv_exact = detail::power_derivative_rational(f.param, 1, n);
        if (deriv_exact) {
            Rational v = *deriv_exact * Rational(r);
            Integer m;
            mpz_fdiv_q(m.get_mpz_t(), v.get_num().get_mpz_t(),
                       v.get_den().get_mpz_t());
            qy = quantize_rational(v - Rational(m));
        } else {
            try {
                auto gen = [&](int b) {
                    return eval(f, 1, n, b).mul_rational(Rational(r));
                };
                Integer m = certify_floor(gen, bits, 4096);
                CertifiedReal frac = gen(bits).sub_integer(m);
                max_width = std::max(max_width, frac.width_double());
                qy = quantize_double(frac.midpoint_double());
            } catch (const UnresolvedFloorError&) {
                ++ps.unresolved;
            }
        }
        ps.points.emplace_back(qx, qy);
    }
    ps.coord_error = max_width + 1.0 / static_cast<double>(kScale);
    return ps;
}

namespace {

// Sorted multiset scan exposing, per distinct value, the index range
// [first, last] of its occurrences.
template <typename Fn>
void group_scan(const std::vector<std::uint64_t>& ys, Fn&& fn) {
    size_t i = 0;
    while (i < ys.size()) {
        size_t j = i;
        while (j + 1 < ys.size() && ys[j + 1] == ys[i]) ++j;
        fn(ys[i], static_cast<long>(i), static_cast<long>(j));
        i = j + 1;
    }
}

// max over closed boxes [c,d] (point-coordinate bounds) of
// count*2^80 - w*(d-c)*L: the excess side of the deviation.
I128 excess_pass(const std::vector<std::uint64_t>& ys, std::uint64_t w, long L) {
    I128 best = 0;
    I128 runmin = I128(1) << 110;
    group_scan(ys, [&](std::uint64_t v, long fi, long li) {
        I128 wy = I128(w) * v * L;
        I128 cand_c = I128(fi) * kP80 - wy;
        if (cand_c < runmin) runmin = cand_c;
        I128 cand_d = I128(li + 1) * kP80 - wy;
        if (cand_d - runmin > best) best = cand_d - runmin;
    });
    return best;
}

// max over open boxes (c,d) (bounds at point coordinates or the walls) of
// w*(d_eff - c_eff)*L - count*2^80: the deficit side.
I128 deficit_pass(const std::vector<std::uint64_t>& ys, std::uint64_t w, long L) {
    I128 best = 0;
    I128 runmin = 0;  // c' = wall sentinel: c_eff = 0 and nothing below it
    group_scan(ys, [&](std::uint64_t v, long fi, long li) {
        I128 wy = I128(w) * v * L;
        I128 first = wy - I128(fi) * kP80;
        if (first - runmin > best) best = first - runmin;
        I128 second = wy - I128(li + 1) * kP80;
        if (second < runmin) runmin = second;
    });
    I128 top = I128(w) * kScale * L - I128(ys.size()) * kP80;
    if (top - runmin > best) best = top - runmin;
    return best;
}

void insert_sorted(std::vector<std::uint64_t>& v, std::uint64_t y) {
    v.insert(std::upper_bound(v.begin(), v.end(), y), y);
}

DiscrepancyResult exact_discrepancy(const PointSet2D& ps, int threads) {
    const long L = ps.L;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> pts = ps.points;
    std::sort(pts.begin(), pts.end());
    std::vector<std::uint64_t> xs;
    for (const auto& p : pts)
        if (xs.empty() || xs.back() != p.first) xs.push_back(p.first);
    const long nx = static_cast<long>(xs.size());

    std::mutex mu;
    I128 global_best = 0;

    // Excess: closed x-slabs [xs[ia], xs[ib]].
    parallel_for(0, nx, threads, [&](long a_lo, long a_hi) {
        I128 best = 0;
        std::vector<std::uint64_t> slab;
        for (long ia = a_lo; ia < a_hi; ++ia) {
            slab.clear();
            size_t ptr = std::lower_bound(pts.begin(), pts.end(),
                                          std::make_pair(xs[ia], std::uint64_t(0))) -
                         pts.begin();
            for (long ib = ia; ib < nx; ++ib) {
                while (ptr < pts.size() && pts[ptr].first == xs[ib]) {
                    insert_sorted(slab, pts[ptr].second);
                    ++ptr;
                }
                I128 v = excess_pass(slab, xs[ib] - xs[ia], L);
                if (v > best) best = v;
            }
        }
        std::lock_guard<std::mutex> lock(mu);
        if (best > global_best) global_best = best;
    });

    // Deficit: open x-slabs (la, rb) with la in {wall} u xs, rb in xs u {wall}.
    parallel_for(-1, nx, threads, [&](long a_lo, long a_hi) {
        I128 best = 0;
        std::vector<std::uint64_t> slab;
        for (long ia = a_lo; ia < a_hi; ++ia) {
            const long long la = (ia < 0) ? -1 : static_cast<long long>(xs[ia]);
            const std::uint64_t left_eff = (ia < 0) ? 0 : xs[ia];
            slab.clear();
            size_t ptr = 0;
            while (ptr < pts.size() && static_cast<long long>(pts[ptr].first) <= la)
                ++ptr;
            for (long ib = (ia < 0) ? 0 : ia + 1; ib <= nx; ++ib) {
                const std::uint64_t rb = (ib < nx) ? xs[ib] : kScale;
                while (ptr < pts.size() && pts[ptr].first < rb) {
                    insert_sorted(slab, pts[ptr].second);
                    ++ptr;
                }
                if (rb <= left_eff) continue;
                I128 v = deficit_pass(slab, rb - left_eff, L);
                if (v > best) best = v;
            }
        }
        std::lock_guard<std::mutex> lock(mu);
        if (best > global_best) global_best = best;
    });

    DiscrepancyResult res;
    res.mode = DiscrepancyMode::kExact;
    res.error_radius = 0;
    res.value = static_cast<double>(global_best) /
                (static_cast<double>(L) * std::pow(2.0, 2 * kCoordBits));
    res.exact_fraction =
        i128_to_string(global_best) + "/" + i128_to_string(I128(L) * kP80);
    return res;
}

DiscrepancyResult grid_discrepancy(const PointSet2D& ps, int G, int threads) {
    if (G < 2 || (G & (G - 1)) != 0 || G > (1 << 20))
        throw std::invalid_argument(
            "grid_discrepancy: G must be a power of two in [2, 2^20]");
    const long L = ps.L;
    int log_g = 0;
    while ((1 << log_g) < G) ++log_g;
    const int shift = kCoordBits - log_g;
    std::vector<std::vector<long>> cells(G, std::vector<long>(G, 0));
    std::vector<long> col_count(G, 0), row_count(G, 0);
    for (const auto& p : ps.points) {
        int cx = static_cast<int>(p.first >> shift);
        int cy = static_cast<int>(p.second >> shift);
        cells[cx][cy] += 1;
        col_count[cx] += 1;
        row_count[cy] += 1;
    }

    const long long G2 = static_cast<long long>(G) * G;
    std::mutex mu;
    long long global_best = 0;

    parallel_for(0, G, threads, [&](long a_lo, long a_hi) {
        long long best = 0;
        std::vector<long> col(G, 0);
        for (long a = a_lo; a < a_hi; ++a) {
            std::fill(col.begin(), col.end(), 0L);
            for (long b = a + 1; b <= G; ++b) {
                const auto& add = cells[b - 1];
                for (int y = 0; y < G; ++y) col[y] += add[y];
                const long long w = b - a;
                long long s = 0;
                long long min_t = 0, max_t = 0;  // prefix value at y = 0
                for (int y = 1; y <= G; ++y) {
                    s += col[y - 1];
                    long long t = s * G2 - w * static_cast<long long>(y) * L;
                    if (t - min_t > best) best = t - min_t;    // excess box
                    if (max_t - t > best) best = max_t - t;    // deficit box
                    if (t < min_t) min_t = t;
                    if (t > max_t) max_t = t;
                }
            }
        }
        std::lock_guard<std::mutex> lock(mu);
        if (best > global_best) global_best = best;
    });

    DiscrepancyResult res;
    res.mode = DiscrepancyMode::kGrid;
    res.grid_size = G;
    res.value = static_cast<double>(global_best) /
                (static_cast<double>(L) * static_cast<double>(G2));
    long maxcol = *std::max_element(col_count.begin(), col_count.end());
    long maxrow = *std::max_element(row_count.begin(), row_count.end());
    res.error_radius = 4.0 / G + 2.0 * static_cast<double>(maxcol + maxrow) /
                                     static_cast<double>(L);
    return res;
}

}  // namespace

DiscrepancyResult extreme_discrepancy(const PointSet2D& ps, DiscrepancyMode mode,
                                      int grid_size, int threads) {
    if (ps.points.empty())
        throw std::invalid_argument("extreme_discrepancy: empty point set");
    if (mode == DiscrepancyMode::kExact) {
        if (ps.L > kExactDiscrepancyCap)
            throw std::invalid_argument(
                "extreme_discrepancy: L exceeds the exact-mode cap (" +
                std::to_string(kExactDiscrepancyCap) + "); use grid mode");
        return exact_discrepancy(ps, threads);
    }
    return grid_discrepancy(ps, grid_size, threads);
}

EtkResult etk_bound(const PointSet2D& ps, int H, int threads) {
    if (H < 1) throw std::invalid_argument("etk_bound: H must be >= 1");
    const long L = ps.L;
    const int W = 2 * H + 1;  // h1 in [-H, H] mapped to [0, 2H]

    // Fixed chunk layout with ordered reduction: identical output for any
    // thread count.
    constexpr long kChunks = 32;
    std::vector<std::vector<std::complex<double>>> chunk_s(
        kChunks,
        std::vector<std::complex<double>>(static_cast<size_t>(H + 1) * W));
    const long per = (L + kChunks - 1) / kChunks;

    parallel_for(0, kChunks, threads, [&](long c_lo, long c_hi) {
        std::vector<std::complex<double>> ax(H + 1), by(W);
        for (long c = c_lo; c < c_hi; ++c) {
            auto& S = chunk_s[c];
            const long n_lo = c * per;
            const long n_hi = std::min(L, n_lo + per);
            for (long n = n_lo; n < n_hi; ++n) {
                const double x = static_cast<double>(ps.points[n].first) /
                                 static_cast<double>(kScale);
                const double y = static_cast<double>(ps.points[n].second) /
                                 static_cast<double>(kScale);
                const std::complex<double> ex(std::cos(2 * M_PI * x),
                                              std::sin(2 * M_PI * x));
                const std::complex<double> ey(std::cos(2 * M_PI * y),
                                              std::sin(2 * M_PI * y));
                ax[0] = 1.0;
                for (int h = 1; h <= H; ++h) ax[h] = ax[h - 1] * ex;
                by[H] = 1.0;
                for (int h = 1; h <= H; ++h) {
                    by[H + h] = by[H + h - 1] * ey;
                    by[H - h] = std::conj(by[H + h]);
                }
                for (int h0 = 0; h0 <= H; ++h0) {
                    const std::complex<double> a = ax[h0];
                    auto* row = &S[static_cast<size_t>(h0) * W];
                    for (int t = 0; t < W; ++t) row[t] += a * by[t];
                }
            }
        }
    });

    std::vector<std::complex<double>> S(static_cast<size_t>(H + 1) * W);
    for (long c = 0; c < kChunks; ++c)
        for (size_t i = 0; i < S.size(); ++i) S[i] += chunk_s[c][i];

    // Kahan-compensated accumulation of the weighted moduli; conjugate
    // symmetry S(-h) = conj(S(h)) contributes the factor 2.
    double sum = 0, comp = 0, weight_total = 0;
    auto add = [&](double v) {
        double t = v - comp;
        double u = sum + t;
        comp = (u - sum) - t;
        sum = u;
    };
    auto u_of = [](int a, int b) {
        return static_cast<double>(std::max(1, std::abs(a)) *
                                   std::max(1, std::abs(b)));
    };
    for (int h1 = 1; h1 <= H; ++h1) {
        double u = u_of(0, h1);
        add(2.0 * std::abs(S[static_cast<size_t>(H + h1)]) /
            (u * static_cast<double>(L)));
        weight_total += 2.0 / u;
    }
    for (int h0 = 1; h0 <= H; ++h0) {
        for (int h1 = -H; h1 <= H; ++h1) {
            double u = u_of(h0, h1);
            add(2.0 * std::abs(S[static_cast<size_t>(h0) * W + (H + h1)]) /
                (u * static_cast<double>(L)));
            weight_total += 2.0 / u;
        }
    }

    EtkResult res;
    res.H = H;
    res.value = 1.0 / H + sum;
    // The rotation recurrences drift by O(H) ulps per point; carried in the
    // report, never hidden.
    res.fp_error = weight_total * (16.0 * H + 64.0) * 2.3e-16;
    return res;
}

TheoryBound theory_bound(const Rational& alpha, long r, long N, long L) {
    (void)r;  // r-dependence sits in the implicit constant
    if (alpha <= 1 || alpha >= 2)
        throw std::invalid_argument("theory_bound: alpha must lie in (1,2)");
    if (N < 2 || L < 1)
        throw std::invalid_argument("theory_bound: need N >= 2, L >= 1");
    const double a = to_double(alpha);
    const double n = static_cast<double>(N);
    const double l = static_cast<double>(L);
    const double logn = std::log(n);
    TheoryBound tb;
    tb.case1 = std::pow(n, (a - 2) / 3) * logn + std::pow(n, 2 - a) / l;
    tb.case2 = (a < 1.5)
                   ? std::pow(n, (a - 3) / 7) * logn + std::pow(n, 2 - a) / l
                   : std::numeric_limits<double>::quiet_NaN();
    tb.case3 = (a >= 1.5 && a < 11.0 / 6.0)
                   ? (std::pow(n, (a - 3) / 7) + std::pow(n, (3 - a) / 3) / l) * logn
                   : std::numeric_limits<double>::quiet_NaN();
    tb.best = tb.case1;
    tb.best_case = 1;
    if (!std::isnan(tb.case2) && tb.case2 < tb.best) {
        tb.best = tb.case2;
        tb.best_case = 2;
    }
    if (!std::isnan(tb.case3) && tb.case3 < tb.best) {
        tb.best = tb.case3;
        tb.best_case = 3;
    }
    return tb;
}

double isotropic_bound(double discrepancy, int d) {
    if (d < 1) throw std::invalid_argument("isotropic_bound: d must be >= 1");
    if (discrepancy < 0 || discrepancy > 1)
        throw std::invalid_argument("isotropic_bound: D must lie in [0,1]");
    return (4.0 * d * std::sqrt(static_cast<double>(d)) + 1.0) *
           std::pow(discrepancy, 1.0 / d);
}

namespace {

struct DoubleInterval {
    double lo, hi;
};

// Power derivatives are monotone in x, so the endpoint values hull the
// range over [N, N+L-1].
DoubleInterval deriv_range(const Rational& alpha, int order, long N, long L) {
    auto a = detail::power_derivative(alpha, order, N, 128);
    auto b = detail::power_derivative(alpha, order, N + L - 1, 128);
    return {std::min(a.lower_double(), b.lower_double()),
            std::max(a.upper_double(), b.upper_double())};
}

DoubleInterval combine(int h0, const DoubleInterval& u, long r, int h1,
                       const DoubleInterval& v) {
    auto scale = [](double c, const DoubleInterval& iv) {
        return c >= 0 ? DoubleInterval{c * iv.lo, c * iv.hi}
                      : DoubleInterval{c * iv.hi, c * iv.lo};
    };
    DoubleInterval su = scale(h0, u);
    DoubleInterval sv = scale(static_cast<double>(h1) * r, v);
    return {su.lo + sv.lo, su.hi + sv.hi};
}

}  // namespace

DerivativeTestReport derivative_test_bounds(const Rational& alpha, long r, int h0,
                                            int h1, long N, long L) {
    if (h0 == 0 && h1 == 0)
        throw std::invalid_argument("derivative_test_bounds: (h0,h1) must be nonzero");
    FunctionSpec f = FunctionSpec::power(alpha);
    if (f.d != 1)
        throw std::invalid_argument("derivative_test_bounds: alpha must lie in (1,2)");

    DerivativeTestReport rep;
    PointSet2D ps = orbit(f, r, N, L, 96);
    double sr = 0, cr = 0, si = 0, ci = 0;
    for (const auto& p : ps.points) {
        double phase =
            2 * M_PI *
            (h0 * (static_cast<double>(p.first) / static_cast<double>(kScale)) +
             h1 * (static_cast<double>(p.second) / static_cast<double>(kScale)));
        double c = std::cos(phase), s = std::sin(phase);
        double t = c - cr, u = sr + t;
        cr = (u - sr) - t;
        sr = u;
        t = s - ci;
        u = si + t;
        ci = (u - si) - t;
        si = u;
    }
    rep.actual_sum = std::hypot(sr, si);

    DoubleInterval f1 = deriv_range(alpha, 1, N, L);
    DoubleInterval f2 = deriv_range(alpha, 2, N, L);
    DoubleInterval f3 = deriv_range(alpha, 3, N, L);
    DoubleInterval f4 = deriv_range(alpha, 4, N, L);

    // Kusmin-Landau on g' = h0 f' + h1 r f'': needs g' monotone (g''
    // single-signed) and the g' range inside an integer-free gap.
    {
        DoubleInterval g1 = combine(h0, f1, r, h1, f2);
        DoubleInterval g2 = combine(h0, f2, r, h1, f3);
        auto& e = rep.first;
        if (g2.lo <= 0 && g2.hi >= 0) {
            e.note = "g'' straddles 0: monotonicity hypothesis fails";
        } else if (std::floor(g1.lo) != std::floor(g1.hi) ||
                   g1.lo == std::floor(g1.lo)) {
            e.note = "g' range meets an integer: lambda1 = 0";
        } else {
            e.applicable = true;
            double m = std::floor(g1.lo);
            e.lambda = std::min(g1.lo - m, m + 1 - g1.hi);
            e.bound = 1.0 / e.lambda;
            e.ratio = rep.actual_sum / e.bound;
        }
    }
    // van der Corput on g'' = h0 f'' + h1 r f'''.
    {
        DoubleInterval g2 = combine(h0, f2, r, h1, f3);
        auto& e = rep.second;
        if (g2.lo <= 0 && g2.hi >= 0) {
            e.note = "|g''| not bounded away from 0 on the interval";
        } else {
            e.applicable = true;
            e.lambda = std::min(std::abs(g2.lo), std::abs(g2.hi));
            e.c_factor = std::max(std::abs(g2.lo), std::abs(g2.hi)) / e.lambda;
            e.bound = L * std::sqrt(e.lambda) + 1.0 / std::sqrt(e.lambda);
            e.ratio = rep.actual_sum / e.bound;
        }
    }
    // Third-derivative test on g''' = h0 f''' + h1 r f''''.
    {
        DoubleInterval g3 = combine(h0, f3, r, h1, f4);
        auto& e = rep.third;
        if (g3.lo <= 0 && g3.hi >= 0) {
            e.note = "|g'''| not bounded away from 0 on the interval";
        } else {
            double lam = std::min(std::abs(g3.lo), std::abs(g3.hi));
            if (lam >= 1) {
                e.note = "lambda3 >= 1: outside the test's window";
            } else {
                e.applicable = true;
                e.lambda = lam;
                e.c_factor = std::max(std::abs(g3.lo), std::abs(g3.hi)) / lam;
                e.bound = L * std::pow(lam, 1.0 / 6) + std::pow(lam, -1.0 / 3);
                e.ratio = rep.actual_sum / e.bound;
            }
        }
    }
    return rep;
}

}  // namespace psprog
