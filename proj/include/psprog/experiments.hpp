#ifndef PSPROG_EXPERIMENTS_HPP
#define PSPROG_EXPERIMENTS_HPP

#include <string>
#include <vector>

#include "psprog/polytope.hpp"
#include "psprog/progressions.hpp"

namespace psprog {

struct ExperimentOptions {
    int threads = 0;
    // Classify with the polytope criterion first and brute-force only the
    // Uncertain cases.  Must be a pure optimization: counts are identical
    // either way.
    bool use_criterion = false;
};

// ---------------------------------------------------------------------------
// Fixed-r density along a grid of N values.

struct DensityReport {
    std::string function;
    int k = 0, d = 0;
    long r = 1;
    std::vector<long> grid;
    std::vector<long long> counts;
    std::vector<Rational> densities;  // count / N
    Rational target;                  // vol(C_{k,d+1}); meaningless for x log x
    bool target_is_limit = true;      // false for the non-equidistributed kind
    std::vector<double> bound_big_o;  // convergence-rate bound F(N); power d=1 only
};

DensityReport density_fixed_r(const ProgressionQuery& q, std::vector<long> grid,
                              const ExperimentOptions& opts = {});

// ---------------------------------------------------------------------------
// Short-interval density over [N, N+L).

struct ShortIntervalReport {
    std::string function;
    int k = 0;
    long r = 1;
    long N = 0, L = 0;
    long long count = 0;
    Rational density;
    Rational target;
    // Three theoretical bound shapes; quiet NaN when the case does not
    // apply at this alpha.
    double bound_case1 = 0, bound_case2 = 0, bound_case3 = 0;
    double bound_best = 0;
    int bound_best_case = 0;
};

ShortIntervalReport density_short_interval(const ProgressionQuery& q, long N, long L,
                                           const ExperimentOptions& opts = {});

// ---------------------------------------------------------------------------
// Variable common difference: counts progressions P as sets.  A length-k
// AP contained in [1, N] is exactly a pair (n, r) with n + (k-1) r <= N
// (first term and common difference), so counting pairs counts subsets
// once each.

struct VariableRReport {
    Rational alpha;
    int k = 0, d = 0;
    std::vector<long> grid;
    std::vector<long long> pair_counts;
    std::vector<double> normalized;  // count / N^{2 - alpha/(d+1)}
    double a_tilde = 0;              // explicit liminf coefficient
    double b_tilde = 0;              // explicit limsup coefficient
    long prune_from = 0;             // below this n the r loop is exhaustive
};

VariableRReport count_variable_r(const Rational& alpha, int k, int d,
                                 std::vector<long> grid,
                                 const ExperimentOptions& opts = {});

// Exhaustive double loop, used as the oracle for the pruned fast path.
long long count_variable_r_unpruned(const Rational& alpha, int k, int d, long N);

// sup_{0<x<1} vol(C^-_{k,d+1}(x)) x^{1/(d+1)}, by exact volumes on a
// refined grid.
double variable_r_sup_coefficient(int k, int d);

// ---------------------------------------------------------------------------
// Gap lengths L_{alpha,k,r}(x): distance from x to the next progression
// start.

struct GapReport {
    Rational alpha;
    int k = 0;
    long r = 1;
    std::vector<long> x_grid;
    std::vector<long> lengths;
    std::vector<bool> censored;      // scan cap hit; length is a lower bound
    std::vector<double> ratios;      // L / x^{2-alpha}
    std::vector<double> ratios_conj; // L / x^{1-alpha/2}; k = 3 only, else empty
    Rational appendix_lower;         // (k-3)/(alpha(alpha-1) r (k-1)); k >= 4
    long scan_cap_base = 0;
};

GapReport gap_lengths(const Rational& alpha, int k, long r, std::vector<long> x_grid,
                      const ExperimentOptions& opts = {});

// Fraction of N <= M with L_{alpha,3,r}(N) <= N^{1-alpha/2} log N.
double gap_dense_fraction(const Rational& alpha, long r, long M,
                          const ExperimentOptions& opts = {});

// ---------------------------------------------------------------------------
// Density as a function of alpha at fixed N (the D_{N,k,r}(alpha) sweep).

struct SweepReport {
    int k = 0;
    long r = 1;
    long N = 0;
    std::vector<Rational> alpha_grid;
    std::vector<double> densities;
};

SweepReport alpha_sweep(int k, long r, long N, std::vector<Rational> alpha_grid,
                        const ExperimentOptions& opts = {});

// ---------------------------------------------------------------------------
// x log x: density band instead of a limit.

struct XLogXBandReport {
    int k = 0;
    long r = 1;
    std::vector<long> grid;
    std::vector<long long> counts;
    std::vector<Rational> densities;
    // Certified enclosures of the band endpoints
    //   [1/((e^{1/r}-1) r (k-1)),  e^{1/r}/((e^{1/r}-1) r (k-1))].
    double band_lo_outer = 0, band_lo_inner = 0;
    double band_hi_inner = 0, band_hi_outer = 0;
};

XLogXBandReport xlogx_band(int k, long r, std::vector<long> grid,
                           const ExperimentOptions& opts = {});

// Band endpoints alone (certified): used for the r -> oo convergence check.
void xlogx_band_endpoints(int k, long r, double* lo_outer, double* lo_inner,
                          double* hi_inner, double* hi_outer);

}  // namespace psprog

#endif  // PSPROG_EXPERIMENTS_HPP
