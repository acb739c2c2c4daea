#ifndef PSPROG_DISCREPANCY_HPP
#define PSPROG_DISCREPANCY_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "psprog/functions.hpp"
#include "psprog/rational.hpp"

namespace psprog {

// Fractional parts of (f(n), r f'(n)) for n in [N, N+L), snapped to a
// 2^-40 grid.  The snap makes every later comparison exact integer
// arithmetic; coord_error records certification width plus the snap step.
constexpr int kCoordBits = 40;

struct PointSet2D {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> points;
    std::string function;
    long r = 1;
    long N = 0;
    long L = 0;
    double coord_error = 0;
    long unresolved = 0;  // coordinates whose floor refinement hit its budget
};

PointSet2D orbit(const FunctionSpec& f, long r, long N, long L, int bits = 96);

enum class DiscrepancyMode { kExact, kGrid };

// Exact mode is O(L^3)-ish and capped; grid mode snaps boxes to a G x G
// grid and carries an explicit one-sided error radius:
//   value <= D(points) <= value + error_radius.
constexpr long kExactDiscrepancyCap = 2048;

struct DiscrepancyResult {
    double value = 0;
    double error_radius = 0;
    DiscrepancyMode mode = DiscrepancyMode::kExact;
    std::string exact_fraction;  // exact mode only: value as "num/den"
    int grid_size = 0;
};

DiscrepancyResult extreme_discrepancy(const PointSet2D& ps, DiscrepancyMode mode,
                                      int grid_size = 1024, int threads = 0);

// Erdos-Turan-Koksma right-hand side 1/H + sum_{0<|h|_inf<=H} |S_h|/(L u(h))
// evaluated by direct exponential sums (compensated accumulation);
// fp_error bounds the accumulated floating-point error of `value`.
struct EtkResult {
    double value = 0;
    double fp_error = 0;
    int H = 0;
};

EtkResult etk_bound(const PointSet2D& ps, int H, int threads = 0);

// Admissible multiplier for dimension 2: D <= kEtkConstant * etk value
// (see the note in discrepancy.cpp).
constexpr double kEtkConstant = 4.5;

struct TheoryBound {
    double case1 = 0, case2 = 0, case3 = 0;
    double best = 0;
    int best_case = 1;
};

// Three-case discrepancy bound for the (n^alpha, r alpha n^{alpha-1})
// orbit over [N, N+L); cases 2/3 apply only on their alpha ranges.
TheoryBound theory_bound(const Rational& alpha, long r, long N, long L);

// J_N <= (4 d sqrt(d) + 1) D_N^{1/d}.
double isotropic_bound(double discrepancy, int d);

// First/second/third derivative-test bounds for the exponential sum
// sum e(g(n)), g = h0 f + h1 r f', on [N, N+L).  The tests' absolute
// constants are not pinned, so each entry reports the raw bound shape and
// the measured |sum|/bound ratio instead of asserting.
struct DerivativeTestEntry {
    bool applicable = false;
    std::string note;
    double lambda = 0;
    double c_factor = 0;  // max/min derivative ratio over the interval
    double bound = 0;
    double ratio = 0;  // |sum| / bound
};

struct DerivativeTestReport {
    double actual_sum = 0;  // |sum_{n=N}^{N+L-1} e(g(n))|
    DerivativeTestEntry first, second, third;
};

DerivativeTestReport derivative_test_bounds(const Rational& alpha, long r, int h0,
                                            int h1, long N, long L);

}  // namespace psprog

#endif  // PSPROG_DISCREPANCY_HPP
