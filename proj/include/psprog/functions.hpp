#ifndef PSPROG_FUNCTIONS_HPP
#define PSPROG_FUNCTIONS_HPP

#include <optional>
#include <string>

#include "psprog/certified.hpp"
#include "psprog/rational.hpp"

namespace psprog {

// The function catalog.  Each member grows strictly between x^d log x and
// x^{d+1}, has f' >= 1 and positive decreasing f^{(d+1)} on [n0, oo), and
// (except x log x) the tuple (f, f', .., f^{(d)}/d!) equidistributes mod 1.
// Those facts are recorded per kind rather than re-derived; x log x is
// flagged so density experiments report a band instead of a limit.
enum class FunctionKind {
    kPower,            // x^alpha, alpha in (d, d+1)
    kXLogPow,          // x (log x)^beta, beta > 1, d = 1
    kX2OverLogPow,     // x^2 / (log x)^gamma, gamma > 0, d = 1
    kX2OverLogLogPow,  // x^2 / (log log x)^gamma, gamma > 0, d = 1
    kXLogX,            // x log x, d = 1, not equidistributed
};

struct FunctionSpec {
    FunctionKind kind;
    Rational param;  // alpha, beta or gamma; unused for x log x
    long n0;         // domain start; f' >= 1 and f^{(d+1)} > 0 decreasing from here
    int d;           // target polynomial degree

    static FunctionSpec power(const Rational& alpha);
    static FunctionSpec x_log_pow(const Rational& beta);
    static FunctionSpec x2_over_log_pow(const Rational& gamma);
    static FunctionSpec x2_over_loglog_pow(const Rational& gamma);
    static FunctionSpec x_log_x();

    bool equidistributed() const { return kind != FunctionKind::kXLogX; }
    std::string to_string() const;
};

// CLI selection grammar: pow:3/2, xlog:2, x2log:1, x2loglog:1, xlogx.
// The parameter after the colon is parsed as an exact rational.
FunctionSpec parse_function(const std::string& text);

// Certified enclosure of f^{(order)}(x), order in [0, d+1].
CertifiedReal eval(const FunctionSpec& f, int order, long x, int bits = kPrecisionStart);

// Returns f(x) as an integer when it provably is one.  For x^{p/q} this is
// decidable: x^{p/q} is an integer iff x^p is a perfect q-th power.  The
// log-bearing kinds return nothing for x >= 2 (log of an integer >= 2 is
// irrational, so f(x) cannot be an integer there; recorded modeling
// assumption for the catalog).
std::optional<Integer> exact_integer_check(const FunctionSpec& f, long x);

// Exact floor of f(x).  Power kinds go through the integer q-th root, the
// rest through the certified enclosure with the adaptive precision
// schedule; "unresolved floor" propagates rather than guessing.
Integer floor_f(const FunctionSpec& f, long x);

// Scaling regularity constant: an upper bound c with
// f^{(d+1)}(delta x) <= c f^{(d+1)}(x) for all large x.  Exact for powers
// (c = delta^{alpha-d-1}); for log-bearing kinds only a sampled numerical
// estimate is available and *estimated is set.
Rational c_of_delta_upper(const FunctionSpec& f, const Rational& delta,
                          bool* estimated = nullptr);

struct RegularityData {
    long dprime_positive_from;  // f^{(d+1)} > 0 and decreasing from here on
};
RegularityData regularity(const FunctionSpec& f);

namespace detail {
// d^order/dx^order of x^alpha at integer x, any order; the public eval is
// capped at d+1 but the discrepancy bounds need third and fourth
// derivatives.
CertifiedReal power_derivative(const Rational& alpha, int order, long x, int bits);

// f^{(order)}(x) as an exact rational when it is one (power kind only).
std::optional<Rational> power_derivative_rational(const Rational& alpha, int order,
                                                  long x);
}  // namespace detail

}  // namespace psprog

#endif  // PSPROG_FUNCTIONS_HPP
