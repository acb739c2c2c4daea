#ifndef PSPROG_PROGRESSIONS_HPP
#define PSPROG_PROGRESSIONS_HPP

#include <optional>
#include <string>
#include <vector>

#include "psprog/certified.hpp"
#include "psprog/functions.hpp"
#include "psprog/rational.hpp"

namespace psprog {

// A detection/counting problem: does (floor(f(n + r j)))_{j=0}^{k-1} lie in
// P_{k,d}, the strictly increasing length-k sequences with constant d-th
// step-1 differences?
struct ProgressionQuery {
    int k;
    int d;
    long r;
    FunctionSpec f;

    ProgressionQuery(int k_, int d_, long r_, FunctionSpec f_);
};

// Applies the difference operator (Delta_r a)(n) = a(n+r) - a(n)
// `order` times; output length = input length - r_step*order.
std::vector<long long> diff(const std::vector<long long>& seq, long r_step, int order);

struct MembershipResult {
    bool in_pkd = false;
    // Newton forward-difference coefficients Delta^i seq(0), i in [0,d];
    // present exactly when in_pkd.  They reconstruct the sequence as
    // seq(j) = sum_i coeffs[i] * C(j,i).
    std::vector<long long> newton_coeffs;
};

MembershipResult is_in_pkd(const std::vector<long long>& seq, int d);

// Membership by direct exact evaluation of the k floors.
bool brute_force_test(const ProgressionQuery& q, long n);

// The coefficients a_i(n) = sum_{l=i}^d (r^l/l!) f^{(l)}(n) S(l,i) i!
// expressing the degree-d Taylor polynomial of j -> f(n+rj) in the
// binomial basis C(j,i), plus a rational upper bound eps on the remainder
// coefficient (r(k-1))^{d+1}/(d+1)! * sup f^{(d+1)} over [n, n+r(k-1)].
struct TaylorVector {
    long n = 0;
    std::vector<CertifiedReal> a;
    Rational eps;
};

TaylorVector taylor_vector(const ProgressionQuery& q, long n,
                           int bits = kPrecisionStart);

enum class Verdict { kCertainlyIn, kCertainlyOut, kUncertain };
std::string to_string(Verdict v);

struct CriterionOutcome {
    Verdict verdict = Verdict::kUncertain;
    std::optional<std::vector<long>> shift;  // s_1..s_d for CertainlyIn
    Rational eps_used;
};

// Classifies n by the polytope criterion without evaluating any floors of
// f(n+rj):
//   CertainlyIn  - ({a_i}+s_i) lies in the one-sided set
//                  {0 <= y_0 < 1, 0 <= sum C(j,i) y_i < 1-eps} for some
//                  integer shift (sound: the remainder is in (0, eps]),
//   CertainlyOut - for every candidate shift some face functional provably
//                  misses (-eps, 1),
//   Uncertain    - anything the enclosures cannot decide.
// Candidate shifts are enumerated from certified feasibility ranges of the
// triangular faces j = 1..d, which provably covers every shift that could
// satisfy all faces.  Requires eps(n) < 1/2.
CriterionOutcome criterion_classify(const ProgressionQuery& q, long n);

// Dense cache of exact floors of f over [n0, max_n].  Experiments fill it
// once (parallel, deterministic) and run all window tests as table reads.
class FloorTable {
public:
    explicit FloorTable(FunctionSpec f);

    // Extends coverage to [n0, hi]; no-op if already covered.
    void ensure(long hi, int threads = 0);

    long long at(long n) const;

    // Same predicate as brute_force_test, read from the table.
    bool test_progression(long n, long r, int k, int d) const;

    const FunctionSpec& function() const { return f_; }
    long max_n() const { return lo_ + static_cast<long>(vals_.size()) - 1; }

private:
    FunctionSpec f_;
    long lo_;
    std::vector<long long> vals_;
};

}  // namespace psprog

#endif  // PSPROG_PROGRESSIONS_HPP
