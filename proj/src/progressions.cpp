#include "psprog/progressions.hpp"

#include <limits>
#include <stdexcept>

#include "psprog/parallel.hpp"

namespace psprog {

namespace {

long long to_i64(const Integer& z) {
    static_assert(sizeof(long) == 8, "LP64 assumed for floor storage");
    if (!z.fits_slong_p())
        throw std::overflow_error("floor value exceeds 64-bit range");
    return static_cast<long long>(z.get_si());
}

}  // namespace

ProgressionQuery::ProgressionQuery(int k_, int d_, long r_, FunctionSpec f_)
    : k(k_), d(d_), r(r_), f(std::move(f_)) {
    if (d < 1) throw std::invalid_argument("ProgressionQuery: d must be >= 1");
    if (k < d + 2) throw std::invalid_argument("ProgressionQuery: k must be >= d+2");
    if (r < 1) throw std::invalid_argument("ProgressionQuery: r must be >= 1");
}

std::vector<long long> diff(const std::vector<long long>& seq, long r_step, int order) {
    if (r_step < 1) throw std::invalid_argument("diff: r_step must be >= 1");
    if (order < 1) throw std::invalid_argument("diff: order must be >= 1");
    if (static_cast<long>(seq.size()) <= r_step * order)
        throw std::invalid_argument("diff: sequence shorter than r_step*order+1");
    std::vector<long long> cur = seq;
    for (int o = 0; o < order; ++o) {
        std::vector<long long> next(cur.size() - r_step);
        for (size_t i = 0; i < next.size(); ++i) next[i] = cur[i + r_step] - cur[i];
        cur = std::move(next);
    }
    return cur;
}

MembershipResult is_in_pkd(const std::vector<long long>& seq, int d) {
    if (d < 1) throw std::invalid_argument("is_in_pkd: d must be >= 1");
    if (static_cast<int>(seq.size()) < d + 2)
        throw std::invalid_argument("is_in_pkd: need length k >= d+2");
    MembershipResult res;
    for (size_t i = 1; i < seq.size(); ++i)
        if (seq[i] <= seq[i - 1]) return res;
    std::vector<long long> row = seq;
    std::vector<long long> coeffs;
    coeffs.push_back(row[0]);
    for (int o = 1; o <= d; ++o) {
        for (size_t i = 0; i + 1 < row.size(); ++i) row[i] = row[i + 1] - row[i];
        row.pop_back();
        coeffs.push_back(row[0]);
    }
    for (size_t i = 1; i < row.size(); ++i)
        if (row[i] != row[0]) return res;
    res.in_pkd = true;
    res.newton_coeffs = std::move(coeffs);
    return res;
}

bool brute_force_test(const ProgressionQuery& q, long n) {
    if (n < q.f.n0) throw std::invalid_argument("brute_force_test: n below n0");
    std::vector<long long> floors(q.k);
    for (int j = 0; j < q.k; ++j) floors[j] = to_i64(floor_f(q.f, n + q.r * j));
    return is_in_pkd(floors, q.d).in_pkd;
}

TaylorVector taylor_vector(const ProgressionQuery& q, long n, int bits) {
    if (n < q.f.n0) throw std::invalid_argument("taylor_vector: n below n0");
    if (q.d != q.f.d)
        throw std::invalid_argument("taylor_vector: query degree must match f");
    const int d = q.d;
    std::vector<CertifiedReal> derivs;
    derivs.reserve(d + 2);
    for (int l = 0; l <= d + 1; ++l) derivs.push_back(eval(q.f, l, n, bits));

    TaylorVector tv;
    tv.n = n;
    tv.a.reserve(d + 1);
    for (int i = 0; i <= d; ++i) {
        CertifiedReal acc(bits);
        Rational rl(1);
        for (int l = 0; l < i; ++l) rl *= q.r;
        for (int l = i; l <= d; ++l) {
            // (r^l / l!) S(l,i) i!
            Rational coef = rl * stirling2(l, i) * Rational(factorial(i)) /
                            Rational(factorial(l));
            acc = acc + derivs[l].mul_rational(coef);
            rl *= q.r;
        }
        tv.a.push_back(std::move(acc));
    }

    Integer span(q.r * static_cast<long>(q.k - 1));
    Integer span_pow;
    mpz_pow_ui(span_pow.get_mpz_t(), span.get_mpz_t(), d + 1);
    // f^{(d+1)} is positive and decreasing past n0, so its sup over
    // [n, n+r(k-1)] is the value at n.
    tv.eps = Rational(span_pow) / Rational(factorial(d + 1)) *
             derivs[d + 1].upper_rational();
    if (tv.eps < 0) tv.eps = 0;
    return tv;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::kCertainlyIn: return "certainly-in";
        case Verdict::kCertainlyOut: return "certainly-out";
        case Verdict::kUncertain: return "uncertain";
    }
    return "?";
}

namespace {

struct CriterionContext {
    int k, d;
    Rational eps;
    std::vector<CertifiedReal> frac;            // {a_i}
    std::vector<std::vector<long long>> binom;  // binom[j][i], j in [1,k)
};

// Integer range of s with [T.lo+s, T.hi+s] meeting the open interval
// (-eps, 1): -eps - T.hi < s < 1 - T.lo.
std::pair<Integer, Integer> shift_range(const CertifiedReal& T, const Rational& eps) {
    Rational lo = -eps - T.upper_rational();
    Rational hi = Rational(1) - T.lower_rational();
    Integer s_min, s_max;
    mpz_fdiv_q(s_min.get_mpz_t(), lo.get_num().get_mpz_t(), lo.get_den().get_mpz_t());
    s_min += 1;  // smallest integer strictly above lo
    mpz_cdiv_q(s_max.get_mpz_t(), hi.get_num().get_mpz_t(), hi.get_den().get_mpz_t());
    s_max -= 1;  // largest integer strictly below hi
    return {s_min, s_max};
}

struct SearchState {
    std::vector<long> shift;
    bool found_in = false;
    std::vector<long> in_shift;
    int in_count = 0;
    bool ambiguous = false;
};

// base_j for the current partial shift is maintained incrementally:
// faces_j = sum_i C(j,i) frac_i + sum_{chosen i} C(j,i) s_i.
void search(const CriterionContext& cx, int depth,
            std::vector<CertifiedReal>& faces, SearchState& st) {
    if (depth > cx.d) {
        bool all_in_minus = true;
        bool excluded = false;
        const Rational one_minus_eps = Rational(1) - cx.eps;
        for (int j = 1; j < cx.k && !excluded; ++j) {
            const CertifiedReal& F = faces[j];
            if (F.certainly_le(-cx.eps) || F.certainly_ge(Rational(1))) {
                excluded = true;
                all_in_minus = false;
                break;
            }
            if (!(F.certainly_ge(Rational(0)) && F.certainly_lt(one_minus_eps)))
                all_in_minus = false;
        }
        if (excluded) return;
        if (all_in_minus) {
            st.found_in = true;
            st.in_shift = st.shift;
            ++st.in_count;
        } else {
            st.ambiguous = true;
        }
        return;
    }
    auto [s_min, s_max] = shift_range(faces[depth], cx.eps);
    for (Integer s = s_min; s <= s_max; s += 1) {
        long sv = s.get_si();
        st.shift[depth - 1] = sv;
        std::vector<CertifiedReal> next = faces;
        if (sv != 0) {
            for (int j = depth; j < cx.k; ++j) {
                long c = static_cast<long>(cx.binom[j][depth]);
                if (c != 0)
                    next[j] = next[j].add_rational(Rational(c) * Rational(sv));
            }
        }
        search(cx, depth + 1, next, st);
    }
}

CriterionOutcome classify_at_bits(const ProgressionQuery& q, long n, int bits) {
    TaylorVector tv = taylor_vector(q, n, bits);
    if (tv.eps >= make_rational(1, 2))
        throw std::domain_error(
            "criterion_classify: n below asymptotic regime (eps >= 1/2)");

    CriterionOutcome out;
    out.eps_used = tv.eps;

    // Resolve floor(a_i) with a bounded refinement budget; degrade to
    // Uncertain when an a_i sits too close to an integer to separate.
    constexpr int kFloorBudgetBits = 4096;
    std::vector<CertifiedReal> a = tv.a;
    std::vector<Integer> floors(q.d + 1);
    for (int i = 0; i <= q.d; ++i) {
        int b = bits;
        while (!a[i].certified_floor(&floors[i])) {
            b *= 2;
            if (b > kFloorBudgetBits) {
                out.verdict = Verdict::kUncertain;
                return out;
            }
            TaylorVector fine = taylor_vector(q, n, b);
            for (int t = 0; t <= q.d; ++t) {
                fine.a[t].intersect(a[t]);
                a[t] = fine.a[t];
            }
        }
    }

    CriterionContext cx;
    cx.k = q.k;
    cx.d = q.d;
    cx.eps = tv.eps;
    cx.frac.reserve(q.d + 1);
    for (int i = 0; i <= q.d; ++i) cx.frac.push_back(a[i].sub_integer(floors[i]));
    cx.binom.assign(q.k, std::vector<long long>(q.d + 1, 0));
    for (int j = 0; j < q.k; ++j)
        for (int i = 0; i <= q.d && i <= j; ++i)
            cx.binom[j][i] = to_i64(binomial(j, i).get_num());

    // faces[j] starts at sum_i C(j,i) {a_i}; shifts are added as the DFS
    // descends.
    std::vector<CertifiedReal> faces(q.k, CertifiedReal(bits));
    for (int j = 1; j < q.k; ++j) {
        CertifiedReal acc = cx.frac[0];
        for (int i = 1; i <= q.d && i <= j; ++i)
            acc = acc +
                  cx.frac[i].mul_rational(Rational(static_cast<long>(cx.binom[j][i])));
        faces[j] = std::move(acc);
    }

    SearchState st;
    st.shift.assign(q.d, 0);
    search(cx, 1, faces, st);

    if (st.in_count > 1)
        throw std::logic_error("criterion_classify: shift uniqueness violated");
    if (st.found_in) {
        out.verdict = Verdict::kCertainlyIn;
        out.shift = st.in_shift;
    } else if (!st.ambiguous) {
        out.verdict = Verdict::kCertainlyOut;
    } else {
        out.verdict = Verdict::kUncertain;
    }
    return out;
}

}  // namespace

CriterionOutcome criterion_classify(const ProgressionQuery& q, long n) {
    if (n < q.f.n0) throw std::invalid_argument("criterion_classify: n below n0");
    CriterionOutcome out = classify_at_bits(q, n, kPrecisionStart);
    if (out.verdict == Verdict::kUncertain) {
        // One retry at higher working precision; genuine eps-margin cases
        // stay Uncertain, which is allowed.
        out = classify_at_bits(q, n, 512);
    }
    return out;
}

FloorTable::FloorTable(FunctionSpec f) : f_(std::move(f)), lo_(f_.n0) {}

void FloorTable::ensure(long hi, int threads) {
    long have = lo_ + static_cast<long>(vals_.size());
    if (hi < have) return;
    size_t old = vals_.size();
    vals_.resize(static_cast<size_t>(hi - lo_ + 1));
    long begin = lo_ + static_cast<long>(old);
    parallel_for(begin, hi + 1, threads, [&](long a, long b) {
        for (long n = a; n < b; ++n)
            vals_[static_cast<size_t>(n - lo_)] = to_i64(floor_f(f_, n));
    });
}

long long FloorTable::at(long n) const {
    if (n < lo_ || n > max_n()) throw std::out_of_range("FloorTable::at");
    return vals_[static_cast<size_t>(n - lo_)];
}

bool FloorTable::test_progression(long n, long r, int k, int d) const {
    if (n < lo_ || n + r * (k - 1) > max_n())
        throw std::out_of_range("FloorTable::test_progression");
    constexpr int kStack = 64;
    long long buf[kStack];
    if (k <= kStack) {
        const long long* base = vals_.data() + (n - lo_);
        long long prev = base[0];
        for (int j = 0; j < k; ++j) {
            long long v = base[static_cast<size_t>(r) * j];
            if (j > 0 && v <= prev) return false;
            buf[j] = v;
            prev = v;
        }
        int len = k;
        for (int o = 0; o < d; ++o, --len)
            for (int i = 0; i + 1 < len; ++i) buf[i] = buf[i + 1] - buf[i];
        for (int i = 1; i < len; ++i)
            if (buf[i] != buf[0]) return false;
        return true;
    }
    std::vector<long long> seq(k);
    for (int j = 0; j < k; ++j) seq[j] = at(n + r * j);
    return is_in_pkd(seq, d).in_pkd;
}

}  // namespace psprog
