#include "psprog/functions.hpp"

#include <stdexcept>

namespace psprog {

namespace {

// f^{(order)}(x) for the d = 1 log-bearing kinds; assumes x >= 2 so the
// logs are positive (and x >= 16 for the loglog kind).
CertifiedReal eval_log_kind(const FunctionSpec& f, int order, long x, int bits) {
    const CertifiedReal X = CertifiedReal::from_long(x, bits);
    const CertifiedReal L = X.log();
    const Rational& g = f.param;
    switch (f.kind) {
        case FunctionKind::kXLogPow: {
            // f = x L^b;  f' = L^{b-1}(L+b);  f'' = (b/x) L^{b-2} (L+b-1)
            const Rational& b = g;
            if (order == 0) return X * L.pow(b);
            if (order == 1) return L.pow(b - 1) * L.add_rational(b);
            return (L.pow(b - 2) * L.add_rational(b - 1)).mul_rational(b) / X;
        }
        case FunctionKind::kXLogX: {
            if (order == 0) return X * L;
            if (order == 1) return L.add_rational(1);
            return CertifiedReal::from_long(1, bits) / X;
        }
        case FunctionKind::kX2OverLogPow: {
            // f = x^2 L^{-g};  f' = x L^{-g-1}(2L-g)
            // f'' = L^{-g-2} (2L^2 - 3g L + g(g+1))
            if (order == 0) return X.pow(2) * L.pow(-g);
            if (order == 1) return X * L.pow(-g - 1) * L.mul_rational(2).add_rational(-g);
            CertifiedReal poly = (L * L).mul_rational(2) - L.mul_rational(3 * g);
            poly = poly.add_rational(g * (g + 1));
            return L.pow(-g - 2) * poly;
        }
        case FunctionKind::kX2OverLogLogPow: {
            // M = log log x
            // f = x^2 M^{-g};  f' = x M^{-g-1}(2M - g/L)
            // f'' = 2 M^{-g} - 3g M^{-g-1}/L + g M^{-g-1}/L^2 + g(g+1) M^{-g-2}/L^2
            const CertifiedReal M = L.log();
            if (order == 0) return X.pow(2) * M.pow(-g);
            if (order == 1) {
                CertifiedReal inner = M.mul_rational(2) - CertifiedReal::from_rational(g, bits) / L;
                return X * M.pow(-g - 1) * inner;
            }
            const CertifiedReal L2 = L * L;
            CertifiedReal r = M.pow(-g).mul_rational(2);
            r = r - (M.pow(-g - 1) / L).mul_rational(3 * g);
            r = r + (M.pow(-g - 1) / L2).mul_rational(g);
            r = r + (M.pow(-g - 2) / L2).mul_rational(g * (g + 1));
            return r;
        }
        default:
            throw std::logic_error("eval_log_kind: not a log kind");
    }
}

// Certified comparison helpers for the safe-n0 scan.
bool fp_ge_one(const FunctionSpec& f, long x, int bits) {
    FunctionSpec g = f;
    g.n0 = 1;  // scanning below the eventual n0
    return eval_log_kind(g, 1, x, bits).certainly_ge(Rational(1));
}

CertifiedReal fpp(const FunctionSpec& f, long x, int bits) {
    FunctionSpec g = f;
    g.n0 = 1;
    return eval_log_kind(g, 2, x, bits);
}

// Smallest integer n where f' >= 1 and f'' > 0 strictly decreasing across
// a forward probe window, all checks certified.
long scan_safe_n0(const FunctionSpec& f, long start) {
    constexpr int kWindow = 48;
    constexpr int kBits = 192;
    constexpr long kLimit = 1L << 22;
    for (long n = start; n <= kLimit; ++n) {
        if (!fp_ge_one(f, n, kBits)) continue;
        bool ok = true;
        CertifiedReal prev = fpp(f, n, kBits);
        if (!prev.certainly_gt(Rational(0))) continue;
        for (int w = 1; w <= kWindow; ++w) {
            CertifiedReal cur = fpp(f, n + w, kBits);
            if (!cur.certainly_gt(Rational(0)) ||
                !cur.certainly_lt(prev.lower_rational())) {
                ok = false;
                break;
            }
            prev = std::move(cur);
        }
        if (ok) return n;
    }
    throw std::runtime_error("scan_safe_n0: no safe domain start below 2^22");
}

}  // namespace

FunctionSpec FunctionSpec::power(const Rational& alpha) {
    if (alpha <= 1) throw std::invalid_argument("power: alpha must exceed 1");
    if (alpha.get_den() == 1)
        throw std::invalid_argument("power: alpha must be non-integral");
    Integer fl = alpha.get_num() / alpha.get_den();
    long d = fl.get_si();
    return FunctionSpec{FunctionKind::kPower, alpha, 1, static_cast<int>(d)};
}

FunctionSpec FunctionSpec::x_log_pow(const Rational& beta) {
    if (beta <= 1) throw std::invalid_argument("xlog: beta must exceed 1");
    return FunctionSpec{FunctionKind::kXLogPow, beta, 16, 1};
}

FunctionSpec FunctionSpec::x2_over_log_pow(const Rational& gamma) {
    if (gamma <= 0) throw std::invalid_argument("x2log: gamma must be positive");
    FunctionSpec f{FunctionKind::kX2OverLogPow, gamma, 2, 1};
    f.n0 = scan_safe_n0(f, 2);
    return f;
}

FunctionSpec FunctionSpec::x2_over_loglog_pow(const Rational& gamma) {
    if (gamma <= 0) throw std::invalid_argument("x2loglog: gamma must be positive");
    FunctionSpec f{FunctionKind::kX2OverLogLogPow, gamma, 16, 1};
    f.n0 = scan_safe_n0(f, 16);
    return f;
}

FunctionSpec FunctionSpec::x_log_x() {
    return FunctionSpec{FunctionKind::kXLogX, Rational(0), 16, 1};
}

std::string FunctionSpec::to_string() const {
    switch (kind) {
        case FunctionKind::kPower: return "pow:" + format_rational(param);
        case FunctionKind::kXLogPow: return "xlog:" + format_rational(param);
        case FunctionKind::kX2OverLogPow: return "x2log:" + format_rational(param);
        case FunctionKind::kX2OverLogLogPow: return "x2loglog:" + format_rational(param);
        case FunctionKind::kXLogX: return "xlogx";
    }
    return "?";
}

FunctionSpec parse_function(const std::string& text) {
    auto colon = text.find(':');
    std::string head = text.substr(0, colon);
    auto param = [&]() {
        if (colon == std::string::npos)
            throw std::invalid_argument("function '" + text + "' needs a parameter");
        return parse_rational(text.substr(colon + 1));
    };
    if (head == "pow") return FunctionSpec::power(param());
    if (head == "xlog") return FunctionSpec::x_log_pow(param());
    if (head == "x2log") return FunctionSpec::x2_over_log_pow(param());
    if (head == "x2loglog") return FunctionSpec::x2_over_loglog_pow(param());
    if (head == "xlogx") {
        if (colon != std::string::npos)
            throw std::invalid_argument("xlogx takes no parameter");
        return FunctionSpec::x_log_x();
    }
    throw std::invalid_argument("unknown function '" + text +
                                "' (expected pow:, xlog:, x2log:, x2loglog:, xlogx)");
}

namespace detail {

CertifiedReal power_derivative(const Rational& alpha, int order, long x, int bits) {
    const Rational coeff = falling_factorial(alpha, order);
    const CertifiedReal X = CertifiedReal::from_long(x, bits);
    return X.pow(alpha - order).mul_rational(coeff);
}

std::optional<Rational> power_derivative_rational(const Rational& alpha, int order,
                                                  long x) {
    if (x <= 0) return std::nullopt;
    const Rational e = alpha - order;  // still has denominator q
    const Integer q = e.get_den();
    const Integer p = e.get_num();
    Rational base_pow;  // x^{p/q}
    if (x == 1) {
        base_pow = 1;
    } else {
        const Integer ap = abs(p);
        Integer xp;
        mpz_pow_ui(xp.get_mpz_t(), Integer(x).get_mpz_t(), ap.get_ui());
        Integer root;
        int exact = mpz_root(root.get_mpz_t(), xp.get_mpz_t(), q.get_ui());
        if (!exact) return std::nullopt;
        base_pow = (p >= 0) ? Rational(root) : make_rational(Integer(1), root);
    }
    return falling_factorial(alpha, order) * base_pow;
}

}  // namespace detail

CertifiedReal eval(const FunctionSpec& f, int order, long x, int bits) {
    if (order < 0 || order > f.d + 1)
        throw std::invalid_argument("eval: order must lie in [0, d+1]");
    if (x < f.n0) throw std::invalid_argument("eval: x below domain start n0");
    if (f.kind == FunctionKind::kPower)
        return detail::power_derivative(f.param, order, x, bits);
    return eval_log_kind(f, order, x, bits);
}

std::optional<Integer> exact_integer_check(const FunctionSpec& f, long x) {
    if (x <= 0) return std::nullopt;
    if (f.kind != FunctionKind::kPower) return std::nullopt;
    if (x == 1) return Integer(1);
    const Integer p = f.param.get_num();
    const unsigned long q = f.param.get_den().get_ui();
    Integer xp;
    mpz_pow_ui(xp.get_mpz_t(), Integer(x).get_mpz_t(), p.get_ui());
    Integer root;
    if (mpz_root(root.get_mpz_t(), xp.get_mpz_t(), q)) return root;
    return std::nullopt;
}

Integer floor_f(const FunctionSpec& f, long x) {
    if (x < f.n0) throw std::invalid_argument("floor_f: x below domain start n0");
    if (f.kind == FunctionKind::kPower) {
        // floor(x^{p/q}) = floor((x^p)^{1/q}); mpz_root truncates, which is
        // exactly the floor for a positive radicand.
        const Integer p = f.param.get_num();
        const unsigned long q = f.param.get_den().get_ui();
        Integer xp;
        mpz_pow_ui(xp.get_mpz_t(), Integer(x).get_mpz_t(), p.get_ui());
        Integer root;
        mpz_root(root.get_mpz_t(), xp.get_mpz_t(), q);
        return root;
    }
    if (auto exact = exact_integer_check(f, x)) return *exact;
    return certify_floor([&](int bits) { return eval(f, 0, x, bits); });
}

Rational c_of_delta_upper(const FunctionSpec& f, const Rational& delta,
                          bool* estimated) {
    if (delta <= 0 || delta >= 1)
        throw std::invalid_argument("c_of_delta_upper: delta must lie in (0,1)");
    if (f.kind == FunctionKind::kPower) {
        if (estimated) *estimated = false;
        // c(delta) = delta^{alpha-d-1}, an upper bound taken from the
        // certified enclosure.
        CertifiedReal c =
            CertifiedReal::from_rational(delta, 256).pow(f.param - (f.d + 1));
        return c.upper_rational();
    }
    // No closed form pinned for the log-bearing kinds: sample the ratio
    // f^{(d+1)}(delta x)/f^{(d+1)}(x) on a geometric grid and pad by 5/4.
    if (estimated) *estimated = true;
    const long den = delta.get_den().get_si();
    Rational best(0);
    for (int i = 0; i < 20; ++i) {
        long x = (f.n0 * den) << i;
        if (x <= 0) break;
        long dx = (Integer(delta.get_num() * (x / den))).get_si();
        if (dx < f.n0) continue;
        CertifiedReal ratio = eval(f, f.d + 1, dx, 192) / eval(f, f.d + 1, x, 192);
        Rational up = ratio.upper_rational();
        if (up > best) best = up;
    }
    if (best < 1) best = 1;
    return best * make_rational(5, 4);
}

RegularityData regularity(const FunctionSpec& f) { return RegularityData{f.n0}; }

}  // namespace psprog
