#include "psprog/rational.hpp"

#include <array>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace psprog {

Rational make_rational(const Integer& num, const Integer& den) {
    if (den == 0) throw std::invalid_argument("make_rational: zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

Rational make_rational(long num, long den) {
    return make_rational(Integer(num), Integer(den));
}

Rational parse_rational(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("parse_rational: empty string");
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        Integer num, den;
        if (num.set_str(text.substr(0, slash), 10) != 0 ||
            den.set_str(text.substr(slash + 1), 10) != 0) {
            throw std::invalid_argument("parse_rational: bad fraction '" + text + "'");
        }
        return make_rational(num, den);
    }
    auto dot = text.find('.');
    if (dot != std::string::npos) {
        std::string digits = text.substr(0, dot) + text.substr(dot + 1);
        size_t frac_digits = text.size() - dot - 1;
        if (digits.empty() || digits == "-" || digits == "+")
            throw std::invalid_argument("parse_rational: bad decimal '" + text + "'");
        Integer num;
        if (num.set_str(digits, 10) != 0)
            throw std::invalid_argument("parse_rational: bad decimal '" + text + "'");
        Integer den;
        mpz_ui_pow_ui(den.get_mpz_t(), 10, frac_digits);
        return make_rational(num, den);
    }
    Integer num;
    if (num.set_str(text, 10) != 0)
        throw std::invalid_argument("parse_rational: bad integer '" + text + "'");
    return Rational(num);
}

std::string format_rational(const Rational& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string format_decimal(const Rational& q, int significant_digits) {
    if (q == 0) return "0";
    mpf_class f(q, significant_digits * 4 + 32);
    mp_exp_t exp10 = 0;
    std::string mant = f.get_str(exp10, 10, significant_digits);
    bool neg = !mant.empty() && mant[0] == '-';
    std::string digits = neg ? mant.substr(1) : mant;
    std::string out = neg ? "-" : "";
    if (exp10 <= 0) {
        out += "0.";
        out.append(static_cast<size_t>(-exp10), '0');
        out += digits;
    } else if (static_cast<size_t>(exp10) >= digits.size()) {
        out += digits;
        out.append(static_cast<size_t>(exp10) - digits.size(), '0');
    } else {
        out += digits.substr(0, exp10) + "." + digits.substr(exp10);
    }
    return out;
}

double to_double(const Rational& q) { return q.get_d(); }

Integer factorial(unsigned long n) {
    Integer r;
    mpz_fac_ui(r.get_mpz_t(), n);
    return r;
}

Rational falling_factorial(const Rational& x, unsigned long l) {
    Rational r(1);
    Rational term = x;
    for (unsigned long m = 0; m < l; ++m) {
        r *= term;
        term -= 1;
    }
    return r;
}

Rational binomial(long n, long l) {
    if (n < 0 || l < 0) throw std::invalid_argument("binomial: negative argument");
    Integer r;
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n),
                 static_cast<unsigned long>(l));
    return Rational(r);
}

namespace {

// Full table up to kStirlingMax, built once.  Readers after the call see a
// fully constructed table, so concurrent lookups are safe.
const std::vector<std::vector<Integer>>& stirling_table() {
    static const std::vector<std::vector<Integer>> table = [] {
        std::vector<std::vector<Integer>> t(kStirlingMax + 1);
        t[0] = {Integer(1)};
        for (int l = 1; l <= kStirlingMax; ++l) {
            t[l].assign(l + 1, Integer(0));
            for (int i = 1; i <= l; ++i) {
                // S(l,i) = i*S(l-1,i) + S(l-1,i-1)
                Integer v = t[l - 1][i - 1];
                if (i <= l - 1) v += Integer(i) * t[l - 1][i];
                t[l][i] = v;
            }
        }
        return t;
    }();
    return table;
}

}  // namespace

Rational stirling2(int l, int i) {
    if (l < 0 || i < 0 || i > l || l > kStirlingMax)
        throw std::invalid_argument("stirling2: requires 0 <= i <= l <= 64");
    return Rational(stirling_table()[l][i]);
}

}  // namespace psprog
