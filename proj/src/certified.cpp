#include "psprog/certified.hpp"

#include <algorithm>
#include <cmath>

namespace psprog {

UnresolvedFloorError::UnresolvedFloorError(Rational lower, Rational upper, int bits)
    : std::runtime_error("unresolved floor: enclosure [" + format_rational(lower) +
                         ", " + format_rational(upper) + "] straddles an integer at " +
                         std::to_string(bits) + " bits"),
      lower_(std::move(lower)),
      upper_(std::move(upper)),
      bits_(bits) {}

CertifiedReal::CertifiedReal(int bits) : bits_(bits) {
    mpfr_init2(lo_, bits);
    mpfr_init2(hi_, bits);
    mpfr_set_zero(lo_, 1);
    mpfr_set_zero(hi_, 1);
}

CertifiedReal::CertifiedReal(const CertifiedReal& o) : bits_(o.bits_) {
    mpfr_init2(lo_, bits_);
    mpfr_init2(hi_, bits_);
    mpfr_set(lo_, o.lo_, MPFR_RNDD);
    mpfr_set(hi_, o.hi_, MPFR_RNDU);
}

CertifiedReal::CertifiedReal(CertifiedReal&& o) noexcept : bits_(o.bits_) {
    mpfr_init2(lo_, 2);
    mpfr_init2(hi_, 2);
    mpfr_swap(lo_, o.lo_);
    mpfr_swap(hi_, o.hi_);
}

CertifiedReal& CertifiedReal::operator=(const CertifiedReal& o) {
    if (this != &o) {
        set_bits(o.bits_);
        mpfr_set(lo_, o.lo_, MPFR_RNDD);
        mpfr_set(hi_, o.hi_, MPFR_RNDU);
    }
    return *this;
}

CertifiedReal& CertifiedReal::operator=(CertifiedReal&& o) noexcept {
    if (this != &o) {
        bits_ = o.bits_;
        mpfr_swap(lo_, o.lo_);
        mpfr_swap(hi_, o.hi_);
    }
    return *this;
}

CertifiedReal::~CertifiedReal() {
    mpfr_clear(lo_);
    mpfr_clear(hi_);
}

void CertifiedReal::set_bits(int bits) {
    if (bits_ != bits) {
        mpfr_set_prec(lo_, bits);
        mpfr_set_prec(hi_, bits);
        bits_ = bits;
    }
}

CertifiedReal CertifiedReal::from_integer(const Integer& n, int bits) {
    CertifiedReal r(bits);
    mpfr_set_z(r.lo_, n.get_mpz_t(), MPFR_RNDD);
    mpfr_set_z(r.hi_, n.get_mpz_t(), MPFR_RNDU);
    return r;
}

CertifiedReal CertifiedReal::from_long(long n, int bits) {
    CertifiedReal r(bits);
    mpfr_set_si(r.lo_, n, MPFR_RNDD);
    mpfr_set_si(r.hi_, n, MPFR_RNDU);
    return r;
}

CertifiedReal CertifiedReal::from_rational(const Rational& q, int bits) {
    CertifiedReal r(bits);
    mpfr_set_q(r.lo_, q.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(r.hi_, q.get_mpq_t(), MPFR_RNDU);
    return r;
}

CertifiedReal CertifiedReal::from_endpoints(const Rational& lo, const Rational& hi,
                                            int bits) {
    if (lo > hi) throw std::invalid_argument("from_endpoints: lo > hi");
    CertifiedReal r(bits);
    mpfr_set_q(r.lo_, lo.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(r.hi_, hi.get_mpq_t(), MPFR_RNDU);
    return r;
}

Rational CertifiedReal::lower_rational() const {
    Rational q;
    mpfr_get_q(q.get_mpq_t(), lo_);
    return q;
}

Rational CertifiedReal::upper_rational() const {
    Rational q;
    mpfr_get_q(q.get_mpq_t(), hi_);
    return q;
}

double CertifiedReal::lower_double() const { return mpfr_get_d(lo_, MPFR_RNDD); }
double CertifiedReal::upper_double() const { return mpfr_get_d(hi_, MPFR_RNDU); }

double CertifiedReal::midpoint_double() const {
    return 0.5 * (mpfr_get_d(lo_, MPFR_RNDN) + mpfr_get_d(hi_, MPFR_RNDN));
}

double CertifiedReal::width_double() const {
    mpfr_t w;
    mpfr_init2(w, 64);
    mpfr_sub(w, hi_, lo_, MPFR_RNDU);
    double d = mpfr_get_d(w, MPFR_RNDU);
    mpfr_clear(w);
    return d;
}

CertifiedReal CertifiedReal::operator-() const {
    CertifiedReal r(bits_);
    mpfr_neg(r.lo_, hi_, MPFR_RNDD);
    mpfr_neg(r.hi_, lo_, MPFR_RNDU);
    return r;
}

CertifiedReal CertifiedReal::operator+(const CertifiedReal& o) const {
    CertifiedReal r(std::max(bits_, o.bits_));
    mpfr_add(r.lo_, lo_, o.lo_, MPFR_RNDD);
    mpfr_add(r.hi_, hi_, o.hi_, MPFR_RNDU);
    return r;
}

CertifiedReal CertifiedReal::operator-(const CertifiedReal& o) const {
    CertifiedReal r(std::max(bits_, o.bits_));
    mpfr_sub(r.lo_, lo_, o.hi_, MPFR_RNDD);
    mpfr_sub(r.hi_, hi_, o.lo_, MPFR_RNDU);
    return r;
}

CertifiedReal CertifiedReal::operator*(const CertifiedReal& o) const {
    const int bits = std::max(bits_, o.bits_);
    CertifiedReal r(bits);
    mpfr_t t;
    mpfr_init2(t, bits);
    // Lower endpoint: min of the four products rounded down.
    mpfr_mul(r.lo_, lo_, o.lo_, MPFR_RNDD);
    mpfr_mul(t, lo_, o.hi_, MPFR_RNDD);
    mpfr_min(r.lo_, r.lo_, t, MPFR_RNDD);
    mpfr_mul(t, hi_, o.lo_, MPFR_RNDD);
    mpfr_min(r.lo_, r.lo_, t, MPFR_RNDD);
    mpfr_mul(t, hi_, o.hi_, MPFR_RNDD);
    mpfr_min(r.lo_, r.lo_, t, MPFR_RNDD);
    // Upper endpoint: max of the four products rounded up.
    mpfr_mul(r.hi_, lo_, o.lo_, MPFR_RNDU);
    mpfr_mul(t, lo_, o.hi_, MPFR_RNDU);
    mpfr_max(r.hi_, r.hi_, t, MPFR_RNDU);
    mpfr_mul(t, hi_, o.lo_, MPFR_RNDU);
    mpfr_max(r.hi_, r.hi_, t, MPFR_RNDU);
    mpfr_mul(t, hi_, o.hi_, MPFR_RNDU);
    mpfr_max(r.hi_, r.hi_, t, MPFR_RNDU);
    mpfr_clear(t);
    return r;
}

CertifiedReal CertifiedReal::operator/(const CertifiedReal& o) const {
    if (mpfr_sgn(o.lo_) <= 0 && mpfr_sgn(o.hi_) >= 0)
        throw std::domain_error("CertifiedReal: division by enclosure containing 0");
    const int bits = std::max(bits_, o.bits_);
    CertifiedReal r(bits);
    mpfr_t t;
    mpfr_init2(t, bits);
    mpfr_div(r.lo_, lo_, o.lo_, MPFR_RNDD);
    mpfr_div(t, lo_, o.hi_, MPFR_RNDD);
    mpfr_min(r.lo_, r.lo_, t, MPFR_RNDD);
    mpfr_div(t, hi_, o.lo_, MPFR_RNDD);
    mpfr_min(r.lo_, r.lo_, t, MPFR_RNDD);
    mpfr_div(t, hi_, o.hi_, MPFR_RNDD);
    mpfr_min(r.lo_, r.lo_, t, MPFR_RNDD);
    mpfr_div(r.hi_, lo_, o.lo_, MPFR_RNDU);
    mpfr_div(t, lo_, o.hi_, MPFR_RNDU);
    mpfr_max(r.hi_, r.hi_, t, MPFR_RNDU);
    mpfr_div(t, hi_, o.lo_, MPFR_RNDU);
    mpfr_max(r.hi_, r.hi_, t, MPFR_RNDU);
    mpfr_div(t, hi_, o.hi_, MPFR_RNDU);
    mpfr_max(r.hi_, r.hi_, t, MPFR_RNDU);
    mpfr_clear(t);
    return r;
}

CertifiedReal CertifiedReal::add_rational(const Rational& q) const {
    CertifiedReal r(bits_);
    mpfr_add_q(r.lo_, lo_, q.get_mpq_t(), MPFR_RNDD);
    mpfr_add_q(r.hi_, hi_, q.get_mpq_t(), MPFR_RNDU);
    return r;
}

CertifiedReal CertifiedReal::sub_integer(const Integer& n) const {
    CertifiedReal r(bits_);
    mpfr_sub_z(r.lo_, lo_, n.get_mpz_t(), MPFR_RNDD);
    mpfr_sub_z(r.hi_, hi_, n.get_mpz_t(), MPFR_RNDU);
    return r;
}

CertifiedReal CertifiedReal::mul_rational(const Rational& q) const {
    CertifiedReal r(bits_);
    if (q >= 0) {
        mpfr_mul_q(r.lo_, lo_, q.get_mpq_t(), MPFR_RNDD);
        mpfr_mul_q(r.hi_, hi_, q.get_mpq_t(), MPFR_RNDU);
    } else {
        mpfr_mul_q(r.lo_, hi_, q.get_mpq_t(), MPFR_RNDD);
        mpfr_mul_q(r.hi_, lo_, q.get_mpq_t(), MPFR_RNDU);
    }
    return r;
}

CertifiedReal CertifiedReal::log() const {
    if (mpfr_sgn(lo_) <= 0)
        throw std::domain_error("CertifiedReal::log: enclosure not strictly positive");
    CertifiedReal r(bits_);
    mpfr_log(r.lo_, lo_, MPFR_RNDD);
    mpfr_log(r.hi_, hi_, MPFR_RNDU);
    return r;
}

CertifiedReal CertifiedReal::exp() const {
    CertifiedReal r(bits_);
    mpfr_exp(r.lo_, lo_, MPFR_RNDD);
    mpfr_exp(r.hi_, hi_, MPFR_RNDU);
    return r;
}

CertifiedReal CertifiedReal::pow(const Rational& e) const {
    if (e == 0) return from_long(1, bits_);
    if (e.get_den() == 1 && mpfr_sgn(lo_) > 0) {
        // Integer exponent on a positive base: endpoint-monotone.
        CertifiedReal r(bits_);
        const Integer z = e.get_num();
        if (z > 0) {
            mpfr_pow_z(r.lo_, lo_, z.get_mpz_t(), MPFR_RNDD);
            mpfr_pow_z(r.hi_, hi_, z.get_mpz_t(), MPFR_RNDU);
        } else {
            mpfr_pow_z(r.lo_, hi_, z.get_mpz_t(), MPFR_RNDD);
            mpfr_pow_z(r.hi_, lo_, z.get_mpz_t(), MPFR_RNDU);
        }
        return r;
    }
    return (log().mul_rational(e)).exp();
}

bool CertifiedReal::certainly_lt(const Rational& q) const {
    return mpfr_cmp_q(hi_, q.get_mpq_t()) < 0;
}
bool CertifiedReal::certainly_le(const Rational& q) const {
    return mpfr_cmp_q(hi_, q.get_mpq_t()) <= 0;
}
bool CertifiedReal::certainly_gt(const Rational& q) const {
    return mpfr_cmp_q(lo_, q.get_mpq_t()) > 0;
}
bool CertifiedReal::certainly_ge(const Rational& q) const {
    return mpfr_cmp_q(lo_, q.get_mpq_t()) >= 0;
}
bool CertifiedReal::contains(const Rational& q) const {
    return mpfr_cmp_q(lo_, q.get_mpq_t()) <= 0 && mpfr_cmp_q(hi_, q.get_mpq_t()) >= 0;
}

Integer CertifiedReal::floor_lower() const {
    Integer z;
    mpfr_get_z(z.get_mpz_t(), lo_, MPFR_RNDD);
    return z;
}

Integer CertifiedReal::floor_upper() const {
    Integer z;
    mpfr_get_z(z.get_mpz_t(), hi_, MPFR_RNDD);
    return z;
}

bool CertifiedReal::certified_floor(Integer* out) const {
    Integer a = floor_lower();
    if (a != floor_upper()) return false;
    if (out) *out = a;
    return true;
}

void CertifiedReal::intersect(const CertifiedReal& o) {
    if (mpfr_cmp(o.lo_, lo_) > 0) mpfr_set(lo_, o.lo_, MPFR_RNDD);
    if (mpfr_cmp(o.hi_, hi_) < 0) mpfr_set(hi_, o.hi_, MPFR_RNDU);
    if (mpfr_cmp(lo_, hi_) > 0)
        throw std::logic_error("CertifiedReal::intersect: disjoint enclosures");
}

}  // namespace psprog
