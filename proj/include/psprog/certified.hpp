#ifndef PSPROG_CERTIFIED_HPP
#define PSPROG_CERTIFIED_HPP

#include <mpfr.h>

#include <stdexcept>
#include <string>
#include <utility>

#include "psprog/rational.hpp"

namespace psprog {

// Adaptive precision schedule: start at 128 bits, double on failure, and
// treat the 16384-bit cap as a hard error rather than an approximation.
constexpr int kPrecisionStart = 128;
constexpr int kPrecisionCap = 16384;

// Thrown when an enclosure still straddles an integer at the precision cap.
// Carries the final enclosure; callers must never guess a floor.
class UnresolvedFloorError : public std::runtime_error {
public:
    UnresolvedFloorError(Rational lower, Rational upper, int bits);
    const Rational& lower() const { return lower_; }
    const Rational& upper() const { return upper_; }
    int precision_bits() const { return bits_; }

private:
    Rational lower_, upper_;
    int bits_;
};

// A certified enclosure [lower, upper] of a real number.  Endpoints are
// MPFR values, i.e. dyadic rationals (mantissa * 2^e), so halving,
// comparison and conversion to Rational are exact.  All arithmetic rounds
// the lower endpoint down and the upper endpoint up, preserving
// lower <= true value <= upper.
class CertifiedReal {
public:
    explicit CertifiedReal(int bits = kPrecisionStart);
    CertifiedReal(const CertifiedReal& o);
    CertifiedReal(CertifiedReal&& o) noexcept;
    CertifiedReal& operator=(const CertifiedReal& o);
    CertifiedReal& operator=(CertifiedReal&& o) noexcept;
    ~CertifiedReal();

    static CertifiedReal from_integer(const Integer& n, int bits = kPrecisionStart);
    static CertifiedReal from_long(long n, int bits = kPrecisionStart);
    static CertifiedReal from_rational(const Rational& q, int bits = kPrecisionStart);
    // [lo, hi] given exactly as rationals.
    static CertifiedReal from_endpoints(const Rational& lo, const Rational& hi,
                                        int bits = kPrecisionStart);

    int precision_bits() const { return bits_; }

    Rational lower_rational() const;
    Rational upper_rational() const;
    double lower_double() const;   // rounded down
    double upper_double() const;   // rounded up
    double midpoint_double() const;
    double width_double() const;   // rounded up

    CertifiedReal operator-() const;
    CertifiedReal operator+(const CertifiedReal& o) const;
    CertifiedReal operator-(const CertifiedReal& o) const;
    CertifiedReal operator*(const CertifiedReal& o) const;
    CertifiedReal operator/(const CertifiedReal& o) const;  // o must exclude 0

    CertifiedReal add_rational(const Rational& q) const;
    CertifiedReal sub_integer(const Integer& n) const;
    CertifiedReal mul_rational(const Rational& q) const;

    // Natural log; requires a strictly positive enclosure.
    CertifiedReal log() const;
    CertifiedReal exp() const;
    // x^e for rational e, computed as exp(e*log x); requires lower > 0.
    CertifiedReal pow(const Rational& e) const;

    // True enclosure comparisons against exact rationals.
    bool certainly_lt(const Rational& q) const;   // upper <  q
    bool certainly_le(const Rational& q) const;   // upper <= q
    bool certainly_gt(const Rational& q) const;   // lower >  q
    bool certainly_ge(const Rational& q) const;   // lower >= q
    bool contains(const Rational& q) const;

    Integer floor_lower() const;
    Integer floor_upper() const;
    // When floor(lower) == floor(upper) the floor of the true value is
    // certified; returns false while the enclosure straddles an integer.
    bool certified_floor(Integer* out) const;

    // Intersect with another enclosure of the same value; keeps enclosures
    // nested across refinement.  Throws if the intersection is empty
    // (caller bug: the enclosures do not bound the same number).
    void intersect(const CertifiedReal& o);

private:
    mpfr_t lo_, hi_;
    int bits_;

    void set_bits(int bits);
    friend CertifiedReal interval_binop(const CertifiedReal& a, const CertifiedReal& b,
                                        int op);
};

// Refines the enclosure produced by `eval(bits)` until the floor is
// certified.  `eval` must return enclosures of one fixed real number; the
// schedule doubles the precision from `start_bits` up to `cap_bits` and
// intersects successive enclosures so refinement is nested.
template <typename Eval>
Integer certify_floor(Eval&& eval, int start_bits = kPrecisionStart,
                      int cap_bits = kPrecisionCap) {
    CertifiedReal enc = eval(start_bits);
    Integer out;
    if (enc.certified_floor(&out)) return out;
    for (int bits = start_bits * 2; bits <= cap_bits; bits *= 2) {
        CertifiedReal next = eval(bits);
        next.intersect(enc);
        enc = std::move(next);
        if (enc.certified_floor(&out)) return out;
    }
    throw UnresolvedFloorError(enc.lower_rational(), enc.upper_rational(),
                               enc.precision_bits());
}

}  // namespace psprog

#endif  // PSPROG_CERTIFIED_HPP
