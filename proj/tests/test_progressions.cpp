#include <doctest.h>

#include <cstdint>
#include <random>
#include <vector>

#include "psprog/progressions.hpp"

using namespace psprog;

namespace {

ProgressionQuery q32(int k = 3, int d = 1, long r = 1) {
    return ProgressionQuery(k, d, r, FunctionSpec::power(make_rational(3, 2)));
}

// Independent membership oracle: strictly increasing and interpolated by a
// rational polynomial of degree <= d (Lagrange fit through the first d+1
// points, then check the rest).
bool lagrange_oracle(const std::vector<long long>& seq, int d) {
    for (size_t i = 1; i < seq.size(); ++i)
        if (seq[i] <= seq[i - 1]) return false;
    auto eval_fit = [&](long j) {
        Rational acc(0);
        for (int i = 0; i <= d; ++i) {
            Rational term(static_cast<long>(seq[i]));
            for (int t = 0; t <= d; ++t) {
                if (t == i) continue;
                term *= make_rational(j - t, i - t);
            }
            acc += term;
        }
        return acc;
    };
    for (size_t j = 0; j < seq.size(); ++j)
        if (eval_fit(static_cast<long>(j)) != Rational(static_cast<long>(seq[j])))
            return false;
    return true;
}

}  // namespace

TEST_CASE("difference operator") {
    CHECK(diff({2, 5, 8}, 1, 1) == std::vector<long long>{3, 3});
    CHECK(diff({1, 1, 1, 1}, 1, 2) == std::vector<long long>{0, 0});
    CHECK(diff({0, 1, 4, 9}, 1, 2) == std::vector<long long>{2, 2});
    CHECK(diff({0, 1, 4, 9, 16}, 2, 1) == std::vector<long long>{4, 8, 12});
    CHECK_THROWS_AS(diff({1, 2}, 1, 2), std::invalid_argument);
}

TEST_CASE("P_{k,d} membership and Newton coefficients") {
    auto r = is_in_pkd({2, 5, 8}, 1);
    CHECK(r.in_pkd);
    CHECK(r.newton_coeffs == std::vector<long long>{2, 3});

    CHECK_FALSE(is_in_pkd({1, 2, 5}, 1).in_pkd);
    CHECK_FALSE(is_in_pkd({5, 3, 1}, 1).in_pkd);

    auto sq = is_in_pkd({1, 4, 9, 16}, 2);
    CHECK(sq.in_pkd);
    CHECK(sq.newton_coeffs == std::vector<long long>{1, 3, 2});
    // Newton reconstruction: seq(j) = sum_i coeffs[i] C(j,i).
    for (long j = 0; j < 4; ++j) {
        long long v = sq.newton_coeffs[0] + sq.newton_coeffs[1] * j +
                      sq.newton_coeffs[2] * j * (j - 1) / 2;
        CHECK(v == (j + 1) * (j + 1));
    }
    CHECK_THROWS_AS(is_in_pkd({1, 2}, 1), std::invalid_argument);
}

TEST_CASE("membership equals the Lagrange interpolation oracle") {
    std::mt19937_64 rng(20240817);
    for (int trial = 0; trial < 300; ++trial) {
        int d = 1 + static_cast<int>(rng() % 3);
        int k = d + 2 + static_cast<int>(rng() % 3);
        std::vector<long long> seq(k);
        if (trial % 2 == 0) {
            // random values
            long long v = static_cast<long long>(rng() % 50);
            for (int i = 0; i < k; ++i) {
                v += 1 + static_cast<long long>(rng() % 6);
                seq[i] = v;
            }
        } else {
            // polynomial values with occasional corruption
            long long a = static_cast<long long>(rng() % 5 + 1);
            long long b = static_cast<long long>(rng() % 7 + d);
            long long c = static_cast<long long>(rng() % 4);
            for (int i = 0; i < k; ++i)
                seq[i] = c + b * i + a * i * i * (d >= 2 ? 1 : 0) +
                         (d >= 2 ? 0 : a * i);
            if (rng() % 3 == 0) seq[k - 1] += 1 + static_cast<long long>(rng() % 2);
        }
        CAPTURE(d);
        CAPTURE(k);
        CHECK(is_in_pkd(seq, d).in_pkd == lagrange_oracle(seq, d));
    }
}

TEST_CASE("brute force detection for floor(n^{3/2})") {
    // floors: 1, 2, 5, 8, 11, 13, ... (oracle-checked in test_functions)
    CHECK(brute_force_test(q32(), 2));        // (2,5,8)
    CHECK_FALSE(brute_force_test(q32(), 1));  // (1,2,5)
    // k=4 at n=2: floors (2,5,8,11), differences 3,3,3 -> inside.
    CHECK(brute_force_test(q32(4), 2));
    CHECK_FALSE(brute_force_test(q32(4), 4));  // (8,11,14,18)
    CHECK_THROWS_AS(brute_force_test(q32(), 0), std::invalid_argument);
}

TEST_CASE("query validation") {
    CHECK_THROWS_AS(ProgressionQuery(2, 1, 1, FunctionSpec::power(make_rational(3, 2))),
                    std::invalid_argument);
    CHECK_THROWS_AS(ProgressionQuery(4, 0, 1, FunctionSpec::power(make_rational(3, 2))),
                    std::invalid_argument);
    CHECK_THROWS_AS(ProgressionQuery(3, 1, 0, FunctionSpec::power(make_rational(3, 2))),
                    std::invalid_argument);
}

TEST_CASE("taylor vector: d=1 gives (f, r f')") {
    for (long r : {1L, 3L}) {
        ProgressionQuery q = q32(3, 1, r);
        auto tv = taylor_vector(q, 50, 128);
        CHECK(tv.a.size() == 2);
        auto f = eval(q.f, 0, 50, 128);
        auto fp = eval(q.f, 1, 50, 128);
        CHECK(tv.a[0].contains(f.lower_rational()));
        CHECK(tv.a[0].contains(f.upper_rational()));
        // a_1 = r f'(n): compare midpoints at certified width
        CHECK(tv.a[1].midpoint_double() ==
              doctest::Approx(r * fp.midpoint_double()).epsilon(1e-12));
        CHECK(tv.eps > 0);
    }
}

TEST_CASE("taylor vector: d=2, r=1 expands to (f, f'+f''/2, f'')") {
    ProgressionQuery q(4, 2, 1, FunctionSpec::power(make_rational(5, 2)));
    auto tv = taylor_vector(q, 80, 192);
    REQUIRE(tv.a.size() == 3);
    double f = eval(q.f, 0, 80, 192).midpoint_double();
    double fp = eval(q.f, 1, 80, 192).midpoint_double();
    double fpp = eval(q.f, 2, 80, 192).midpoint_double();
    CHECK(tv.a[0].midpoint_double() == doctest::Approx(f).epsilon(1e-12));
    CHECK(tv.a[1].midpoint_double() == doctest::Approx(fp + fpp / 2).epsilon(1e-12));
    CHECK(tv.a[2].midpoint_double() == doctest::Approx(fpp).epsilon(1e-12));

    // Cross-check against Taylor interpolation: sum_i a_i C(j,i) should
    // reproduce f(n+j) up to the remainder bound eps for j = 0,1,2.
    for (long j = 0; j <= 2; ++j) {
        double value = eval(q.f, 0, 80 + j, 192).midpoint_double();
        double fit = tv.a[0].midpoint_double() + tv.a[1].midpoint_double() * j +
                     tv.a[2].midpoint_double() * j * (j - 1) / 2;
        CHECK(std::abs(value - fit) <= to_double(tv.eps) + 1e-18);
    }
}

TEST_CASE("taylor remainder bound eps decreases and matches f^{(d+1)}") {
    ProgressionQuery q = q32();
    auto t100 = taylor_vector(q, 100, 128);
    auto t10000 = taylor_vector(q, 10000, 128);
    CHECK(t100.eps > t10000.eps);
    // eps(n) = (r(k-1))^2/2 * f''(n) here: (2)^2/2 * (3/4) n^{-1/2}
    double expect = 2.0 * 0.75 / std::sqrt(100.0);
    CHECK(to_double(t100.eps) == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("criterion verdicts are sound against brute force") {
    ProgressionQuery q = q32();
    int uncertain = 0, in_count = 0, out_count = 0;
    for (long n = 100; n <= 3000; ++n) {
        auto c = criterion_classify(q, n);
        if (c.verdict == Verdict::kUncertain) {
            ++uncertain;
            continue;
        }
        bool truth = brute_force_test(q, n);
        if (c.verdict == Verdict::kCertainlyIn) {
            ++in_count;
            CHECK(truth);
            REQUIRE(c.shift.has_value());
            CHECK(c.shift->size() == 1);
            // d=1 accepted shifts are only 0 or -1
            CHECK((c.shift->at(0) == 0 || c.shift->at(0) == -1));
        } else {
            ++out_count;
            CHECK_FALSE(truth);
        }
    }
    CHECK(in_count > 0);
    CHECK(out_count > 0);
    // At these n, eps ~ 1.5/sqrt(n) < 0.15, so uncertainty is rare.
    CHECK(uncertain < (3000 - 100) / 5);
}

TEST_CASE("criterion soundness for d=2") {
    ProgressionQuery q(4, 2, 1, FunctionSpec::power(make_rational(5, 2)));
    for (long n = 2000; n <= 2600; ++n) {
        auto c = criterion_classify(q, n);
        if (c.verdict == Verdict::kUncertain) continue;
        CHECK((c.verdict == Verdict::kCertainlyIn) == brute_force_test(q, n));
    }
}

TEST_CASE("criterion rejects the pre-asymptotic regime") {
    // eps(n) = 2 f''(n) * ... >= 1/2 for tiny n with alpha close to 2.
    ProgressionQuery q(3, 1, 5, FunctionSpec::power(make_rational(3, 2)));
    CHECK_THROWS_AS(criterion_classify(q, 1), std::domain_error);
}

TEST_CASE("floor table equals direct evaluation") {
    FloorTable table(FunctionSpec::power(make_rational(3, 2)));
    table.ensure(500);
    for (long n = 1; n <= 500; ++n)
        CHECK(Integer(static_cast<long>(table.at(n))) ==
              floor_f(table.function(), n));
    ProgressionQuery q = q32();
    int agree = 0;
    for (long n = 1; n <= 490; ++n) {
        CHECK(table.test_progression(n, 1, 3, 1) == brute_force_test(q, n));
        ++agree;
    }
    CHECK(agree == 490);
    CHECK_THROWS_AS(table.at(501), std::out_of_range);
}

TEST_CASE("uncertain fraction scales with the remainder bound eps") {
    ProgressionQuery q = q32();
    auto fraction_over = [&](long N) {
        long uncertain = 0, total = 0;
        for (long n = N; n <= 2 * N; n += 2) {
            ++total;
            if (criterion_classify(q, n).verdict == Verdict::kUncertain) ++uncertain;
        }
        return static_cast<double>(uncertain) / static_cast<double>(total);
    };
    auto eps_at = [&](long N) { return to_double(taylor_vector(q, N, 128).eps); };
    // Fit the constant low and check it holds higher up (2x slack).
    double c_fit = fraction_over(500) / eps_at(500);
    for (long N : {1000L, 2000L}) {
        CAPTURE(N);
        CHECK(fraction_over(N) <= std::max(2.0 * c_fit, 1.0) * eps_at(N));
    }
}

TEST_CASE("criterion soundness for d=3") {
    // eps = (r(k-1))^4/4! * f''''(n) = 70 n^{-1/2} for alpha = 7/2, k = 5:
    // the asymptotic regime starts near n = 2e4.
    ProgressionQuery q(5, 3, 1, FunctionSpec::power(make_rational(7, 2)));
    int decided = 0;
    for (long n = 20000; n <= 20400; ++n) {
        auto c = criterion_classify(q, n);
        if (c.verdict == Verdict::kUncertain) continue;
        ++decided;
        CHECK((c.verdict == Verdict::kCertainlyIn) == brute_force_test(q, n));
    }
    CHECK(decided > 0);
}
