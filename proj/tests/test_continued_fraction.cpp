#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ssflow/continued_fraction.hpp"

using namespace ssflow;

namespace {

__extension__ typedef __int128 i128;

__extension__ typedef __float128 f128;

// n alpha - m for alpha = (P + sqrt d) / Q in binary128.
long double quad_offset(const Irrational& a, std::int64_t n, std::int64_t m) {
    f128 r = std::sqrt(static_cast<long double>(a.d));
    for (int i = 0; i < 4; ++i) r = (r + static_cast<f128>(a.d) / r) / 2;
    const f128 alpha = (static_cast<f128>(a.P) + r) / static_cast<f128>(a.Q);
    return static_cast<long double>(static_cast<f128>(n) * alpha - static_cast<f128>(m));
}

std::vector<std::int64_t> floor_recursion(long double x, int depth) {
    std::vector<std::int64_t> a;
    for (int k = 0; k < depth; ++k) {
        const long double fl = std::floor(x);
        a.push_back(static_cast<std::int64_t>(fl));
        x = 1.0L / (x - fl);
    }
    return a;
}

void expect_recurrences(const ContinuedFraction& cf) {
    for (std::size_t k = 0; k < cf.size(); ++k) {
        const long kk = static_cast<long>(k);
        EXPECT_EQ(cf.p[k], cf.a(k) * cf.p_at(kk - 1) + cf.p_at(kk - 2));
        EXPECT_EQ(cf.q[k], cf.a(k) * cf.q_at(kk - 1) + cf.q_at(kk - 2));
        const i128 det = static_cast<i128>(cf.p_at(kk)) * cf.q_at(kk - 1) - static_cast<i128>(cf.p_at(kk - 1)) * cf.q_at(kk);
        EXPECT_EQ(static_cast<long long>(det), (k % 2 == 0) ? -1 : 1);
        if (k > 0) {
            EXPECT_GE(static_cast<double>(cf.q[k]), std::pow(std::numbers::phi, static_cast<double>(k) - 1.0) - 1e-9);
        }
    }
}

}  // namespace

TEST(ContinuedFraction, GoldenIsAllOnesWithFibonacciDenominators) {
    const auto cf = expand_cf(Irrational::golden(), 12);
    ASSERT_EQ(cf.size(), 12u);
    std::int64_t a = 1, b = 1;
    for (std::size_t k = 0; k < 12; ++k) {
        EXPECT_EQ(cf.a(k), 1);
        EXPECT_EQ(cf.q[k], a);
        const std::int64_t c = a + b;
        a = b;
        b = c;
    }
    EXPECT_EQ(cf.stop, CfStop::depth);
    expect_recurrences(cf);
}

TEST(ContinuedFraction, RationalLiteralTerminates) {
    const auto cf = expand_cf(2.5, 20);
    EXPECT_EQ(cf.partial_quotients, (std::vector<std::int64_t>{2, 2}));
    EXPECT_TRUE(cf.rational());
    EXPECT_TRUE(std::isinf(cf.q_primes.back()));
}

TEST(ContinuedFraction, OnePlusInversePiMatchesFloorRecursion) {
    const long double x = 1.0L + 1.0L / std::numbers::pi_v<long double>;
    const auto cf = expand_cf(static_cast<double>(x), 6);
    EXPECT_EQ(cf.partial_quotients, floor_recursion(x, 6));
    EXPECT_EQ(cf.partial_quotients, (std::vector<std::int64_t>{1, 3, 7, 15, 1, 292}));
}

TEST(ContinuedFraction, SquareRootsArePeriodic) {
    const auto s2 = expand_cf(Irrational::sqrt_of(2), 30);
    EXPECT_EQ(s2.a(0), 1);
    for (std::size_t k = 1; k < s2.size(); ++k) EXPECT_EQ(s2.a(k), 2);
    const auto s3 = expand_cf(Irrational::sqrt_of(3), 30);
    EXPECT_EQ(s3.a(0), 1);
    for (std::size_t k = 1; k < s3.size(); ++k) EXPECT_EQ(s3.a(k), k % 2 ? 1 : 2);
    const auto s7 = expand_cf(Irrational::sqrt_of(7), 9);
    EXPECT_EQ(s7.partial_quotients, (std::vector<std::int64_t>{2, 1, 1, 1, 4, 1, 1, 1, 4}));
}

TEST(ContinuedFraction, QuadraticMatchesFloorRecursionForEarlyTerms) {
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<std::int64_t> dd(2, 500), pp(0, 9), qq(1, 6);
    for (int trial = 0; trial < 50; ++trial) {
        const Irrational a = Irrational::quadratic(pp(rng), dd(rng), qq(rng));
        if (a.kind != Irrational::Kind::quadratic) continue;
        const auto cf = expand_cf(a, 8);
        EXPECT_EQ(cf.partial_quotients, floor_recursion(a.value_ld(), 8)) << a.describe();
        expect_recurrences(cf);
    }
}

TEST(ContinuedFraction, PerfectSquareCollapsesToLiteral) {
    const Irrational a = Irrational::quadratic(1, 9, 2);
    EXPECT_EQ(a.kind, Irrational::Kind::literal);
    EXPECT_DOUBLE_EQ(a.value(), 2.0);
}

TEST(ContinuedFraction, LiteralStopsAtResolution) {
    const auto cf = expand_cf(std::numbers::phi, 100);
    EXPECT_EQ(cf.stop, CfStop::resolution);
    EXPECT_TRUE(cf.early_stop());
    EXPECT_LT(cf.size(), 100u);
    EXPECT_GE(cf.size(), 20u);
    for (std::size_t k = 1; k < cf.size(); ++k) EXPECT_EQ(cf.a(k), 1);
    expect_recurrences(cf);
}

TEST(ContinuedFraction, ExactRationalModeExpandsTheDyadic) {
    const auto cf = expand_cf(std::numbers::phi, 200, CfMode::exact_rational);
    EXPECT_TRUE(cf.rational());
    const double v = static_cast<double>(static_cast<long double>(cf.p.back()) / cf.q.back());
    EXPECT_EQ(v, std::numbers::phi);
}

TEST(ContinuedFraction, QuadraticOverflowIsReported) {
    const auto cf = expand_cf(Irrational::golden(), 200);
    EXPECT_EQ(cf.stop, CfStop::overflow);
    EXPECT_LT(cf.size(), 200u);
    expect_recurrences(cf);
}

TEST(ContinuedFraction, CompleteQuotientProductsGiveConvergentErrors) {
    // q_k alpha - p_k = (-1)^k / q'_{k+1}
    for (const Irrational& g : {Irrational::golden(), Irrational::sqrt_of(7), Irrational::quadratic(3, 313, 4)}) {
        const auto cf = expand_cf(g, 40);
        for (std::size_t k = 0; k + 1 < cf.size() && cf.q[k] <= 1'000'000'000'000; ++k) {
            const long double err = quad_offset(g, cf.q[k], cf.p[k]);
            const long double expected = (k % 2 ? -1.0L : 1.0L) / cf.q_prime(k + 1);
            const double q = static_cast<double>(cf.q[k]);
            EXPECT_NEAR(static_cast<double>(err / expected), 1.0, 1e-12 + 1e-32 * q * q) << g.describe() << " k=" << k;
        }
    }
}

TEST(ContinuedFraction, OffsetAvoidsCancellation) {
    for (const Irrational& g : {Irrational::golden(), Irrational::sqrt_of(7), Irrational::quadratic(3, 313, 4)}) {
        const auto cf = expand_cf(g, 40);
        for (std::size_t k = 0; k < cf.size() && cf.q[k] <= 1'000'000'000'000; ++k) {
            const long double truth = quad_offset(g, cf.q[k], cf.p[k]);
            const double q = static_cast<double>(cf.q[k]);
            EXPECT_NEAR(static_cast<double>(g.offset(cf.q[k], cf.p[k]) / truth), 1.0, 1e-15 + 1e-32 * q * q)
                << g.describe() << " k=" << k;
        }
    }
}

TEST(ContinuedFraction, LiteralConvergentErrorsWithExactArithmetic) {
    for (double alpha : {std::numbers::sqrt2, std::numbers::pi, std::log(3.0) / std::log(2.0), 1.0 / std::numbers::e}) {
        const auto cf = expand_cf(alpha, 60);
        int e = 0;
        const double m = std::frexp(alpha, &e);
        const i128 num = static_cast<i128>(std::ldexp(m, 53));
        const int shift = 53 - e;
        for (std::size_t k = 0; k + 1 < cf.size(); ++k) {
            // (q num - p 2^shift) / 2^shift exactly, then scaled
            const i128 diff = static_cast<i128>(cf.q[k]) * num - (static_cast<i128>(cf.p[k]) << shift);
            const long double err = std::ldexp(static_cast<long double>(diff), -shift);
            const long double expected = (k % 2 ? -1.0L : 1.0L) / cf.q_prime(k + 1);
            EXPECT_NEAR(static_cast<double>(err / expected), 1.0, 1e-9) << alpha << " k=" << k;
        }
    }
}

TEST(ContinuedFraction, RejectsBadInput) {
    EXPECT_THROW(expand_cf(-1.0, 5), PreconditionError);
    EXPECT_THROW(expand_cf(1.5, 0), PreconditionError);
    EXPECT_THROW(Irrational::quadratic(1, 5, 0), ValidationError);
}
