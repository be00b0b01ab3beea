#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ssflow/zeta.hpp"

using namespace ssflow;

namespace {

FlowSpec primes3() { return FlowSpec({std::log(2.0), std::log(3.0), std::log(5.0)}); }

}  // namespace

TEST(Zeta, CantorAtZeroIsMinusOne) {
    const auto ev = eval_zeta(flows::cantor(), 0.0);
    EXPECT_FALSE(ev.at_pole);
    EXPECT_NEAR(ev.zeta.real(), -1.0, 1e-15);
    EXPECT_NEAR(ev.zeta.imag(), 0.0, 1e-15);
}

TEST(Zeta, PoleAtDimensionIsFlagged) {
    const FlowSpec f = flows::fibonacci();
    const auto ev = eval_zeta(f, solve_dimension(f).D);
    EXPECT_TRUE(ev.at_pole);
    EXPECT_TRUE(std::isinf(ev.zeta.real()));
}

TEST(Zeta, GoldenAtOneIsFinitePositive) {
    const auto ev = eval_zeta(flows::golden(), 1.0);
    ASSERT_FALSE(ev.at_pole);
    const double expected = 1.0 / (1.0 - 0.5 - std::pow(2.0, -std::numbers::phi));
    EXPECT_NEAR(ev.zeta.real(), expected, 1e-13 * expected);
    EXPECT_GT(ev.zeta.real(), 0.0);
}

TEST(Zeta, DerivativesMatchFiniteDifferences) {
    const FlowSpec f = primes3();
    const double h = 1e-5;
    for (const cplx s : {cplx(0.3, 2.0), cplx(-0.5, 17.0), cplx(2.0, -40.0)}) {
        const FValue v = eval_f(f, s);
        const cplx d1 = (eval_f(f, s + h).f - eval_f(f, s - h).f) / (2.0 * h);
        const cplx d2 = (eval_f(f, s + h).f1 - eval_f(f, s - h).f1) / (2.0 * h);
        EXPECT_LT(std::abs(v.f1 - d1), 1e-8 * std::abs(v.f1) + 1e-9);
        EXPECT_LT(std::abs(v.f2 - d2), 1e-8 * std::abs(v.f2) + 1e-9);
        const auto ev = eval_zeta(f, s);
        const cplx dz = (eval_zeta(f, s + h).zeta - eval_zeta(f, s - h).zeta) / (2.0 * h);
        EXPECT_LT(std::abs(-dz / ev.zeta - ev.neg_log_deriv), 1e-7 * std::abs(ev.neg_log_deriv));
    }
}

TEST(Zeta, ReflectionSymmetry) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> re(-2.0, 3.0), im(-200.0, 200.0);
    const FlowSpec f = primes3();
    for (int i = 0; i < 200; ++i) {
        const cplx s(re(rng), im(rng));
        const auto a = eval_zeta(f, s);
        const auto b = eval_zeta(f, std::conj(s));
        if (a.at_pole) continue;
        EXPECT_LT(std::abs(std::conj(a.zeta) - b.zeta), 1e-12 * std::abs(a.zeta));
    }
}

TEST(Zeta, LatticePeriodicity) {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> re(-2.0, 3.0), im(-50.0, 50.0);
    const FlowSpec f = flows::fibonacci();
    const double period = 2.0 * std::numbers::pi / std::log(2.0);
    for (int i = 0; i < 200; ++i) {
        const cplx s(re(rng), im(rng));
        const auto a = eval_zeta(f, s);
        const auto b = eval_zeta(f, s + cplx(0.0, period));
        if (a.at_pole) continue;
        EXPECT_LT(std::abs(a.zeta - b.zeta), 1e-12 * std::abs(a.zeta) * std::max(1.0, std::abs(s.imag())));
    }
}

TEST(Zeta, RealAxisIncreasingAndPoleOnlyAtD) {
    const FlowSpec f = flows::golden();
    const double D = solve_dimension(f).D;
    double prev = -std::numeric_limits<double>::infinity();
    for (double s = -1.0; s <= 3.0; s += 0.01) {
        const FValue v = eval_f(f, s);
        EXPECT_GT(v.f1.real(), 0.0);
        EXPECT_GT(v.f.real(), prev);
        prev = v.f.real();
        if (std::abs(s - D) > 1e-3) {
            EXPECT_FALSE(eval_zeta(f, s).at_pole);
        }
    }
}

TEST(Zeta, LogDerivativeAtZeroClosedForm) {
    EXPECT_NEAR(log_deriv_at_zero(flows::cantor()), -2.0 * std::log(3.0), 1e-15);
    EXPECT_NEAR(log_deriv_at_zero(flows::fibonacci()), -3.0 * std::log(2.0), 1e-15);
    EXPECT_NEAR(log_deriv_at_zero(FlowSpec({1.0, 1.0, 1.0})), -1.5, 1e-15);
    EXPECT_THROW(log_deriv_at_zero(FlowSpec({1.0})), PreconditionError);
}

TEST(Zeta, LogDerivativeAtZeroIsTheLimit) {
    for (const FlowSpec& f : {flows::cantor(), flows::golden(), primes3()}) {
        const cplx near = eval_zeta(f, 1e-7).neg_log_deriv;
        EXPECT_NEAR(near.real(), log_deriv_at_zero(f), 1e-5);
    }
}

TEST(ZeroFree, CantorAndGoldenGrids) {
    for (const FlowSpec& f : {flows::cantor(), flows::golden()}) {
        const auto rep = zeta_zero_free(f, complex_grid(-2.0, 2.0, 100, 0.0, 50.0, 100));
        EXPECT_TRUE(rep.zero_free);
        EXPECT_GT(rep.min_modulus, 0.0);
        EXPECT_EQ(rep.samples, 10000u);
    }
}

TEST(ZeroFree, LowerBoundHoldsEverywhere) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> re(-3.0, 3.0), im(-500.0, 500.0);
    const FlowSpec f = primes3();
    for (int i = 0; i < 2000; ++i) {
        const cplx s(re(rng), im(rng));
        double bound = 1.0;
        for (double w : f.weights()) bound += std::exp(-w * s.real());
        EXPECT_GE(std::abs(eval_zeta(f, s).zeta), 1.0 / bound * (1.0 - 1e-12));
    }
}

TEST(ZeroFree, GridShape) {
    const auto g = complex_grid(0.0, 1.0, 3, -1.0, 1.0, 5);
    ASSERT_EQ(g.size(), 15u);
    EXPECT_EQ(g.front(), cplx(0.0, -1.0));
    EXPECT_EQ(g.back(), cplx(1.0, 1.0));
}
