#include "expsamp/kernels.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace expsamp;

namespace {

// Closed-form centered B-splines used as oracles for the recursion.
double b1(double t) { return (t >= -0.5 && t < 0.5) ? 1.0 : 0.0; }

double b2(double t)
{
    const double a = std::abs(t);
    return a < 1.0 ? 1.0 - a : 0.0;
}

double b3(double t)
{
    const double a = std::abs(t);
    if (a <= 0.5)
        return 0.75 - a * a;
    if (a < 1.5)
        return 0.5 * (1.5 - a) * (1.5 - a);
    return 0.0;
}

double b4(double t)
{
    const double a = std::abs(t);
    if (a < 1.0)
        return 2.0 / 3.0 - a * a + 0.5 * a * a * a;
    if (a < 2.0)
        return (2.0 - a) * (2.0 - a) * (2.0 - a) / 6.0;
    return 0.0;
}

/// sup over a fractional grid of max_k |g(s-k)| |s-k|^nu, k in [-reach, reach+1].
template <typename G>
double brute_moment(G g, double nu, std::size_t points, int reach)
{
    double best = 0.0;
    for (std::size_t i = 0; i < points; ++i) {
        const double s = static_cast<double>(i) / static_cast<double>(points);
        for (int k = -reach; k <= reach + 1; ++k) {
            const double t = s - k;
            best = std::max(best, std::abs(g(t)) * std::pow(std::abs(t), nu));
        }
    }
    return best;
}

} // namespace

TEST(BSpline, SpecValues)
{
    EXPECT_DOUBLE_EQ(mellin_bspline(2).evaluate(1.0), 1.0);
    EXPECT_DOUBLE_EQ(mellin_bspline(3).evaluate(1.0), 0.75);
    EXPECT_NEAR(mellin_bspline(3).evaluate(std::exp(1.0)), 0.125, 1e-15);
}

TEST(BSpline, MatchesClosedFormPieces)
{
    for (int i = -300; i <= 300; ++i) {
        const double t = i / 97.0;
        EXPECT_NEAR(cardinal_bspline(1, t), b1(t), 1e-15) << t;
        EXPECT_NEAR(cardinal_bspline(2, t), b2(t), 1e-15) << t;
        EXPECT_NEAR(cardinal_bspline(3, t), b3(t), 1e-15) << t;
        EXPECT_NEAR(cardinal_bspline(4, t), b4(t), 1e-15) << t;
    }
}

TEST(BSpline, PartitionOfUnity)
{
    for (int n = 1; n <= 6; ++n) {
        for (int i = 0; i < 50; ++i) {
            const double t = -3.0 + 0.1234 * i;
            double sum = 0.0;
            for (int k = -10; k <= 10; ++k)
                sum += cardinal_bspline(n, t - k);
            EXPECT_NEAR(sum, 1.0, 1e-13) << "n=" << n << " t=" << t;
        }
    }
}

TEST(BSpline, VanishesOutsideSupport)
{
    for (int n = 1; n <= 6; ++n) {
        const auto k = mellin_bspline(n);
        ASSERT_TRUE(k.log_support_radius.has_value());
        EXPECT_DOUBLE_EQ(*k.log_support_radius, n / 2.0);
        for (double t : {n / 2.0 + 1e-9, n / 2.0 + 0.5, 10.0})
            EXPECT_EQ(k.at_log(t), 0.0);
        EXPECT_EQ(k.at_log(-n / 2.0 - 1e-9), 0.0);
    }
}

TEST(BSpline, OrderOutOfRange)
{
    EXPECT_THROW(mellin_bspline(0), std::invalid_argument);
    EXPECT_THROW(mellin_bspline(7), std::invalid_argument);
}

TEST(Gaussian, SpecValues)
{
    EXPECT_DOUBLE_EQ(mellin_gaussian(1.0).evaluate(1.0), 1.0);
    EXPECT_NEAR(mellin_gaussian(1.0).evaluate(std::exp(1.0)), 0.36787944117144233, 1e-15);
    EXPECT_NEAR(mellin_gaussian(0.5).evaluate(std::exp(2.0)), 0.1353352832366127, 1e-15);
    EXPECT_FALSE(mellin_gaussian(1.0).compact());
    EXPECT_THROW(mellin_gaussian(0.0), std::invalid_argument);
    EXPECT_THROW(mellin_gaussian(-1.0), std::invalid_argument);
}

TEST(LinKernel, SpecValues)
{
    EXPECT_DOUBLE_EQ(lin_kernel(0.0).evaluate(1.0), 1.0);
    EXPECT_EQ(lin_kernel(0.0).at_log(1.0), 0.0);
    EXPECT_NEAR(lin_kernel(0.0).evaluate(std::exp(1.0)), 0.0, 1e-15);
    // e^{-1/2} * 2/pi, 50-digit reference 0.38612941052021563...
    EXPECT_NEAR(lin_kernel(1.0).evaluate(std::exp(0.5)), 0.38612941052021563, 1e-15);
    EXPECT_NEAR(lin_kernel(1.0).evaluate(std::exp(0.5)), std::exp(-0.5) * 2.0 / std::numbers::pi, 1e-15);
    EXPECT_FALSE(lin_kernel(0.0).nonnegative);
}

TEST(LinKernel, ExactZerosAtIntegers)
{
    const auto k = lin_kernel(0.0);
    for (int m = -50; m <= 50; ++m)
        if (m != 0) {
            EXPECT_EQ(k.at_log(m), 0.0) << m;
        }
}

TEST(Registry, NamesResolve)
{
    for (const auto& info : kernel_catalog())
        EXPECT_EQ(make_kernel(info.name).name, info.name);
    EXPECT_EQ(make_kernel("gauss2").name, "gauss2");
    EXPECT_THROW(make_kernel("bspline2.5"), std::invalid_argument);
    EXPECT_THROW(make_kernel("nope"), std::invalid_argument);
}

TEST(AbsoluteMoment, SpecValues)
{
    EXPECT_NEAR(discrete_absolute_moment(mellin_bspline(2), 0).value, 1.0, 1e-12);
    EXPECT_NEAR(discrete_absolute_moment(mellin_bspline(2), 1).value, 0.25, 1e-12);
    EXPECT_NEAR(discrete_absolute_moment(mellin_bspline(3), 0).value, 0.75, 1e-12);
}

TEST(AbsoluteMoment, MatchesBruteForce)
{
    for (double nu : {0.0, 0.5, 1.0, 2.0, 5.0}) {
        EXPECT_NEAR(discrete_absolute_moment(mellin_bspline(3), nu).value, brute_moment(b3, nu, 4096, 3), 1e-12)
            << nu;
        EXPECT_NEAR(discrete_absolute_moment(mellin_bspline(4), nu).value, brute_moment(b4, nu, 4096, 3), 1e-12)
            << nu;
        const auto gauss = [](double t) { return std::exp(-t * t); };
        EXPECT_NEAR(discrete_absolute_moment(mellin_gaussian(1.0), nu).value, brute_moment(gauss, nu, 4096, 20),
                    1e-12)
            << nu;
    }
}

TEST(AbsoluteMoment, ZeroOrderBracketedBySupremum)
{
    for (const auto& info : kernel_catalog()) {
        const auto k = make_kernel(info.name);
        if (info.name == "linc1") {
            // x^-1 sinc(log x) grows like e^{|t|} as t -> -inf.
            EXPECT_THROW((void)discrete_absolute_moment(k, 0), divergent_moment);
            continue;
        }
        double sup = 0.0;
        for (int i = -4000; i <= 4000; ++i)
            sup = std::max(sup, std::abs(k.at_log(i / 1000.0)));
        const double m0 = discrete_absolute_moment(k, 0).value;
        EXPECT_LE(m0, sup + 1e-12) << info.name;
        EXPECT_GE(m0, std::abs(k.at_log(0.0)) - 1e-12) << info.name;
    }
}

TEST(AbsoluteMoment, DivergenceWitness)
{
    const auto k = lin_kernel(0.0);
    try {
        (void)discrete_absolute_moment(k, 2.0);
        FAIL() << "expected divergence";
    }
    catch (const divergent_moment& e) {
        EXPECT_EQ(e.order(), 2.0);
        const double t = e.witness_log_u() - static_cast<double>(e.witness_k());
        EXPECT_GT(std::abs(k.at_log(t)) * t * t, 10.0);
    }
    EXPECT_NO_THROW((void)discrete_absolute_moment(k, 1.0));
}

TEST(AbsoluteMoment, CompactWindowAndTail)
{
    const auto m = discrete_absolute_moment(mellin_bspline(5), 2.0);
    EXPECT_TRUE(m.converged);
    EXPECT_EQ(m.tail_bound, 0.0);
    EXPECT_GE(m.half_width, 3);
    const auto g = discrete_absolute_moment(mellin_gaussian(1.0), 5.0);
    EXPECT_TRUE(g.converged);
    EXPECT_LT(g.tail_bound, 1e-12);
}

TEST(AlgebraicMoment, SpecValues)
{
    EXPECT_NEAR(algebraic_moment(mellin_bspline(3), 0, 1.0), 0.75, 1e-15);
    EXPECT_NEAR(algebraic_moment(mellin_bspline(2), 1, std::exp(0.5)), 0.25, 1e-15);
}

TEST(AlgebraicMoment, ZeroOrderIsKernelJoin)
{
    const auto k = mellin_gaussian(1.0);
    for (double v : {-1.3, 0.0, 0.25, 0.5, 2.75}) {
        double join = -infinity;
        for (int kk = -80; kk <= 80; ++kk)
            join = std::max(join, k.at_log(v - kk));
        EXPECT_NEAR(algebraic_moment(k, 0, LogPoint{v}), join, 1e-15) << v;
    }
}

TEST(AlgebraicMoment, SignedAgainstAbsolute)
{
    // At u = 1 the j=1 products of bspline3 are B3(k) k; the signed join is
    // 1/8, the absolute join is also 1/8 by symmetry.
    const auto k = mellin_bspline(3);
    EXPECT_NEAR(algebraic_moment(k, 1, LogPoint{0.0}), 0.125, 1e-15);
    EXPECT_NEAR(algebraic_moment(k, 1, LogPoint{0.0}, {}, true), 0.125, 1e-15);
    // Odd order at a point where every nonzero term is negative.
    const auto hat = mellin_bspline(2);
    EXPECT_NEAR(algebraic_moment(hat, 1, LogPoint{0.0}), 0.0, 1e-15);
}

TEST(AlgebraicMoment, PeriodicInLogU)
{
    const auto k = mellin_bspline(4);
    for (int j = 0; j <= 3; ++j)
        EXPECT_NEAR(algebraic_moment(k, j, LogPoint{0.3}), algebraic_moment(k, j, LogPoint{5.3}), 1e-12);
}

TEST(Eta, SpecValues)
{
    EXPECT_NEAR(eta_lower_bound(mellin_bspline(3)), 0.125, 1e-15);
    EXPECT_NEAR(eta_lower_bound(mellin_gaussian(1.0)), std::exp(-1.0), 1e-15);
    EXPECT_EQ(eta_lower_bound(mellin_bspline(2)), 0.0);
    EXPECT_THROW((void)eta_lower_bound(mellin_bspline(3), 1), std::invalid_argument);
}

TEST(Eta, ZeroOrderMomentAgreesWithDenominatorJoin)
{
    // The lemma's denominator join maximized over u and m_0 share one grid.
    for (const char* name : {"bspline3", "bspline4", "gauss1"}) {
        const auto k = make_kernel(name);
        ScanPolicy scan;
        scan.u_points = 512;
        double best = 0.0;
        for (std::size_t i = 0; i < scan.u_points; ++i) {
            const double s = static_cast<double>(i) / static_cast<double>(scan.u_points);
            for (int kk = -40; kk <= 41; ++kk)
                best = std::max(best, std::abs(k.at_log(s - kk)));
        }
        EXPECT_NEAR(discrete_absolute_moment(k, 0, scan).value, best, 1e-12) << name;
    }
}

TEST(Conditions, SpecExamples)
{
    const auto b3 = check_kernel_conditions(mellin_bspline(3), 5.0, 1);
    EXPECT_TRUE(b3.chi1_holds);
    EXPECT_TRUE(b3.chi2_holds);
    EXPECT_NEAR(b3.eta, 0.125, 1e-15);

    const auto b2 = check_kernel_conditions(mellin_bspline(2), 2.0, 0);
    EXPECT_FALSE(b2.chi2_holds);
    EXPECT_EQ(b2.eta, 0.0);

    const auto lin = check_kernel_conditions(lin_kernel(0.0), 2.0, 0);
    EXPECT_FALSE(lin.chi1_holds);
    ASSERT_FALSE(lin.divergent.empty());
    EXPECT_EQ(lin.divergent.front().order, 2.0);
}

TEST(Conditions, Chi3VariationOfQuadraticSpline)
{
    // M_0(bspline3, u) = max_k B3(s - k) ranges from B3(1/2) = 1/2 to 3/4.
    const auto rep = check_kernel_conditions(mellin_bspline(3), 5.0, 1);
    EXPECT_FALSE(rep.chi3_holds);
    const auto& v0 = rep.algebraic_moment_variation.at(0);
    EXPECT_NEAR(v0.min, 0.5, 1e-12);
    EXPECT_NEAR(v0.max, 0.75, 1e-12);
    EXPECT_FALSE(rep.chi3_message.empty());
}

TEST(Conditions, Chi3HoldsForIndicatorAtOrderZero)
{
    // bspline1 is the indicator of [-1/2, 1/2): exactly one lattice term is 1.
    const auto rep = check_kernel_conditions(mellin_bspline(1), 0.0, 0);
    EXPECT_TRUE(rep.chi3_holds);
    EXPECT_FALSE(rep.chi2_holds);
}

TEST(Conditions, ReportInvariants)
{
    for (const auto& info : kernel_catalog()) {
        const auto rep = check_kernel_conditions(make_kernel(info.name), 2.0, 1);
        for (const auto& [nu, m] : rep.absolute_moments)
            EXPECT_GE(m, 0.0) << info.name << " nu=" << nu;
        if (rep.chi2_holds) {
            EXPECT_GT(rep.eta, 0.0) << info.name;
        }
        if (rep.chi3_holds) {
            for (const auto& [j, v] : rep.algebraic_moment_variation)
                EXPECT_LE(v.spread(), 1e-9 * (1.0 + std::abs(v.max))) << info.name;
        }
    }
}
