#include "expsamp/operators.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace expsamp;

namespace {

double b3(double t)
{
    const double a = std::abs(t);
    if (a <= 0.5)
        return 0.75 - a * a;
    if (a < 1.5)
        return 0.5 * (1.5 - a) * (1.5 - a);
    return 0.0;
}

double sinc_oracle(double t)
{
    if (t == 0.0)
        return 1.0;
    return std::sin(std::numbers::pi * t) / (std::numbers::pi * t);
}

ExpSamples samples_for(const WeightedFunction& f, double w, long first, long last)
{
    return sample_range(f, w, IndexRange{first, last});
}

} // namespace

TEST(IndexSet, SpecExamples)
{
    const double e = std::exp(1.0);
    const auto a = index_set(SamplingConfig::on_interval(3.0, 1.0, e));
    EXPECT_EQ(a.first, 0);
    EXPECT_EQ(a.last, 3);
    const auto b = index_set(SamplingConfig::on_interval(1.0, 1.0, e));
    EXPECT_EQ(b.first, 0);
    EXPECT_EQ(b.last, 1);
    const auto c = index_set(SamplingConfig::on_interval(2.0, e, e * e));
    EXPECT_EQ(c.first, 2);
    EXPECT_EQ(c.last, 4);
}

TEST(IndexSet, EmptyIsRejected)
{
    EXPECT_THROW(SamplingConfig::on_interval(1.0, 1.2, 1.5), configuration_error);
    EXPECT_THROW(SamplingConfig::on_interval(1.0, 2.0, 1.5), configuration_error);
    EXPECT_THROW(SamplingConfig::on_interval(1.0, 0.0, 1.5), configuration_error);
    EXPECT_THROW(SamplingConfig::windowed(0.0), configuration_error);
    EXPECT_THROW(index_set(SamplingConfig::windowed(2.0)), configuration_error);
}

TEST(Samples, SpecExamples)
{
    const auto one = take_samples(make_function("const1"), SamplingConfig::windowed(4.0, 5), 0.3);
    for (long k = one.range().first; k <= one.range().last; ++k)
        EXPECT_EQ(one.at(k), 1.0);
    const auto logs = take_samples(make_function("log"), SamplingConfig::windowed(2.0, 6), 2.0);
    EXPECT_EQ(logs.at(4), 2.0);
    const auto psis = take_samples(make_function("psi"), SamplingConfig::windowed(1.0, 3), 0.0);
    EXPECT_EQ(psis.at(1), 2.0);
    const auto interval = take_samples(make_function("log"), SamplingConfig::on_interval(3.0, 1.0, std::exp(1.0)), 0);
    EXPECT_EQ(interval.range().first, 0);
    EXPECT_EQ(interval.range().last, 3);
}

TEST(Samples, NonFiniteSampleNamesIndex)
{
    WeightedFunction f;
    f.name = "pole";
    f.profile = [](double v) { return 1.0 / v; };
    try {
        (void)take_samples(f, SamplingConfig::windowed(1.0, 2), 0.0);
        FAIL() << "expected evaluation_error";
    }
    catch (const evaluation_error& e) {
        EXPECT_EQ(e.where(), 0.0);
    }
    EXPECT_THROW((void)take_samples(f, SamplingConfig::windowed(1.0), 0.0), configuration_error);
}

TEST(MaxProduct, ReproducesConstants)
{
    for (const char* name : {"bspline3", "bspline4", "gauss1"}) {
        const auto k = make_kernel(name);
        for (double c : {0.0, 1.0, 2.5}) {
            const auto s = samples_for(constant_function(c), 8.0, -200, 200);
            for (double v : {-1.0, -0.31, 0.0, 0.77, 2.0})
                EXPECT_DOUBLE_EQ(max_product_series(k, s, LogPoint{v}, SamplingConfig::windowed(8.0)).value, c);
        }
    }
}

TEST(MaxProduct, BruteForceOracleOnInterval)
{
    const auto k = mellin_bspline(3);
    const auto f = make_function("log");
    const auto config = SamplingConfig::on_interval(4.0, 1.0, std::exp(1.0));
    const auto s = take_samples(f, config, 0.0);
    const double v = 0.5;
    double num = -infinity;
    double den = -infinity;
    for (int kk = 0; kk <= 4; ++kk) {
        const double chi = b3(4.0 * v - kk);
        num = std::max(num, chi * (kk / 4.0));
        den = std::max(den, chi);
    }
    const auto r = max_product_series(k, s, LogPoint{v}, config);
    EXPECT_NEAR(r.value, num / den, 1e-15);
    EXPECT_EQ(r.terms.first, 0);
    EXPECT_EQ(r.terms.last, 4);
    EXPECT_EQ(r.tail_bound, 0.0);
    EXPECT_FALSE(r.outside_hypotheses);
}

TEST(MaxProduct, MonotoneInSamples)
{
    const auto k = mellin_bspline(3);
    const auto config = SamplingConfig::on_interval(8.0, 1.0, std::exp(1.0));
    const auto f = samples_for(make_function("weight"), 8.0, 0, 8);
    const auto g = samples_for(make_function("const1"), 8.0, 0, 8);
    for (int i = 0; i <= 20; ++i) {
        const LogPoint x{i / 20.0};
        EXPECT_LE(max_product_series(k, f, x, config).value, max_product_series(k, g, x, config).value);
    }
}

TEST(MaxProduct, DegenerateDenominator)
{
    const auto k = mellin_bspline(3);
    const auto config = SamplingConfig::on_interval(4.0, 1.0, std::exp(1.0));
    const auto s = take_samples(make_function("const1"), config, 0.0);
    try {
        (void)max_product_series(k, s, LogPoint{3.0}, config);
        FAIL() << "expected degenerate_denominator";
    }
    catch (const degenerate_denominator& e) {
        EXPECT_EQ(e.log_x(), 3.0);
        EXPECT_EQ(e.w(), 4.0);
        EXPECT_EQ(e.first_index(), 0);
        EXPECT_EQ(e.last_index(), 4);
    }
}

TEST(MaxProduct, SignedKernelIsFlagged)
{
    const auto k = lin_kernel(0.0);
    const auto s = samples_for(make_function("weight"), 2.0, -300, 300);
    const auto r = max_product_series(k, s, LogPoint{0.3}, SamplingConfig::windowed(2.0));
    EXPECT_TRUE(r.outside_hypotheses);
    EXPECT_TRUE(std::isfinite(r.value));
}

TEST(MaxProduct, MissingSamplesAreAConfigurationError)
{
    const auto k = mellin_bspline(3);
    const auto s = samples_for(make_function("weight"), 8.0, 0, 2);
    EXPECT_THROW((void)max_product_series(k, s, LogPoint{1.0}, SamplingConfig::windowed(8.0)), configuration_error);
}

TEST(Generalized, SpecExamples)
{
    for (int n = 1; n <= 6; ++n) {
        const auto k = mellin_bspline(n);
        const auto one = samples_for(make_function("const1"), 5.0, -100, 100);
        const auto zero = samples_for(constant_function(0.0), 5.0, -100, 100);
        for (double v : {-0.9, 0.0, 0.123, 1.5}) {
            EXPECT_NEAR(generalized_series(k, one, LogPoint{v}, SamplingConfig::windowed(5.0)).value, 1.0, 1e-14);
            EXPECT_EQ(generalized_series(k, zero, LogPoint{v}, SamplingConfig::windowed(5.0)).value, 0.0);
        }
    }
    const auto lin = lin_kernel(0.0);
    const auto one = samples_for(make_function("const1"), 3.0, -400, 400);
    for (int m = -5; m <= 5; ++m)
        EXPECT_EQ(generalized_series(lin, one, LogPoint{m / 3.0}, SamplingConfig::windowed(3.0, 64)).value, 1.0);
}

TEST(Generalized, HatKernelIsLinearInterpolation)
{
    // With B2 the series is the piecewise-linear interpolant of the samples.
    const auto k = mellin_bspline(2);
    const auto f = make_function("log2");
    const double w = 4.0;
    const auto s = samples_for(f, w, -40, 40);
    for (double v : {-0.8, 0.1, 0.33, 1.9}) {
        const double y = w * v;
        const double lo = std::floor(y);
        const double t = y - lo;
        const double expected = (1.0 - t) * f.at_log(lo / w) + t * f.at_log((lo + 1) / w);
        EXPECT_NEAR(generalized_series(k, s, LogPoint{v}, SamplingConfig::windowed(w)).value, expected, 1e-14);
    }
}

TEST(Kantorovich, SpecExamples)
{
    const auto f = make_function("log");
    const GaussLegendre rule(8);
    const auto means = cell_means(f, 4.0, IndexRange{-3, 3}, rule);
    for (long k = -3; k <= 3; ++k)
        EXPECT_NEAR(means.at(k), (k + 0.5) / 4.0, 1e-15);

    for (int n = 1; n <= 6; ++n)
        for (double v : {-0.5, 0.0, 0.7})
            EXPECT_NEAR(kantorovich_series(mellin_bspline(n), make_function("const1"), LogPoint{v},
                                           SamplingConfig::windowed(6.0))
                            .value,
                        1.0, 1e-14);

    for (double w : {2.0, 8.0})
        for (double v : {-1.0, 0.25, 0.6})
            EXPECT_NEAR(kantorovich_series(mellin_bspline(2), f, LogPoint{v}, SamplingConfig::windowed(w)).value,
                        v + 1.0 / (2.0 * w), 1e-14);
}

TEST(Kantorovich, MatchesGeneralizedOnConstants)
{
    for (const char* name : {"bspline3", "gauss1", "linc0"}) {
        const auto k = make_kernel(name);
        const auto config = SamplingConfig::windowed(4.0, 32);
        const auto samples = samples_for(constant_function(2.0), 4.0, -200, 200);
        for (double v : {-0.4, 0.0, 0.9}) {
            const double s = generalized_series(k, samples, LogPoint{v}, config).value;
            const double i = kantorovich_series(k, constant_function(2.0), LogPoint{v}, config).value;
            EXPECT_NEAR(i, s, 1e-14) << name;
        }
    }
}

TEST(Truncation, DoublingWindowStaysWithinTailBound)
{
    const auto k = mellin_gaussian(0.05);
    const auto f = make_function("damped_sin_log");
    const double w = 2.0;
    const auto samples = samples_for(f, w, -200, 200);
    for (double v : {-0.7, 0.0, 0.45}) {
        const LogPoint x{v};
        const auto narrow = SamplingConfig::windowed(w, 6);
        const auto wide = SamplingConfig::windowed(w, 12);
        const auto s1 = generalized_series(k, samples, x, narrow);
        const auto s2 = generalized_series(k, samples, x, wide);
        EXPECT_GT(s1.tail_bound, 0.0);
        EXPECT_LE(std::abs(s2.value - s1.value), s1.tail_bound * (1 + 1e-12));
        const auto m1 = max_product_series(k, samples, x, narrow);
        const auto m2 = max_product_series(k, samples, x, wide);
        EXPECT_LE(std::abs(m2.value - m1.value), m1.tail_bound * (1 + 1e-12));
        const auto i1 = kantorovich_series(k, f, x, narrow);
        const auto i2 = kantorovich_series(k, f, x, wide);
        EXPECT_LE(std::abs(i2.value - i1.value), i1.tail_bound * (1 + 1e-12));
    }
}

TEST(Truncation, CompactKernelsHaveNoTail)
{
    const auto k = mellin_bspline(4);
    const auto samples = samples_for(make_function("weight"), 8.0, -100, 100);
    const auto r = generalized_series(k, samples, LogPoint{0.3}, SamplingConfig::windowed(8.0));
    EXPECT_EQ(r.tail_bound, 0.0);
    EXPECT_EQ(default_window_half_width(k, 8.0), 18);
    EXPECT_EQ(default_window_half_width(mellin_gaussian(1.0), 8.0), 64);
}

TEST(Exponential, InterpolatesAtLattice)
{
    for (const char* name : {"weight", "log", "damped_sin_log"}) {
        const auto f = make_function(name);
        for (double T : {1.0, 2.0, 3.0})
            for (int m = -3; m <= 3; ++m)
                EXPECT_EQ(classical_exponential_formula(f, 0.5, T, LogPoint{m / T}, 50).value, f.at_log(m / T));
    }
    const auto zero = constant_function(0.0);
    EXPECT_EQ(classical_exponential_formula(zero, 0.0, 1.0, LogPoint{0.37}, 50).value, 0.0);
}

TEST(Exponential, SlowConditionalConvergence)
{
    const auto one = make_function("const1");
    const double v = 0.5;
    for (long window : {100L, 10000L}) {
        const auto r = classical_exponential_formula(one, 0.0, 1.0, LogPoint{v}, window);
        EXPECT_EQ(r.terms.last - r.terms.first + 1, 2 * window);
        double direct = 0.0;
        for (long k = r.terms.first; k <= r.terms.last; ++k)
            direct += sinc_oracle(v - static_cast<double>(k));
        EXPECT_NEAR(r.value, direct, 1e-11) << window;
        EXPECT_GT(r.tail_bound, 0.0);
    }
    // Sum over k of sinc(1/2 - k) is 1; partial sums approach it like 1/W.
    const auto small = classical_exponential_formula(one, 0.0, 1.0, LogPoint{v}, 100);
    const auto big = classical_exponential_formula(one, 0.0, 1.0, LogPoint{v}, 10000);
    EXPECT_NEAR(big.value, 1.0, 1e-4);
    EXPECT_LT(std::abs(big.value - 1.0), std::abs(small.value - 1.0));
}

TEST(Grid, ShapeAndConstants)
{
    const auto k = mellin_bspline(3);
    const LogGrid grid{-1.0, 1.0, 37};
    for (const auto kind :
         {OperatorKind::max_product, OperatorKind::generalized, OperatorKind::kantorovich, OperatorKind::exponential}) {
        const auto values =
            evaluate_on_grid(OperatorSpec{kind, 0.0}, constant_function(2.0), k, SamplingConfig::windowed(4.0), grid);
        ASSERT_EQ(values.size(), grid.size());
        if (kind == OperatorKind::max_product) {
            for (const auto& g : values)
                EXPECT_DOUBLE_EQ(g.value, 2.0);
        }
    }
}

TEST(Grid, SinglePointMatchesPointwise)
{
    const auto k = mellin_bspline(3);
    const auto f = make_function("damped_log2");
    const LogGrid one{0.4, 0.4, 1};
    const auto config = SamplingConfig::windowed(8.0);
    const auto values = evaluate_on_grid(OperatorSpec{OperatorKind::max_product, 0.0}, f, k, config, one);
    ASSERT_EQ(values.size(), 1u);
    const auto s = samples_for(f, 8.0, -50, 50);
    EXPECT_EQ(values[0].value, max_product_series(k, s, LogPoint{0.4}, config).value);
}

TEST(Grid, PointFailuresAreRecorded)
{
    const auto k = mellin_bspline(3);
    const auto config = SamplingConfig::on_interval(4.0, 1.0, std::exp(1.0));
    const LogGrid grid{0.0, 3.0, 31};
    const auto values =
        evaluate_on_grid(OperatorSpec{OperatorKind::max_product, 0.0}, make_function("weight"), k, config, grid);
    ASSERT_EQ(values.size(), grid.size());
    EXPECT_TRUE(values.front().ok());
    EXPECT_FALSE(values.back().ok());
    EXPECT_NE(values.back().error.find("denominator"), std::string::npos);
}

TEST(Grid, OperatorTags)
{
    for (const char* tag : {"S", "I", "MG", "E"})
        EXPECT_EQ(operator_tag(parse_operator(tag)), tag);
    EXPECT_THROW(parse_operator("X"), std::invalid_argument);
}
