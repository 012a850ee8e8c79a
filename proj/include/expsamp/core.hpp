#pragma once

/// @file core.hpp
/// Small shared pieces: the log-coordinate point type and lattice helpers.
///
/// All structure in exponential sampling lives in v = log x, so the library
/// evaluates kernels and functions through their log-domain profiles. Passing
/// a LogPoint instead of a positive real avoids an exp/log round trip, which
/// matters for lattice points e^{k/w} where exactness is part of the contract.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

namespace expsamp {

/// A point of the positive half-line given by its logarithm.
struct LogPoint {
    double v = 0.0;

    static LogPoint from_positive(double x)
    {
        if (!(x > 0.0))
            throw std::domain_error("expected a positive abscissa, got " + std::to_string(x));
        return LogPoint{std::log(x)};
    }

    double x() const { return std::exp(v); }
};

inline constexpr double infinity = std::numeric_limits<double>::infinity();

namespace detail {

// floor/ceil that treat values within a few ulps of an integer as that
// integer, so that w*log(b) = 3 - 1e-16 still yields 3.
inline double lattice_tolerance(double y) { return 1e-12 * std::max(1.0, std::abs(y)); }

inline long snapped_floor(double y)
{
    const double r = std::round(y);
    if (std::abs(y - r) <= lattice_tolerance(y))
        return static_cast<long>(r);
    return static_cast<long>(std::floor(y));
}

inline long snapped_ceil(double y)
{
    const double r = std::round(y);
    if (std::abs(y - r) <= lattice_tolerance(y))
        return static_cast<long>(r);
    return static_cast<long>(std::ceil(y));
}

/// i-th node of a uniform grid of n points on [lo, hi]; the last node is hi exactly.
inline double uniform_node(double lo, double hi, std::size_t i, std::size_t n)
{
    if (n <= 1)
        return lo;
    if (i + 1 == n)
        return hi;
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}

} // namespace detail
} // namespace expsamp
