#pragma once

/// @file spaces.hpp
/// Weighted function spaces on the positive half-line.
///
/// Weight w(x) = 1/(1 + log^2 x) and its reciprocal Psi, the weighted sup
/// norm, the weighted logarithmic modulus of continuity
///
///     Omega(f, delta) = sup_{|log t| <= delta, x > 0}
///                       |f(tx) - f(x)| / ((1 + log^2 x)(1 + log^2 t)),
///
/// and Mellin derivatives theta f(x) = x f'(x), i.e. ordinary derivatives of
/// v -> f(e^v). All suprema are grid estimates, hence lower bounds.

#include "core.hpp"
#include "errors.hpp"
#include "kernels.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace expsamp {

inline double weight_log(double v) { return 1.0 / (1.0 + v * v); }
inline double psi_log(double v) { return 1.0 + v * v; }

inline double weight(double x) { return weight_log(LogPoint::from_positive(x).v); }
inline double psi(double x) { return psi_log(LogPoint::from_positive(x).v); }

/// Uniform grid in log x: x_i = exp(v_i).
struct LogGrid {
    double log_min = -1.0;
    double log_max = 1.0;
    std::size_t points = 2;

    /// Accepts points >= 2 on a proper interval, or a single point when
    /// log_min == log_max.
    void validate() const
    {
        if (!std::isfinite(log_min) || !std::isfinite(log_max))
            throw std::invalid_argument("grid bounds must be finite");
        if (points == 1 && log_min == log_max)
            return;
        if (points < 2)
            throw std::invalid_argument("grid needs at least two points");
        if (!(log_min < log_max))
            throw std::invalid_argument("grid needs log_min < log_max");
    }

    double log_at(std::size_t i) const { return detail::uniform_node(log_min, log_max, i, points); }
    double x_at(std::size_t i) const { return std::exp(log_at(i)); }
    LogPoint operator[](std::size_t i) const { return LogPoint{log_at(i)}; }
    std::size_t size() const { return points; }

    /// Parses `logmin:logmax:points`.
    static LogGrid parse(std::string_view spec)
    {
        const auto first = spec.find(':');
        const auto second = first == std::string_view::npos ? first : spec.find(':', first + 1);
        if (second == std::string_view::npos)
            throw std::invalid_argument("grid spec must look like logmin:logmax:points");
        const auto lo = detail::parse_real(spec.substr(0, first));
        const auto hi = detail::parse_real(spec.substr(first + 1, second - first - 1));
        const auto n = detail::parse_real(spec.substr(second + 1));
        if (!lo || !hi || !n || *n < 1 || *n != std::floor(*n))
            throw std::invalid_argument("malformed grid spec '" + std::string(spec) + "'");
        LogGrid g{*lo, *hi, static_cast<std::size_t>(*n)};
        g.validate();
        return g;
    }

    std::string spec() const
    {
        std::ostringstream os;
        os.precision(17);
        os << log_min << ':' << log_max << ':' << points;
        return os.str();
    }
};

struct WeightedFunction {
    std::string name;
    /// v -> f(e^v).
    std::function<double(double)> profile;
    /// M with w(x)|f(x)| <= M, when known.
    std::optional<double> weighted_bound;
    /// Closed forms of theta^1 f, ..., theta^r f in the log domain.
    std::vector<std::function<double(double)>> mellin_derivatives;
    bool nonnegative = false;
    /// Lipschitz in log x (Omega(f, delta) = O(delta)).
    bool log_lipschitz = false;
    bool smooth = false;
    std::string description;

    double at_log(double v) const { return profile(v); }
    double operator()(LogPoint p) const { return profile(p.v); }
    double evaluate(double x) const { return profile(LogPoint::from_positive(x).v); }
};

namespace detail {

inline double checked(double value, double v, const std::string& what)
{
    if (!std::isfinite(value)) {
        std::ostringstream os;
        os << what << " is not finite at log x = " << v;
        throw evaluation_error(os.str(), v);
    }
    return value;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Test-function registry

inline WeightedFunction constant_function(double c)
{
    WeightedFunction f;
    f.name = "const" + format_parameter(c);
    f.profile = [c](double) { return c; };
    f.weighted_bound = std::abs(c);
    for (int r = 0; r < 6; ++r)
        f.mellin_derivatives.push_back([](double) { return 0.0; });
    f.nonnegative = c >= 0.0;
    f.log_lipschitz = true;
    f.smooth = true;
    f.description = "constant " + format_parameter(c);
    return f;
}

struct FunctionInfo {
    std::string name;
    std::string description;
};

/// Registry names; make_function also accepts const<c> for any real c.
inline std::vector<FunctionInfo> function_catalog()
{
    return {
        {"const1", "f = 1"},
        {"log", "log x"},
        {"log2", "log^2 x"},
        {"weight", "1/(1 + log^2 x)"},
        {"psi", "1 + log^2 x"},
        {"damped_log2", "log^2 x / (1 + log^2 x)"},
        {"damped_sin_log", "(1 + sin(log x)) / (1 + log^2 x)"},
        {"damped_log_pos", "max(log x, 0) / (1 + log^2 x)"},
        {"abs_sin_log", "|sin(log x)|, bounded and nonnegative, not smooth"},
        {"step_half", "1 for log x < 1/2, 2 otherwise (jump in log x)"},
    };
}

inline WeightedFunction make_function(std::string_view name)
{
    WeightedFunction f;
    f.name = std::string(name);
    if (name.substr(0, 5) == "const") {
        if (auto c = detail::parse_real(name.substr(5))) {
            auto out = constant_function(*c);
            out.name = f.name;
            return out;
        }
    }
    if (name == "log") {
        f.profile = [](double v) { return v; };
        f.mellin_derivatives = {[](double) { return 1.0; }, [](double) { return 0.0; }};
        f.weighted_bound = 0.5;
        f.log_lipschitz = true;
        f.smooth = true;
    }
    else if (name == "log2") {
        f.profile = [](double v) { return v * v; };
        f.mellin_derivatives = {[](double v) { return 2.0 * v; }, [](double) { return 2.0; }};
        f.weighted_bound = 1.0;
        f.nonnegative = true;
        f.smooth = true;
    }
    else if (name == "weight") {
        f.profile = weight_log;
        f.mellin_derivatives = {
            [](double v) { const double h = weight_log(v); return -2.0 * v * h * h; },
            [](double v) { const double h = weight_log(v); return (6.0 * v * v - 2.0) * h * h * h; },
        };
        f.weighted_bound = 1.0;
        f.nonnegative = true;
        f.log_lipschitz = true;
        f.smooth = true;
    }
    else if (name == "psi") {
        f.profile = psi_log;
        f.mellin_derivatives = {[](double v) { return 2.0 * v; }, [](double) { return 2.0; }};
        f.weighted_bound = 1.0;
        f.nonnegative = true;
        f.smooth = true;
    }
    else if (name == "damped_log2") {
        f.profile = [](double v) { return v * v / (1.0 + v * v); };
        f.mellin_derivatives = {
            [](double v) { const double h = weight_log(v); return 2.0 * v * h * h; },
            [](double v) { const double h = weight_log(v); return (2.0 - 6.0 * v * v) * h * h * h; },
        };
        f.weighted_bound = 1.0;
        f.nonnegative = true;
        f.log_lipschitz = true;
        f.smooth = true;
    }
    else if (name == "damped_sin_log") {
        f.profile = [](double v) { return (1.0 + std::sin(v)) * weight_log(v); };
        f.mellin_derivatives = {
            [](double v) {
                const double h = weight_log(v);
                return std::cos(v) * h - 2.0 * v * (1.0 + std::sin(v)) * h * h;
            },
            [](double v) {
                const double h = weight_log(v);
                return -std::sin(v) * h - 4.0 * v * std::cos(v) * h * h +
                       (1.0 + std::sin(v)) * (6.0 * v * v - 2.0) * h * h * h;
            },
        };
        f.weighted_bound = 2.0;
        f.nonnegative = true;
        f.log_lipschitz = true;
        f.smooth = true;
    }
    else if (name == "damped_log_pos") {
        f.profile = [](double v) { return v > 0.0 ? v * weight_log(v) : 0.0; };
        f.weighted_bound = 0.5;
        f.nonnegative = true;
        f.log_lipschitz = true;
    }
    else if (name == "abs_sin_log") {
        f.profile = [](double v) { return std::abs(std::sin(v)); };
        f.weighted_bound = 1.0;
        f.nonnegative = true;
        f.log_lipschitz = true;
    }
    else if (name == "step_half") {
        f.profile = [](double v) { return v < 0.5 ? 1.0 : 2.0; };
        f.weighted_bound = 2.0;
        f.nonnegative = true;
    }
    else {
        throw std::invalid_argument("unknown function '" + std::string(name) + "'");
    }
    for (const auto& info : function_catalog())
        if (info.name == name)
            f.description = info.description;
    return f;
}

// ---------------------------------------------------------------------------
// Norms and moduli

/// max over the grid of w(x_i)|f(x_i)|.
inline double weighted_norm(const WeightedFunction& f, const LogGrid& grid)
{
    grid.validate();
    double best = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double v = grid.log_at(i);
        const double value = detail::checked(f.at_log(v), v, f.name);
        best = std::max(best, weight_log(v) * std::abs(value));
    }
    return best;
}

/// Default sup window for Omega and norm estimates.
inline LogGrid default_sup_grid() { return LogGrid{-12.0, 12.0, 2401}; }

/// Per-shift maxima of the Omega ratio, tabulated once on a uniform shift
/// grid over [-delta_max, delta_max].
///
/// at(delta) is the max over the tabulated shifts with |s| <= delta. The
/// shift sets nest as delta grows, so at() is exactly monotone; querying
/// at(delta_max) gives the estimator on a uniform grid of `shift_points`.
class ModulusProfile {
public:
    ModulusProfile(const WeightedFunction& f, double delta_max, const LogGrid& grid, std::size_t shift_points)
        : delta_max_(delta_max)
    {
        if (!(delta_max > 0.0))
            throw std::invalid_argument("modulus needs delta > 0");
        if (shift_points < 2)
            throw std::invalid_argument("modulus needs at least two shift points");
        grid.validate();
        std::vector<double> base(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i)
            base[i] = detail::checked(f.at_log(grid.log_at(i)), grid.log_at(i), f.name);

        shifts_.resize(shift_points);
        ratio_.resize(shift_points);
        witness_.resize(shift_points);
        for (std::size_t j = 0; j < shift_points; ++j) {
            const double s = detail::uniform_node(-delta_max, delta_max, j, shift_points);
            shifts_[j] = s;
            const double shift_weight = 1.0 / (1.0 + s * s);
            double best = 0.0;
            double where = grid.log_at(0);
            for (std::size_t i = 0; i < grid.size(); ++i) {
                const double v = grid.log_at(i);
                const double moved = detail::checked(f.at_log(v + s), v + s, f.name);
                const double r = std::abs(moved - base[i]) * weight_log(v) * shift_weight;
                if (r > best) {
                    best = r;
                    where = v;
                }
            }
            ratio_[j] = best;
            witness_[j] = where;
        }
    }

    double delta_max() const { return delta_max_; }

    double at(double delta) const
    {
        if (!(delta > 0.0))
            throw std::invalid_argument("modulus needs delta > 0");
        if (delta > delta_max_ * (1.0 + 1e-12))
            throw std::invalid_argument("modulus profile was tabulated only up to delta_max");
        const double reach = delta * (1.0 + 1e-12);
        double best = 0.0;
        for (std::size_t j = 0; j < shifts_.size(); ++j)
            if (std::abs(shifts_[j]) <= reach)
                best = std::max(best, ratio_[j]);
        return best;
    }

    /// (log x, log t) attaining at(delta_max).
    std::pair<double, double> witness() const
    {
        std::size_t arg = 0;
        for (std::size_t j = 1; j < ratio_.size(); ++j)
            if (ratio_[j] > ratio_[arg])
                arg = j;
        return {witness_[arg], shifts_[arg]};
    }

private:
    double delta_max_;
    std::vector<double> shifts_;
    std::vector<double> ratio_;
    std::vector<double> witness_;
};

/// Grid estimate of Omega(f, delta): x over `grid`, log t over a uniform grid
/// of shift_points on [-delta, delta].
inline double weighted_log_modulus(const WeightedFunction& f, double delta, const LogGrid& grid,
                                   std::size_t shift_points = 65)
{
    return ModulusProfile(f, delta, grid, shift_points).at(delta);
}

// ---------------------------------------------------------------------------
// Mellin derivatives

/// Central stencils of second-order accuracy for d^r/dv^r, r = 1..6.
/// Row r lists coefficients for offsets -p..p with p = (r + 1) / 2 (r odd)
/// or r / 2 (r even).
namespace detail {

inline const std::vector<double>& central_stencil(int r)
{
    static const std::array<std::vector<double>, 6> table = {{
        {-0.5, 0.0, 0.5},
        {1.0, -2.0, 1.0},
        {-0.5, 1.0, 0.0, -1.0, 0.5},
        {1.0, -4.0, 6.0, -4.0, 1.0},
        {-0.5, 2.0, -2.5, 0.0, 2.5, -2.0, 0.5},
        {1.0, -6.0, 15.0, -20.0, 15.0, -6.0, 1.0},
    }};
    return table[static_cast<std::size_t>(r - 1)];
}

inline void check_order(int r)
{
    if (r < 1)
        throw std::invalid_argument("Mellin derivative order must be at least 1");
    if (r > 6)
        throw unsupported_order("Mellin derivative order " + std::to_string(r) +
                                " exceeds the stencil table (max 6)");
}

} // namespace detail

inline double default_mellin_step(int r) { return r <= 2 ? 1e-3 : 1e-2; }

/// Finite-difference theta^r f at log x = x.v, always via the stencil.
inline double mellin_derivative_fd(const WeightedFunction& f, int r, LogPoint x, double step)
{
    detail::check_order(r);
    if (!(step > 0.0))
        throw std::invalid_argument("finite-difference step must be positive");
    const auto& c = detail::central_stencil(r);
    const long half = static_cast<long>(c.size() / 2);
    double acc = 0.0;
    for (long i = -half; i <= half; ++i) {
        const double coef = c[static_cast<std::size_t>(i + half)];
        if (coef != 0.0)
            acc += coef * f.at_log(x.v + static_cast<double>(i) * step);
    }
    return detail::checked(acc / std::pow(step, r), x.v, "Mellin derivative of " + f.name);
}

/// theta^r f at x: closed form when f carries one, stencil otherwise.
inline double mellin_derivative(const WeightedFunction& f, int r, LogPoint x, double step)
{
    detail::check_order(r);
    if (f.mellin_derivatives.size() >= static_cast<std::size_t>(r))
        return f.mellin_derivatives[static_cast<std::size_t>(r - 1)](x.v);
    return mellin_derivative_fd(f, r, x, step);
}

inline double mellin_derivative(const WeightedFunction& f, int r, LogPoint x)
{
    return mellin_derivative(f, r, x, default_mellin_step(r));
}

inline double mellin_derivative(const WeightedFunction& f, int r, double x, double step)
{
    return mellin_derivative(f, r, LogPoint::from_positive(x), step);
}

/// theta^r f as a WeightedFunction of its own (for moduli of derivatives).
inline WeightedFunction mellin_derivative_function(const WeightedFunction& f, int r)
{
    detail::check_order(r);
    WeightedFunction out;
    out.name = "theta" + std::to_string(r) + "(" + f.name + ")";
    out.profile = [f, r](double v) { return mellin_derivative(f, r, LogPoint{v}); };
    for (std::size_t t = static_cast<std::size_t>(r); t < f.mellin_derivatives.size(); ++t)
        out.mellin_derivatives.push_back(f.mellin_derivatives[t]);
    out.smooth = f.smooth;
    return out;
}

/// R_r(f; u, x) = f(u) - sum_{t<=r} theta^t f(x)/t! (log u - log x)^t.
inline double mellin_taylor_remainder(const WeightedFunction& f, int r, LogPoint u, LogPoint x, double step)
{
    if (r < 0)
        throw std::invalid_argument("Taylor degree must be nonnegative");
    const double d = u.v - x.v;
    double poly = f.at_log(x.v);
    double power = 1.0;
    double factorial = 1.0;
    for (int t = 1; t <= r; ++t) {
        power *= d;
        factorial *= t;
        poly += mellin_derivative(f, t, x, step) / factorial * power;
    }
    return f.at_log(u.v) - poly;
}

inline double mellin_taylor_remainder(const WeightedFunction& f, int r, double u, double x, double step)
{
    return mellin_taylor_remainder(f, r, LogPoint::from_positive(u), LogPoint::from_positive(x), step);
}

} // namespace expsamp
