#pragma once

/// @file kernels.hpp
/// Mellin kernels, their max-product moments and the kernel-condition checker.
///
/// A kernel is a bounded function on the positive reals. We store it as a
/// log-domain profile t -> chi(e^t): every quantity below is a join over the
/// integer lattice of chi(e^{-k} u), whose log argument is log u - k.
///
/// Conditions checked:
///  - chi1: the discrete absolute moment
///        m_nu = sup_u max_k |chi(e^{-k}u)| |k - log u|^nu
///    is finite at the claimed order;
///  - chi2: eta = inf_{x in [1,e]} chi(x) is positive;
///  - chi3: the signed algebraic moments
///        M_j(u) = max_k chi(e^{-k}u) (k - log u)^j
///    do not depend on u for j <= r.
/// Because every join is 1-periodic in log u, suprema over u reduce to a scan
/// of the fractional part of log u over [0, 1).

#include "core.hpp"
#include "errors.hpp"

#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace expsamp {

/// sin(pi t), exactly zero at integers.
inline double sin_pi(double t)
{
    const double n = std::nearbyint(t);
    const double r = t - n;
    if (r == 0.0)
        return 0.0;
    const double s = std::sin(std::numbers::pi * r);
    return std::fmod(n, 2.0) == 0.0 ? s : -s;
}

/// Normalized sinc, sin(pi t)/(pi t), with sinc(0) = 1.
inline double sinc(double t)
{
    if (t == 0.0)
        return 1.0;
    return sin_pi(t) / (std::numbers::pi * t);
}

/// Centered cardinal B-spline of order n (degree n-1, support [-n/2, n/2]),
/// evaluated with the Cox-de Boor recurrence on the integer knots.
inline double cardinal_bspline(int n, double t)
{
    if (n < 1)
        throw std::invalid_argument("B-spline order must be positive");
    const double s = t + 0.5 * n; // shift to support [0, n]
    if (!(s >= 0.0) || !(s < n))
        return 0.0;
    // vals[j] holds M_k(s - j), starting from the order-1 indicator of [0,1).
    std::vector<double> vals(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const double sj = s - j;
        vals[static_cast<std::size_t>(j)] = (sj >= 0.0 && sj < 1.0) ? 1.0 : 0.0;
    }
    for (int k = 2; k <= n; ++k) {
        for (int j = 0; j + k <= n; ++j) {
            const double sj = s - j;
            const auto u = static_cast<std::size_t>(j);
            vals[u] = (sj * vals[u] + (k - sj) * vals[u + 1]) / (k - 1);
        }
    }
    return vals[0];
}

/// Sentinel for "moments of every order are finite".
inline constexpr double all_orders = infinity;

struct Kernel {
    std::string name;
    /// t -> chi(e^t).
    std::function<double(double)> profile;
    /// R with chi(e^t) = 0 whenever |t| > R; empty for non-compact kernels.
    std::optional<double> log_support_radius;
    double claimed_mu = 0.0;
    bool nonnegative = true;
    /// Optional bound on sup_{|t| > R} |chi(e^t)| |t|^nu, called as (R, nu).
    std::function<double(double, double)> tail_sup;

    double at_log(double t) const { return profile(t); }
    double operator()(LogPoint p) const { return profile(p.v); }

    double evaluate(double x) const { return profile(LogPoint::from_positive(x).v); }

    bool compact() const { return log_support_radius.has_value(); }
};

inline Kernel mellin_bspline(int order)
{
    if (order < 1 || order > 6)
        throw std::invalid_argument("mellin_bspline: order must lie in [1, 6], got " +
                                    std::to_string(order));
    Kernel k;
    k.name = "bspline" + std::to_string(order);
    k.profile = [order](double t) { return cardinal_bspline(order, t); };
    k.log_support_radius = 0.5 * order;
    k.claimed_mu = all_orders;
    k.nonnegative = true;
    k.tail_sup = [](double, double) { return 0.0; };
    return k;
}

inline std::string format_parameter(double value)
{
    std::ostringstream os;
    os << value;
    return os.str();
}

/// chi(x) = exp(-alpha log^2 x).
inline Kernel mellin_gaussian(double alpha)
{
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw std::invalid_argument("mellin_gaussian: shape must be positive");
    Kernel k;
    k.name = "gauss" + format_parameter(alpha);
    k.profile = [alpha](double t) { return std::exp(-alpha * t * t); };
    k.claimed_mu = all_orders;
    k.nonnegative = true;
    // t^nu exp(-alpha t^2) decreases beyond its peak at sqrt(nu / (2 alpha)).
    k.tail_sup = [alpha](double r, double nu) {
        const double peak = std::sqrt(nu / (2.0 * alpha));
        const double t = std::max(r, peak);
        return std::pow(t, nu) * std::exp(-alpha * t * t);
    };
    return k;
}

/// lin_c(x) = x^{-c} sinc(log x), continuously extended by lin_c(1) = 1.
inline Kernel lin_kernel(double c)
{
    Kernel k;
    k.name = "linc" + format_parameter(c);
    k.profile = [c](double t) {
        if (t == 0.0)
            return 1.0;
        return std::exp(-c * t) * sinc(t);
    };
    k.claimed_mu = 0.0;
    k.nonnegative = false;
    k.tail_sup = [c](double r, double nu) {
        if (c != 0.0 || nu > 1.0)
            return infinity;
        // |sinc(t)| |t|^nu <= |t|^{nu-1} / pi
        return std::pow(std::max(r, 1.0), nu - 1.0) / std::numbers::pi;
    };
    return k;
}

struct KernelInfo {
    std::string name;
    std::string description;
};

/// Names listed by the CLI. make_kernel also accepts any bspline1..6,
/// gauss<alpha> and linc<c>.
inline std::vector<KernelInfo> kernel_catalog()
{
    return {
        {"bspline1", "centered B-spline of order 1 in log x (indicator)"},
        {"bspline2", "centered B-spline of order 2 in log x (hat)"},
        {"bspline3", "centered B-spline of order 3 in log x (quadratic)"},
        {"bspline4", "centered B-spline of order 4 in log x (cubic)"},
        {"bspline5", "centered B-spline of order 5 in log x (quartic)"},
        {"bspline6", "centered B-spline of order 6 in log x (quintic)"},
        {"gauss1", "exp(-log^2 x)"},
        {"gauss0.5", "exp(-0.5 log^2 x)"},
        {"linc0", "sinc(log x), the classical exponential sampling kernel"},
        {"linc1", "x^-1 sinc(log x)"},
    };
}

namespace detail {

inline std::optional<double> parse_real(std::string_view text)
{
    if (text.empty())
        return std::nullopt;
    try {
        std::size_t used = 0;
        const std::string s(text);
        const double value = std::stod(s, &used);
        if (used != s.size())
            return std::nullopt;
        return value;
    }
    catch (const std::exception&) {
        return std::nullopt;
    }
}

} // namespace detail

inline Kernel make_kernel(std::string_view name)
{
    auto suffix = [&](std::string_view prefix) -> std::optional<double> {
        if (name.substr(0, prefix.size()) != prefix)
            return std::nullopt;
        return detail::parse_real(name.substr(prefix.size()));
    };
    if (auto n = suffix("bspline"); n && *n == std::floor(*n))
        return mellin_bspline(static_cast<int>(*n));
    if (auto a = suffix("gauss"))
        return mellin_gaussian(*a);
    if (auto c = suffix("linc"))
        return lin_kernel(*c);
    throw std::invalid_argument("unknown kernel '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Moments

struct ScanPolicy {
    /// Points of the fractional-part grid for log u over [0, 1).
    std::size_t u_points = 4096;
    /// Fixed k half-width; 0 selects ceil(R) + 1 for compact kernels and the
    /// doubling search for the rest.
    long k_half_width = 0;
    long initial_half_width = 8;
    long max_half_width = 4096;
    double convergence_tol = 1e-12;
    /// Divergence: growth by this factor on this many consecutive doublings.
    double divergence_factor = 1.5;
    int divergence_runs = 3;
    /// Half-width used for algebraic moments of non-compact kernels.
    long algebraic_half_width = 64;
};

struct MomentEstimate {
    double value = 0.0;
    long half_width = 0;
    /// Bound on the contribution of |t| beyond the window: 0 for compact
    /// kernels, NaN when the kernel publishes no tail bound.
    double tail_bound = 0.0;
    double witness_log_u = 0.0;
    long witness_k = 0;
    bool converged = true;
};

namespace detail {

struct LatticeMax {
    double value = 0.0;
    double log_u = 0.0;
    long k = 0;
};

inline double abs_power(double t, double nu) { return nu == 0.0 ? 1.0 : std::pow(std::abs(t), nu); }

inline double fractional_node(std::size_t i, std::size_t n)
{
    return static_cast<double>(i) / static_cast<double>(n);
}

/// max over the u-grid and k in [k_lo, k_hi] of |chi(e^{s-k})| |s-k|^nu.
inline LatticeMax lattice_sup(const Kernel& kernel, double nu, std::size_t u_points, long k_lo, long k_hi,
                              LatticeMax best = {})
{
    for (std::size_t i = 0; i < u_points; ++i) {
        const double s = fractional_node(i, u_points);
        for (long k = k_lo; k <= k_hi; ++k) {
            const double t = s - static_cast<double>(k);
            const double term = std::abs(kernel.at_log(t)) * abs_power(t, nu);
            if (!(term <= best.value)) { // also catches NaN/inf
                best = {term, s, k};
                if (!std::isfinite(term))
                    return best;
            }
        }
    }
    return best;
}

inline long compact_half_width(const Kernel& kernel)
{
    return static_cast<long>(std::ceil(*kernel.log_support_radius)) + 1;
}

} // namespace detail

/// Estimate of m_nu(chi) = sup_u max_k |chi(e^{-k}u)| |k - log u|^nu.
///
/// Compact kernels are scanned once over k in [-W, W+1] with
/// W = ceil(R) + 1, which is exact up to the u-grid resolution. Other kernels
/// double W from scan.initial_half_width until the estimate moves by less
/// than scan.convergence_tol (relative to max(1, m)), or until it has grown
/// by scan.divergence_factor on scan.divergence_runs consecutive doublings,
/// in which case divergent_moment is thrown with the largest term as witness.
inline MomentEstimate discrete_absolute_moment(const Kernel& kernel, double nu, const ScanPolicy& scan = {})
{
    if (!(nu >= 0.0))
        throw std::invalid_argument("moment order must be nonnegative");
    if (scan.u_points == 0)
        throw std::invalid_argument("scan needs at least one u point");

    auto divergent = [&](const detail::LatticeMax& at, long width) {
        std::ostringstream os;
        os << "moment of order " << nu << " of " << kernel.name << " diverges (window " << width
           << ", term " << at.value << " at log u = " << at.log_u << ", k = " << at.k << ")";
        return divergent_moment(os.str(), nu, at.log_u, at.k);
    };

    const long fixed = scan.k_half_width > 0 ? scan.k_half_width
                       : kernel.compact()   ? detail::compact_half_width(kernel)
                                            : 0;
    if (fixed > 0) {
        const auto best = detail::lattice_sup(kernel, nu, scan.u_points, -fixed, fixed + 1);
        if (!std::isfinite(best.value))
            throw divergent(best, fixed);
        MomentEstimate out{best.value, fixed, 0.0, best.log_u, best.k, true};
        if (!kernel.compact())
            out.tail_bound = kernel.tail_sup ? kernel.tail_sup(static_cast<double>(fixed), nu)
                                             : std::numeric_limits<double>::quiet_NaN();
        return out;
    }

    long width = std::max(1L, scan.initial_half_width);
    auto best = detail::lattice_sup(kernel, nu, scan.u_points, -width, width + 1);
    if (!std::isfinite(best.value))
        throw divergent(best, width);
    int growth_runs = 0;
    bool converged = false;
    while (2 * width <= scan.max_half_width) {
        const long next = 2 * width;
        // Only the new rings need scanning; the join is monotone in the window.
        auto grown = detail::lattice_sup(kernel, nu, scan.u_points, -next, -width - 1, best);
        grown = detail::lattice_sup(kernel, nu, scan.u_points, width + 2, next + 1, grown);
        if (!std::isfinite(grown.value))
            throw divergent(grown, next);
        const double change = grown.value - best.value;
        if (best.value > 0.0 && grown.value >= scan.divergence_factor * best.value)
            ++growth_runs;
        else
            growth_runs = 0;
        best = grown;
        width = next;
        if (growth_runs >= scan.divergence_runs)
            throw divergent(best, width);
        if (change < scan.convergence_tol * std::max(1.0, best.value)) {
            converged = true;
            break;
        }
    }
    MomentEstimate out{best.value, width, 0.0, best.log_u, best.k, converged};
    out.tail_bound = kernel.tail_sup ? kernel.tail_sup(static_cast<double>(width), nu)
                                     : std::numeric_limits<double>::quiet_NaN();
    return out;
}

namespace detail {

inline long algebraic_half_width(const Kernel& kernel, const ScanPolicy& scan)
{
    if (scan.k_half_width > 0)
        return scan.k_half_width;
    return kernel.compact() ? compact_half_width(kernel) : scan.algebraic_half_width;
}

inline double signed_power(double base, int j)
{
    double out = 1.0;
    for (int i = 0; i < j; ++i)
        out *= base;
    return out;
}

} // namespace detail

/// M_j(chi, u) = max_k chi(e^{-k}u) (k - log u)^j, taken over signed products.
/// With `absolute`, the join of |chi(e^{-k}u)| |k - log u|^j instead.
inline double algebraic_moment(const Kernel& kernel, int j, LogPoint u, const ScanPolicy& scan = {},
                               bool absolute = false)
{
    if (j < 0)
        throw std::invalid_argument("algebraic moment order must be nonnegative");
    const long width = detail::algebraic_half_width(kernel, scan);
    const long center = static_cast<long>(std::floor(u.v));
    double best = -infinity;
    for (long k = center - width; k <= center + width + 1; ++k) {
        const double d = static_cast<double>(k) - u.v;
        const double chi = kernel.at_log(-d);
        const double term = absolute ? std::abs(chi) * detail::abs_power(d, j)
                                     : chi * detail::signed_power(d, j);
        best = std::max(best, term);
    }
    return best;
}

inline double algebraic_moment(const Kernel& kernel, int j, double u, const ScanPolicy& scan = {},
                               bool absolute = false)
{
    return algebraic_moment(kernel, j, LogPoint::from_positive(u), scan, absolute);
}

/// Minimum of chi over a uniform log-grid on [1, e], endpoints included.
inline double eta_lower_bound(const Kernel& kernel, std::size_t grid_points = 4097)
{
    if (grid_points < 2)
        throw std::invalid_argument("eta_lower_bound needs at least two grid points");
    double lo = infinity;
    for (std::size_t i = 0; i < grid_points; ++i)
        lo = std::min(lo, kernel.at_log(detail::uniform_node(0.0, 1.0, i, grid_points)));
    return lo;
}

// ---------------------------------------------------------------------------
// Condition checker

struct Tolerances {
    /// chi2 holds when eta > eta_min.
    double eta_min = 0.0;
    std::size_t eta_grid_points = 4097;
    /// chi3 holds when (max - min) <= chi3_variation * (1 + |max|).
    double chi3_variation = 1e-9;
    std::size_t chi3_u_points = 1024;
    ScanPolicy scan{};
};

struct MomentVariation {
    double min = 0.0;
    double max = 0.0;
    double abs_min = 0.0;
    double abs_max = 0.0;
    double spread() const { return max - min; }
};

struct DivergenceWitness {
    double order = 0.0;
    double log_u = 0.0;
    long k = 0;
    std::string message;
};

struct MomentReport {
    std::string kernel_name;
    double mu = 0.0;
    int r = 0;
    std::map<double, double> absolute_moments;
    std::map<double, double> tail_bounds;
    std::vector<DivergenceWitness> divergent;
    double eta = 0.0;
    std::map<int, MomentVariation> algebraic_moment_variation;
    bool chi1_holds = false;
    bool chi2_holds = false;
    bool chi3_holds = false;
    std::string chi1_message;
    std::string chi2_message;
    std::string chi3_message;
};

/// Scan of M_j(chi, u) over the fractional part of log u.
inline MomentVariation algebraic_moment_variation(const Kernel& kernel, int j, std::size_t u_points,
                                                  const ScanPolicy& scan = {})
{
    MomentVariation out{infinity, -infinity, infinity, -infinity};
    for (std::size_t i = 0; i < u_points; ++i) {
        const LogPoint u{detail::fractional_node(i, u_points)};
        const double m = algebraic_moment(kernel, j, u, scan, false);
        const double a = algebraic_moment(kernel, j, u, scan, true);
        out.min = std::min(out.min, m);
        out.max = std::max(out.max, m);
        out.abs_min = std::min(out.abs_min, a);
        out.abs_max = std::max(out.abs_max, a);
    }
    return out;
}

/// Verdicts for chi1 (order mu), chi2 and chi3 (orders 0..r). Failed
/// conditions are reported, never thrown.
inline MomentReport check_kernel_conditions(const Kernel& kernel, double mu, int r, const Tolerances& tol = {})
{
    if (!(mu >= 0.0) || r < 0)
        throw std::invalid_argument("check_kernel_conditions: mu and r must be nonnegative");
    MomentReport rep;
    rep.kernel_name = kernel.name;
    rep.mu = mu;
    rep.r = r;

    std::vector<double> orders;
    for (int n = 0; n <= static_cast<int>(std::floor(mu)); ++n)
        orders.push_back(n);
    if (mu != std::floor(mu))
        orders.push_back(mu);

    bool mu_finite = false;
    bool mu_converged = false;
    for (double nu : orders) {
        try {
            const auto m = discrete_absolute_moment(kernel, nu, tol.scan);
            rep.absolute_moments[nu] = m.value;
            rep.tail_bounds[nu] = m.tail_bound;
            if (nu == mu) {
                mu_finite = true;
                mu_converged = m.converged;
            }
        }
        catch (const divergent_moment& e) {
            rep.divergent.push_back({nu, e.witness_log_u(), e.witness_k(), e.what()});
        }
    }
    rep.chi1_holds = mu_finite && mu_converged;
    {
        std::ostringstream os;
        if (rep.chi1_holds)
            os << "m_" << mu << " = " << rep.absolute_moments[mu] << " is finite";
        else if (!mu_finite)
            os << "m_" << mu << " diverges: " << rep.divergent.back().message;
        else
            os << "m_" << mu << " did not settle within the maximal window";
        rep.chi1_message = os.str();
    }

    rep.eta = eta_lower_bound(kernel, tol.eta_grid_points);
    rep.chi2_holds = rep.eta > tol.eta_min;
    {
        std::ostringstream os;
        os << "inf of chi over [1,e] is " << rep.eta << (rep.chi2_holds ? " > " : " <= ") << tol.eta_min;
        rep.chi2_message = os.str();
    }

    rep.chi3_holds = true;
    std::ostringstream c3;
    for (int j = 0; j <= r; ++j) {
        const auto var = algebraic_moment_variation(kernel, j, tol.chi3_u_points, tol.scan);
        rep.algebraic_moment_variation[j] = var;
        const bool flat = var.spread() <= tol.chi3_variation * (1.0 + std::abs(var.max));
        if (!flat) {
            rep.chi3_holds = false;
            c3 << "M_" << j << " varies over [" << var.min << ", " << var.max << "]; ";
        }
    }
    rep.chi3_message = rep.chi3_holds ? "M_j independent of u for j <= " + std::to_string(r) : c3.str();
    return rep;
}

} // namespace expsamp
