#pragma once

/// @file operators.hpp
/// Exponential sampling operators on the positive half-line:
///
///   S_w f(x)  = sum_k chi(e^{-k} x^w) f(e^{k/w})                  generalized
///   I_w f(x)  = sum_k chi(e^{-k} x^w) w int_{k/w}^{(k+1)/w} f(e^u) du   Kantorovich
///   MG_w f(x) = max_k chi(e^{-k} x^w) f(e^{k/w}) / max_k chi(e^{-k} x^w)  max-product
///   E f(x)    = sum_k lin_{c/T}(e^{-k} x^T) f(e^{k/T})                 classical
///
/// Two index modes. Interval mode restricts k to
/// J_w = {ceil(w log a), ..., floor(w log b)}; window mode takes every k with
/// |k - w log x| <= W. The log argument of chi(e^{-k} x^w) is w log x - k.

#include "core.hpp"
#include "errors.hpp"
#include "kernels.hpp"
#include "quadrature.hpp"
#include "spaces.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace expsamp {

enum class OperatorKind { generalized, kantorovich, max_product, exponential };

inline OperatorKind parse_operator(std::string_view tag)
{
    if (tag == "S")
        return OperatorKind::generalized;
    if (tag == "I")
        return OperatorKind::kantorovich;
    if (tag == "MG")
        return OperatorKind::max_product;
    if (tag == "E")
        return OperatorKind::exponential;
    throw std::invalid_argument("unknown operator tag '" + std::string(tag) + "' (expected S, I, MG or E)");
}

inline std::string operator_tag(OperatorKind kind)
{
    switch (kind) {
    case OperatorKind::generalized: return "S";
    case OperatorKind::kantorovich: return "I";
    case OperatorKind::max_product: return "MG";
    case OperatorKind::exponential: return "E";
    }
    return "?";
}

struct LogInterval {
    double log_a = 0.0;
    double log_b = 1.0;
};

struct IndexRange {
    long first = 0;
    long last = -1;

    bool empty() const { return last < first; }
    std::size_t size() const { return empty() ? 0 : static_cast<std::size_t>(last - first + 1); }
    bool contains(long k) const { return first <= k && k <= last; }
    bool covers(const IndexRange& other) const
    {
        return other.empty() || (first <= other.first && other.last <= last);
    }
};

struct SamplingConfig {
    double w = 1.0;
    std::optional<LogInterval> interval;
    /// Window mode half-width; 0 picks default_window_half_width(kernel, w).
    long window_half_width = 0;
    std::size_t quadrature_points = 8;

    static SamplingConfig windowed(double w, long half_width = 0)
    {
        SamplingConfig c;
        c.w = w;
        c.window_half_width = half_width;
        c.validate();
        return c;
    }

    static SamplingConfig on_log_interval(double w, double log_a, double log_b)
    {
        SamplingConfig c;
        c.w = w;
        c.interval = LogInterval{log_a, log_b};
        c.validate();
        return c;
    }

    static SamplingConfig on_interval(double w, double a, double b)
    {
        if (!(a > 0.0) || !(b > 0.0))
            throw configuration_error("interval endpoints must be positive");
        return on_log_interval(w, std::log(a), std::log(b));
    }

    SamplingConfig with_rate(double rate) const
    {
        SamplingConfig c = *this;
        c.w = rate;
        c.validate();
        return c;
    }

    void validate() const;
};

inline IndexRange index_set(const SamplingConfig& config)
{
    if (!config.interval)
        throw configuration_error("index_set needs an interval");
    const IndexRange r{detail::snapped_ceil(config.w * config.interval->log_a),
                       detail::snapped_floor(config.w * config.interval->log_b)};
    if (r.empty()) {
        std::ostringstream os;
        os << "empty index set J_w for w = " << config.w << " on [e^" << config.interval->log_a << ", e^"
           << config.interval->log_b << "]";
        throw configuration_error(os.str());
    }
    return r;
}

inline void SamplingConfig::validate() const
{
    if (!(w > 0.0) || !std::isfinite(w))
        throw configuration_error("sampling rate w must be positive");
    if (window_half_width < 0)
        throw configuration_error("window half-width must be nonnegative");
    if (quadrature_points == 0)
        throw configuration_error("quadrature needs at least one point");
    if (interval) {
        if (!(interval->log_a < interval->log_b))
            throw configuration_error("interval needs a < b");
        (void)index_set(*this);
    }
}

/// ceil(R w) + 2 for compact kernels, 64 otherwise.
inline long default_window_half_width(const Kernel& kernel, double w)
{
    if (kernel.compact())
        return static_cast<long>(std::ceil(*kernel.log_support_radius * w)) + 2;
    return 64;
}

inline long resolved_half_width(const SamplingConfig& config, const Kernel& kernel)
{
    return config.window_half_width > 0 ? config.window_half_width
                                        : default_window_half_width(kernel, config.w);
}

namespace detail {

inline IndexRange window_around(double center, long half_width)
{
    return {snapped_ceil(center - static_cast<double>(half_width)),
            snapped_floor(center + static_cast<double>(half_width))};
}

} // namespace detail

/// Indices entering the operators at x: J_w, or the window around w log x.
inline IndexRange active_range(const SamplingConfig& config, const Kernel& kernel, LogPoint x)
{
    if (config.interval)
        return index_set(config);
    return detail::window_around(config.w * x.v, resolved_half_width(config, kernel));
}

/// Sample values f(e^{k/w}) on a contiguous range of k.
class ExpSamples {
public:
    ExpSamples() = default;
    ExpSamples(double w, long first, std::vector<double> values)
        : w_(w), first_(first), values_(std::move(values))
    {
    }

    double w() const { return w_; }
    IndexRange range() const { return {first_, first_ + static_cast<long>(values_.size()) - 1}; }
    bool contains(long k) const { return range().contains(k); }
    std::size_t size() const { return values_.size(); }

    double at(long k) const
    {
        if (!contains(k))
            throw std::out_of_range("no sample at k = " + std::to_string(k));
        return values_[static_cast<std::size_t>(k - first_)];
    }

private:
    double w_ = 1.0;
    long first_ = 0;
    std::vector<double> values_;
};

inline ExpSamples sample_range(const WeightedFunction& f, double w, IndexRange range)
{
    std::vector<double> values;
    values.reserve(range.size());
    for (long k = range.first; k <= range.last; ++k) {
        const double v = static_cast<double>(k) / w;
        const double value = f.at_log(v);
        if (!std::isfinite(value)) {
            std::ostringstream os;
            os << "sample of " << f.name << " at k = " << k << " is not finite";
            throw evaluation_error(os.str(), static_cast<double>(k));
        }
        values.push_back(value);
    }
    return ExpSamples(w, range.first, std::move(values));
}

/// f(e^{k/w}) for k in J_w (interval mode) or |k - w center_log| <= W.
inline ExpSamples take_samples(const WeightedFunction& f, const SamplingConfig& config, double center_log)
{
    config.validate();
    if (config.interval)
        return sample_range(f, config.w, index_set(config));
    if (config.window_half_width <= 0)
        throw configuration_error("take_samples in window mode needs an explicit half-width");
    return sample_range(f, config.w, detail::window_around(config.w * center_log, config.window_half_width));
}

/// Cell means w int_{k/w}^{(k+1)/w} f(e^u) du by Gauss-Legendre.
inline ExpSamples cell_means(const WeightedFunction& f, double w, IndexRange range, const GaussLegendre& rule)
{
    std::vector<double> values;
    values.reserve(range.size());
    for (long k = range.first; k <= range.last; ++k) {
        const double lo = static_cast<double>(k) / w;
        const double hi = static_cast<double>(k + 1) / w;
        const double mean = w * rule.integrate([&](double u) { return f.at_log(u); }, lo, hi);
        if (!std::isfinite(mean)) {
            std::ostringstream os;
            os << "cell mean of " << f.name << " on cell " << k << " is not finite";
            throw evaluation_error(os.str(), static_cast<double>(k));
        }
        values.push_back(mean);
    }
    return ExpSamples(w, range.first, std::move(values));
}

struct SeriesResult {
    double value = 0.0;
    /// Bound on the change if the window were doubled; 0 in interval mode
    /// and for compact kernels whose support lies inside the window; NaN
    /// when the samples do not cover the outer ring.
    double tail_bound = 0.0;
    IndexRange terms{};
    /// Kernel takes negative values: the max-product lemmas do not apply.
    bool outside_hypotheses = false;
};

namespace detail {

struct Ring {
    IndexRange left;
    IndexRange right;
};

inline Ring outer_ring(double center, long half_width, const IndexRange& inner)
{
    const IndexRange outer = window_around(center, 2 * half_width);
    return {{outer.first, inner.first - 1}, {inner.last + 1, outer.last}};
}

/// Whether the tail beyond the window is known to vanish.
inline bool window_contains_support(const Kernel& kernel, long half_width)
{
    return kernel.compact() && static_cast<double>(half_width) >= *kernel.log_support_radius;
}

inline void require_cover(const ExpSamples& samples, const IndexRange& needed)
{
    if (!samples.range().covers(needed)) {
        std::ostringstream os;
        os << "samples cover k in [" << samples.range().first << ", " << samples.range().last
           << "] but the operator needs [" << needed.first << ", " << needed.last << "]";
        throw configuration_error(os.str());
    }
}

/// sum_k chi(e^{wv - k}) values_k over the active range, with ring tail.
inline SeriesResult linear_series(const Kernel& kernel, const ExpSamples& values, LogPoint x,
                                  const SamplingConfig& config)
{
    const IndexRange terms = active_range(config, kernel, x);
    require_cover(values, terms);
    const double center = config.w * x.v;
    double sum = 0.0;
    for (long k = terms.first; k <= terms.last; ++k)
        sum += kernel.at_log(center - static_cast<double>(k)) * values.at(k);
    if (!std::isfinite(sum))
        throw evaluation_error("series partial sum is not finite", x.v);

    SeriesResult out{sum, 0.0, terms, false};
    if (config.interval)
        return out;
    const long half = resolved_half_width(config, kernel);
    if (window_contains_support(kernel, half))
        return out;
    const Ring ring = outer_ring(center, half, terms);
    if (!values.range().covers(ring.left) || !values.range().covers(ring.right)) {
        out.tail_bound = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    double tail = 0.0;
    for (const auto& part : {ring.left, ring.right})
        for (long k = part.first; k <= part.last; ++k)
            tail += std::abs(kernel.at_log(center - static_cast<double>(k)) * values.at(k));
    out.tail_bound = tail;
    return out;
}

} // namespace detail

/// MG_w f(x): ratio of the signed joins over the active index set.
inline SeriesResult max_product_series(const Kernel& kernel, const ExpSamples& samples, LogPoint x,
                                       const SamplingConfig& config)
{
    const IndexRange terms = active_range(config, kernel, x);
    detail::require_cover(samples, terms);
    const double center = config.w * x.v;
    double num = -infinity;
    double den = -infinity;
    for (long k = terms.first; k <= terms.last; ++k) {
        const double chi = kernel.at_log(center - static_cast<double>(k));
        num = std::max(num, chi * samples.at(k));
        den = std::max(den, chi);
    }
    if (!(den >= 1e-300)) {
        std::ostringstream os;
        os << "max-product denominator " << den << " at log x = " << x.v << ", w = " << config.w
           << ", k in [" << terms.first << ", " << terms.last << "]";
        throw degenerate_denominator(os.str(), x.v, config.w, terms.first, terms.last);
    }
    if (!std::isfinite(num))
        throw evaluation_error("max-product numerator is not finite", x.v);

    SeriesResult out{num / den, 0.0, terms, !kernel.nonnegative};
    if (config.interval)
        return out;
    const long half = resolved_half_width(config, kernel);
    if (detail::window_contains_support(kernel, half))
        return out;
    const auto ring = detail::outer_ring(center, half, terms);
    if (!samples.range().covers(ring.left) || !samples.range().covers(ring.right)) {
        out.tail_bound = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    // Doubling the window can raise either join by at most the ring maxima:
    // |N'/D' - N/D| <= (R_num + max(0, -N)) / D + |N/D| R_den / D.
    double ring_num = 0.0;
    double ring_den = 0.0;
    for (const auto& part : {ring.left, ring.right}) {
        for (long k = part.first; k <= part.last; ++k) {
            const double chi = kernel.at_log(center - static_cast<double>(k));
            ring_num = std::max(ring_num, std::abs(chi * samples.at(k)));
            ring_den = std::max(ring_den, std::abs(chi));
        }
    }
    out.tail_bound = (ring_num + std::max(0.0, -num)) / den + std::abs(out.value) * ring_den / den;
    return out;
}

inline SeriesResult generalized_series(const Kernel& kernel, const ExpSamples& samples, LogPoint x,
                                       const SamplingConfig& config)
{
    return detail::linear_series(kernel, samples, x, config);
}

inline SeriesResult kantorovich_series(const Kernel& kernel, const WeightedFunction& f, LogPoint x,
                                       const SamplingConfig& config)
{
    config.validate();
    const IndexRange terms = active_range(config, kernel, x);
    IndexRange needed = terms;
    if (!config.interval)
        needed = detail::window_around(config.w * x.v, 2 * resolved_half_width(config, kernel));
    const GaussLegendre rule(config.quadrature_points);
    return detail::linear_series(kernel, cell_means(f, config.w, needed, rule), x, config);
}

/// E_{c,T} f(x) truncated to |k - T log x| <= window. The tail figure is the
/// observed change |E_{2W} - E_W|, since the series converges only
/// conditionally.
inline SeriesResult classical_exponential_formula(const WeightedFunction& f, double c, double T, LogPoint x,
                                                  long window)
{
    if (!(T > 0.0))
        throw std::invalid_argument("classical_exponential_formula needs T > 0");
    if (window <= 0)
        throw std::invalid_argument("classical_exponential_formula needs a positive window");
    const Kernel lin = lin_kernel(c / T);
    const double center = T * x.v;
    const IndexRange terms = detail::window_around(center, window);
    const IndexRange outer = detail::window_around(center, 2 * window);
    double inner_sum = 0.0;
    double ring_sum = 0.0;
    for (long k = outer.first; k <= outer.last; ++k) {
        const double term = lin.at_log(center - static_cast<double>(k)) * f.at_log(static_cast<double>(k) / T);
        if (!std::isfinite(term))
            throw evaluation_error("exponential formula term is not finite", static_cast<double>(k));
        if (terms.contains(k))
            inner_sum += term;
        else
            ring_sum += term;
    }
    return {inner_sum, std::abs(ring_sum), terms, true};
}

// Positive-real conveniences.

inline SeriesResult max_product_series(const Kernel& kernel, const ExpSamples& samples, double x,
                                       const SamplingConfig& config)
{
    return max_product_series(kernel, samples, LogPoint::from_positive(x), config);
}

inline SeriesResult generalized_series(const Kernel& kernel, const ExpSamples& samples, double x,
                                       const SamplingConfig& config)
{
    return generalized_series(kernel, samples, LogPoint::from_positive(x), config);
}

inline SeriesResult kantorovich_series(const Kernel& kernel, const WeightedFunction& f, double x,
                                       const SamplingConfig& config)
{
    return kantorovich_series(kernel, f, LogPoint::from_positive(x), config);
}

inline SeriesResult classical_exponential_formula(const WeightedFunction& f, double c, double T, double x,
                                                  long window)
{
    return classical_exponential_formula(f, c, T, LogPoint::from_positive(x), window);
}

// ---------------------------------------------------------------------------
// Grid evaluation

struct OperatorSpec {
    OperatorKind kind = OperatorKind::max_product;
    /// Parameter c of the classical formula (T is the config's w).
    double c = 0.0;
};

struct GridValue {
    double x = 0.0;
    double log_x = 0.0;
    double value = std::numeric_limits<double>::quiet_NaN();
    double error_vs_f = std::numeric_limits<double>::quiet_NaN();
    double weighted_error = std::numeric_limits<double>::quiet_NaN();
    double tail_bound = 0.0;
    std::string error;

    bool ok() const { return error.empty(); }
};

/// Applies the selected operator at every grid point. Failures at single
/// points are recorded in GridValue::error and do not abort the sweep.
inline std::vector<GridValue> evaluate_on_grid(const OperatorSpec& spec, const WeightedFunction& f,
                                               const Kernel& kernel, const SamplingConfig& config,
                                               const LogGrid& grid)
{
    config.validate();
    grid.validate();
    const double lo = config.w * grid.log_min;
    const double hi = config.w * grid.log_max;

    std::vector<GridValue> out(grid.size());
    std::optional<ExpSamples> values;
    std::string setup_error;
    try {
        switch (spec.kind) {
        case OperatorKind::exponential:
            break;
        case OperatorKind::kantorovich:
        case OperatorKind::generalized:
        case OperatorKind::max_product: {
            IndexRange range;
            if (config.interval) {
                range = index_set(config);
            }
            else {
                const long half = resolved_half_width(config, kernel);
                range = {detail::snapped_ceil(lo - 2.0 * static_cast<double>(half)),
                         detail::snapped_floor(hi + 2.0 * static_cast<double>(half))};
            }
            if (spec.kind == OperatorKind::kantorovich)
                values = cell_means(f, config.w, range, GaussLegendre(config.quadrature_points));
            else
                values = sample_range(f, config.w, range);
            break;
        }
        }
    }
    catch (const std::exception& e) {
        setup_error = e.what();
    }

    const long e_window = config.window_half_width > 0 ? config.window_half_width : 64;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        GridValue& g = out[i];
        const LogPoint x = grid[i];
        g.log_x = x.v;
        g.x = x.x();
        if (!setup_error.empty()) {
            g.error = setup_error;
            continue;
        }
        try {
            SeriesResult r;
            switch (spec.kind) {
            case OperatorKind::generalized:
            case OperatorKind::kantorovich: r = detail::linear_series(kernel, *values, x, config); break;
            case OperatorKind::max_product: r = max_product_series(kernel, *values, x, config); break;
            case OperatorKind::exponential:
                r = classical_exponential_formula(f, spec.c, config.w, x, e_window);
                break;
            }
            g.value = r.value;
            g.tail_bound = r.tail_bound;
            const double target = f.at_log(x.v);
            g.error_vs_f = std::abs(r.value - target);
            g.weighted_error = weight_log(x.v) * g.error_vs_f;
        }
        catch (const std::exception& e) {
            g.error = e.what();
        }
    }
    return out;
}

} // namespace expsamp
