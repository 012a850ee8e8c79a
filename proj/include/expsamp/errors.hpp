#pragma once

/// @file errors.hpp
/// Exception types raised by the library. Everything derives from the
/// standard hierarchy so callers can catch broadly or narrowly.

#include <stdexcept>
#include <string>

namespace expsamp {

/// Non-finite value produced while evaluating a function, kernel or series.
class evaluation_error : public std::runtime_error {
public:
    evaluation_error(const std::string& what, double where)
        : std::runtime_error(what), where_(where) {}

    /// Abscissa (log coordinate, sample index, or cell index) at fault.
    double where() const noexcept { return where_; }

private:
    double where_;
};

/// Bad sampling configuration (empty index set, unresolved window, ...).
class configuration_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Finite-difference stencil requested beyond the tabulated orders.
class unsupported_order : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Discrete absolute moment grows without bound as the k-window widens.
class divergent_moment : public std::runtime_error {
public:
    divergent_moment(const std::string& what, double order, double log_u, long k)
        : std::runtime_error(what), order_(order), log_u_(log_u), k_(k) {}

    double order() const noexcept { return order_; }
    /// Witness: log u and shift k of the largest term seen in the last window.
    double witness_log_u() const noexcept { return log_u_; }
    long witness_k() const noexcept { return k_; }

private:
    double order_;
    double log_u_;
    long k_;
};

/// The max-product denominator vanished (or is negative) at a point.
class degenerate_denominator : public std::runtime_error {
public:
    degenerate_denominator(const std::string& what, double log_x, double w, long first, long last)
        : std::runtime_error(what), log_x_(log_x), w_(w), first_(first), last_(last) {}

    double log_x() const noexcept { return log_x_; }
    double w() const noexcept { return w_; }
    long first_index() const noexcept { return first_; }
    long last_index() const noexcept { return last_; }

private:
    double log_x_;
    double w_;
    long first_;
    long last_;
};

/// A verifier was asked to check a statement whose hypotheses the inputs fail.
class hypothesis_not_met : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Too few usable rows to fit an empirical order.
class insufficient_data : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace expsamp
