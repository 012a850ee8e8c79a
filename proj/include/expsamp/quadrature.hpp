#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace expsamp {

/// n-point Gauss-Legendre rule on [-1, 1]; nodes from Newton iteration on P_n
/// started at the Chebyshev-like guesses cos(pi (i - 1/4) / (n + 1/2)).
class GaussLegendre {
public:
    explicit GaussLegendre(std::size_t n)
    {
        if (n == 0)
            throw std::invalid_argument("Gauss-Legendre rule needs at least one node");
        nodes_.resize(n);
        weights_.resize(n);
        const std::size_t half = (n + 1) / 2;
        for (std::size_t i = 0; i < half; ++i) {
            double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                                (static_cast<double>(n) + 0.5));
            double dp = 0.0;
            for (int iter = 0; iter < 100; ++iter) {
                double p0 = 1.0;
                double p1 = 0.0;
                for (std::size_t j = 1; j <= n; ++j) {
                    const double p2 = p1;
                    p1 = p0;
                    p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / static_cast<double>(j);
                }
                dp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
                const double dz = p0 / dp;
                z -= dz;
                if (std::abs(dz) < 1e-16)
                    break;
            }
            const double wgt = 2.0 / ((1.0 - z * z) * dp * dp);
            nodes_[i] = -z;
            nodes_[n - 1 - i] = z;
            weights_[i] = wgt;
            weights_[n - 1 - i] = wgt;
        }
        if (n % 2 == 1)
            nodes_[n / 2] = 0.0;
    }

    std::size_t size() const { return nodes_.size(); }
    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& weights() const { return weights_; }

    template <typename F>
    double integrate(F&& f, double a, double b) const
    {
        const double mid = 0.5 * (a + b);
        const double radius = 0.5 * (b - a);
        double acc = 0.0;
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            acc += weights_[i] * f(mid + radius * nodes_[i]);
        return radius * acc;
    }

private:
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

} // namespace expsamp
