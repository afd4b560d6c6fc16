#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace softtri {

/// Density sampled on a uniform grid over [lo, hi], both endpoints included.
///
/// Construction validates the samples and rescales them so that the
/// trapezoid integral over the grid is 1. Instances are immutable.
class GriddedDensity {
public:
    /// Throws Error(InvalidGrid) when lo >= hi, fewer than 3 samples are
    /// given, a sample is negative or non-finite, or the total mass is zero.
    GriddedDensity(double lo, double hi, std::vector<double> values);

    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }
    std::size_t size() const noexcept { return values_.size(); }
    double step() const noexcept { return (hi_ - lo_) / static_cast<double>(values_.size() - 1); }

    /// Abscissa of sample i. The last sample is pinned to hi exactly.
    double x(std::size_t i) const noexcept;
    std::vector<double> abscissae() const;

    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }

    /// Trapezoid-rule mass; 1 up to rounding after construction.
    double integral() const noexcept;

    /// Running trapezoid integral at each grid node, scaled so the last
    /// entry is exactly 1.
    std::vector<double> cumulative() const;

    /// Linear interpolation of the samples; 0 outside [lo, hi].
    double density_at(double x) const noexcept;

private:
    double lo_;
    double hi_;
    std::vector<double> values_;
};

/// Trapezoid integral of samples with uniform spacing h.
double trapezoid(std::span<const double> values, double h) noexcept;

/// n points evenly spaced over [lo, hi]; the last one equals hi exactly.
std::vector<double> uniform_points(double lo, double hi, std::size_t n);

} // namespace softtri
