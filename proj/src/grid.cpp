#include "softtri/grid.hpp"

#include "softtri/error.hpp"

#include <cmath>
#include <string>

namespace softtri {

double trapezoid(std::span<const double> values, double h) noexcept
{
    if (values.size() < 2) {
        return 0.0;
    }
    double sum = 0.5 * (values.front() + values.back());
    for (std::size_t i = 1; i + 1 < values.size(); ++i) {
        sum += values[i];
    }
    return sum * h;
}

std::vector<double> uniform_points(double lo, double hi, std::size_t n)
{
    std::vector<double> xs(n);
    if (n == 0) {
        return xs;
    }
    if (n == 1) {
        xs[0] = lo;
        return xs;
    }
    const double h = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        xs[i] = lo + h * static_cast<double>(i);
    }
    xs[n - 1] = hi;
    return xs;
}

GriddedDensity::GriddedDensity(double lo, double hi, std::vector<double> values)
    : lo_(lo), hi_(hi), values_(std::move(values))
{
    if (!std::isfinite(lo_) || !std::isfinite(hi_) || !(lo_ < hi_)) {
        throw Error(ErrorCode::InvalidGrid, "grid support must satisfy lo < hi with finite ends");
    }
    if (values_.size() < 3) {
        throw Error(ErrorCode::InvalidGrid, "grid needs at least 3 samples");
    }
    for (double v : values_) {
        if (!std::isfinite(v) || v < 0.0) {
            throw Error(ErrorCode::InvalidGrid, "grid samples must be finite and non-negative");
        }
    }
    const double mass = trapezoid(values_, step());
    if (!(mass > 0.0) || !std::isfinite(mass)) {
        throw Error(ErrorCode::InvalidGrid, "grid has no probability mass");
    }
    for (double& v : values_) {
        v /= mass;
    }
}

double GriddedDensity::x(std::size_t i) const noexcept
{
    if (i + 1 >= values_.size()) {
        return hi_;
    }
    return lo_ + step() * static_cast<double>(i);
}

std::vector<double> GriddedDensity::abscissae() const
{
    return uniform_points(lo_, hi_, values_.size());
}

double GriddedDensity::integral() const noexcept
{
    return trapezoid(values_, step());
}

std::vector<double> GriddedDensity::cumulative() const
{
    const double h = step();
    std::vector<double> cum(values_.size());
    cum[0] = 0.0;
    for (std::size_t i = 1; i < values_.size(); ++i) {
        cum[i] = cum[i - 1] + 0.5 * h * (values_[i - 1] + values_[i]);
    }
    const double total = cum.back();
    for (double& c : cum) {
        c /= total;
    }
    cum.back() = 1.0;
    return cum;
}

double GriddedDensity::density_at(double x) const noexcept
{
    if (!(x >= lo_) || !(x <= hi_)) {
        return 0.0;
    }
    const double h = step();
    const double pos = (x - lo_) / h;
    auto j = static_cast<std::size_t>(pos);
    if (j + 1 >= values_.size()) {
        return values_.back();
    }
    const double frac = pos - static_cast<double>(j);
    return values_[j] + frac * (values_[j + 1] - values_[j]);
}

} // namespace softtri
