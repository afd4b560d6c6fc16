#include "softtri/risk_product.hpp"

#include "softtri/error.hpp"
#include "softtri/format.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace softtri {

namespace {

// Exact integral of the piecewise-linear interpolant of a density grid,
// consistent with its trapezoid cumulative at the nodes.
class GridCdf {
public:
    explicit GridCdf(const GriddedDensity& g)
        : lo_(g.lo()), hi_(g.hi()), h_(g.step()), values_(g.values()), cum_(g.cumulative())
    {
        // The scaled cumulative may differ from the raw one by rounding;
        // fold that into the in-cell quadratic.
        scale_ = 1.0 / (trapezoid(values_, h_));
    }

    double operator()(double y) const noexcept
    {
        if (!(y > lo_)) {
            return 0.0;
        }
        if (y >= hi_) {
            return 1.0;
        }
        const double pos = (y - lo_) / h_;
        auto j = static_cast<std::size_t>(pos);
        if (j + 1 >= values_.size()) {
            return 1.0;
        }
        const double d = y - (lo_ + h_ * static_cast<double>(j));
        const double slope = (values_[j + 1] - values_[j]) / h_;
        const double partial = (values_[j] * d + 0.5 * slope * d * d) * scale_;
        return std::min(1.0, cum_[j] + partial);
    }

    double hi() const noexcept { return hi_; }

private:
    double lo_;
    double hi_;
    double h_;
    std::span<const double> values_;
    std::vector<double> cum_;
    double scale_ = 1.0;
};

// Trapezoid over the outer grid of p_outer(x) * F_inner(min(t/x, inner_hi)).
// Nodes with x * inner_hi <= t contribute F = 1, so t/x is never formed at 0.
double outer_integral(const GriddedDensity& outer, const GridCdf& inner_cdf, double t) noexcept
{
    const auto values = outer.values();
    const std::size_t n = values.size();
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = outer.x(i);
        const double f = (x * inner_cdf.hi() <= t) ? 1.0 : inner_cdf(t / x);
        const double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
        sum += w * values[i] * f;
    }
    return sum * outer.step();
}

void require_non_negative(const GriddedDensity& g)
{
    if (g.lo() < 0.0) {
        throw Error(ErrorCode::NegativeSupport, "product factors need supports within [0, inf)");
    }
}

} // namespace

std::vector<CdfPoint> product_cdf(const GriddedDensity& x,
                                  const GriddedDensity& y,
                                  std::span<const double> t_grid)
{
    require_non_negative(x);
    require_non_negative(y);
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (!std::isfinite(t_grid[i]) || (i > 0 && t_grid[i] < t_grid[i - 1])) {
            throw Error(ErrorCode::UnsortedGrid, "t grid must be finite and ascending");
        }
    }
    const GridCdf fx(x);
    const GridCdf fy(y);
    const double t_full = x.hi() * y.hi();

    std::vector<CdfPoint> out;
    out.reserve(t_grid.size());
    for (double t : t_grid) {
        double p;
        if (t <= 0.0) {
            p = 0.0;
        } else if (t >= t_full) {
            p = 1.0;
        } else {
            // Both integration orders, averaged, so that the result is
            // symmetric in (x, y) to the last bit.
            const double a = outer_integral(x, fy, t);
            const double b = outer_integral(y, fx, t);
            p = std::clamp(0.5 * (a + b), 0.0, 1.0);
        }
        out.push_back({t, p});
    }
    return out;
}

DifferentiatedDensity product_density(std::span<const CdfPoint> cdf)
{
    const std::size_t n = cdf.size();
    if (n < 3) {
        throw Error(ErrorCode::InvalidGrid, "need at least 3 CDF samples");
    }
    const double lo = cdf.front().t;
    const double hi = cdf.back().t;
    if (!(lo < hi)) {
        throw Error(ErrorCode::UnsortedGrid, "t grid must be ascending");
    }
    const double h = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double expected = lo + h * static_cast<double>(i);
        if (std::abs(cdf[i].t - expected) > 1e-9 * std::max(1.0, std::abs(hi - lo))) {
            throw Error(ErrorCode::UnsortedGrid, "t grid must be uniform and ascending");
        }
        if (i > 0 && cdf[i].cdf < cdf[i - 1].cdf - 1e-9) {
            throw Error(ErrorCode::NonMonotoneCdf, "CDF samples decrease");
        }
    }

    std::vector<double> dens(n);
    dens[0] = (cdf[1].cdf - cdf[0].cdf) / h;
    dens[n - 1] = (cdf[n - 1].cdf - cdf[n - 2].cdf) / h;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        dens[i] = (cdf[i + 1].cdf - cdf[i - 1].cdf) / (2.0 * h);
    }
    const double raw_mass = trapezoid(dens, h);
    for (double& d : dens) {
        d = std::max(0.0, d);
    }
    return {GriddedDensity(lo, hi, std::move(dens)), raw_mass};
}

void validate_risk_spec(const RiskSpec& spec)
{
    auto in_unit = [](const GriddedDensity& g) { return g.lo() >= 0.0 && g.hi() <= 1.0; };
    if (!in_unit(spec.vulnerability) || !in_unit(spec.threat)) {
        throw Error(ErrorCode::NegativeSupport, "vulnerability and threat must be supported within [0, 1]");
    }
    if (spec.consequences.lo() < 0.0) {
        throw Error(ErrorCode::NegativeSupport, "consequences must be supported within [0, inf)");
    }
}

ProductResult risk_triple(const RiskSpec& spec, std::size_t n_points)
{
    validate_risk_spec(spec);
    if (n_points < 3) {
        throw Error(ErrorCode::GridTooCoarse, "risk grid needs at least 3 points");
    }
    const std::vector<double> unit_t = uniform_points(0.0, 1.0, n_points);
    const auto p_cdf = product_cdf(spec.vulnerability, spec.threat, unit_t);
    const DifferentiatedDensity p = product_density(p_cdf);

    const std::vector<double> risk_t = uniform_points(0.0, spec.consequences.hi() * p.density.hi(), n_points);
    auto r_cdf = product_cdf(spec.consequences, p.density, risk_t);
    DifferentiatedDensity r = product_density(r_cdf);
    return ProductResult{std::move(r_cdf), std::move(r.density), r.raw_mass};
}

void write_product_csv(std::ostream& out, const ProductResult& result)
{
    out << "t,cdf,density\n";
    for (std::size_t i = 0; i < result.cdf.size(); ++i) {
        out << format_number(result.cdf[i].t) << ',' << format_number(result.cdf[i].cdf) << ','
            << format_number(result.density[i]) << '\n';
    }
}

} // namespace softtri
