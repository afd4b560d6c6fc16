#pragma once

// Distribution of a product of independent non-negative factors, evaluated
// on density grids, and the three-factor risk chain R = C * V * T.

#include "softtri/grid.hpp"

#include <iosfwd>
#include <span>
#include <vector>

namespace softtri {

struct CdfPoint {
    double t;
    double cdf;
};

/// Pr{XY <= t} for each t. Both supports must lie in [0, inf) and t_grid
/// must be non-decreasing. Throws NegativeSupport or UnsortedGrid.
std::vector<CdfPoint> product_cdf(const GriddedDensity& x,
                                  const GriddedDensity& y,
                                  std::span<const double> t_grid);

struct DifferentiatedDensity {
    GriddedDensity density;
    double raw_mass;  // trapezoid mass before clamping/renormalization
};

/// Central differences (one-sided at the ends) of CDF samples on a uniform
/// t grid, negatives clamped to zero, renormalized to unit mass.
/// Throws NonMonotoneCdf, UnsortedGrid or InvalidGrid.
DifferentiatedDensity product_density(std::span<const CdfPoint> cdf);

struct RiskSpec {
    GriddedDensity consequences;   // C, support in [0, c_hi]
    GriddedDensity vulnerability;  // V, support in [0, 1]
    GriddedDensity threat;         // T, support in [0, 1]
};

/// Throws Error(InvalidParams) when V or T leave [0, 1] or C is negative.
void validate_risk_spec(const RiskSpec& spec);

struct ProductResult {
    std::vector<CdfPoint> cdf;
    GriddedDensity density;
    double raw_mass;
};

/// P = V*T on a [0, 1] t grid, then R = C*P on [0, c_hi].
ProductResult risk_triple(const RiskSpec& spec, std::size_t n_points = 2001);

/// `t,cdf,density` CSV with a header row and 12 significant digits.
void write_product_csv(std::ostream& out, const ProductResult& result);

} // namespace softtri
