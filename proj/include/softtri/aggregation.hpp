#pragma once

// Linear opinion pooling of expert soft-triangle estimates.

#include "softtri/distributions.hpp"
#include "softtri/grid.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace softtri {

enum class VariantChoice { sharp, wide };

struct ExpertEstimate {
    std::string expert_id;
    SoftTriangleParams params;
    double weight = 1.0;
    VariantChoice variant_choice = VariantChoice::wide;
};

/// Checks weight > 0 and forces phi = 1 for the sharp variant.
/// Throws Error(NonPositiveWeight).
ExpertEstimate make_estimate(std::string expert_id,
                             const SoftTriangleParams& params,
                             double weight = 1.0,
                             VariantChoice variant = VariantChoice::wide);

struct PooledDensity {
    GriddedDensity grid;
    std::vector<std::string> contributor_ids;
    std::vector<double> mode_locations;  // ascending
};

inline constexpr double kDefaultModeProminence = 0.02;

/// Every estimate's pdf sampled on [min low, max high]. Throws EmptyPanel.
std::vector<GriddedDensity> common_grid(std::span<const ExpertEstimate> estimates,
                                        std::size_t n_points = kDefaultGridPoints);

/// Pointwise (optionally weighted) average of the common-grid densities.
/// Throws EmptyPanel or NonPositiveWeight.
PooledDensity aggregate(std::span<const ExpertEstimate> estimates,
                        bool weighted,
                        std::size_t n_points = kDefaultGridPoints,
                        double min_prominence = kDefaultModeProminence);

/// Abscissae of interior local maxima whose topographic prominence is at
/// least min_prominence times the grid maximum. Flat runs count as a single
/// candidate located at the run's centre.
std::vector<double> count_modes(const GriddedDensity& grid, double min_prominence);

/// `x,density` CSV with a header row and 12 significant digits.
void write_density_csv(std::ostream& out, const GriddedDensity& grid);

} // namespace softtri
