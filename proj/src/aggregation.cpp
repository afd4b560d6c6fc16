#include "softtri/aggregation.hpp"

#include "softtri/error.hpp"
#include "softtri/format.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace softtri {

ExpertEstimate make_estimate(std::string expert_id,
                             const SoftTriangleParams& params,
                             double weight,
                             VariantChoice variant)
{
    if (!(weight > 0.0) || !std::isfinite(weight)) {
        throw Error(ErrorCode::NonPositiveWeight, "expert weight must be positive and finite");
    }
    ExpertEstimate e{std::move(expert_id), params, weight, variant};
    if (variant == VariantChoice::sharp) {
        e.params = params.sharpened();
    }
    return e;
}

std::vector<GriddedDensity> common_grid(std::span<const ExpertEstimate> estimates, std::size_t n_points)
{
    if (estimates.empty()) {
        throw Error(ErrorCode::EmptyPanel, "panel has no estimates");
    }
    double lo = estimates.front().params.low();
    double hi = estimates.front().params.high();
    for (const auto& e : estimates) {
        lo = std::min(lo, e.params.low());
        hi = std::max(hi, e.params.high());
    }
    std::vector<GriddedDensity> grids;
    grids.reserve(estimates.size());
    for (const auto& e : estimates) {
        grids.push_back(to_grid(e.params, n_points, std::pair{lo, hi}));
    }
    return grids;
}

PooledDensity aggregate(std::span<const ExpertEstimate> estimates,
                        bool weighted,
                        std::size_t n_points,
                        double min_prominence)
{
    if (estimates.empty()) {
        throw Error(ErrorCode::EmptyPanel, "panel has no estimates");
    }
    for (const auto& e : estimates) {
        if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
            throw Error(ErrorCode::NonPositiveWeight, "expert weight must be positive: " + e.expert_id);
        }
    }
    const std::vector<GriddedDensity> grids = common_grid(estimates, n_points);

    std::vector<double> sum(n_points, 0.0);
    double total_weight = 0.0;
    for (std::size_t k = 0; k < grids.size(); ++k) {
        const double wk = weighted ? estimates[k].weight : 1.0;
        total_weight += wk;
        const auto values = grids[k].values();
        for (std::size_t i = 0; i < n_points; ++i) {
            sum[i] += wk * values[i];
        }
    }
    for (double& v : sum) {
        v /= total_weight;
    }

    GriddedDensity pooled(grids.front().lo(), grids.front().hi(), std::move(sum));
    std::vector<std::string> ids;
    ids.reserve(estimates.size());
    for (const auto& e : estimates) {
        ids.push_back(e.expert_id);
    }
    auto modes = count_modes(pooled, min_prominence);
    return PooledDensity{std::move(pooled), std::move(ids), std::move(modes)};
}

std::vector<double> count_modes(const GriddedDensity& grid, double min_prominence)
{
    struct Run {
        std::size_t first;
        std::size_t last;
        double value;
    };
    const auto values = grid.values();
    std::vector<Run> runs;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!runs.empty() && values[i] == runs.back().value) {
            runs.back().last = i;
        } else {
            runs.push_back({i, i, values[i]});
        }
    }
    const double peak = *std::max_element(values.begin(), values.end());
    const double threshold = min_prominence * peak;

    std::vector<double> modes;
    for (std::size_t k = 1; k + 1 < runs.size(); ++k) {
        const double h = runs[k].value;
        if (!(h > runs[k - 1].value && h > runs[k + 1].value)) {
            continue;
        }
        // Lowest point on each side before reaching higher ground.
        double left_min = h;
        for (std::size_t j = k; j-- > 0;) {
            if (runs[j].value > h) {
                break;
            }
            left_min = std::min(left_min, runs[j].value);
        }
        double right_min = h;
        for (std::size_t j = k + 1; j < runs.size(); ++j) {
            if (runs[j].value > h) {
                break;
            }
            right_min = std::min(right_min, runs[j].value);
        }
        const double prominence = h - std::max(left_min, right_min);
        if (prominence > 0.0 && prominence >= threshold) {
            modes.push_back(0.5 * (grid.x(runs[k].first) + grid.x(runs[k].last)));
        }
    }
    return modes;
}

void write_density_csv(std::ostream& out, const GriddedDensity& grid)
{
    out << "x,density\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out << format_number(grid.x(i)) << ',' << format_number(grid[i]) << '\n';
    }
}

} // namespace softtri
