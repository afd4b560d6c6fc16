#pragma once

// Soft-triangle uncertainty distributions plus the triangular and beta
// baselines they are compared against.
//
// A soft triangle is elicited as (low, median, high, phi). The side of the
// median closer to its extreme (the narrow side) carries a linear ramp from
// zero up to the peak 1/n. The other (wide) side carries B + A*u^alpha where
// u is the normalized distance to the wide extreme. Both sides hold exactly
// half of the mass. phi = 1 gives the sharp variant (B = 0).

#include "softtri/grid.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

namespace softtri {

class SoftTriangleParams {
public:
    /// Throws Error with NonFinite, OrderViolation (not low < median < high)
    /// or PhiOutOfRange (phi outside (0, 1]).
    static SoftTriangleParams validate(double low, double median, double high, double phi);

    double low() const noexcept { return low_; }
    double median() const noexcept { return median_; }
    double high() const noexcept { return high_; }
    double phi() const noexcept { return phi_; }

    /// Same shape with phi = 1.
    SoftTriangleParams sharpened() const noexcept;

    friend bool operator==(const SoftTriangleParams&, const SoftTriangleParams&) = default;

private:
    SoftTriangleParams(double low, double median, double high, double phi) noexcept
        : low_(low), median_(median), high_(high), phi_(phi) {}

    double low_;
    double median_;
    double high_;
    double phi_;
};

inline SoftTriangleParams validate_params(double low, double median, double high, double phi)
{
    return SoftTriangleParams::validate(low, median, high, phi);
}

enum class WideSide { upper, lower };

struct DerivedCoefficients {
    double n;      // narrow-side width
    double w;      // wide-side width
    double B;      // density floor at the wide extreme
    double A;      // monomial amplitude, 1/n - B
    double alpha;  // monomial exponent
    double peak;   // density at the median, 1/n
    WideSide wide_side;
};

DerivedCoefficients derive_coefficients(const SoftTriangleParams& p) noexcept;

double pdf_soft(const SoftTriangleParams& p, double x) noexcept;
double cdf_soft(const SoftTriangleParams& p, double x) noexcept;

/// The two branch formulas of pdf_soft evaluated at the median, i.e. the
/// density's left and right limits there.
struct MedianLimits {
    double left;
    double right;
};
MedianLimits pdf_soft_median_limits(const SoftTriangleParams& p) noexcept;

/// Throws Error(QOutOfRange) unless 0 <= q <= 1.
double quantile_soft(const SoftTriangleParams& p, double q);

/// Inverse-transform samples from a mt19937_64 seeded with `seed`.
/// Throws Error(BadCount) when count < 1.
std::vector<double> sample_soft(const SoftTriangleParams& p, std::uint64_t seed, std::int64_t count);

/// Sharp soft triangle built directly from the two defining conditions
/// (continuity at the median, half the mass on each side): linear narrow
/// side, (1/n) * u^(2w/n - 1) on the wide side. Ignores phi.
double pdf_sharp(const SoftTriangleParams& p, double x) noexcept;

class TriangularParams {
public:
    /// Requires low <= mode <= high and low < high, all finite.
    static TriangularParams validate(double low, double mode, double high);

    double low() const noexcept { return low_; }
    double mode() const noexcept { return mode_; }
    double high() const noexcept { return high_; }

private:
    TriangularParams(double low, double mode, double high) noexcept
        : low_(low), mode_(mode), high_(high) {}

    double low_;
    double mode_;
    double high_;
};

double pdf_triangular(const TriangularParams& t, double x) noexcept;
double cdf_triangular(const TriangularParams& t, double x) noexcept;

class BetaParams {
public:
    /// Requires finite a > 0, b > 0.
    static BetaParams validate(double a, double b);

    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }

private:
    BetaParams(double a, double b) noexcept : a_(a), b_(b) {}

    double a_;
    double b_;
};

/// Throws Error(XOutOfRange) for x outside (0, 1) when a < 1 or b < 1.
/// Otherwise returns 0 outside [0, 1] and the finite limit at the ends.
double pdf_beta(const BetaParams& b, double x);

using Distribution = std::variant<SoftTriangleParams, TriangularParams, BetaParams>;

std::pair<double, double> natural_support(const Distribution& dist) noexcept;

inline constexpr std::size_t kMinGridPoints = 64;
inline constexpr std::size_t kDefaultGridPoints = 1001;
inline constexpr std::size_t kProductGridPoints = 2001;

/// Samples the density on n_points uniform nodes over its support (or the
/// override) and renormalizes. Throws Error(GridTooCoarse) for n < 64.
GriddedDensity to_grid(const Distribution& dist,
                       std::size_t n_points = kDefaultGridPoints,
                       std::optional<std::pair<double, double>> support_override = std::nullopt);

} // namespace softtri
