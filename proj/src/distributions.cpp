#include "softtri/distributions.hpp"

#include "softtri/error.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace softtri {

namespace {

bool all_finite(std::initializer_list<double> xs)
{
    return std::all_of(xs.begin(), xs.end(), [](double v) { return std::isfinite(v); });
}

// Mass on the wide side between the wide extreme and normalized distance u
// from it: (1-phi)/2 * u + phi/2 * u^(alpha+1). Equals 1/2 at u = 1.
double wide_tail_mass(double phi, double alpha, double u) noexcept
{
    return 0.5 * (1.0 - phi) * u + 0.5 * phi * std::pow(u, alpha + 1.0);
}

// Smallest u in [0, 1] with wide_tail_mass(u) >= target, by bisection.
double invert_wide_tail(double phi, double alpha, double target) noexcept
{
    constexpr int kMaxIterations = 200;
    double lo = 0.0;
    double hi = 1.0;
    for (int i = 0; i < kMaxIterations; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        if (wide_tail_mass(phi, alpha, mid) < target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double unit_uniform(std::mt19937_64& rng) noexcept
{
    // 53 random mantissa bits; identical on every platform.
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace

SoftTriangleParams SoftTriangleParams::validate(double low, double median, double high, double phi)
{
    if (!all_finite({low, median, high, phi})) {
        throw Error(ErrorCode::NonFinite, "soft triangle parameters must be finite");
    }
    if (!(low < median && median < high)) {
        std::ostringstream msg;
        msg << "require low < median < high, got (" << low << ", " << median << ", " << high << ")";
        throw Error(ErrorCode::OrderViolation, msg.str());
    }
    if (!(phi > 0.0 && phi <= 1.0)) {
        std::ostringstream msg;
        msg << "phi must lie in (0, 1], got " << phi;
        throw Error(ErrorCode::PhiOutOfRange, msg.str());
    }
    return SoftTriangleParams(low, median, high, phi);
}

SoftTriangleParams SoftTriangleParams::sharpened() const noexcept
{
    return SoftTriangleParams(low_, median_, high_, 1.0);
}

DerivedCoefficients derive_coefficients(const SoftTriangleParams& p) noexcept
{
    const double below = p.median() - p.low();
    const double above = p.high() - p.median();
    DerivedCoefficients c{};
    // Ties put the monomial on the upper side.
    c.wide_side = above >= below ? WideSide::upper : WideSide::lower;
    c.n = std::min(below, above);
    c.w = std::max(below, above);
    c.B = (1.0 - p.phi()) / (2.0 * c.w);
    c.A = 1.0 / c.n - c.B;
    c.alpha = 2.0 * c.A * c.w / p.phi() - 1.0;
    c.peak = 1.0 / c.n;
    return c;
}

namespace {

// Linear ramp on the narrow side: 0 at the narrow extreme, peak at M.
double narrow_branch(const SoftTriangleParams& p, const DerivedCoefficients& c, double x) noexcept
{
    const double r = c.wide_side == WideSide::upper ? (x - p.low()) / c.n : (p.high() - x) / c.n;
    return c.peak * r;
}

// B + A u^alpha on the wide side, u the normalized distance to the wide extreme.
double wide_branch(const SoftTriangleParams& p, const DerivedCoefficients& c, double x) noexcept
{
    const double u = c.wide_side == WideSide::upper ? (p.high() - x) / c.w : (x - p.low()) / c.w;
    return c.B + c.A * std::pow(u, c.alpha);
}

} // namespace

double pdf_soft(const SoftTriangleParams& p, double x) noexcept
{
    if (!(x >= p.low() && x <= p.high())) {
        return 0.0;
    }
    const DerivedCoefficients c = derive_coefficients(p);
    const bool narrow = c.wide_side == WideSide::upper ? x <= p.median() : x >= p.median();
    return narrow ? narrow_branch(p, c, x) : wide_branch(p, c, x);
}

MedianLimits pdf_soft_median_limits(const SoftTriangleParams& p) noexcept
{
    const DerivedCoefficients c = derive_coefficients(p);
    const double narrow = narrow_branch(p, c, p.median());
    const double wide = wide_branch(p, c, p.median());
    return c.wide_side == WideSide::upper ? MedianLimits{narrow, wide} : MedianLimits{wide, narrow};
}

double cdf_soft(const SoftTriangleParams& p, double x) noexcept
{
    if (x <= p.low()) {
        return 0.0;
    }
    if (x >= p.high()) {
        return 1.0;
    }
    const DerivedCoefficients c = derive_coefficients(p);
    if (c.wide_side == WideSide::upper) {
        if (x <= p.median()) {
            const double r = (x - p.low()) / c.n;
            return 0.5 * r * r;
        }
        const double u = (p.high() - x) / c.w;
        return 1.0 - wide_tail_mass(p.phi(), c.alpha, u);
    }
    if (x >= p.median()) {
        const double r = (p.high() - x) / c.n;
        return 1.0 - 0.5 * r * r;
    }
    const double u = (x - p.low()) / c.w;
    return wide_tail_mass(p.phi(), c.alpha, u);
}

double quantile_soft(const SoftTriangleParams& p, double q)
{
    if (!(q >= 0.0 && q <= 1.0)) {
        throw Error(ErrorCode::QOutOfRange, "quantile level must lie in [0, 1]");
    }
    if (q == 0.0) {
        return p.low();
    }
    if (q == 1.0) {
        return p.high();
    }
    if (q == 0.5) {
        return p.median();
    }
    const DerivedCoefficients c = derive_coefficients(p);
    if (c.wide_side == WideSide::upper) {
        if (q < 0.5) {
            return p.low() + c.n * std::sqrt(2.0 * q);
        }
        const double u = invert_wide_tail(p.phi(), c.alpha, 1.0 - q);
        return std::clamp(p.high() - c.w * u, p.median(), p.high());
    }
    if (q > 0.5) {
        return p.high() - c.n * std::sqrt(2.0 * (1.0 - q));
    }
    const double u = invert_wide_tail(p.phi(), c.alpha, q);
    return std::clamp(p.low() + c.w * u, p.low(), p.median());
}

std::vector<double> sample_soft(const SoftTriangleParams& p, std::uint64_t seed, std::int64_t count)
{
    if (count < 1) {
        throw Error(ErrorCode::BadCount, "sample count must be at least 1");
    }
    std::mt19937_64 rng(seed);
    std::vector<double> out(static_cast<std::size_t>(count));
    for (double& v : out) {
        v = quantile_soft(p, unit_uniform(rng));
    }
    return out;
}

double pdf_sharp(const SoftTriangleParams& p, double x) noexcept
{
    if (!(x >= p.low() && x <= p.high())) {
        return 0.0;
    }
    const double below = p.median() - p.low();
    const double above = p.high() - p.median();
    const double n = std::min(below, above);
    const double w = std::max(below, above);
    const double peak = 1.0 / n;
    const double alpha = 2.0 * w / n - 1.0;
    if (above >= below) {
        if (x <= p.median()) {
            return peak * (x - p.low()) / n;
        }
        return peak * std::pow((p.high() - x) / w, alpha);
    }
    if (x >= p.median()) {
        return peak * (p.high() - x) / n;
    }
    return peak * std::pow((x - p.low()) / w, alpha);
}

TriangularParams TriangularParams::validate(double low, double mode, double high)
{
    if (!all_finite({low, mode, high})) {
        throw Error(ErrorCode::NonFinite, "triangular parameters must be finite");
    }
    if (!(low <= mode && mode <= high && low < high)) {
        throw Error(ErrorCode::OrderViolation, "triangular requires low <= mode <= high and low < high");
    }
    return TriangularParams(low, mode, high);
}

double pdf_triangular(const TriangularParams& t, double x) noexcept
{
    const double a = t.low();
    const double c = t.mode();
    const double b = t.high();
    if (!(x >= a && x <= b)) {
        return 0.0;
    }
    if (x < c) {
        return 2.0 * (x - a) / ((b - a) * (c - a));
    }
    if (x == c) {
        return 2.0 / (b - a);
    }
    return 2.0 * (b - x) / ((b - a) * (b - c));
}

double cdf_triangular(const TriangularParams& t, double x) noexcept
{
    const double a = t.low();
    const double c = t.mode();
    const double b = t.high();
    if (x <= a) {
        return 0.0;
    }
    if (x >= b) {
        return 1.0;
    }
    if (x <= c) {
        return (x - a) * (x - a) / ((b - a) * (c - a));
    }
    return 1.0 - (b - x) * (b - x) / ((b - a) * (b - c));
}

BetaParams BetaParams::validate(double a, double b)
{
    if (!all_finite({a, b})) {
        throw Error(ErrorCode::NonFinite, "beta parameters must be finite");
    }
    if (!(a > 0.0 && b > 0.0)) {
        throw Error(ErrorCode::InvalidParams, "beta parameters must be positive");
    }
    return BetaParams(a, b);
}

double pdf_beta(const BetaParams& beta, double x)
{
    const double a = beta.a();
    const double b = beta.b();
    const bool singular = a < 1.0 || b < 1.0;
    if (singular && !(x > 0.0 && x < 1.0)) {
        throw Error(ErrorCode::XOutOfRange, "beta density with a < 1 or b < 1 needs x in (0, 1)");
    }
    if (x < 0.0 || x > 1.0 || std::isnan(x)) {
        return 0.0;
    }
    const double log_norm = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
    if (x == 0.0) {
        return a > 1.0 ? 0.0 : std::exp(log_norm);
    }
    if (x == 1.0) {
        return b > 1.0 ? 0.0 : std::exp(log_norm);
    }
    return std::exp(log_norm + (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x));
}

std::pair<double, double> natural_support(const Distribution& dist) noexcept
{
    struct Visitor {
        std::pair<double, double> operator()(const SoftTriangleParams& p) const { return {p.low(), p.high()}; }
        std::pair<double, double> operator()(const TriangularParams& t) const { return {t.low(), t.high()}; }
        std::pair<double, double> operator()(const BetaParams&) const { return {0.0, 1.0}; }
    };
    return std::visit(Visitor{}, dist);
}

namespace {

double beta_endpoint_limit(const BetaParams& beta, double x) noexcept
{
    const double shape = x == 0.0 ? beta.a() : beta.b();
    if (shape > 1.0) {
        return 0.0;
    }
    return std::exp(std::lgamma(beta.a() + beta.b()) - std::lgamma(beta.a()) - std::lgamma(beta.b()));
}

// Beta samples on a grid. Nodes where the density diverges (x = 0 with a < 1,
// x = 1 with b < 1) get the value that makes the trapezoid over their edge
// cell reproduce the exact cell mass.
std::vector<double> beta_samples(const BetaParams& beta, std::span<const double> xs)
{
    const double a = beta.a();
    const double b = beta.b();
    std::vector<double> values(xs.size());
    std::vector<std::size_t> singular;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double x = xs[i];
        if ((x == 0.0 && a < 1.0) || (x == 1.0 && b < 1.0)) {
            singular.push_back(i);
            continue;
        }
        if (x <= 0.0 || x >= 1.0) {
            // Outside the support, or a non-divergent endpoint.
            values[i] = (x == 0.0 || x == 1.0) ? beta_endpoint_limit(beta, x) : 0.0;
            continue;
        }
        values[i] = pdf_beta(beta, x);
    }
    for (std::size_t i : singular) {
        const std::size_t j = (i == 0) ? 1 : i - 1;
        const double lo = std::min(xs[i], xs[j]);
        const double hi = std::max(xs[i], xs[j]);
        const double mass = boost::math::ibeta(a, b, std::clamp(hi, 0.0, 1.0))
                          - boost::math::ibeta(a, b, std::clamp(lo, 0.0, 1.0));
        values[i] = std::max(0.0, 2.0 * mass / (hi - lo) - values[j]);
    }
    return values;
}

} // namespace

GriddedDensity to_grid(const Distribution& dist,
                       std::size_t n_points,
                       std::optional<std::pair<double, double>> support_override)
{
    if (n_points < kMinGridPoints) {
        throw Error(ErrorCode::GridTooCoarse, "grid needs at least 64 points");
    }
    const auto [lo, hi] = support_override.value_or(natural_support(dist));
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
        throw Error(ErrorCode::InvalidGrid, "grid support must satisfy lo < hi");
    }
    const std::vector<double> xs = uniform_points(lo, hi, n_points);
    std::vector<double> values(n_points);
    if (const auto* soft = std::get_if<SoftTriangleParams>(&dist)) {
        std::transform(xs.begin(), xs.end(), values.begin(), [&](double x) { return pdf_soft(*soft, x); });
    } else if (const auto* tri = std::get_if<TriangularParams>(&dist)) {
        std::transform(xs.begin(), xs.end(), values.begin(), [&](double x) { return pdf_triangular(*tri, x); });
    } else {
        values = beta_samples(std::get<BetaParams>(dist), xs);
    }
    return GriddedDensity(lo, hi, std::move(values));
}

} // namespace softtri
