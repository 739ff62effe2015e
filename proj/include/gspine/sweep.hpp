#pragma once

// Diametric sweeps in the plane.
//
// The sweep of a set K about a base point p0 is the union of the disks with
// diameter p0 p over p in K.  Every such disk contains p0 and is star-shaped
// about it, so after one sweep the set is described by a radial function
// rho(theta) >= 0 about p0 (placed at the origin).  The disk with diameter
// from the origin to p has polar equation r <= |p| cos(theta - arg p), which
// turns the sweep into a max-product correlation on the circle:
//
//     rho'(theta_j) = max(0, max_k rho(theta_k) cos(theta_j - theta_k)).
//
// Sweeps of sets in higher dimensions reduce to this planar case slice by
// slice through p0 and are not modelled separately.

#include "errors.hpp"
#include "rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace gspine {

inline constexpr int default_grid_size = 2048;

class RadialFunction {
public:
    RadialFunction() = default;

    explicit RadialFunction(std::vector<double> values) : values_(std::move(values))
    {
        const std::size_t n = values_.size();
        if (n < 4 || (n & (n - 1)) != 0) throw DimensionError("RadialFunction: grid size must be a power of two >= 4");
        for (double v : values_)
            if (!(v >= 0.0) || !std::isfinite(v))
                throw PreconditionError("RadialFunction: values must be finite and nonnegative");
    }

    static RadialFunction constant(double c, int grid_size = default_grid_size)
    {
        return RadialFunction(std::vector<double>(static_cast<std::size_t>(grid_size), c));
    }

    /// Circle of radius a centred at (a, 0): passes through the origin.
    static RadialFunction circle_through_origin(double a, int grid_size = default_grid_size)
    {
        std::vector<double> v(static_cast<std::size_t>(grid_size));
        for (std::size_t j = 0; j < v.size(); ++j)
            v[j] = std::max(0.0, 2.0 * a * std::cos(angle(j, v.size())));
        return RadialFunction(std::move(v));
    }

    int grid_size() const noexcept { return static_cast<int>(values_.size()); }
    const std::vector<double>& values() const noexcept { return values_; }
    double operator[](std::size_t j) const { return values_[j]; }
    double theta(std::size_t j) const { return angle(j, values_.size()); }

    double max() const { return *std::max_element(values_.begin(), values_.end()); }
    double min() const { return *std::min_element(values_.begin(), values_.end()); }

    static double angle(std::size_t j, std::size_t n)
    {
        return 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
    }

private:
    std::vector<double> values_;
};

inline double sup_distance(const RadialFunction& a, const RadialFunction& b)
{
    if (a.grid_size() != b.grid_size()) throw DimensionError("sup_distance: grid sizes differ");
    double worst = 0.0;
    for (std::size_t j = 0; j < a.values().size(); ++j) worst = std::max(worst, std::abs(a[j] - b[j]));
    return worst;
}

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

using PointCloud2D = std::vector<Point2>;

/// One sweep of a raw point set: rho(theta) = max(0, max_p <p, (cos, sin)>).
inline RadialFunction radial_from_points(const PointCloud2D& cloud, int grid_size = default_grid_size)
{
    if (cloud.empty()) throw PreconditionError("radial_from_points: empty point cloud");
    std::vector<double> v(static_cast<std::size_t>(grid_size), 0.0);
    for (std::size_t j = 0; j < v.size(); ++j) {
        const double t = RadialFunction::angle(j, v.size());
        const double c = std::cos(t);
        const double s = std::sin(t);
        for (const auto& p : cloud) v[j] = std::max(v[j], p.x * c + p.y * s);
    }
    return RadialFunction(std::move(v));
}

/// One sweep of a star-shaped region given by its radial function.
inline RadialFunction delta_radial(const RadialFunction& rho)
{
    const std::size_t n = rho.values().size();
    const std::size_t quarter = n / 4;
    std::vector<double> cosine(quarter + 1);
    for (std::size_t m = 0; m <= quarter; ++m) cosine[m] = std::cos(RadialFunction::angle(m, n));

    const auto& in = rho.values();
    std::vector<double> out(n, 0.0);
    // Only offsets with cos > 0 can beat the clamp at zero.
    for (std::size_t j = 0; j < n; ++j) {
        double best = in[j];
        for (std::size_t m = 1; m < quarter; ++m) {
            const double c = cosine[m];
            best = std::max(best, c * std::max(in[(j + m) & (n - 1)], in[(j + n - m) & (n - 1)]));
        }
        out[j] = std::max(0.0, best);
    }
    return RadialFunction(std::move(out));
}

struct SweepResult {
    std::vector<RadialFunction> iterates_kept;  // D_1, D_2, ... subsampled
    RadialFunction final;
    int iterations = 0;
    std::vector<double> sup_deltas;
    bool converged = false;
};

/// Applies delta_radial until the sup-norm step drops below tol or
/// max_iter sweeps have been made.  Non-convergence is reported, not thrown.
inline SweepResult iterate_sweep(const RadialFunction& rho0, double tol = 1e-6, int max_iter = 500, int keep_every = 1)
{
    if (!(tol > 0.0)) throw PreconditionError("iterate_sweep: tolerance must be positive");
    if (keep_every < 1) throw PreconditionError("iterate_sweep: keep_every must be positive");
    SweepResult out;
    out.final = rho0;
    // A constant is already a fixed point; no sweep is needed to see that.
    if (rho0.max() - rho0.min() == 0.0) {
        out.converged = true;
        return out;
    }
    for (int it = 1; it <= max_iter; ++it) {
        RadialFunction next = delta_radial(out.final);
        const double step = sup_distance(next, out.final);
        out.final = std::move(next);
        out.iterations = it;
        out.sup_deltas.push_back(step);
        if ((it - 1) % keep_every == 0) out.iterates_kept.push_back(out.final);
        if (step < tol) {
            out.converged = true;
            break;
        }
    }
    return out;
}

/// Closed-form sweep of the circle of radius a through the origin,
/// centred at (a, 0): the cardioid a(1 + cos theta).
inline double cardioid_reference(double a, double theta)
{
    if (!(a > 0.0)) throw PreconditionError("cardioid_reference: need a > 0");
    return a * (1.0 + std::cos(theta));
}

inline bool is_ball(const RadialFunction& rho, double tol)
{
    if (!(tol > 0.0)) throw PreconditionError("is_ball: tolerance must be positive");
    return rho.max() - rho.min() < tol;
}

/// Smooth positive radial function: 1 + random trigonometric polynomial of
/// degree <= max_mode, rescaled so that its range lies in [min_range, 2 min_range].
inline RadialFunction random_star_shaped(CounterRng& rng, int grid_size = default_grid_size, double min_range = 0.1,
                                         int max_mode = 6)
{
    const std::size_t n = static_cast<std::size_t>(grid_size);
    std::vector<double> wave(n, 0.0);
    for (int m = 1; m <= max_mode; ++m) {
        const double a = rng.normal() / m;
        const double b = rng.normal() / m;
        for (std::size_t j = 0; j < n; ++j) {
            const double t = RadialFunction::angle(j, n);
            wave[j] += a * std::cos(m * t) + b * std::sin(m * t);
        }
    }
    const auto [lo, hi] = std::minmax_element(wave.begin(), wave.end());
    const double span = *hi - *lo;
    const double target = min_range * (1.0 + rng.uniform());
    std::vector<double> v(n);
    for (std::size_t j = 0; j < n; ++j) v[j] = 1.0 + (wave[j] - *lo) * (target / span);
    return RadialFunction(std::move(v));
}

/// theta,rho rows with a header.
inline void write_csv(std::ostream& os, const RadialFunction& rho)
{
    const auto old = os.precision(17);
    os << "theta,rho\n";
    for (std::size_t j = 0; j < rho.values().size(); ++j) os << rho.theta(j) << ',' << rho[j] << '\n';
    os.precision(old);
}

} // namespace gspine
