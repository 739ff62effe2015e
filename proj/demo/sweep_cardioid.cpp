// One diametric sweep of the unit-radius circle through the origin, compared
// with the cardioid 1 + cos(theta), followed by a few more sweeps.

#include <gspine/sweep.hpp>

#include <cstdio>

int main()
{
    using namespace gspine;
    const RadialFunction circle = RadialFunction::circle_through_origin(1.0);
    RadialFunction d = delta_radial(circle);

    double err = 0.0;
    for (std::size_t j = 0; j < d.values().size(); ++j)
        err = std::max(err, std::abs(d[j] - cardioid_reference(1.0, d.theta(j))));
    std::printf("grid %d, sup |sweep - cardioid| = %.3e\n", d.grid_size(), err);

    std::printf("%6s %12s %12s\n", "sweeps", "min rho", "max rho");
    for (int k = 1; k <= 64; k *= 2) {
        std::printf("%6d %12.6f %12.6f\n", k, d.min(), d.max());
        for (int i = k; i < 2 * k; ++i) d = delta_radial(d);
    }
}
