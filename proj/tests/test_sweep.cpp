#include <gspine/serialize.hpp>
#include <gspine/sweep.hpp>

#include "catch_amalgamated.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

using namespace gspine;
using Catch::Matchers::WithinAbs;

namespace {

constexpr double pi = std::numbers::pi;

RadialFunction spike(int grid)
{
    std::vector<double> v(static_cast<std::size_t>(grid), 0.0);
    v[0] = 1.0;
    return RadialFunction(std::move(v));
}

RadialFunction pointwise_max(const RadialFunction& a, const RadialFunction& b)
{
    std::vector<double> v(a.values());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = std::max(v[j], b[j]);
    return RadialFunction(std::move(v));
}

} // namespace

TEST_CASE("RadialFunction validates its grid and values")
{
    CHECK_THROWS_AS(RadialFunction(std::vector<double>(6, 1.0)), DimensionError);
    CHECK_THROWS_AS(RadialFunction(std::vector<double>(2, 1.0)), DimensionError);
    CHECK_THROWS_AS(RadialFunction({1.0, -0.5, 1.0, 1.0}), PreconditionError);
    CHECK_THROWS_AS(RadialFunction({1.0, std::nan(""), 1.0, 1.0}), PreconditionError);
    CHECK_THROWS_AS(RadialFunction({1.0, INFINITY, 1.0, 1.0}), PreconditionError);
    const auto c = RadialFunction::constant(2.5, 16);
    CHECK(c.grid_size() == 16);
    CHECK(c.min() == 2.5);
    CHECK_THAT(c.theta(4), WithinAbs(pi / 2, 1e-15));
}

TEST_CASE("radial_from_points examples")
{
    const auto one = radial_from_points({{1.0, 0.0}}, 8);
    const double h = 1.0 / std::numbers::sqrt2;
    const std::vector<double> expected{1.0, h, 0.0, 0.0, 0.0, 0.0, 0.0, h};
    for (std::size_t j = 0; j < 8; ++j) CHECK_THAT(one[j], WithinAbs(expected[j], 1e-15));

    const auto two = radial_from_points({{1.0, 0.0}, {0.0, 2.0}}, 8);
    CHECK_THAT(two[2], WithinAbs(2.0, 1e-15));
    CHECK_THAT(two[1], WithinAbs(2.0 * h, 1e-15));
    CHECK(two[5] == 0.0);

    CHECK(radial_from_points({{0.0, 0.0}}, 8).max() == 0.0);
    CHECK_THROWS_AS(radial_from_points({}, 8), PreconditionError);
}

TEST_CASE("a sweep of a cloud is the max of single-point sweeps")
{
    CounterRng rng(21, 0);
    for (int t = 0; t < 50; ++t) {
        PointCloud2D cloud;
        const int count = 1 + static_cast<int>(rng.below(6));
        for (int i = 0; i < count; ++i) cloud.push_back({rng.normal(), rng.normal()});
        const auto whole = radial_from_points(cloud, 256);
        RadialFunction by_point = radial_from_points({cloud.front()}, 256);
        RadialFunction second_by_point = delta_radial(by_point);
        for (std::size_t i = 1; i < cloud.size(); ++i) {
            const auto single = radial_from_points({cloud[i]}, 256);
            by_point = pointwise_max(by_point, single);
            second_by_point = pointwise_max(second_by_point, delta_radial(single));
        }
        CHECK(sup_distance(whole, by_point) == 0.0);
        CHECK(sup_distance(delta_radial(whole), second_by_point) < 1e-10);
    }
}

TEST_CASE("sweeping a circle through the origin gives the cardioid")
{
    double previous = 1.0;
    for (int grid : {256, 512, 1024, 2048}) {
        const double a = 0.75;
        const auto swept = delta_radial(RadialFunction::circle_through_origin(a, grid));
        double err = 0.0;
        for (std::size_t j = 0; j < swept.values().size(); ++j)
            err = std::max(err, std::abs(swept[j] - cardioid_reference(a, swept.theta(j))));
        const double h = 2.0 * pi / grid;
        CHECK(err <= 10.0 * h * h);
        CHECK(err <= previous);
        previous = err;
        if (grid == 2048) CHECK(err < 1e-4);
    }
    CHECK_THAT(cardioid_reference(1.0, 0.0), WithinAbs(2.0, 1e-15));
    CHECK_THAT(cardioid_reference(1.0, pi / 2), WithinAbs(1.0, 1e-15));
    CHECK_THAT(cardioid_reference(1.0, pi), WithinAbs(0.0, 1e-15));
    CHECK_THROWS_AS(cardioid_reference(0.0, 1.0), PreconditionError);
}

TEST_CASE("the sweep is expansive, keeps the maximum and fixes constants")
{
    CounterRng rng(22, 0);
    for (int t = 0; t < 20; ++t) {
        const auto rho = random_star_shaped(rng, 512);
        const double range = rho.max() - rho.min();
        CHECK(range >= 0.1 - 1e-12);
        CHECK(range <= 0.2 + 1e-12);
        const auto next = delta_radial(rho);
        for (std::size_t j = 0; j < rho.values().size(); ++j) REQUIRE(next[j] >= rho[j]);
        CHECK(next.max() == rho.max());
        CHECK(sup_distance(next, rho) > 0.0);
    }
    const auto c = RadialFunction::constant(1.7, 256);
    CHECK(sup_distance(delta_radial(c), c) == 0.0);
    const auto zero = RadialFunction::constant(0.0, 64);
    CHECK(delta_radial(zero).max() == 0.0);
}

TEST_CASE("iterated sweeps of a spike follow cos^k(theta/k)")
{
    const int grid = 1024;
    const double h = 2.0 * pi / grid;
    auto rho = spike(grid);
    for (int k = 1; k <= 8; ++k) {
        rho = delta_radial(rho);
        double err = 0.0;
        for (std::size_t j = 0; j < rho.values().size(); ++j) {
            double theta = rho.theta(j);
            if (theta > pi) theta = 2.0 * pi - theta;
            const double exact = theta / k < pi / 2 ? std::pow(std::cos(theta / k), k) : 0.0;
            err = std::max(err, std::abs(rho[j] - exact));
        }
        INFO("k = " << k);
        CHECK(err <= 2.0 * k * h * h + 1e-14);
    }
}

TEST_CASE("iterate_sweep reports convergence honestly")
{
    const auto c = RadialFunction::constant(1.0, 64);
    const auto fixed = iterate_sweep(c);
    CHECK(fixed.converged);
    CHECK(fixed.iterations == 0);

    // The range of the k-th sweep of a spike decays like pi^2 / (2k), so a
    // few dozen sweeps leave it far from a ball.
    const auto slow = iterate_sweep(spike(256), 1e-6, 40, 10);
    CHECK_FALSE(slow.converged);
    CHECK(slow.iterations == 40);
    CHECK(slow.sup_deltas.size() == 40);
    CHECK(slow.iterates_kept.size() == 4);
    CHECK(slow.final.max() == 1.0);
    const double range = slow.final.max() - slow.final.min();
    CHECK_THAT(range, WithinAbs(1.0 - std::pow(std::cos(pi / 40), 40), 5e-3));
    CHECK_FALSE(is_ball(slow.final, 1e-5));
    for (std::size_t i = 1; i < slow.sup_deltas.size(); ++i) CHECK(slow.sup_deltas[i] > 0.0);

    CHECK_THROWS_AS(iterate_sweep(c, 0.0), PreconditionError);
    CHECK_THROWS_AS(iterate_sweep(c, 1e-6, 10, 0), PreconditionError);
}

TEST_CASE("is_ball and serialization helpers")
{
    CHECK(is_ball(RadialFunction::constant(3.0, 8), 1e-12));
    CHECK_FALSE(is_ball(RadialFunction({1.0, 1.0, 1.0, 1.1}), 0.05));
    CHECK_THROWS_AS(is_ball(RadialFunction::constant(1.0, 8), 0.0), PreconditionError);

    const RadialFunction rho({0.5, 1.0, 0.25, 0.0});
    const auto back = radial_from_json(json::parse(dump_stable(to_json_value(rho))));
    CHECK(back.values() == rho.values());
    CHECK_THROWS_AS(radial_from_json(json{{"grid_size", 8}, {"values", {1, 1, 1, 1}}}), DimensionError);
    CHECK_THROWS_AS(radial_from_json(json{{"values", "x"}}), SerializationError);

    std::ostringstream csv;
    write_csv(csv, rho);
    CHECK(csv.str().rfind("theta,rho\n0,0.5\n", 0) == 0);
    CHECK_THROWS_AS(sup_distance(rho, RadialFunction::constant(1.0, 8)), DimensionError);
}
