#include <gspine/closure.hpp>
#include <gspine/serialize.hpp>

#include "catch_amalgamated.hpp"

#include <array>
#include <cmath>
#include <numbers>

using namespace gspine;

namespace {

ClosureParams quick_params()
{
    ClosureParams p;
    p.pair_budget = 300;
    p.pi_samples_per_pair = 4;
    p.stability_rounds = 2;
    p.size_cap = 3000;
    p.max_rounds = 40;
    p.classify.probe_count = 200;
    p.classify.stability_samples = 2000;
    return p;
}

// Near-uniform lines through the origin of R^3 (upper Fibonacci hemisphere).
RPlaneSet<Real> line_net(int count)
{
    RPlaneSet<Real> set(3, 1);
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
        const double z = 1.0 - (i + 0.5) / count;
        const double rad = std::sqrt(1.0 - z * z);
        RealVec v(3);
        v << rad * std::cos(golden * i), rad * std::sin(golden * i), z;
        set.insert(span_of<Real>(3, {v}));
    }
    return set;
}

} // namespace

TEST_CASE("RPlaneSet deduplicates within the equality tolerance")
{
    CounterRng rng(1, 0);
    RPlaneSet<Real> set(5, 2);
    CHECK(set.empty());
    CHECK(set.core().dim() == 5);

    const auto a = random_subspace<Real>(5, 2, rng);
    CHECK(set.insert(a));
    CHECK_FALSE(set.insert(a));
    RealMat nudged = a.basis();
    nudged(0, 0) += 1e-9;
    CHECK_FALSE(set.insert(orthonormalize<Real>(nudged)));
    CHECK(set.contains_plane(a));
    CHECK(set.size() == 1);
    CHECK(chordal_distance(set.core(), a) < 1e-14);

    const auto b = random_subspace<Real>(5, 2, rng);
    CHECK(set.insert(b));
    CHECK(set.core().dim() == 0);
    CHECK_THROWS_AS(set.insert(random_subspace<Real>(5, 3, rng)), DimensionError);
    CHECK_THROWS_AS(RPlaneSet<Real>(3, 4), DimensionError);
    CHECK_THROWS_AS(RPlaneSet<Real>::from_planes({}), DimensionError);
}

TEST_CASE("nearest_distance agrees with a member-by-member scan")
{
    CounterRng rng(2, 0);
    RPlaneSet<Real> set(6, 2);
    for (int i = 0; i < 40; ++i) set.insert(random_subspace<Real>(6, 2, rng));
    for (int t = 0; t < 50; ++t) {
        const auto q = random_subspace<Real>(6, 2, rng);
        double best = 1e300;
        for (const auto& p : set.planes()) best = std::min(best, chordal_distance(p, q));
        CHECK(std::abs(set.nearest_distance(q) - best) < 1e-10);
    }
    CHECK(set.nearest_distance(set[7]) < 1e-7);
}

TEST_CASE("a singleton is its own closure, a one-plane spine")
{
    CounterRng rng(3, 0);
    const auto ell = random_subspace<Real>(4, 1, rng);
    const auto res = closure(RPlaneSet<Real>::from_planes({ell}), 2, quick_params(), rng);
    CHECK(res.set.size() == 1);
    CHECK(res.verdict.kind == VerdictKind::spine);
    REQUIRE(res.verdict.core);
    CHECK(chordal_distance(*res.verdict.core, ell) < 1e-12);
}

TEST_CASE("the explicit lemma pairs stay two-element")
{
    for (auto [r, d, n] : {std::array{2, 3, 4}, std::array{3, 4, 5}}) {
        CounterRng rng(static_cast<std::uint64_t>(d), 0);
        const auto [a, b] = build_lemma_pair(r, d, n);
        const auto res = closure(RPlaneSet<Real>::from_planes({a, b}), d, quick_params(), rng);
        CHECK(res.set.size() == 2);
        CHECK(res.verdict.kind == VerdictKind::two_element);
        CHECK(res.verdict.evidence.escapes == 0);
        CHECK(res.verdict.evidence.stability_samples == 4000);
    }
}

TEST_CASE("an epsilon-net of lines in R^3 classifies as Full")
{
    const auto net = line_net(1500);
    CounterRng rng(4, 0);
    ClassifyParams params;
    params.chain_probes = false;
    const auto v = classify_closure(net, 2, params, rng);
    CHECK(v.kind == VerdictKind::full);
    CHECK(v.evidence.density == 1.0);
    CHECK(v.evidence.covered_by_member == v.evidence.probes);
    CHECK_FALSE(v.core);
}

TEST_CASE("a sparse set without chains is Unresolved")
{
    CounterRng rng(5, 0);
    RPlaneSet<Real> set(3, 1);
    for (int i = 0; i < 5; ++i) set.insert(random_subspace<Real>(3, 1, rng));
    ClassifyParams params;
    params.chain_probes = false;
    const auto v = classify_closure(set, 2, params, rng);
    CHECK(v.kind == VerdictKind::unresolved);
    CHECK(v.evidence.density < 1.0);
}

TEST_CASE("two generic lines in R^3 saturate to everything")
{
    CounterRng rng(6, 0);
    const auto res = closure(RPlaneSet<Real>::from_planes({random_subspace<Real>(3, 1, rng),
                                                           random_subspace<Real>(3, 1, rng)}),
                             2, quick_params(), rng);
    CHECK(res.verdict.kind == VerdictKind::full);
    CHECK(res.set.size() > 2);
    CHECK(res.set.core().dim() == 0);
}

TEST_CASE("planes sharing a line saturate to that line's spine")
{
    CounterRng rng(7, 0);
    const auto e1 = RealSubspace::coordinate(5, {0});
    std::vector<RealSubspace> seeds;
    for (int i = 0; i < 3; ++i) seeds.push_back(random_subspace<Real>(5, 2, rng, std::nullopt, e1));
    const auto res = closure(RPlaneSet<Real>::from_planes(seeds), 4, quick_params(), rng);
    REQUIRE(res.verdict.kind == VerdictKind::spine);
    REQUIRE(res.verdict.core);
    CHECK(chordal_distance(*res.verdict.core, e1) < 1e-6);
    for (const auto& p : res.set.planes()) CHECK(containment_defect(p, e1) <= 1e-8);
}

TEST_CASE("closure growth is monotone and verdicts are consistent with the set")
{
    CounterRng rng(8, 0);
    for (int trial = 0; trial < 3; ++trial) {
        const int shared = trial % 2;
        const auto meet = random_subspace<Real>(5, shared, rng);
        const auto a = random_subspace<Real>(5, 2, rng, std::nullopt, meet);
        const auto b = random_subspace<Real>(5, 2, rng, std::nullopt, meet);
        auto params = quick_params();
        params.classify.probe_count = 100;
        const auto res = closure(RPlaneSet<Real>::from_planes({a, b}), 4, params, rng);
        for (std::size_t i = 1; i < res.size_per_round.size(); ++i) {
            CHECK(res.size_per_round[i] >= res.size_per_round[i - 1]);
            CHECK(res.core_dim_per_round[i] <= res.core_dim_per_round[i - 1]);
        }
        CHECK(res.size_per_round.size() == static_cast<std::size_t>(res.verdict.evidence.rounds));
        switch (res.verdict.kind) {
        case VerdictKind::spine:
            REQUIRE(res.verdict.core);
            for (const auto& p : res.set.planes()) CHECK(contains(p, *res.verdict.core));
            break;
        case VerdictKind::full: CHECK(res.set.core().dim() == 0); break;
        case VerdictKind::two_element: CHECK(res.set.size() == 2); break;
        case VerdictKind::unresolved: CHECK(res.verdict.evidence.density < 1.0); break;
        }
        CHECK(res.verdict.kind != VerdictKind::unresolved);
    }
}

TEST_CASE("closure rejects bad dimensions and budgets")
{
    CounterRng rng(9, 0);
    const auto set = RPlaneSet<Real>::from_planes({RealSubspace::coordinate(4, {0, 1})});
    CHECK_THROWS_AS(closure(set, 2, quick_params(), rng), PreconditionError);
    CHECK_THROWS_AS(closure(set, 4, quick_params(), rng), PreconditionError);
    auto bad = quick_params();
    bad.pair_budget = 0;
    CHECK_THROWS_AS(closure(set, 3, bad, rng), PreconditionError);
    CHECK_THROWS_AS(closure(RPlaneSet<Real>(4, 2), 3, quick_params(), rng), PreconditionError);
}

TEST_CASE("plane sets and verdicts serialize and round-trip")
{
    CounterRng rng(10, 0);
    RPlaneSet<Real> set(4, 2);
    for (int i = 0; i < 5; ++i) set.insert(random_subspace<Real>(4, 2, rng));
    const std::string text = dump_stable(to_json_value(set, 3));
    const auto back = plane_set_from_json<Real>(json::parse(text));
    REQUIRE(back.size() == set.size());
    for (std::size_t i = 0; i < set.size(); ++i) CHECK(chordal_distance(back[i], set[i]) < 1e-15);

    const auto c = random_subspace<Complex>(3, 2, rng);
    const auto c_back = subspace_from_json<Complex>(json::parse(dump_stable(to_json_value(c))));
    CHECK(chordal_distance(c, c_back) < 1e-15);

    CHECK_THROWS_AS(subspace_from_json<Real>(to_json_value(c)), DimensionError);
    CHECK_THROWS_AS(subspace_from_json<Real>(json{{"ambient_dim", 40}, {"basis", json::array()}}), DimensionError);
    CHECK_THROWS_AS(subspace_from_json<Real>(json{{"ambient_dim", 2}, {"dim", 1}, {"basis", {{1.0}, {1.0, 2.0}}}}),
                    DimensionError);
    CHECK_THROWS_AS(subspace_from_json<Real>(json{{"ambient_dim", 2}, {"dim", 2}, {"basis", {{1, 2}, {2, 4}}}}),
                    PreconditionError);
    CHECK_THROWS_AS(subspace_from_json<Real>(json{{"basis", 3}}), SerializationError);

    const auto [a, b] = build_lemma_pair(2, 3, 4);
    const auto res = closure(RPlaneSet<Real>::from_planes({a, b}), 3, quick_params(), rng);
    const json v = to_json_value(res.verdict);
    CHECK(v.at("kind") == "TwoElement");
    CHECK(v.at("escapes") == 0);
    CHECK_FALSE(v.contains("core"));
}
