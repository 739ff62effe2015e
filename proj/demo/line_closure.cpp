// Saturation of two random lines in R^3 under projections onto planes
// (r, d, n) = (1, 2, 3), and of the coordinate pair in R^4 with d = 3.

#include <gspine/closure.hpp>

#include <cstdio>

int main()
{
    using namespace gspine;
    CounterRng rng(42, 0);

    const auto a = random_subspace<Real>(3, 1, rng);
    const auto b = random_subspace<Real>(3, 1, rng);
    const auto lines = closure(RPlaneSet<Real>::from_planes({a, b}), 2, ClosureParams{}, rng);
    const auto& ev = lines.verdict.evidence;
    std::printf("two lines:   %s, %zu members, %lld of %lld probes covered (%lld by witness chains)\n",
                to_string(lines.verdict.kind), lines.set.size(), static_cast<long long>(ev.covered),
                static_cast<long long>(ev.probes), static_cast<long long>(ev.covered_by_chain));

    const auto [eta, eta_prime] = build_lemma_pair<Real>(2, 3, 4);
    const auto pair = closure(RPlaneSet<Real>::from_planes({eta, eta_prime}), 3, ClosureParams{}, rng);
    std::printf("lemma pair:  %s, %zu members, %lld escapes in %lld projections\n", to_string(pair.verdict.kind),
                pair.set.size(), static_cast<long long>(pair.verdict.evidence.escapes),
                static_cast<long long>(pair.verdict.evidence.stability_samples));
}
