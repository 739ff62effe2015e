#pragma once

// Saturation closure by sampled expansion, and classification of the
// result against the four shapes the rigidity theory allows: a spine, the
// whole Grassmannian, a rank-collapse pair, or nothing recognisable.
//
// Verdicts carry evidence and are never proofs.  Density probes that no
// stored member covers are attempted by an explicit witness chain (see
// reach.hpp); a probe reached that way is covered by a plane that provably
// belongs to the saturation of the set, since every step of the chain is a
// recomputed projection witness.

#include "reach.hpp"
#include "saturation.hpp"
#include "subspace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gspine {

/// A deduplicated set of r-planes with its running intersection.
template <FieldScalar S>
class RPlaneSet {
public:
    RPlaneSet(int ambient_dim, int r, Tolerances tol = default_tolerances)
        : ambient_(ambient_dim), r_(r), tol_(tol), core_(Subspace<S>::full(ambient_dim))
    {
        detail::require_dims(ambient_dim >= 1 && r >= 0 && r <= ambient_dim, "RPlaneSet: need 0 <= r <= n");
        // Fixed symmetric weight for the one-dimensional lookup key.
        CounterRng keygen(0x5eed5eedULL, 17);
        weight_ = Mat<S>::Zero(ambient_dim, ambient_dim);
        for (int i = 0; i < ambient_dim; ++i)
            for (int j = 0; j <= i; ++j) {
                const double v = keygen.normal();
                weight_(i, j) = v;
                weight_(j, i) = v;
            }
        window_ = std::sqrt(2.0) * weight_.norm() * tol_.equality;
    }

    static RPlaneSet from_planes(const std::vector<Subspace<S>>& planes, Tolerances tol = default_tolerances)
    {
        detail::require_dims(!planes.empty(), "RPlaneSet: need at least one plane");
        RPlaneSet s(planes.front().ambient_dim(), planes.front().dim(), tol);
        for (const auto& p : planes) s.insert(p);
        return s;
    }

    /// Adds the plane unless an equal one is present; returns true if added.
    bool insert(const Subspace<S>& plane)
    {
        detail::require_dims(plane.ambient_dim() == ambient_ && plane.dim() == r_,
                             "RPlaneSet: plane has the wrong ambient space or dimension");
        const double k = key(plane);
        for (auto it = index_.lower_bound(k - window_); it != index_.end() && it->first <= k + window_; ++it)
            if (chordal_distance(planes_[it->second], plane) < tol_.equality) return false;
        index_.emplace(k, planes_.size());
        const Eigen::Index used = static_cast<Eigen::Index>(planes_.size()) * r_;
        if (used + r_ > stacked_.cols()) stacked_.conservativeResize(ambient_, std::max<Eigen::Index>(2 * stacked_.cols(), used + r_));
        stacked_.middleCols(used, r_) = plane.basis();
        planes_.push_back(plane);
        core_ = planes_.size() == 1 ? plane : intersect(core_, plane, tol_);
        return true;
    }

    bool contains_plane(const Subspace<S>& plane) const
    {
        const double k = key(plane);
        for (auto it = index_.lower_bound(k - window_); it != index_.end() && it->first <= k + window_; ++it)
            if (chordal_distance(planes_[it->second], plane) < tol_.equality) return true;
        return false;
    }

    /// Smallest chordal distance from `plane` to a member, via
    /// dist^2 = r - ||B_member* B_plane||_F^2 on all members at once.
    double nearest_distance(const Subspace<S>& plane) const
    {
        if (planes_.empty() || r_ == 0) return planes_.empty() ? std::numeric_limits<double>::infinity() : 0.0;
        const Eigen::Index cols = static_cast<Eigen::Index>(planes_.size()) * r_;
        const Mat<S> cross = stacked_.leftCols(cols).adjoint() * plane.basis();
        double best_overlap = 0.0;
        for (std::size_t i = 0; i < planes_.size(); ++i)
            best_overlap = std::max(best_overlap, cross.middleRows(static_cast<Eigen::Index>(i) * r_, r_).squaredNorm());
        return std::sqrt(std::max(0.0, static_cast<double>(r_) - best_overlap));
    }

    int ambient_dim() const noexcept { return ambient_; }
    int r() const noexcept { return r_; }
    std::size_t size() const noexcept { return planes_.size(); }
    bool empty() const noexcept { return planes_.empty(); }
    const std::vector<Subspace<S>>& planes() const noexcept { return planes_; }
    const Subspace<S>& operator[](std::size_t i) const { return planes_[i]; }
    /// Numerical intersection of all members (the full space while empty).
    const Subspace<S>& core() const noexcept { return core_; }
    const Tolerances& tolerances() const noexcept { return tol_; }

private:
    double key(const Subspace<S>& plane) const
    {
        return std::real((plane.basis().adjoint() * weight_ * plane.basis()).trace());
    }

    int ambient_;
    int r_;
    Tolerances tol_;
    std::vector<Subspace<S>> planes_;
    Subspace<S> core_;
    Mat<S> weight_;
    Mat<S> stacked_;  // member bases side by side, with spare capacity
    double window_ = 0.0;
    std::multimap<double, std::size_t> index_;
};

enum class VerdictKind { spine, full, two_element, unresolved };

constexpr const char* to_string(VerdictKind k) noexcept
{
    switch (k) {
    case VerdictKind::spine: return "Spine";
    case VerdictKind::full: return "Full";
    case VerdictKind::two_element: return "TwoElement";
    case VerdictKind::unresolved: return "Unresolved";
    }
    return "Unresolved";
}

struct VerdictEvidence {
    int probes = 0;
    int covered = 0;
    int covered_by_member = 0;
    int covered_by_chain = 0;
    double density = 0.0;            // covered / probes
    double worst_probe_distance = 0.0;
    std::int64_t chain_steps = 0;
    int longest_chain = 0;
    std::int64_t stability_samples = 0;
    std::int64_t escapes = 0;        // full-rank images outside a two-element set
    bool members_contain_core = true;
    int rounds = 0;
    std::vector<int> added_per_round;
};

template <FieldScalar S>
struct ClosureVerdict {
    VerdictKind kind = VerdictKind::unresolved;
    std::optional<Subspace<S>> core;
    VerdictEvidence evidence;
};

struct ClassifyParams {
    double eps = 0.1;
    int probe_count = 1000;
    int stability_samples = 10000;  // per direction, only for two-element sets
    bool chain_probes = true;       // try witness chains for uncovered probes
    ReachOptions reach{};
};

struct ClosureParams {
    int pair_budget = 2000;
    int pi_samples_per_pair = 8;
    int stability_rounds = 5;
    std::size_t size_cap = 5000;
    int max_rounds = 200;
    ClassifyParams classify{};
};

namespace detail {

inline void check_closure_dims(int r, int d, int n)
{
    if (!(1 <= r && r < d && d < n))
        throw PreconditionError("closure: need 1 <= r < d < n (got r=" + std::to_string(r) + ", d=" +
                                std::to_string(d) + ", n=" + std::to_string(n) + ")");
}

// Full-rank images of zeta' over `samples` Haar d-planes pi >= zeta that are
// not already in `set`.
template <FieldScalar S>
std::int64_t count_escapes(const RPlaneSet<S>& set, const Subspace<S>& zeta, const Subspace<S>& zeta_prime, int d,
                           int samples, CounterRng& rng)
{
    std::int64_t escapes = 0;
    for (int i = 0; i < samples; ++i) {
        const Subspace<S> pi = random_subspace<S>(zeta.ambient_dim(), d, rng, std::nullopt, zeta);
        auto w = tau_project(zeta, zeta_prime, pi, set.tolerances());
        if (w && !set.contains_plane(w->image)) ++escapes;
    }
    return escapes;
}

} // namespace detail

/// Classifies a (caller-stabilised) set as Spine, Full, TwoElement or Unresolved.
template <FieldScalar S>
ClosureVerdict<S> classify_closure(const RPlaneSet<S>& s, int d, const ClassifyParams& params, CounterRng& rng)
{
    ClosureVerdict<S> verdict;
    auto& ev = verdict.evidence;
    if (s.empty()) return verdict;
    const int n = s.ambient_dim();
    const int r = s.r();
    const Tolerances& tol = s.tolerances();

    if (s.size() == 2) {
        ev.stability_samples = 2LL * params.stability_samples;
        ev.escapes = detail::count_escapes(s, s[0], s[1], d, params.stability_samples, rng) +
                     detail::count_escapes(s, s[1], s[0], d, params.stability_samples, rng);
        if (ev.escapes == 0) {
            verdict.kind = VerdictKind::two_element;
            return verdict;
        }
    }

    const Subspace<S>& core = s.core();
    for (const auto& p : s.planes())
        if (!contains(p, core, tol)) ev.members_contain_core = false;

    // Generator pair for witness chains: first pair whose meet is the core.
    std::optional<std::pair<std::size_t, std::size_t>> generators;
    if (params.chain_probes && s.size() >= 2) {
        const std::size_t limit = std::min<std::size_t>(s.size(), 64);
        for (std::size_t i = 0; i < limit && !generators; ++i)
            for (std::size_t j = i + 1; j < limit && !generators; ++j)
                if (intersect(s[i], s[j], tol).dim() == core.dim()) generators = std::make_pair(i, j);
    }

    ReachEngine<S> engine(d, rng, params.reach, tol);
    const SpineCore<S> spine(core, r);
    ev.probes = params.probe_count;
    for (int p = 0; p < params.probe_count; ++p) {
        const Subspace<S> probe = core.dim() > 0 ? spine_sample(spine, rng) : random_subspace<S>(n, r, rng);
        double dist = s.nearest_distance(probe);
        if (dist <= params.eps) {
            ++ev.covered;
            ++ev.covered_by_member;
        } else if (generators) {
            const auto chain = engine.reach(s[generators->first], s[generators->second], probe);
            if (chain) {
                const double reached =
                    chain->steps.empty() ? 0.0 : chordal_distance(chain->endpoint(), probe);
                if (reached <= params.eps) {
                    dist = reached;
                    ++ev.covered;
                    ++ev.covered_by_chain;
                    ev.chain_steps += static_cast<std::int64_t>(chain->steps.size());
                    ev.longest_chain = std::max(ev.longest_chain, static_cast<int>(chain->steps.size()));
                }
            }
        }
        ev.worst_probe_distance = std::max(ev.worst_probe_distance, dist);
    }
    ev.density = ev.probes > 0 ? static_cast<double>(ev.covered) / ev.probes : 0.0;

    if (ev.covered == ev.probes && ev.members_contain_core) {
        if (core.dim() > 0) {
            verdict.kind = VerdictKind::spine;
            verdict.core = core;
        } else {
            verdict.kind = VerdictKind::full;
        }
    }
    return verdict;
}

template <FieldScalar S>
struct ClosureResult {
    RPlaneSet<S> set;
    ClosureVerdict<S> verdict;
    std::vector<std::size_t> size_per_round;
    std::vector<int> core_dim_per_round;
    bool hit_size_cap = false;
};

/// Sampled saturation: each round draws ordered pairs from the current set
/// and Haar d-planes through the first member, and merges every new
/// full-rank image at the end of the round.
template <FieldScalar S>
ClosureResult<S> closure(const RPlaneSet<S>& initial, int d, const ClosureParams& params, CounterRng& rng)
{
    if (initial.empty()) throw PreconditionError("closure: initial set is empty");
    detail::check_closure_dims(initial.r(), d, initial.ambient_dim());
    if (params.pair_budget < 1 || params.pi_samples_per_pair < 1 || params.stability_rounds < 1 ||
        params.size_cap < initial.size() || params.max_rounds < 1)
        throw PreconditionError("closure: budgets must be positive and the size cap at least the initial size");

    const int n = initial.ambient_dim();
    ClosureResult<S> out{initial, {}, {}, {}, false};
    RPlaneSet<S>& set = out.set;
    int quiet = 0;
    int rounds = 0;
    std::vector<int> added_per_round;
    while (quiet < params.stability_rounds && rounds < params.max_rounds) {
        const std::size_t m = set.size();
        std::vector<Subspace<S>> candidates;
        for (int pair = 0; pair < params.pair_budget; ++pair) {
            const std::size_t i = rng.below(m);
            std::size_t j = rng.below(m);
            if (m > 1)
                while (j == i) j = rng.below(m);
            const Subspace<S>& zeta = set[i];
            const Subspace<S>& zeta_prime = set[j];
            for (int k = 0; k < params.pi_samples_per_pair; ++k) {
                const Subspace<S> pi = random_subspace<S>(n, d, rng, std::nullopt, zeta);
                auto w = tau_project(zeta, zeta_prime, pi, set.tolerances());
                if (w) candidates.push_back(std::move(w->image));
            }
        }
        int added = 0;
        for (const auto& c : candidates) {
            if (set.size() >= params.size_cap) break;
            if (set.insert(c)) ++added;
        }
        ++rounds;
        added_per_round.push_back(added);
        out.size_per_round.push_back(set.size());
        out.core_dim_per_round.push_back(set.core().dim());
        quiet = added == 0 ? quiet + 1 : 0;
        if (set.size() >= params.size_cap) {
            out.hit_size_cap = true;
            break;
        }
    }

    out.verdict = classify_closure(set, d, params.classify, rng);
    out.verdict.evidence.rounds = rounds;
    out.verdict.evidence.added_per_round = std::move(added_per_round);
    return out;
}

} // namespace gspine
