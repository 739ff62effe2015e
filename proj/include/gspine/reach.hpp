#pragma once

// Constructive witness chains.
//
// Given two members A, B of a set of r-planes and a target T containing
// A ∩ B, build a finite chain of projection witnesses, every one of whose
// inputs is A, B or an earlier image, ending at T.  The construction
// follows the rigidity argument step by step:
//
//   * reduced lines (r - dim(A∩B) = 1): everything happens in one affine
//     plane orthogonal to the base line, where each projection moves a point
//     q to a point of the circle with diameter (foot, q).  A sequence of
//     such steps reaches any point strictly inside the disk, i.e. any line
//     inside the cone spanned by the partner.  Targets outside the cone are
//     approached by walking the base line toward them.
//   * larger planes: a prescribed-intersection step grows A ∩ B by one line
//     of T, reducing the problem by one dimension; if T meets A only in
//     A ∩ B, an intermediate plane adjacent to T in the Grassmann graph is
//     reached first.
//
// Every step is recomputed through tau_project, so the chain is checked
// numerically rather than trusted.  Only real scalars are supported; the
// cone geometry needs a common real structure for three lines.

#include "saturation.hpp"
#include "subspace.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

namespace gspine {

template <FieldScalar S>
struct WitnessChain {
    std::vector<TauWitness<S>> steps;

    const Subspace<S>& endpoint() const { return steps.back().image; }
};

struct ReachOptions {
    int max_walk_segments = 48;
    int max_cone_steps = 512;
    double max_partner_angle = 1.45;  // radians; keeps the cone foot away from the origin
    double walk_fraction = 0.9;       // fraction of the partner angle advanced per walk segment
    double cone_entry = 0.95;         // enter the cone once the target is this deep inside it
    double step_check = 1e-8;         // allowed drift between planned and computed images
    int prescribe_retries = 16;
};

namespace detail {

inline double line_angle(const RealVec& u, const RealVec& v)
{
    const double c = std::min(1.0, std::abs(u.dot(v)) / (u.norm() * v.norm()));
    const double s = (v / v.norm() - (u.dot(v) / u.squaredNorm()) * u / v.norm()).norm();
    return std::atan2(s, c);
}

} // namespace detail

template <FieldScalar S>
class ReachEngine {
public:
    ReachEngine(int d, CounterRng& rng, ReachOptions opts = {}, Tolerances tol = default_tolerances)
        : d_(d), rng_(rng), opts_(opts), tol_(tol)
    {
    }

    /// Chain from members a, b to target; empty chain if target is a or b.
    std::optional<WitnessChain<S>> reach(const Subspace<S>& a, const Subspace<S>& b, const Subspace<S>& target)
    {
        if constexpr (!std::is_same_v<S, Real>) {
            return std::nullopt;
        } else {
            WitnessChain<S> chain;
            try {
                if (!reach_pair(a, b, target, chain, 0)) return std::nullopt;
            } catch (const PreconditionError&) {
                return std::nullopt;
            } catch (const VerificationError&) {
                return std::nullopt;
            }
            return chain;
        }
    }

private:
    static constexpr int max_depth = 16;

    bool record(const Subspace<S>& zeta, const Subspace<S>& zeta_prime, const Subspace<S>& pi, WitnessChain<S>& chain)
    {
        auto w = tau_project(zeta, zeta_prime, pi, tol_);
        if (!w) return false;
        chain.steps.push_back(std::move(*w));
        return true;
    }

    // Returns the member (a, b or a fresh image) equal to the target.
    std::optional<Subspace<S>> reach_pair(const Subspace<S>& a, const Subspace<S>& b, const Subspace<S>& target,
                                          WitnessChain<S>& chain, int depth)
    {
        if (depth > max_depth) return std::nullopt;
        if (same_subspace(a, target, tol_)) return a;
        if (same_subspace(b, target, tol_)) return b;
        const Subspace<S> core = intersect(a, b, tol_);
        if (!contains(target, core, tol_)) return std::nullopt;
        const int r = a.dim();
        const int free = r - core.dim();
        if (free <= 0) return std::nullopt;
        if (free == 1) return reach_lines(core, a, b, target, chain);

        const Subspace<S> shared = intersect(target, a, tol_);
        if (shared.dim() > core.dim()) {
            const Subspace<S> fresh = complement_within(shared, core, tol_);
            const Subspace<S> ell = Subspace<S>::from_orthonormal(fresh.basis().leftCols(1), 1e-10);
            const Subspace<S> meet = sum(core, ell, tol_);
            const Subspace<S> pi = prescribe_intersection(a, b, meet, d_, rng_, opts_.prescribe_retries, tol_);
            if (!record(a, b, pi, chain)) return std::nullopt;
            const Subspace<S> c = chain.steps.back().image;
            return reach_pair(a, c, target, chain, depth + 1);
        }

        // target ∩ a = core: go through a plane adjacent to target that
        // also meets a in one more direction.
        const Subspace<S> a_free = complement_within(a, core, tol_);
        const Subspace<S> t_free = complement_within(target, core, tol_);
        const Subspace<S> ell = random_subspace<S>(a.ambient_dim(), 1, rng_, a_free);
        const Subspace<S> most = random_subspace<S>(a.ambient_dim(), free - 1, rng_, t_free);
        const Subspace<S> bridge = sum(sum(core, ell, tol_), most, tol_);
        if (bridge.dim() != r) return std::nullopt;
        const auto reached = reach_pair(a, b, bridge, chain, depth + 1);
        if (!reached) return std::nullopt;
        // Second leg pairs the bridge with b; b must not meet it outside the target.
        if (!contains(target, intersect(*reached, b, tol_), tol_)) return std::nullopt;
        return reach_pair(*reached, b, target, chain, depth + 1);
    }

    // a = core ⊕ base line, b = core ⊕ partner line, target = core ⊕ target line.
    std::optional<Subspace<S>> reach_lines(const Subspace<S>& core, const Subspace<S>& a, const Subspace<S>& b,
                                           const Subspace<S>& target, WitnessChain<S>& chain)
    {
        const int n = a.ambient_dim();
        const int reduced_d = d_ - core.dim();
        const int reduced_n = n - core.dim();
        if (reduced_d < 2 || reduced_n < reduced_d + 1) return std::nullopt;

        auto free_line = [&](const Subspace<S>& plane) -> RealVec {
            return complement_within(plane, core, tol_).basis().col(0);
        };
        const RealVec t = free_line(target);

        struct LineMember {
            Subspace<S> plane;
            RealVec dir;
        };
        std::vector<LineMember> members{{a, free_line(a)}, {b, free_line(b)}};
        std::size_t base = 0;

        for (int segment = 0; segment < opts_.max_walk_segments; ++segment) {
            const RealVec& u = members[base].dir;
            const double alpha = detail::line_angle(u, t);
            if (alpha < 1e-12) return members[base].plane;

            // Widest partner up to max_partner_angle, else the narrowest one
            // that is still not orthogonal to the base.
            std::size_t partner = base;
            double theta = 0.0;
            std::size_t wide = base;
            double wide_angle = std::numbers::pi;
            for (std::size_t i = 0; i < members.size(); ++i) {
                if (i == base) continue;
                const double ang = detail::line_angle(u, members[i].dir);
                if (ang <= opts_.max_partner_angle && ang > theta) {
                    theta = ang;
                    partner = i;
                } else if (ang > opts_.max_partner_angle && ang < wide_angle) {
                    wide_angle = ang;
                    wide = i;
                }
            }
            if (partner == base && wide != base && wide_angle < 0.5 * std::numbers::pi - 1e-9) {
                partner = wide;
                theta = wide_angle;
            }
            if (partner == base || theta < 1e-9) return std::nullopt;

            if (alpha < theta * opts_.cone_entry)
                return cone_chain(core, members[base].plane, u, members[partner].plane, members[partner].dir, t,
                                  reduced_d, chain);

            // Walk along the great circle from the base toward the target,
            // leaving a member behind the base as a wider future partner.
            RealVec across = t - u.dot(t) / u.squaredNorm() * u;
            if (u.dot(t) < 0) across = -across;
            across.normalize();
            const RealVec un = u.normalized();
            const double step = opts_.walk_fraction * theta;
            const RealVec ahead = std::cos(step) * un + std::sin(step) * across;
            const RealVec behind = std::cos(step) * un - std::sin(step) * across;

            auto back = cone_chain(core, members[base].plane, u, members[partner].plane, members[partner].dir,
                                   behind, reduced_d, chain);
            if (!back) return std::nullopt;
            auto next = cone_chain(core, members[base].plane, u, members[partner].plane, members[partner].dir,
                                   ahead, reduced_d, chain);
            if (!next) return std::nullopt;
            members.push_back({*back, free_line(*back)});
            members.push_back({*next, free_line(*next)});
            base = members.size() - 1;
        }
        return std::nullopt;
    }

    // Chain inside the cone of the partner around the base.  Returns the
    // last image (the plane core ⊕ goal), or nothing on failure.
    std::optional<Subspace<S>> cone_chain(const Subspace<S>& core, const Subspace<S>& base_plane, RealVec base,
                                          const Subspace<S>& partner_plane, RealVec partner, RealVec goal,
                                          int reduced_d, WitnessChain<S>& chain)
    {
        const int n = base_plane.ambient_dim();
        base.normalize();
        partner.normalize();
        goal.normalize();
        if (base.dot(partner) < 0) partner = -partner;
        if (base.dot(goal) < 0) goal = -goal;

        const double height = base.dot(partner);
        const RealVec foot = height * base;
        const RealVec start = partner - foot;  // relative to the foot
        const RealVec aim = goal * (height / base.dot(goal)) - foot;
        const double r0 = start.norm();
        const double r_goal = aim.norm();
        if (!(r0 > 0.0) || !(r_goal < r0)) return std::nullopt;

        if (detail::line_angle(partner, goal) < 1e-13) return partner_plane;
        const RealVec e1 = start / r0;
        RealVec e2 = aim - aim.dot(e1) * e1;
        if (e2.norm() < 1e-12) {
            // Goal in span{base, partner}: any direction of core^⊥ orthogonal to both.
            const Subspace<S> used = sum(core, orthonormalize<S>((RealMat(n, 2) << base, e1).finished()), tol_);
            e2 = orthogonal_complement(used).basis().col(0);
        }
        e2.normalize();

        const double total = std::atan2(aim.dot(e2), aim.dot(e1));
        const double ratio = r_goal / r0;
        const std::vector<double> turns = plan_turns(total, ratio);
        if (turns.empty()) return std::nullopt;

        // The 3-space H = span{base, e1, e2} orthogonal to the core; pi adds
        // a random (reduced_d - 2)-dim piece of core^⊥ ⊖ H.
        RealMat frame(n, 3);
        frame << base, e1, e2;
        const Subspace<S> h = orthonormalize<S>(frame);
        const Subspace<S> room =
            complement_within(complement_within(Subspace<S>::full(n), core, tol_), h, tol_);
        const Subspace<S> padding = random_subspace<S>(n, reduced_d - 2, rng_, room);

        Subspace<S> current = partner_plane;
        double radius = r0;
        double heading = 0.0;
        for (double turn : turns) {
            radius *= std::cos(turn);
            heading += turn;
            const RealVec point = foot + radius * (std::cos(heading) * e1 + std::sin(heading) * e2);
            const RealVec offset = point - foot;
            RealMat spanning(n, 2);
            spanning << base, offset / offset.norm();
            const Subspace<S> pi_h = orthonormalize<S>(spanning);
            const Subspace<S> pi = sum(sum(core, pi_h, tol_), padding, tol_);
            if (pi.dim() != d_) return std::nullopt;
            if (!record(base_plane, current, pi, chain)) return std::nullopt;
            current = chain.steps.back().image;
            const Subspace<S> planned = sum(core, span_of<S>(n, {point}), tol_);
            if (chordal_distance(current, planned) > opts_.step_check) return std::nullopt;
        }
        return current;
    }

    // Turns phi_i with sum = total and prod cos(phi_i) = ratio, |phi_i| < pi/2.
    std::vector<double> plan_turns(double total, double ratio) const
    {
        if (!(ratio > 0.0 && ratio < 1.0)) return {};
        for (int k = 2; k <= opts_.max_cone_steps; ++k) {
            const double even = total / k;
            const double reach = std::pow(std::cos(even), k);
            if (!(reach > ratio)) continue;
            std::vector<double> turns(static_cast<std::size_t>(k - 2), even);
            const double pair_sum = 2.0 * even;
            const double pair_ratio = ratio / std::pow(std::cos(even), k - 2);
            const double spread = std::acos(std::clamp(2.0 * pair_ratio - std::cos(pair_sum), -1.0, 1.0));
            turns.push_back(0.5 * (pair_sum + spread));
            turns.push_back(0.5 * (pair_sum - spread));
            return turns;
        }
        return {};
    }

    int d_;
    CounterRng& rng_;
    ReachOptions opts_;
    Tolerances tol_;
};

} // namespace gspine
