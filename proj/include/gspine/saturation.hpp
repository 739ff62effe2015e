#pragma once

// The ternary projection relation on Grassmannians and the explicit
// constructions around it: projection witnesses, spines, the rank-collapse
// pair for 2r > d, the one-directional witness example, prescribed
// intersections, Grassmann-graph paths and the dimension-lift identity.

#include "subspace.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gspine {

/// One instance of tau_d(zeta, zeta' | image) together with the d-plane
/// that realizes it.
template <FieldScalar S>
struct TauWitness {
    Subspace<S> zeta;
    Subspace<S> zeta_prime;
    Subspace<S> pi;
    Subspace<S> image;
};

/// Projects zeta' onto a d-plane pi >= zeta.  Returns nothing when the
/// projection loses rank, i.e. when the image is not an r-plane.
template <FieldScalar S>
std::optional<TauWitness<S>> tau_project(const Subspace<S>& zeta, const Subspace<S>& zeta_prime,
                                         const Subspace<S>& pi, const Tolerances& tol = default_tolerances)
{
    detail::require_same_ambient(zeta, zeta_prime, "tau_project");
    detail::require_same_ambient(zeta, pi, "tau_project");
    detail::require_dims(zeta.dim() == zeta_prime.dim(), "tau_project: zeta and zeta' have different dimensions");
    detail::require_dims(pi.dim() >= zeta.dim(), "tau_project: pi is smaller than zeta");
    if (!contains(pi, zeta, tol)) throw PreconditionError("tau_project: pi does not contain zeta");
    Subspace<S> image = project_subspace(pi, zeta_prime, tol);
    if (image.dim() != zeta_prime.dim()) return std::nullopt;
    return TauWitness<S>{zeta, zeta_prime, pi, std::move(image)};
}

// ---------------------------------------------------------------------------
// Projection locus in R^3

struct LocusCircle {
    Eigen::Vector3d center;
    double radius = 0.0;
    Eigen::Vector3d plane_normal;

    /// Euclidean distance from `q` to the circle (not the disk).
    double distance_to(const Eigen::Vector3d& q) const
    {
        const Eigen::Vector3d rel = q - center;
        const double along = rel.dot(plane_normal);
        const double in_plane = (rel - along * plane_normal).norm();
        return std::hypot(in_plane - radius, along);
    }
};

/// The locus {P_pi p' : ell <= pi, dim pi = 2} for a line ell in R^3: the
/// circle with diameter from P_ell p' to p', orthogonal to ell.
inline LocusCircle projection_locus_circle(const RealSubspace& ell, const Eigen::Vector3d& p_prime)
{
    detail::require_dims(ell.ambient_dim() == 3 && ell.dim() == 1,
                         "projection_locus_circle: need a line in a 3-dimensional space");
    if (!(p_prime.norm() > 0.0)) throw PreconditionError("projection_locus_circle: p' must be nonzero");
    Eigen::Vector3d axis = ell.basis().col(0);
    axis.normalize();
    const Eigen::Vector3d foot = axis * axis.dot(p_prime);
    return LocusCircle{0.5 * (foot + p_prime), 0.5 * (p_prime - foot).norm(), axis};
}

// ---------------------------------------------------------------------------
// Spines

/// The r-spine of a core plane: every r-plane containing the core.
template <FieldScalar S>
struct SpineCore {
    Subspace<S> core;
    int r = 0;

    SpineCore(Subspace<S> core_plane, int plane_dim) : core(std::move(core_plane)), r(plane_dim)
    {
        detail::require_dims(core.dim() <= r && r <= core.ambient_dim(),
                             "spine: need dim core <= r <= ambient dimension");
    }
};

template <FieldScalar S>
bool spine_contains(const SpineCore<S>& spine, const Subspace<S>& zeta, const Tolerances& tol = default_tolerances)
{
    detail::require_same_ambient(spine.core, zeta, "spine_contains");
    detail::require_dims(zeta.dim() == spine.r, "spine_contains: plane dimension differs from the spine's r");
    return contains(zeta, spine.core, tol);
}

template <FieldScalar S>
Subspace<S> spine_sample(const SpineCore<S>& spine, CounterRng& rng)
{
    return random_subspace<S>(spine.core.ambient_dim(), spine.r, rng, std::nullopt, spine.core);
}

// ---------------------------------------------------------------------------
// Explicit pairs

/// eta = zeta + beta, eta' = zeta' + beta on consecutive coordinate blocks
/// with dim zeta = dim zeta' = d - r + 1 and dim beta = 2r - d - 1.  Every
/// d-plane containing one of them kills a direction of the other.
template <FieldScalar S = Real>
std::pair<Subspace<S>, Subspace<S>> build_lemma_pair(int r, int d, int n)
{
    if (!(1 <= r && r < d && d < n)) throw PreconditionError("build_lemma_pair: need 1 <= r < d < n");
    if (2 * r <= d) throw PreconditionError("build_lemma_pair: construction needs 2r > d");
    const int block = d - r + 1;
    const int shared = 2 * r - d - 1;
    std::vector<int> first;
    std::vector<int> second;
    for (int i = 0; i < block; ++i) {
        first.push_back(i);
        second.push_back(block + i);
    }
    for (int i = 0; i < shared; ++i) {
        first.push_back(2 * block + i);
        second.push_back(2 * block + i);
    }
    return {Subspace<S>::coordinate(n, first), Subspace<S>::coordinate(n, second)};
}

template <FieldScalar S>
struct AsymmetryExample {
    Subspace<S> eta;
    Subspace<S> eta_prime;
    Subspace<S> pi;
};

/// eta = span{e1, e2}, eta' = span{(e1+e4)/sqrt2, (e2+e5)/sqrt2},
/// pi = span{e1, e2, e3}: P_pi eta' = eta, yet dim(eta + eta') = 4 > 3.
template <FieldScalar S = Real>
AsymmetryExample<S> build_asymmetry_example(int n)
{
    if (n < 5) throw PreconditionError("build_asymmetry_example: need n >= 5");
    Mat<S> tilted = Mat<S>::Zero(n, 2);
    const double h = (1.0 / std::numbers::sqrt2);
    tilted(0, 0) = h;
    tilted(3, 0) = h;
    tilted(1, 1) = h;
    tilted(4, 1) = h;
    return {Subspace<S>::coordinate(n, {0, 1}), Subspace<S>::from_orthonormal(tilted),
            Subspace<S>::coordinate(n, {0, 1, 2})};
}

// ---------------------------------------------------------------------------
// Prescribed intersections

/// Finds a d-plane pi >= eta with (P_pi eta') ∩ eta = target.
///
/// The preimage U = {u in eta' : P_eta u in target} is pushed into eta's
/// complement and used as part of pi's complement; the rest of the
/// complement is a Haar-random completion.  The result is checked before
/// it is returned, with up to `retries` fresh completions.
template <FieldScalar S>
Subspace<S> prescribe_intersection(const Subspace<S>& eta, const Subspace<S>& eta_prime, const Subspace<S>& target,
                                   int d, CounterRng& rng, int retries = 16,
                                   const Tolerances& tol = default_tolerances)
{
    detail::require_same_ambient(eta, eta_prime, "prescribe_intersection");
    detail::require_same_ambient(eta, target, "prescribe_intersection");
    const int n = eta.ambient_dim();
    const int r = eta.dim();
    detail::require_dims(eta_prime.dim() == r, "prescribe_intersection: eta and eta' have different dimensions");
    if (!(r < d && d < n)) throw PreconditionError("prescribe_intersection: need r < d < n");
    if (2 * r > d) throw PreconditionError("prescribe_intersection: need 2r <= d");

    const Subspace<S> meet = intersect(eta, eta_prime, tol);
    if (!contains(target, meet, tol))
        throw PreconditionError("prescribe_intersection: target does not contain eta ∩ eta' (dim " +
                                std::to_string(meet.dim()) + ")");
    if (!contains(eta, target, tol)) throw PreconditionError("prescribe_intersection: target is not inside eta");
    const Subspace<S> reachable = sum(meet, project_subspace(eta, eta_prime, tol), tol);
    if (!contains(reachable, target, tol))
        throw PreconditionError("prescribe_intersection: infeasible target: dim target = " +
                                std::to_string(target.dim()) + " exceeds the reachable part of eta (dim " +
                                std::to_string(reachable.dim()) + ")");

    // Kernel of x -> (I - P_target) P_eta B_eta' x.
    const Mat<S> along_eta = eta.basis() * (eta.basis().adjoint() * eta_prime.basis());
    const Mat<S> off_target = along_eta - target.basis() * (target.basis().adjoint() * along_eta);
    Eigen::JacobiSVD<Mat<S>> svd(off_target, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    Eigen::Index nonzero = 0;
    while (nonzero < sv.size() && sv(nonzero) > tol.rank) ++nonzero;
    const Mat<S> preimage = eta_prime.basis() * svd.matrixV().rightCols(r - nonzero);

    const Mat<S> pushed = preimage - eta.basis() * (eta.basis().adjoint() * preimage);
    const Subspace<S> forced = orthonormalize<S>(pushed, tol.rank, 1.0);
    if (forced.dim() > n - d)
        throw PreconditionError("prescribe_intersection: infeasible target: complement part of the preimage has dim " +
                                std::to_string(forced.dim()) + " > n - d = " + std::to_string(n - d));

    const Subspace<S> eta_perp = orthogonal_complement(eta);
    const Subspace<S> room = complement_within(eta_perp, forced, tol);
    for (int attempt = 0; attempt <= retries; ++attempt) {
        const Subspace<S> completion = random_subspace<S>(n, n - d - forced.dim(), rng, room);
        const Subspace<S> pi_perp = sum(forced, completion, tol);
        const Subspace<S> pi = orthogonal_complement(pi_perp);
        const Subspace<S> image = project_subspace(pi, eta_prime, tol);
        const Subspace<S> got = intersect(image, eta, tol);
        if (got.dim() == target.dim() && chordal_distance(got, target) < tol.equality) return pi;
    }
    throw VerificationError("prescribe_intersection: no completion met the intersection postcondition after " +
                            std::to_string(retries + 1) + " attempts");
}

// ---------------------------------------------------------------------------
// Grassmann graph

/// a = z_0, ..., z_m = b with consecutive members meeting in a hyperplane;
/// m = r - dim(a ∩ b).  One principal direction of a is swapped for its
/// partner in b per step.
template <FieldScalar S>
std::vector<Subspace<S>> grassmann_path(const Subspace<S>& a, const Subspace<S>& b,
                                        const Tolerances& tol = default_tolerances)
{
    detail::require_same_ambient(a, b, "grassmann_path");
    detail::require_dims(a.dim() == b.dim(), "grassmann_path: planes of different dimension");
    const int r = a.dim();
    const auto pairs = detail::principal_pairs(a, b);
    Eigen::Index shared = 0;
    while (shared < pairs.cosines.size() && pairs.cosines(shared) >= 1.0 - tol.intersection) ++shared;

    std::vector<Subspace<S>> path{a};
    const Eigen::Index steps = r - shared;
    for (Eigen::Index i = 1; i < steps; ++i) {
        Mat<S> basis(a.ambient_dim(), r);
        basis.leftCols(shared) = pairs.in_a.leftCols(shared);
        basis.middleCols(shared, i) = pairs.in_b.middleCols(shared, i);
        basis.rightCols(r - shared - i) = pairs.in_a.rightCols(r - shared - i);
        path.push_back(orthonormalize<S>(basis, tol.rank));
    }
    if (steps > 0) path.push_back(b);
    return path;
}

// ---------------------------------------------------------------------------
// Dimension lift

/// Chordal discrepancy between projecting ell onto pi and onto pi ⊕ H^⊥,
/// for ell, pi inside the hyperplane-like subspace H.  Always ~0.
template <FieldScalar S>
double lift_projection_check(const Subspace<S>& ell, const Subspace<S>& pi, const Subspace<S>& hyperplane,
                             const Tolerances& tol = default_tolerances)
{
    detail::require_same_ambient(ell, pi, "lift_projection_check");
    detail::require_same_ambient(ell, hyperplane, "lift_projection_check");
    if (!contains(hyperplane, ell, tol)) throw PreconditionError("lift_projection_check: ell is not inside H");
    if (!contains(hyperplane, pi, tol)) throw PreconditionError("lift_projection_check: pi is not inside H");
    const Subspace<S> lifted = sum(pi, orthogonal_complement(hyperplane), tol);
    const Subspace<S> direct = project_subspace(pi, ell, tol);
    const Subspace<S> via_lift = project_subspace(lifted, ell, tol);
    return chordal_distance(direct, via_lift);
}

} // namespace gspine
