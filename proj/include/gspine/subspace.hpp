#pragma once

// Subspaces of a finite-dimensional real or complex Hilbert space, stored as
// orthonormal column bases, and the lattice/metric operations on them.
//
// All operations are pure functions of their operands (plus an explicit rng
// for sampling).  Numerical decisions go through one Tolerances record so
// that rank, intersection and equality thresholds stay consistent.

#include "errors.hpp"
#include "rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace gspine {

using Real = double;
using Complex = std::complex<double>;

enum class ScalarField { real, complex };

constexpr std::string_view to_string(ScalarField f) noexcept
{
    return f == ScalarField::real ? "real" : "complex";
}

template <class S>
concept FieldScalar = std::same_as<S, Real> || std::same_as<S, Complex>;

template <FieldScalar S>
constexpr ScalarField field_of() noexcept
{
    return std::is_same_v<S, Real> ? ScalarField::real : ScalarField::complex;
}

struct Tolerances {
    double rank = 1e-8;          // relative singular-value cutoff
    double intersection = 1e-8;  // cosine >= 1 - this counts as a zero angle
    double equality = 1e-6;      // chordal distance below this: same subspace
    double containment = 1e-8;   // largest sine allowed for "inner <= outer"
    double orthonormal = 1e-12;  // ||B* B - I||_max for a valid basis
};

inline constexpr Tolerances default_tolerances{};

inline constexpr int default_max_ambient_dim = 32;

template <FieldScalar S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

template <FieldScalar S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

using RealMat = Mat<Real>;
using RealVec = Vec<Real>;

template <FieldScalar S>
class Subspace {
public:
    using Scalar = S;
    using Matrix = Mat<S>;

    Subspace() = default;

    /// Wraps a basis that is already orthonormal; throws if it is not.
    static Subspace from_orthonormal(Matrix basis, double tol = default_tolerances.orthonormal)
    {
        detail::require_dims(basis.rows() >= 1, "subspace: ambient dimension must be positive");
        detail::require_dims(basis.cols() <= basis.rows(), "subspace: more basis columns than ambient dimension");
        if (basis.cols() > 0) {
            const Matrix gram = basis.adjoint() * basis;
            const double err = (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
            if (!(err <= tol)) throw PreconditionError("subspace: basis columns are not orthonormal");
        }
        Subspace out;
        out.ambient_ = static_cast<int>(basis.rows());
        out.basis_ = std::move(basis);
        return out;
    }

    static Subspace zero(int n)
    {
        detail::require_dims(n >= 1, "subspace: ambient dimension must be positive");
        Subspace out;
        out.ambient_ = n;
        out.basis_ = Matrix(n, 0);
        return out;
    }

    static Subspace full(int n)
    {
        detail::require_dims(n >= 1, "subspace: ambient dimension must be positive");
        return from_orthonormal(Matrix::Identity(n, n));
    }

    /// span{e_i : i in indices}, zero-based.
    static Subspace coordinate(int n, std::initializer_list<int> indices)
    {
        return coordinate(n, std::vector<int>(indices));
    }

    static Subspace coordinate(int n, const std::vector<int>& indices)
    {
        detail::require_dims(n >= 1, "subspace: ambient dimension must be positive");
        Matrix b = Matrix::Zero(n, static_cast<Eigen::Index>(indices.size()));
        for (std::size_t j = 0; j < indices.size(); ++j) {
            detail::require_dims(indices[j] >= 0 && indices[j] < n, "subspace: coordinate index out of range");
            b(indices[j], static_cast<Eigen::Index>(j)) = S{1};
        }
        return from_orthonormal(std::move(b));
    }

    int ambient_dim() const noexcept { return ambient_; }
    int dim() const noexcept { return static_cast<int>(basis_.cols()); }
    bool is_zero() const noexcept { return basis_.cols() == 0; }
    const Matrix& basis() const noexcept { return basis_; }
    static constexpr ScalarField field() noexcept { return field_of<S>(); }

    /// Orthogonal projector B B*.
    Matrix projector() const { return basis_ * basis_.adjoint(); }

private:
    int ambient_ = 0;
    Matrix basis_;
};

using RealSubspace = Subspace<Real>;
using ComplexSubspace = Subspace<Complex>;

struct PrincipalAngleReport {
    std::vector<double> angles;  // ascending, i.e. cosines nonincreasing
    double chordal_distance = 0.0;
    int dim_intersection = 0;
};

namespace detail {

template <FieldScalar S>
void require_same_ambient(const Subspace<S>& a, const Subspace<S>& b, std::string_view op)
{
    if (a.ambient_dim() != b.ambient_dim())
        throw DimensionError(std::string(op) + ": operands live in different ambient spaces");
}

template <FieldScalar S>
S draw_normal(CounterRng& rng)
{
    if constexpr (std::is_same_v<S, Real>) {
        return rng.normal();
    } else {
        const double re = rng.normal();
        const double im = rng.normal();
        return Complex(re, im) * (1.0 / std::numbers::sqrt2);
    }
}

template <FieldScalar S>
Mat<S> gaussian_matrix(Eigen::Index rows, Eigen::Index cols, CounterRng& rng)
{
    Mat<S> g(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) g(i, j) = draw_normal<S>(rng);
    return g;
}

// Left singular vectors of `m` for its `k` largest singular values.
template <FieldScalar S>
Mat<S> leading_left_vectors(const Mat<S>& m, Eigen::Index k)
{
    if (k == 0) return Mat<S>(m.rows(), 0);
    Eigen::JacobiSVD<Mat<S>> svd(m, Eigen::ComputeThinU);
    return svd.matrixU().leftCols(k);
}

// Cosines (descending) and matching principal vectors of a and b.
template <FieldScalar S>
struct PrincipalPairs {
    Eigen::VectorXd cosines;
    Mat<S> in_a;  // B_a U
    Mat<S> in_b;  // B_b V
};

template <FieldScalar S>
PrincipalPairs<S> principal_pairs(const Subspace<S>& a, const Subspace<S>& b)
{
    PrincipalPairs<S> out;
    const Eigen::Index k = std::min(a.dim(), b.dim());
    if (k == 0) {
        out.cosines.resize(0);
        out.in_a = Mat<S>(a.ambient_dim(), 0);
        out.in_b = Mat<S>(b.ambient_dim(), 0);
        return out;
    }
    const Mat<S> cross = a.basis().adjoint() * b.basis();
    Eigen::JacobiSVD<Mat<S>> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
    out.cosines = svd.singularValues().head(k).cwiseMin(1.0).cwiseMax(0.0);
    out.in_a = a.basis() * svd.matrixU().leftCols(k);
    out.in_b = b.basis() * svd.matrixV().leftCols(k);
    return out;
}

} // namespace detail

/// Orthonormal basis of the numerical column space of `raw`.  Singular
/// values at or below tol * max(largest, scale_floor) count as zero; the
/// floor lets callers whose columns have a known unit scale reject pure
/// round-off.
template <FieldScalar S>
Subspace<S> orthonormalize(const Mat<S>& raw, double tol = default_tolerances.rank, double scale_floor = 0.0)
{
    detail::require_dims(raw.rows() >= 1, "orthonormalize: ambient dimension must be positive");
    if (!(tol > 0.0)) throw PreconditionError("orthonormalize: tolerance must be positive");
    const int n = static_cast<int>(raw.rows());
    if (raw.cols() == 0) return Subspace<S>::zero(n);
    Eigen::JacobiSVD<Mat<S>> svd(raw, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    const double largest = sv.size() > 0 ? sv(0) : 0.0;
    if (!(largest > 0.0)) return Subspace<S>::zero(n);
    Eigen::Index rank = 0;
    const double cutoff = tol * std::max(largest, scale_floor);
    while (rank < sv.size() && sv(rank) > cutoff) ++rank;
    if (rank == 0) return Subspace<S>::zero(n);
    Mat<S> q = svd.matrixU().leftCols(rank);
    // A Householder pass polishes the SVD output to machine orthonormality.
    Eigen::HouseholderQR<Mat<S>> qr(q);
    Mat<S> polished = qr.householderQ() * Mat<S>::Identity(n, rank);
    return Subspace<S>::from_orthonormal(std::move(polished), 1e-10);
}

/// Span of a list of column vectors.
template <FieldScalar S>
Subspace<S> span_of(int n, std::initializer_list<Vec<S>> vectors, double tol = default_tolerances.rank)
{
    Mat<S> m(n, static_cast<Eigen::Index>(vectors.size()));
    Eigen::Index j = 0;
    for (const auto& v : vectors) {
        detail::require_dims(v.size() == n, "span_of: vector length differs from ambient dimension");
        m.col(j++) = v;
    }
    return orthonormalize<S>(m, tol);
}

template <FieldScalar S>
PrincipalAngleReport principal_angles(const Subspace<S>& a, const Subspace<S>& b,
                                      const Tolerances& tol = default_tolerances)
{
    detail::require_same_ambient(a, b, "principal_angles");
    PrincipalAngleReport rep;
    const Eigen::Index k = std::min(a.dim(), b.dim());
    if (k == 0) return rep;

    const auto pairs = detail::principal_pairs(a, b);
    // Sines come from the residual of the smaller basis against the larger
    // subspace; they stay accurate where acos of the cosines would not.
    const Subspace<S>& small = a.dim() <= b.dim() ? a : b;
    const Subspace<S>& large = a.dim() <= b.dim() ? b : a;
    const Mat<S> residual = small.basis() - large.basis() * (large.basis().adjoint() * small.basis());
    Eigen::JacobiSVD<Mat<S>> svd(residual);
    Eigen::VectorXd sines = svd.singularValues().cwiseMin(1.0);
    std::sort(sines.data(), sines.data() + sines.size());

    rep.angles.resize(static_cast<std::size_t>(k));
    double sum_sq = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) {
        const double c = pairs.cosines(i);
        const double s = sines(i);
        rep.angles[static_cast<std::size_t>(i)] = std::atan2(s, c);
        sum_sq += s * s;
        if (c >= 1.0 - tol.intersection) ++rep.dim_intersection;
    }
    std::sort(rep.angles.begin(), rep.angles.end());
    rep.chordal_distance = std::sqrt(sum_sq);
    return rep;
}

/// Chordal distance; planes of different dimension are infinitely apart.
template <FieldScalar S>
double chordal_distance(const Subspace<S>& a, const Subspace<S>& b)
{
    detail::require_same_ambient(a, b, "chordal_distance");
    if (a.dim() != b.dim()) return std::numeric_limits<double>::infinity();
    if (a.dim() == 0) return 0.0;
    const Mat<S> residual = b.basis() - a.basis() * (a.basis().adjoint() * b.basis());
    return residual.norm();
}

template <FieldScalar S>
bool same_subspace(const Subspace<S>& a, const Subspace<S>& b, const Tolerances& tol = default_tolerances)
{
    return a.ambient_dim() == b.ambient_dim() && chordal_distance(a, b) < tol.equality;
}

/// Largest sine between `inner` and `outer`; 0 means inner <= outer exactly.
template <FieldScalar S>
double containment_defect(const Subspace<S>& outer, const Subspace<S>& inner)
{
    detail::require_same_ambient(outer, inner, "containment_defect");
    if (inner.dim() == 0) return 0.0;
    if (inner.dim() > outer.dim()) return 1.0;
    const Mat<S> residual = inner.basis() - outer.basis() * (outer.basis().adjoint() * inner.basis());
    Eigen::JacobiSVD<Mat<S>> svd(residual);
    return svd.singularValues()(0);
}

template <FieldScalar S>
bool contains(const Subspace<S>& outer, const Subspace<S>& inner, const Tolerances& tol = default_tolerances)
{
    return containment_defect(outer, inner) <= tol.containment;
}

/// Image of `zeta` under the orthogonal projection onto `pi`.
template <FieldScalar S>
Subspace<S> project_subspace(const Subspace<S>& pi, const Subspace<S>& zeta,
                             const Tolerances& tol = default_tolerances)
{
    detail::require_same_ambient(pi, zeta, "project_subspace");
    if (zeta.dim() == 0 || pi.dim() == 0) return Subspace<S>::zero(pi.ambient_dim());
    const Mat<S> image = pi.basis() * (pi.basis().adjoint() * zeta.basis());
    return orthonormalize<S>(image, tol.rank, 1.0);
}

/// Numerical meet: principal vectors whose angle counts as zero.
template <FieldScalar S>
Subspace<S> intersect(const Subspace<S>& a, const Subspace<S>& b, const Tolerances& tol = default_tolerances)
{
    detail::require_same_ambient(a, b, "intersect");
    const auto pairs = detail::principal_pairs(a, b);
    Eigen::Index m = 0;
    while (m < pairs.cosines.size() && pairs.cosines(m) >= 1.0 - tol.intersection) ++m;
    if (m == 0) return Subspace<S>::zero(a.ambient_dim());
    // Average the two principal-vector families; each is orthonormal already.
    const Mat<S> mid = 0.5 * (pairs.in_a.leftCols(m) + pairs.in_b.leftCols(m));
    return Subspace<S>::from_orthonormal(detail::leading_left_vectors<S>(mid, m), 1e-10);
}

/// Numerical join.  Built from the same principal decomposition as
/// intersect(), so dim sum + dim intersect = dim a + dim b holds exactly.
template <FieldScalar S>
Subspace<S> sum(const Subspace<S>& a, const Subspace<S>& b, const Tolerances& tol = default_tolerances)
{
    detail::require_same_ambient(a, b, "sum");
    if (b.dim() == 0) return a;
    if (a.dim() == 0) return b;
    const int n = a.ambient_dim();
    const Subspace<S>& big = a.dim() >= b.dim() ? a : b;
    const Subspace<S>& other = a.dim() >= b.dim() ? b : a;
    const Mat<S> cross = big.basis().adjoint() * other.basis();
    Eigen::JacobiSVD<Mat<S>> svd(cross, Eigen::ComputeFullV);
    const Eigen::VectorXd cosines = svd.singularValues().cwiseMin(1.0);
    const Mat<S> directions = other.basis() * svd.matrixV();
    std::vector<Eigen::Index> fresh;
    for (Eigen::Index i = 0; i < directions.cols(); ++i)
        if (!(cosines(i) >= 1.0 - tol.intersection)) fresh.push_back(i);
    const Eigen::Index total = big.dim() + static_cast<Eigen::Index>(fresh.size());
    Mat<S> stacked(n, total);
    stacked.leftCols(big.dim()) = big.basis();
    for (std::size_t j = 0; j < fresh.size(); ++j) {
        Vec<S> w = directions.col(fresh[j]);
        w -= big.basis() * (big.basis().adjoint() * w);
        stacked.col(big.dim() + static_cast<Eigen::Index>(j)) = w;
    }
    // The stacked columns are independent by construction; QR fixes the scale.
    Eigen::HouseholderQR<Mat<S>> qr(stacked);
    Mat<S> q = qr.householderQ() * Mat<S>::Identity(n, total);
    return Subspace<S>::from_orthonormal(std::move(q), 1e-10);
}

/// outer ⊖ inner: the orthogonal complement of inner inside outer.
template <FieldScalar S>
Subspace<S> complement_within(const Subspace<S>& outer, const Subspace<S>& inner,
                              const Tolerances& tol = default_tolerances)
{
    detail::require_same_ambient(outer, inner, "complement_within");
    const double defect = containment_defect(outer, inner);
    if (!(defect <= tol.containment))
        throw PreconditionError("complement_within: inner is not contained in outer (defect " +
                                std::to_string(defect) + ")");
    const Eigen::Index k = outer.dim() - inner.dim();
    if (k == 0) return Subspace<S>::zero(outer.ambient_dim());
    if (inner.dim() == 0) return outer;
    const Mat<S> residual = outer.basis() - inner.basis() * (inner.basis().adjoint() * outer.basis());
    return Subspace<S>::from_orthonormal(detail::leading_left_vectors<S>(residual, k), 1e-10);
}

/// Orthogonal complement in the full ambient space.
template <FieldScalar S>
Subspace<S> orthogonal_complement(const Subspace<S>& a)
{
    return complement_within(Subspace<S>::full(a.ambient_dim()), a);
}

/// Haar-random k-plane with containing <= result <= within.
template <FieldScalar S>
Subspace<S> random_subspace(int n, int k, CounterRng& rng, const std::optional<Subspace<S>>& within = std::nullopt,
                            const std::optional<Subspace<S>>& containing = std::nullopt)
{
    detail::require_dims(n >= 1, "random_subspace: ambient dimension must be positive");
    if (k < 0 || k > n) throw PreconditionError("random_subspace: need 0 <= k <= n");
    const Subspace<S> outer = within ? *within : Subspace<S>::full(n);
    const Subspace<S> inner = containing ? *containing : Subspace<S>::zero(n);
    detail::require_dims(outer.ambient_dim() == n && inner.ambient_dim() == n,
                         "random_subspace: constraint lives in a different ambient space");
    if (k > outer.dim() || k < inner.dim())
        throw PreconditionError("random_subspace: infeasible dimensions (need dim containing <= k <= dim within)");
    if (!contains(outer, inner)) throw PreconditionError("random_subspace: `containing` is not inside `within`");
    if (k == inner.dim()) return inner;

    const Subspace<S> free = complement_within(outer, inner);
    const Eigen::Index extra = k - inner.dim();
    const Mat<S> coords = detail::gaussian_matrix<S>(free.dim(), extra, rng);
    Eigen::HouseholderQR<Mat<S>> qr(free.basis() * coords);
    Mat<S> fresh = qr.householderQ() * Mat<S>::Identity(n, extra);

    Mat<S> basis(n, k);
    basis.leftCols(inner.dim()) = inner.basis();
    basis.rightCols(extra) = fresh;
    return Subspace<S>::from_orthonormal(std::move(basis), 1e-10);
}

/// A real subspace viewed inside the complexified ambient space.
inline ComplexSubspace complexify(const RealSubspace& a)
{
    if (a.dim() == 0) return ComplexSubspace::zero(a.ambient_dim());
    return ComplexSubspace::from_orthonormal(a.basis().cast<Complex>());
}

} // namespace gspine
