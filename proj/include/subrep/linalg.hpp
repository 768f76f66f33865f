#pragma once

#include "subrep/core.hpp"

#include <span>
#include <vector>

namespace subrep {

/// Closed linear subspace held as a Euclidean-orthonormal basis, even when the
/// ambient norm is not Euclidean. For complex spaces the basis is realified and
/// closed under multiplication by i, so it has 2*subdim real columns.
class Subspace {
public:
  /// The trivial subspace {0}.
  static Subspace zero(const AmbientSpace& ambient);
  static Subspace whole(const AmbientSpace& ambient);

  /// Wraps a basis that is already orthonormal; throws ValidationError when the
  /// Gram matrix deviates from the identity by more than `tol`.
  static Subspace from_orthonormal(const AmbientSpace& ambient, Matrix basis, double tol = 1e-10);

  const AmbientSpace& ambient() const { return ambient_; }
  const Matrix& basis() const { return basis_; }

  /// Dimension over the ambient field.
  int subdim() const;
  /// Number of real basis columns.
  int real_dim() const { return static_cast<int>(basis_.cols()); }
  bool is_trivial() const { return basis_.cols() == 0; }

  /// Orthoprojector onto the subspace, in realified coordinates.
  Matrix projector() const { return basis_ * basis_.transpose(); }

private:
  Subspace(AmbientSpace ambient, Matrix basis) : ambient_(ambient), basis_(std::move(basis)) {}

  AmbientSpace ambient_;
  Matrix basis_;
};

/// Ordered finite list of subspaces. When `cyclic` is set the list models the
/// periodic infinite system X_k, k >= 1, with X_{k+N} = X_k.
class SubspaceSystem {
public:
  SubspaceSystem(AmbientSpace ambient, std::vector<Subspace> subspaces, bool cyclic = false);

  const AmbientSpace& ambient() const { return ambient_; }
  const std::vector<Subspace>& subspaces() const { return subspaces_; }
  bool cyclic() const { return cyclic_; }
  /// Length of the list (one period for cyclic systems).
  int size() const { return static_cast<int>(subspaces_.size()); }

  /// 1-based access. Cyclic systems wrap; finite ones throw past the end.
  const Subspace& at(int k) const;

  /// The first `count` members of the (possibly cyclic) sequence. Finite
  /// systems are padded with {0} past their end.
  std::vector<Subspace> unrolled(int count) const;

  /// True when the sum of all subspaces is the whole ambient space.
  bool spans(double tol = 1e-10) const;

private:
  AmbientSpace ambient_;
  std::vector<Subspace> subspaces_;
  bool cyclic_;
};

/// Continuous linear functional, identified with its coordinate vector via
/// phi(x) = <x, phi>. Its norm is the dual-exponent norm of the coordinates.
class Functional {
public:
  Functional(AmbientSpace ambient, Vector coords);

  const AmbientSpace& ambient() const { return ambient_; }
  const Vector& coords() const { return coords_; }

  double norm() const { return ambient_.dual_norm(coords_); }
  /// Re phi(x).
  double apply(const Vector& x) const;
  /// |phi(x)|, including the imaginary part for complex spaces.
  double abs_apply(const Vector& x) const;

private:
  AmbientSpace ambient_;
  Vector coords_;
};

// ---------------------------------------------------------------------------
// Operations

/// Orthonormal basis of the span of `raw`; singular values below `tol` are
/// treated as zero so rank-deficient input is reduced.
Subspace orthonormalize(std::span<const Vector> raw, const AmbientSpace& ambient, double tol = 1e-10);
Subspace orthonormalize(std::span<const CVector> raw, const AmbientSpace& ambient, double tol = 1e-10);

/// Euclidean orthoprojection P_Y x.
Vector project(const Vector& x, const Subspace& Y);

/// inf_{y in Y} ||x - y|| in the ambient norm.
double distance(const Vector& x, const Subspace& Y, double tol = 1e-9);

/// A nearest point of Y to x (the orthoprojection for p = 2, an LP optimum
/// otherwise).
Vector best_approximation(const Vector& x, const Subspace& Y, double tol = 1e-9);

/// One-sided gap sup{ d(y, Z) : y in Y, ||y|| = 1 }.
double gap_rho0(const Subspace& Y, const Subspace& Z, double tol = 1e-9);

/// Orthonormal basis of the sum of the subspaces with the given 1-based
/// indices (indices wrap for cyclic systems).
Subspace span_closure(const SubspaceSystem& S, std::span<const int> indices, double tol = 1e-10);

/// Norm of the restriction of phi to Y: sup{ |phi(y)| : y in Y, ||y|| = 1 }.
double restriction_norm(const Functional& phi, const Subspace& Y);

/// X_k' = intersection of the annihilators of all X_j, j != k, as a subspace
/// of the dual (coordinates identified with the primal). A system with a
/// single member yields the whole dual space.
Subspace annihilator(const SubspaceSystem& S, int k, double tol = 1e-10);

/// Euclidean orthogonal complement (equivalently, the annihilator of Y
/// expressed in primal coordinates).
Subspace orthogonal_complement(const Subspace& Y, double tol = 1e-10);

/// Best constant c with ||y + z|| >= c (||y|| + ||z||). Closed form via the
/// smallest principal angle for p = 2, multi-start search otherwise.
double direct_sum_constant(const Subspace& Y, const Subspace& Z);

/// The multi-start estimate of the direct-sum constant, available for every
/// norm (used to cross-check the Euclidean closed form).
double direct_sum_constant_search(const Subspace& Y, const Subspace& Z, std::uint64_t seed = 7,
                                  int starts = 64);

/// Extreme points of the unit ball of Y in the ambient p-norm, for p in
/// {1, inf}. Each vertex is returned once together with its negative.
std::vector<Vector> unit_ball_vertices(const Subspace& Y, double tol = 1e-10);

/// dim(Y + Z) computed from the stacked bases.
int sum_dimension(std::span<const Subspace> parts, double tol = 1e-10);

/// Y is contained in Z (rank test).
bool contained_in(const Subspace& Y, const Subspace& Z, double tol = 1e-10);

/// The same coordinates read as a subspace of the dual space (exponent q).
Subspace in_dual(const Subspace& Y);

/// A unit vector x with phi(x) = ||phi|| (phi given by coordinates, measured
/// in the dual norm of `ambient`).
Vector norming_vector(const Vector& phi, const AmbientSpace& ambient);

/// phi -> ||phi|_Y|| with the unit-ball vertices of Y precomputed, for
/// evaluating the same restriction many times.
class RestrictionNormEval {
public:
  explicit RestrictionNormEval(const Subspace& Y);
  double operator()(const Vector& phi) const;

private:
  Matrix V_;
  bool euclidean_;
};

/// x -> d(x, Y), evaluated through the dual formula
/// d(x, Y) = max{ |psi(x)| : psi in Y^perp, ||psi|| <= 1 } with the vertices
/// of that dual ball precomputed (p in {1, inf}).
class DistanceEval {
public:
  explicit DistanceEval(const Subspace& Y);
  double operator()(const Vector& x) const;

private:
  Matrix V_;
  bool euclidean_;
  bool whole_ = false;
};

}  // namespace subrep
