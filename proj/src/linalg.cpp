#include "subrep/linalg.hpp"

#include "subrep/search.hpp"
#include "subrep/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace subrep {

namespace {

int numeric_rank(const Matrix& M, double tol) {
  if (M.cols() == 0 || M.rows() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(M);
  const auto& s = svd.singularValues();
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol) ++r;
  return r;
}

Matrix stack_bases(std::span<const Subspace> parts, int rows) {
  int cols = 0;
  for (const auto& s : parts) cols += s.real_dim();
  Matrix M(rows, cols);
  int at = 0;
  for (const auto& s : parts) {
    M.middleCols(at, s.real_dim()) = s.basis();
    at += s.real_dim();
  }
  return M;
}

void require_same(const AmbientSpace& a, const AmbientSpace& b, const char* what) {
  if (!(a == b)) throw ValidationError(std::string(what) + ": subspaces live in different spaces");
}

// Visits every k-subset of {0..n-1} in lexicographic order.
template <class Fn>
void for_each_subset(int n, int k, Fn&& fn) {
  if (k > n || k < 0) return;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    fn(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

void push_unique(std::vector<Vector>& out, const Vector& v) {
  for (const auto& w : out)
    if ((w - v).lpNorm<Eigen::Infinity>() <= 1e-9) return;
  out.push_back(v);
}

// Optimal coefficients of min_c ||x - B c||_p for a polyhedral norm.
Vector polyhedral_best_coeffs(const Vector& x, const Matrix& B, NormKind p, double& value) {
  const int m = static_cast<int>(B.cols());
  solvers::LinearProgram lp(m + 1);
  lp.cost(m) = 1.0;
  Matrix M = Matrix::Zero(B.rows(), m + 1);
  M.leftCols(m) = -B;
  lp.add_norm_le(M, x, p, Vector::Unit(m + 1, m), 0.0);
  const auto res = solvers::solve(lp);
  if (res.status != solvers::Status::Optimal)
    throw NumericError("distance solver failed: " + solvers::to_string(res.status));
  value = std::max(0.0, res.x(m));
  return res.x.head(m);
}

}  // namespace

// ---------------------------------------------------------------------------
// Types

Subspace Subspace::zero(const AmbientSpace& ambient) {
  return Subspace(ambient, Matrix(ambient.real_dim(), 0));
}

Subspace Subspace::whole(const AmbientSpace& ambient) {
  return Subspace(ambient, Matrix::Identity(ambient.real_dim(), ambient.real_dim()));
}

Subspace Subspace::from_orthonormal(const AmbientSpace& ambient, Matrix basis, double tol) {
  if (basis.rows() != ambient.real_dim()) throw ValidationError("basis rows do not match the ambient space");
  if (basis.cols() > ambient.real_dim()) throw ValidationError("more basis vectors than the ambient dimension");
  const Matrix gram = basis.transpose() * basis;
  if ((gram - Matrix::Identity(gram.rows(), gram.cols())).lpNorm<Eigen::Infinity>() > tol)
    throw ValidationError("basis is not orthonormal");
  if (ambient.is_complex() && basis.cols() > 0) {
    const Matrix iB = [&] {
      Matrix m(basis.rows(), basis.cols());
      for (Eigen::Index c = 0; c < basis.cols(); ++c) m.col(c) = times_i(basis.col(c));
      return m;
    }();
    if ((iB - basis * (basis.transpose() * iB)).lpNorm<Eigen::Infinity>() > 1e-8)
      throw ValidationError("realified basis is not closed under multiplication by i");
  }
  return Subspace(ambient, std::move(basis));
}

int Subspace::subdim() const {
  return ambient_.is_complex() ? real_dim() / 2 : real_dim();
}

SubspaceSystem::SubspaceSystem(AmbientSpace ambient, std::vector<Subspace> subspaces, bool cyclic)
    : ambient_(ambient), subspaces_(std::move(subspaces)), cyclic_(cyclic) {
  if (subspaces_.empty()) throw ValidationError("a subspace system needs at least one subspace");
  for (const auto& s : subspaces_)
    if (!(s.ambient() == ambient_)) throw ValidationError("all subspaces must share the ambient space");
}

const Subspace& SubspaceSystem::at(int k) const {
  if (k < 1) throw ValidationError("subspace indices start at 1");
  if (cyclic_) return subspaces_[static_cast<std::size_t>((k - 1) % size())];
  if (k > size()) throw ValidationError("subspace index " + std::to_string(k) + " past the end of the system");
  return subspaces_[static_cast<std::size_t>(k - 1)];
}

std::vector<Subspace> SubspaceSystem::unrolled(int count) const {
  std::vector<Subspace> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int k = 1; k <= count; ++k) {
    if (cyclic_ || k <= size())
      out.push_back(at(k));
    else
      out.push_back(Subspace::zero(ambient_));
  }
  return out;
}

bool SubspaceSystem::spans(double tol) const {
  return sum_dimension(subspaces_, tol) == ambient_.real_dim();
}

Functional::Functional(AmbientSpace ambient, Vector coords) : ambient_(ambient), coords_(std::move(coords)) {
  ambient_.check_vector(coords_, "functional");
}

double Functional::apply(const Vector& x) const {
  ambient_.check_vector(x, "functional argument");
  return coords_.dot(x);
}

double Functional::abs_apply(const Vector& x) const {
  const double re = apply(x);
  if (!ambient_.is_complex()) return std::abs(re);
  const double im = coords_.dot(times_i(x));
  return std::hypot(re, im);
}

// ---------------------------------------------------------------------------
// Operations

Subspace orthonormalize(std::span<const Vector> raw, const AmbientSpace& ambient, double tol) {
  const int d = ambient.real_dim();
  for (const auto& v : raw) ambient.check_vector(v, "orthonormalize");
  const int per = ambient.is_complex() ? 2 : 1;
  Matrix M(d, static_cast<Eigen::Index>(raw.size()) * per);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    M.col(static_cast<Eigen::Index>(i) * per) = raw[i];
    if (per == 2) M.col(static_cast<Eigen::Index>(i) * 2 + 1) = times_i(raw[i]);
  }
  if (M.cols() == 0) return Subspace::zero(ambient);
  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol) ++r;
  Matrix U = svd.matrixU().leftCols(r);
  // Orient each column so its largest entry is positive.
  for (int c = 0; c < r; ++c) {
    Eigen::Index at = 0;
    U.col(c).cwiseAbs().maxCoeff(&at);
    if (U(at, c) < 0) U.col(c) *= -1.0;
  }
  return Subspace::from_orthonormal(ambient, std::move(U), 1e-8);
}

Subspace orthonormalize(std::span<const CVector> raw, const AmbientSpace& ambient, double tol) {
  if (!ambient.is_complex()) throw ValidationError("complex vectors need a complex ambient space");
  std::vector<Vector> real;
  real.reserve(raw.size());
  for (const auto& z : raw) real.push_back(realify(z));
  return orthonormalize(std::span<const Vector>(real), ambient, tol);
}

Vector project(const Vector& x, const Subspace& Y) {
  Y.ambient().check_vector(x, "project");
  return Y.basis() * (Y.basis().transpose() * x);
}

double distance(const Vector& x, const Subspace& Y, double /*tol*/) {
  const AmbientSpace& amb = Y.ambient();
  amb.check_vector(x, "distance");
  if (Y.is_trivial()) return amb.norm(x);
  if (amb.p() == NormKind::L2) return (x - project(x, Y)).norm();
  double value = 0.0;
  polyhedral_best_coeffs(x, Y.basis(), amb.p(), value);
  return value;
}

Vector best_approximation(const Vector& x, const Subspace& Y, double /*tol*/) {
  const AmbientSpace& amb = Y.ambient();
  amb.check_vector(x, "best_approximation");
  if (Y.is_trivial()) return Vector::Zero(x.size());
  if (amb.p() == NormKind::L2) return project(x, Y);
  double value = 0.0;
  return Y.basis() * polyhedral_best_coeffs(x, Y.basis(), amb.p(), value);
}

std::vector<Vector> unit_ball_vertices(const Subspace& Y, double tol) {
  const NormKind p = Y.ambient().p();
  if (p == NormKind::L2) throw ValidationError("the Euclidean unit ball has no vertices");
  const Matrix& B = Y.basis();
  const int d = static_cast<int>(B.rows());
  const int m = static_cast<int>(B.cols());
  std::vector<Vector> out;
  if (m == 0) return out;
  if (p == NormKind::Linf) {
    // m linearly independent active constraints |(B c)_i| = 1.
    for_each_subset(d, m, [&](const std::vector<int>& rows) {
      Matrix BR(m, m);
      for (int i = 0; i < m; ++i) BR.row(i) = B.row(rows[i]);
      Eigen::FullPivLU<Matrix> lu(BR);
      lu.setThreshold(tol);
      if (lu.rank() < m) return;
      for (int mask = 0; mask < (1 << m); ++mask) {
        Vector s(m);
        for (int i = 0; i < m; ++i) s(i) = (mask >> i) & 1 ? -1.0 : 1.0;
        const Vector y = B * lu.solve(s);
        if (y.lpNorm<Eigen::Infinity>() <= 1.0 + 1e-9) push_unique(out, y);
      }
    });
  } else {
    // Vertices of Y intersected with the cross-polytope: points whose zero set
    // has rank m - 1 in coefficient space.
    for_each_subset(d, m - 1, [&](const std::vector<int>& rows) {
      Vector c;
      if (m == 1) {
        c = Vector::Ones(1);
      } else {
        Matrix BR(m - 1, m);
        for (int i = 0; i < m - 1; ++i) BR.row(i) = B.row(rows[i]);
        Eigen::FullPivLU<Matrix> lu(BR);
        lu.setThreshold(tol);
        if (lu.rank() != m - 1) return;
        c = lu.kernel().col(0);
      }
      Vector y = B * c;
      const double n1 = y.lpNorm<1>();
      if (!(n1 > tol)) return;
      y /= n1;
      push_unique(out, y);
      push_unique(out, -y);
    });
  }
  return out;
}

double gap_rho0(const Subspace& Y, const Subspace& Z, double tol) {
  require_same(Y.ambient(), Z.ambient(), "gap_rho0");
  if (Y.is_trivial()) throw ValidationError("gap_rho0: sup over the unit sphere of {0} is undefined");
  if (Z.is_trivial()) return 1.0;
  if (Y.ambient().p() == NormKind::L2) {
    const Matrix R = Y.basis() - Z.basis() * (Z.basis().transpose() * Y.basis());
    Eigen::JacobiSVD<Matrix> svd(R);
    return std::min(1.0, svd.singularValues()(0));
  }
  // d(., Z) is convex, so its maximum over the polytope Y ∩ ball sits at a vertex.
  double best = 0.0;
  for (const auto& v : unit_ball_vertices(Y)) best = std::max(best, distance(v, Z, tol));
  return best;
}

Subspace span_closure(const SubspaceSystem& S, std::span<const int> indices, double tol) {
  if (indices.empty()) throw ValidationError("span_closure: empty index set");
  std::vector<Subspace> parts;
  for (int k : indices) parts.push_back(S.at(k));
  const Matrix M = stack_bases(parts, S.ambient().real_dim());
  std::vector<Vector> cols;
  for (Eigen::Index c = 0; c < M.cols(); ++c) cols.push_back(M.col(c));
  return orthonormalize(std::span<const Vector>(cols), S.ambient(), tol);
}

double restriction_norm(const Functional& phi, const Subspace& Y) {
  require_same(phi.ambient(), Y.ambient(), "restriction_norm");
  if (Y.is_trivial()) return 0.0;
  if (Y.ambient().p() == NormKind::L2) return (Y.basis().transpose() * phi.coords()).norm();
  // Linear objective over the polytope Y ∩ ball: attained at a vertex.
  double best = 0.0;
  for (const auto& v : unit_ball_vertices(Y)) best = std::max(best, std::abs(phi.coords().dot(v)));
  return best;
}

Subspace orthogonal_complement(const Subspace& Y, double tol) {
  const int d = Y.ambient().real_dim();
  const Matrix R = Matrix::Identity(d, d) - Y.projector();
  std::vector<Vector> cols;
  for (int c = 0; c < d; ++c) cols.push_back(R.col(c));
  return orthonormalize(std::span<const Vector>(cols), Y.ambient(), std::max(tol, 1e-8));
}

Subspace annihilator(const SubspaceSystem& S, int k, double tol) {
  if (S.cyclic()) throw ValidationError("annihilator: system must be finite");
  if (k < 1 || k > S.size()) throw ValidationError("annihilator: index out of range");
  std::vector<Subspace> others;
  for (int j = 1; j <= S.size(); ++j)
    if (j != k) others.push_back(S.at(j));
  if (others.empty()) return Subspace::whole(S.ambient());
  const Matrix M = stack_bases(others, S.ambient().real_dim());
  std::vector<Vector> cols;
  for (Eigen::Index c = 0; c < M.cols(); ++c) cols.push_back(M.col(c));
  return orthogonal_complement(orthonormalize(std::span<const Vector>(cols), S.ambient(), tol), tol);
}

int sum_dimension(std::span<const Subspace> parts, double tol) {
  if (parts.empty()) return 0;
  return numeric_rank(stack_bases(parts, parts.front().ambient().real_dim()), tol);
}

bool contained_in(const Subspace& Y, const Subspace& Z, double tol) {
  require_same(Y.ambient(), Z.ambient(), "contained_in");
  const Subspace pair[] = {Y, Z};
  return sum_dimension(pair, tol) == Z.real_dim();
}

namespace {

void check_direct_pair(const Subspace& Y, const Subspace& Z) {
  require_same(Y.ambient(), Z.ambient(), "direct_sum_constant");
  if (Y.is_trivial() || Z.is_trivial()) throw ValidationError("direct_sum_constant: both subspaces must be nontrivial");
  const Subspace pair[] = {Y, Z};
  if (sum_dimension(pair) < Y.real_dim() + Z.real_dim())
    throw ValidationError("direct_sum_constant: subspaces intersect nontrivially");
}

}  // namespace

double direct_sum_constant(const Subspace& Y, const Subspace& Z) {
  check_direct_pair(Y, Z);
  if (Y.ambient().p() != NormKind::L2) return direct_sum_constant_search(Y, Z);
  // Smallest principal angle theta: inf is attained at equal weights with
  // <y, z> = -cos(theta), giving sqrt((1 - cos theta) / 2).
  Eigen::JacobiSVD<Matrix> svd(Y.basis().transpose() * Z.basis());
  const double cos_min = std::min(1.0, svd.singularValues()(0));
  return std::sqrt(0.5 * (1.0 - cos_min));
}

double direct_sum_constant_search(const Subspace& Y, const Subspace& Z, std::uint64_t seed, int starts) {
  check_direct_pair(Y, Z);
  const NormKind p = Y.ambient().p();
  const int my = Y.real_dim();
  const int mz = Z.real_dim();
  const int k = my + mz;
  SphereObjective ratio = [&](const Vector& u) {
    const Vector y = Y.basis() * u.head(my);
    const Vector z = Z.basis() * u.tail(mz);
    const double denom = norm(y, p) + norm(z, p);
    return norm(y + z, p) / denom;
  };
  SearchOptions opts;
  opts.seed = seed;
  opts.starts = starts;
  return minimize_on_sphere(Matrix::Identity(k, k), NormKind::L2, ratio, opts).value;
}

Subspace in_dual(const Subspace& Y) { return Subspace::from_orthonormal(Y.ambient().dual_space(), Y.basis()); }

Vector norming_vector(const Vector& phi, const AmbientSpace& ambient) {
  const int d = ambient.real_dim();
  Vector x = Vector::Zero(d);
  if (phi.size() != d) throw ValidationError("norming_vector: dimension mismatch");
  if (phi.isZero(0.0)) {
    x(0) = 1.0;
    return x / ambient.norm(x);
  }
  switch (ambient.p()) {
    case NormKind::L2:
      return phi / phi.norm();
    case NormKind::Linf:
      for (int i = 0; i < d; ++i) x(i) = phi(i) >= 0.0 ? 1.0 : -1.0;
      return x;
    case NormKind::L1: {
      Eigen::Index i = 0;
      phi.cwiseAbs().maxCoeff(&i);
      x(i) = phi(i) >= 0.0 ? 1.0 : -1.0;
      return x;
    }
  }
  return x;
}

namespace {

Matrix columns(const std::vector<Vector>& vs, int rows) {
  Matrix M(rows, static_cast<Eigen::Index>(vs.size()));
  for (std::size_t i = 0; i < vs.size(); ++i) M.col(static_cast<Eigen::Index>(i)) = vs[i];
  return M;
}

}  // namespace

RestrictionNormEval::RestrictionNormEval(const Subspace& Y)
    : euclidean_(Y.ambient().p() == NormKind::L2) {
  if (euclidean_ || Y.is_trivial())
    V_ = Y.basis();
  else
    V_ = columns(unit_ball_vertices(Y), Y.ambient().real_dim());
}

double RestrictionNormEval::operator()(const Vector& phi) const {
  if (V_.cols() == 0) return 0.0;
  const Vector r = V_.transpose() * phi;
  return euclidean_ ? r.norm() : r.lpNorm<Eigen::Infinity>();
}

DistanceEval::DistanceEval(const Subspace& Y) : euclidean_(Y.ambient().p() == NormKind::L2) {
  if (euclidean_) {
    V_ = Y.basis();
    return;
  }
  if (Y.real_dim() == Y.ambient().real_dim()) {
    whole_ = true;
    return;
  }
  V_ = columns(unit_ball_vertices(in_dual(orthogonal_complement(Y))), Y.ambient().real_dim());
}

double DistanceEval::operator()(const Vector& x) const {
  if (euclidean_) return (x - V_ * (V_.transpose() * x)).norm();
  if (whole_) return 0.0;
  return (V_.transpose() * x).lpNorm<Eigen::Infinity>();
}

}  // namespace subrep
