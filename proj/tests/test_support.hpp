#pragma once

// Shared generators and brute-force oracles for the test suites. Nothing in
// here calls into the solver paths the tests are checking.

#include "subrep/linalg.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace subrep::testing {

inline constexpr double kPi = std::numbers::pi;

inline double deg(double d) { return d * kPi / 180.0; }

inline Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

inline Subspace span_of(const AmbientSpace& amb, std::vector<Vector> vs) {
  return orthonormalize(std::span<const Vector>(vs), amb);
}

inline Subspace line_at(const AmbientSpace& amb, double angle) {
  return span_of(amb, {vec({std::cos(angle), std::sin(angle)})});
}

inline SubspaceSystem axes(int dim, NormKind p = NormKind::L2, bool cyclic = false) {
  AmbientSpace amb(dim, Field::Real, p);
  std::vector<Subspace> xs;
  for (int i = 0; i < dim; ++i) xs.push_back(span_of(amb, {Vector::Unit(dim, i)}));
  return SubspaceSystem(amb, xs, cyclic);
}

inline SubspaceSystem lines(std::vector<double> angles, NormKind p = NormKind::L2, bool cyclic = false) {
  AmbientSpace amb(2, Field::Real, p);
  std::vector<Subspace> xs;
  for (double a : angles) xs.push_back(line_at(amb, a));
  return SubspaceSystem(amb, xs, cyclic);
}

/// Deterministic generator for property-style tests.
class Gen {
public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  Vector gaussian(int n) {
    std::normal_distribution<double> g;
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = g(rng_);
    return v;
  }

  Vector unit(int n, NormKind p = NormKind::L2) {
    Vector v = gaussian(n);
    return v / norm(v, p);
  }

  Subspace subspace(const AmbientSpace& amb, int k) {
    std::vector<Vector> vs;
    for (int i = 0; i < k; ++i) vs.push_back(gaussian(amb.real_dim()));
    return orthonormalize(std::span<const Vector>(vs), amb);
  }

  SubspaceSystem system(const AmbientSpace& amb, int count, int max_subdim) {
    std::vector<Subspace> xs;
    for (int i = 0; i < count; ++i) xs.push_back(subspace(amb, integer(1, max_subdim)));
    return SubspaceSystem(amb, xs);
  }

  std::mt19937_64& engine() { return rng_; }

private:
  std::mt19937_64 rng_;
};

/// Rotation of a planar system by a fixed angle.
inline Matrix rotation2(double a) {
  Matrix R(2, 2);
  R << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  return R;
}

/// Brute-force distance from x to span(b) by scanning the coefficient.
inline double grid_line_distance(const Vector& x, const Vector& b, NormKind p, double range = 6.0,
                                 double step = 1e-4) {
  double best = norm(x, p);
  for (double t = -range; t <= range; t += step) best = std::min(best, norm(x - t * b, p));
  return best;
}

/// Unit vectors (in the p-norm) of a planar subspace with basis columns B,
/// sampled along an angular grid.
inline std::vector<Vector> planar_sphere(const Matrix& B, NormKind p, int samples) {
  std::vector<Vector> out;
  for (int i = 0; i < samples; ++i) {
    const double a = 2.0 * kPi * i / samples;
    Vector c(B.cols());
    if (B.cols() == 1) {
      c(0) = i % 2 == 0 ? 1.0 : -1.0;
    } else {
      c(0) = std::cos(a);
      c(1) = std::sin(a);
    }
    Vector y = B * c;
    out.push_back(y / norm(y, p));
  }
  return out;
}

}  // namespace subrep::testing
