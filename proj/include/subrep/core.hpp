#pragma once

// Basic value types shared by every module: the ambient space descriptor,
// norm exponents, error hierarchy and tolerance settings.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace subrep {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using CVector = Eigen::VectorXcd;

/// Norm exponent of the ambient space. Only the three polyhedral/Euclidean
/// exponents are supported.
enum class NormKind { L1, L2, Linf };

enum class Field { Real, Complex };

/// Exponent of the dual norm (1 <-> inf, 2 <-> 2).
constexpr NormKind dual(NormKind p) {
  switch (p) {
  case NormKind::L1:
    return NormKind::Linf;
  case NormKind::Linf:
    return NormKind::L1;
  default:
    return NormKind::L2;
  }
}

std::string to_string(NormKind p);
std::string to_string(Field f);

double norm(const Vector& v, NormKind p);

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad dimensions, violated preconditions.
class ValidationError : public Error {
public:
  using Error::Error;
};

/// A numeric procedure failed to converge or hit an iteration cap.
class NumericError : public Error {
public:
  using Error::Error;
};

/// A request is well-formed but exceeds a declared computational budget
/// (enumeration caps, replication caps).
class BudgetError : public Error {
public:
  using Error::Error;
};

/// Tolerances used across the library. Defaults match the documented contract.
struct Tolerances {
  double rank = 1e-10;   // singular-value cutoff and orthonormality check
  double solver = 1e-9;  // convex / LP solver accuracy
};

/// Finite-dimensional normed space K^dim with the p-norm. Complex spaces are
/// stored realified: a complex coordinate z occupies two consecutive real
/// slots (Re z, Im z), so the Hermitian inner product's real part is the
/// ordinary dot product of realified vectors.
class AmbientSpace {
public:
  AmbientSpace(int dim, Field field = Field::Real, NormKind p = NormKind::L2);

  int dim() const { return dim_; }
  Field field() const { return field_; }
  NormKind p() const { return p_; }
  bool is_complex() const { return field_ == Field::Complex; }

  /// Number of real coordinates of a vector in this space.
  int real_dim() const { return is_complex() ? 2 * dim_ : dim_; }

  double norm(const Vector& x) const { return subrep::norm(x, p_); }
  double dual_norm(const Vector& phi) const { return subrep::norm(phi, dual(p_)); }

  /// Same space carrying the dual exponent: the home of functionals.
  AmbientSpace dual_space() const { return AmbientSpace(dim_, field_, dual(p_)); }

  void check_vector(const Vector& x, const char* what) const;

  friend bool operator==(const AmbientSpace& a, const AmbientSpace& b) {
    return a.dim_ == b.dim_ && a.field_ == b.field_ && a.p_ == b.p_;
  }

private:
  int dim_;
  Field field_;
  NormKind p_;
};

/// Interleaved (Re, Im) realification of a complex coordinate vector.
Vector realify(const CVector& z);
CVector complexify(const Vector& x);

/// Multiplication by the imaginary unit, acting on realified coordinates.
Vector times_i(const Vector& x);

}  // namespace subrep
