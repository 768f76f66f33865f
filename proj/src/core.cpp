#include "subrep/core.hpp"

#include <cmath>
#include <string>

namespace subrep {

std::string to_string(NormKind p) {
  switch (p) {
  case NormKind::L1:
    return "1";
  case NormKind::L2:
    return "2";
  case NormKind::Linf:
    return "inf";
  }
  return "?";
}

std::string to_string(Field f) { return f == Field::Real ? "real" : "complex"; }

double norm(const Vector& v, NormKind p) {
  switch (p) {
  case NormKind::L1:
    return v.lpNorm<1>();
  case NormKind::Linf:
    return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>();
  default:
    return v.norm();
  }
}

AmbientSpace::AmbientSpace(int dim, Field field, NormKind p) : dim_(dim), field_(field), p_(p) {
  if (dim < 1) throw ValidationError("ambient dimension must be at least 1");
  if (field == Field::Complex && p != NormKind::L2)
    throw ValidationError("complex spaces are supported only with p = 2");
}

void AmbientSpace::check_vector(const Vector& x, const char* what) const {
  if (x.size() != real_dim())
    throw ValidationError(std::string(what) + ": expected " + std::to_string(real_dim()) +
                          " real coordinates, got " + std::to_string(x.size()));
}

Vector realify(const CVector& z) {
  Vector x(2 * z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    x(2 * i) = z(i).real();
    x(2 * i + 1) = z(i).imag();
  }
  return x;
}

CVector complexify(const Vector& x) {
  CVector z(x.size() / 2);
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = {x(2 * i), x(2 * i + 1)};
  return z;
}

Vector times_i(const Vector& x) {
  Vector y(x.size());
  for (Eigen::Index i = 0; i + 1 < x.size(); i += 2) {
    y(i) = -x(i + 1);
    y(i + 1) = x(i);
  }
  return y;
}

}  // namespace subrep
