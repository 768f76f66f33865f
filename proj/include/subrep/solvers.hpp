#pragma once

// Small dense convex solvers. Problems here have at most a few dozen
// variables, so dense tableaux and dense Newton systems are adequate.

#include "subrep/core.hpp"

#include <vector>

namespace subrep::solvers {

enum class Status { Optimal, Infeasible, Unbounded, IterationCap };

std::string to_string(Status s);

/// minimize cost^T v  subject to  A_ub v <= b_ub,  A_eq v = b_eq,  v free.
struct LinearProgram {
  Vector cost;
  Matrix A_ub;
  Vector b_ub;
  Matrix A_eq;
  Vector b_eq;

  explicit LinearProgram(int n_vars);
  int n_vars() const { return static_cast<int>(cost.size()); }

  void add_le(const Vector& row, double rhs);
  void add_eq(const Vector& row, double rhs);
  /// ||M v + shift||_p <= (t_coef^T v + t_const), expanded into linear rows.
  /// p must be L1 or Linf; L1 appends auxiliary variables and so grows the
  /// variable count (existing rows are zero-padded).
  void add_norm_le(const Matrix& M, const Vector& shift, NormKind p, const Vector& t_coef,
                   double t_const);

  void grow(int extra_vars);
};

struct LpResult {
  Status status = Status::IterationCap;
  double value = 0.0;
  Vector x;
  int iterations = 0;
};

/// Two-phase dense simplex with Bland's rule.
LpResult solve(const LinearProgram& lp, int max_iterations = 20000);

/// minimize cost^T v subject to
///   ||A_i v + b_i||_2 <= f_i^T v + g_i   (second-order cones)
///   G v <= h                             (linear)
/// solved by a log-barrier interior point method from a strictly feasible
/// start supplied by the caller.
struct ConeProgram {
  struct Cone {
    Matrix A;
    Vector b;
    Vector f;
    double g = 0.0;
  };

  Vector cost;
  std::vector<Cone> cones;
  Matrix G;
  Vector h;

  explicit ConeProgram(int n_vars);
  int n_vars() const { return static_cast<int>(cost.size()); }

  void add_cone(Matrix A, Vector b, Vector f, double g);
  void add_le(const Vector& row, double rhs);

  /// True when v lies strictly inside every constraint.
  bool strictly_feasible(const Vector& v) const;
};

struct ConeResult {
  Status status = Status::IterationCap;
  double value = 0.0;
  Vector x;
  int newton_steps = 0;
  double gap = 0.0;
};

struct BarrierOptions {
  double gap_tol = 1e-11;
  double mu = 10.0;
  int max_newton = 2000;
};

ConeResult solve(const ConeProgram& cp, const Vector& start, const BarrierOptions& opts = {});

}  // namespace subrep::solvers
