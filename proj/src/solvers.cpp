#include "subrep/solvers.hpp"

#include <cmath>
#include <limits>

namespace subrep::solvers {

std::string to_string(Status s) {
  switch (s) {
  case Status::Optimal:
    return "optimal";
  case Status::Infeasible:
    return "infeasible";
  case Status::Unbounded:
    return "unbounded";
  case Status::IterationCap:
    return "iteration_cap";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Linear programs

LinearProgram::LinearProgram(int n_vars)
    : cost(Vector::Zero(n_vars)), A_ub(0, n_vars), b_ub(0), A_eq(0, n_vars), b_eq(0) {}

void LinearProgram::grow(int extra_vars) {
  const int n = n_vars() + extra_vars;
  cost.conservativeResize(n);
  cost.tail(extra_vars).setZero();
  Matrix ub = Matrix::Zero(A_ub.rows(), n);
  ub.leftCols(A_ub.cols()) = A_ub;
  A_ub = std::move(ub);
  Matrix eq = Matrix::Zero(A_eq.rows(), n);
  eq.leftCols(A_eq.cols()) = A_eq;
  A_eq = std::move(eq);
}

void LinearProgram::add_le(const Vector& row, double rhs) {
  if (row.size() != n_vars()) throw ValidationError("LP row length mismatch");
  A_ub.conservativeResize(A_ub.rows() + 1, Eigen::NoChange);
  A_ub.row(A_ub.rows() - 1) = row.transpose();
  b_ub.conservativeResize(b_ub.size() + 1);
  b_ub(b_ub.size() - 1) = rhs;
}

void LinearProgram::add_eq(const Vector& row, double rhs) {
  if (row.size() != n_vars()) throw ValidationError("LP row length mismatch");
  A_eq.conservativeResize(A_eq.rows() + 1, Eigen::NoChange);
  A_eq.row(A_eq.rows() - 1) = row.transpose();
  b_eq.conservativeResize(b_eq.size() + 1);
  b_eq(b_eq.size() - 1) = rhs;
}

void LinearProgram::add_norm_le(const Matrix& M, const Vector& shift, NormKind p,
                                const Vector& t_coef, double t_const) {
  const int base = n_vars();
  if (M.cols() != base || t_coef.size() != base) throw ValidationError("norm constraint size mismatch");
  const int rows = static_cast<int>(M.rows());
  if (p == NormKind::Linf) {
    for (int r = 0; r < rows; ++r) {
      add_le(M.row(r).transpose() - t_coef, t_const - shift(r));
      add_le(-M.row(r).transpose() - t_coef, t_const + shift(r));
    }
    return;
  }
  if (p != NormKind::L1) throw ValidationError("add_norm_le needs a polyhedral norm");
  grow(rows);
  const int n = n_vars();
  for (int r = 0; r < rows; ++r) {
    Vector row = Vector::Zero(n);
    row.head(base) = M.row(r).transpose();
    row(base + r) = -1.0;
    add_le(row, -shift(r));
    row.head(base) = -M.row(r).transpose();
    add_le(row, shift(r));
  }
  Vector row = Vector::Zero(n);
  row.head(base) = -t_coef;
  row.tail(rows).setOnes();
  add_le(row, t_const);
}

namespace {

class Tableau {
public:
  Tableau(int rows, int cols) : T_(Matrix::Zero(rows + 1, cols + 1)), basis_(rows, -1) {}

  double& at(int r, int c) { return T_(r, c); }
  double rhs(int r) const { return T_(r, T_.cols() - 1); }
  int rows() const { return static_cast<int>(T_.rows()) - 1; }
  int cols() const { return static_cast<int>(T_.cols()) - 1; }
  std::vector<int>& basis() { return basis_; }
  Matrix& raw() { return T_; }

  void pivot(int r, int c) {
    T_.row(r) /= T_(r, c);
    for (int i = 0; i < T_.rows(); ++i) {
      if (i == r) continue;
      const double factor = T_(i, c);
      if (factor != 0.0) T_.row(i) -= factor * T_.row(r);
    }
    basis_[r] = c;
  }

  /// Recomputes the objective row for the given column costs.
  void price(const Vector& costs) {
    const int m = rows();
    T_.row(m).setZero();
    T_.row(m).head(cols()) = costs.transpose();
    for (int i = 0; i < m; ++i) {
      const double cb = costs(basis_[i]);
      if (cb != 0.0) T_.row(m) -= cb * T_.row(i);
    }
  }

  /// Runs simplex iterations on the current objective row. Columns with
  /// allowed[c] == false never enter.
  Status iterate(const std::vector<bool>& allowed, int& iterations, int max_iterations) {
    constexpr double kCostTol = 1e-10;
    constexpr double kPivotTol = 1e-10;
    const int m = rows();
    int stalled = 0;
    double last_obj = -T_(m, cols());
    while (true) {
      if (iterations >= max_iterations) return Status::IterationCap;
      // Dantzig pricing, with Bland's rule once progress stalls.
      const bool bland = stalled > 50;
      int enter = -1;
      double best = -kCostTol;
      for (int c = 0; c < cols(); ++c) {
        if (!allowed[c]) continue;
        const double r = T_(m, c);
        if (bland) {
          if (r < -kCostTol) {
            enter = c;
            break;
          }
        } else if (r < best) {
          best = r;
          enter = c;
        }
      }
      if (enter < 0) return Status::Optimal;
      int leave = -1;
      double ratio = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m; ++i) {
        const double a = T_(i, enter);
        if (a <= kPivotTol) continue;
        const double q = rhs(i) / a;
        if (q < ratio - 1e-14 || (std::abs(q - ratio) <= 1e-14 && basis_[i] < basis_[leave])) {
          ratio = q;
          leave = i;
        }
      }
      if (leave < 0) return Status::Unbounded;
      pivot(leave, enter);
      ++iterations;
      const double obj = -T_(m, cols());
      if (obj < last_obj - 1e-13) {
        stalled = 0;
        last_obj = obj;
      } else {
        ++stalled;
      }
    }
  }

private:
  Matrix T_;
  std::vector<int> basis_;
};

}  // namespace

LpResult solve(const LinearProgram& lp, int max_iterations) {
  const int n = lp.n_vars();
  const int m_ub = static_cast<int>(lp.A_ub.rows());
  const int m_eq = static_cast<int>(lp.A_eq.rows());
  const int m = m_ub + m_eq;

  // Rows needing an artificial variable: equalities and <= rows with b < 0.
  std::vector<int> art_of_row(m, -1);
  int n_art = 0;
  for (int i = 0; i < m_ub; ++i)
    if (lp.b_ub(i) < 0) art_of_row[i] = n_art++;
  for (int i = 0; i < m_eq; ++i) art_of_row[m_ub + i] = n_art++;

  const int col_slack = 2 * n;
  const int col_art = col_slack + m_ub;
  const int n_cols = col_art + n_art;
  Tableau tab(m, n_cols);
  Matrix& T = tab.raw();
  for (int i = 0; i < m; ++i) {
    const bool is_ub = i < m_ub;
    Eigen::RowVectorXd a = is_ub ? lp.A_ub.row(i) : lp.A_eq.row(i - m_ub);
    double b = is_ub ? lp.b_ub(i) : lp.b_eq(i - m_ub);
    double slack = is_ub ? 1.0 : 0.0;
    if (b < 0) {
      a = -a;
      b = -b;
      slack = -slack;
    }
    T.block(i, 0, 1, n) = a;
    T.block(i, n, 1, n) = -a;
    if (is_ub) T(i, col_slack + i) = slack;
    if (art_of_row[i] >= 0) {
      T(i, col_art + art_of_row[i]) = 1.0;
      tab.basis()[i] = col_art + art_of_row[i];
    } else {
      tab.basis()[i] = col_slack + i;
    }
    T(i, n_cols) = b;
  }

  LpResult result;
  std::vector<bool> allowed(n_cols, true);
  if (n_art > 0) {
    Vector phase1 = Vector::Zero(n_cols);
    phase1.tail(n_art).setOnes();
    tab.price(phase1);
    const Status s1 = tab.iterate(allowed, result.iterations, max_iterations);
    if (s1 == Status::IterationCap) {
      result.status = s1;
      return result;
    }
    double infeas = 0.0;
    for (int i = 0; i < m; ++i)
      if (tab.basis()[i] >= col_art) infeas += tab.rhs(i);
    double scale = 1.0;
    for (int i = 0; i < m; ++i) scale = std::max(scale, std::abs(T(i, n_cols)));
    if (infeas > 1e-9 * scale) {
      result.status = Status::Infeasible;
      return result;
    }
    for (int i = 0; i < m; ++i) {
      if (tab.basis()[i] < col_art) continue;
      for (int c = 0; c < col_art; ++c) {
        if (std::abs(T(i, c)) > 1e-9) {
          tab.pivot(i, c);
          break;
        }
      }
    }
    for (int c = col_art; c < n_cols; ++c) allowed[c] = false;
  }

  Vector phase2 = Vector::Zero(n_cols);
  phase2.head(n) = lp.cost;
  phase2.segment(n, n) = -lp.cost;
  tab.price(phase2);
  const Status s2 = tab.iterate(allowed, result.iterations, max_iterations);
  if (s2 != Status::Optimal) {
    result.status = s2;
    return result;
  }
  Vector z = Vector::Zero(n_cols);
  for (int i = 0; i < m; ++i) z(tab.basis()[i]) = tab.rhs(i);
  result.x = z.head(n) - z.segment(n, n);
  result.value = lp.cost.dot(result.x);
  result.status = Status::Optimal;
  return result;
}

// ---------------------------------------------------------------------------
// Second-order cone programs

ConeProgram::ConeProgram(int n_vars) : cost(Vector::Zero(n_vars)), G(0, n_vars), h(0) {}

void ConeProgram::add_cone(Matrix A, Vector b, Vector f, double g) {
  if (A.cols() != n_vars() || f.size() != n_vars() || A.rows() != b.size())
    throw ValidationError("cone constraint size mismatch");
  cones.push_back({std::move(A), std::move(b), std::move(f), g});
}

void ConeProgram::add_le(const Vector& row, double rhs) {
  if (row.size() != n_vars()) throw ValidationError("cone program row length mismatch");
  G.conservativeResize(G.rows() + 1, Eigen::NoChange);
  G.row(G.rows() - 1) = row.transpose();
  h.conservativeResize(h.size() + 1);
  h(h.size() - 1) = rhs;
}

bool ConeProgram::strictly_feasible(const Vector& v) const {
  for (const auto& c : cones) {
    const double s = c.f.dot(v) + c.g;
    if (!(s > 0.0)) return false;
    const Vector u = c.A * v + c.b;
    if (!(s - u.norm() > 0.0)) return false;
  }
  if (G.rows() > 0 && !((h - G * v).array() > 0.0).all()) return false;
  return true;
}

namespace {

double barrier_value(const ConeProgram& cp, const Vector& v) {
  double phi = 0.0;
  for (const auto& c : cp.cones) {
    const double s = c.f.dot(v) + c.g;
    const Vector u = c.A * v + c.b;
    const double un = u.norm();
    phi -= std::log((s - un) * (s + un));
  }
  if (cp.G.rows() > 0) phi -= (cp.h - cp.G * v).array().log().sum();
  return phi;
}

void barrier_derivatives(const ConeProgram& cp, const Vector& v, Vector& grad, Matrix& hess) {
  const int n = cp.n_vars();
  grad.setZero(n);
  hess.setZero(n, n);
  for (const auto& c : cp.cones) {
    const double s = c.f.dot(v) + c.g;
    const Vector u = c.A * v + c.b;
    const double un = u.norm();
    const double D = (s - un) * (s + un);
    const Vector Atu = c.A.transpose() * u;
    const Vector dD = 2.0 * s * c.f - 2.0 * Atu;
    grad -= dD / D;
    hess.noalias() -= (2.0 / D) * (c.f * c.f.transpose());
    hess.noalias() += (2.0 / D) * (c.A.transpose() * c.A);
    hess.noalias() += (dD * dD.transpose()) / (D * D);
  }
  if (cp.G.rows() > 0) {
    const Vector r = cp.h - cp.G * v;
    const Vector inv = r.cwiseInverse();
    grad += cp.G.transpose() * inv;
    hess.noalias() += cp.G.transpose() * inv.cwiseAbs2().asDiagonal() * cp.G;
  }
}

}  // namespace

ConeResult solve(const ConeProgram& cp, const Vector& start, const BarrierOptions& opts) {
  ConeResult result;
  if (!cp.strictly_feasible(start)) throw ValidationError("cone program start is not strictly feasible");
  Vector v = start;
  const double theta = 2.0 * static_cast<double>(cp.cones.size()) + static_cast<double>(cp.G.rows());
  double t = 1.0;
  Vector grad;
  Matrix hess;
  while (true) {
    // Centering by damped Newton on t c^T v + barrier.
    for (int inner = 0; inner < 100; ++inner) {
      if (result.newton_steps >= opts.max_newton) {
        result.status = Status::IterationCap;
        result.x = v;
        result.value = cp.cost.dot(v);
        return result;
      }
      barrier_derivatives(cp, v, grad, hess);
      grad += t * cp.cost;
      Eigen::LDLT<Matrix> ldlt(hess);
      Vector step = ldlt.solve(-grad);
      if (ldlt.info() != Eigen::Success || !step.allFinite()) {
        const double ridge = 1e-12 * (1.0 + hess.diagonal().cwiseAbs().maxCoeff());
        step = (hess + ridge * Matrix::Identity(hess.rows(), hess.cols())).ldlt().solve(-grad);
      }
      const double decrement = -grad.dot(step);
      ++result.newton_steps;
      if (!(decrement > 1e-12)) break;
      const double f0 = t * cp.cost.dot(v) + barrier_value(cp, v);
      double alpha = 1.0;
      while (!cp.strictly_feasible(v + alpha * step) && alpha > 1e-20) alpha *= 0.5;
      while (alpha > 1e-20) {
        const Vector cand = v + alpha * step;
        const double f1 = t * cp.cost.dot(cand) + barrier_value(cp, cand);
        if (f1 <= f0 - 0.25 * alpha * decrement) break;
        alpha *= 0.5;
      }
      if (alpha <= 1e-20) break;
      v += alpha * step;
      if (decrement < 1e-9) break;
    }
    result.gap = theta / t;
    if (result.gap < opts.gap_tol) break;
    t *= opts.mu;
  }
  result.status = Status::Optimal;
  result.x = v;
  result.value = cp.cost.dot(v);
  return result;
}

}  // namespace subrep::solvers
