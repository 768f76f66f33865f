#pragma once

#include "subrep/linalg.hpp"
#include "subrep/search.hpp"
#include "subrep/solvers.hpp"

#include <optional>
#include <string>
#include <vector>

namespace subrep {

struct SolverTrace {
  std::string solver;  // "barrier", "elimination", "simplex", "trivial"
  std::string status;
  int iterations = 0;
};

struct ThetaOptions {
  /// Cyclic systems are unrolled to this many periods.
  int horizon_periods = 3;
  solvers::BarrierOptions barrier = default_barrier();
  /// Sphere search used by theta_bar. Grid step is raised to
  /// `grid_step_3d` when the sphere is two-dimensional (ambient dim 3).
  SearchOptions search = default_search();
  double grid_step_3d = 0.05;

  static solvers::BarrierOptions default_barrier() {
    solvers::BarrierOptions b;
    b.gap_tol = 1e-9;
    b.mu = 20.0;
    return b;
  }
  static SearchOptions default_search() {
    SearchOptions s;
    s.starts = 16;
    s.grid_refine = 2;
    s.final_step = 1e-6;
    s.max_evals_per_start = 2000;
    return s;
  }
};

/// Number of members a tuple may draw from: the list length for finite
/// systems, horizon_periods periods for cyclic ones.
int theta_horizon(const SubspaceSystem& S, const ThetaOptions& opts = {});

struct TupleTheta {
  double value = 0.0;  // max_k ||x_1 + ... + x_k||
  Vector sum;          // Sigma(P)
};

/// P[k] must lie in the (k+1)-th member of S.
TupleTheta theta_tuple(const SubspaceSystem& S, const std::vector<Vector>& P);

struct ThetaSolve {
  double value = 0.0;  // +inf when no tuple reaches the eps-ball around x
  bool feasible = true;
  std::vector<Vector> tuple;  // an optimal P (empty when infeasible)
  SolverTrace trace;
};

/// inf{ Theta(P) : P = (x_1..x_n), x_k in X_k, ||Sigma(P) - x|| <= eps }.
/// Second-order cone program for p = 2, linear program otherwise.
ThetaSolve theta_x_eps(const SubspaceSystem& S, const Vector& x, double eps, int n,
                       const ThetaOptions& opts = {});

struct ThetaStar {
  double value = 0.0;
  std::vector<double> eps;     // absolute eps values, decreasing
  std::vector<double> values;  // min over n of theta_x_eps at each eps
  bool monotone = true;
  std::string diagnostic;
};

/// Theta(x, eps) at eps = 1e-1 .. 1e-4 times ||x||, minimized over the tuple
/// length; the value is the one at the smallest eps.
ThetaStar theta_star(const SubspaceSystem& S, const Vector& x, const ThetaOptions& opts = {});

struct ThetaBar {
  double value = 0.0;  // lower estimate of the supremum
  Vector witness;
  SearchMethod method = SearchMethod::Multistart;
  int certified_dim = 0;
  double dense_value = 0.0;
  double multistart_value = 0.0;
  bool spanning = true;
};

/// max over the unit sphere of Theta(x, 1e-4 ||x||) at full tuple length.
ThetaBar theta_bar(const SubspaceSystem& S, const ThetaOptions& opts = {});

struct PsrEquivalence {
  bool spanning = false;         // item 1
  double alpha = 0.5;
  double B = 0.0;                // observed sup of Theta(x, alpha ||x||) / ||x||
  bool bounded = false;          // item 2
  bool star_finite = false;      // item 3
  double theta_bar = 0.0;
  bool bar_finite = false;       // item 4
  int samples = 0;
  int lemma_violations = 0;      // Theta*(x) > B/(1-alpha) ||x|| + 1e-4
  double lemma_min_slack = 0.0;
  bool consistent = false;
};

PsrEquivalence psr_equivalence_report(const SubspaceSystem& S, int samples = 100, std::uint64_t seed = 42,
                                      const ThetaOptions& opts = {});

struct PsrStability {
  double sum_gap = 0.0;
  double theta_bar = 0.0;
  double budget = 0.0;  // 1 / (2 theta_bar)
  bool within_budget = false;
  bool perturbed_spans = false;
  double perturbed_margin = 0.0;
  bool holds = true;  // vacuous outside the budget
  double alpha = 0.0;
  double B = 0.0;
  int certificate_samples = 0;
  int certificate_failures = 0;
};

PsrStability psr_stability_check(const SubspaceSystem& S, const SubspaceSystem& S_tilde,
                                 const ThetaOptions& opts = {}, int certificate_samples = 20);
/// Same check with a theta_bar value computed elsewhere.
PsrStability psr_stability_check(const SubspaceSystem& S, const SubspaceSystem& S_tilde, double theta_bar_value,
                                 const ThetaOptions& opts = {}, int certificate_samples = 20);

struct ApssStability {
  double eps = 0.0;
  double d = 0.0;
  double bound = 0.0;  // (eps - d) / (1 + d)
  double measured = 0.0;
  bool within_budget = false;
  bool holds = true;

  /// "id,eps,d,bound,measured"
  std::string csv_row(const std::string& id) const;
};

ApssStability apss_stability_check(const SubspaceSystem& S, const SubspaceSystem& S_tilde,
                                   const SearchOptions& opts = {});

/// Aggregate of the theta quantities for one (x, eps, n) query.
struct ThetaReport {
  std::optional<double> theta_tuple_value;
  std::optional<double> theta_x_eps_value;
  std::optional<double> theta_star_value;
  std::optional<double> theta_bar_value;
  int tuple_length = 0;
  std::vector<SolverTrace> solver_trace;
};

ThetaReport theta_report(const SubspaceSystem& S, const Vector& x, double eps, int n, bool with_bar,
                         const ThetaOptions& opts = {});

}  // namespace subrep
