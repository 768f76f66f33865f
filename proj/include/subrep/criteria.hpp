#pragma once

#include "subrep/linalg.hpp"
#include "subrep/search.hpp"

#include <vector>

namespace subrep {

/// Composition of {1..n} into consecutive blocks. The last block stands for
/// the infinite tail of the sequence when `tail` is set.
struct Partition {
  std::vector<std::vector<int>> blocks;
  bool tail = true;
};

/// Estimate of a min-max margin together with the witness that attains it.
/// For functional margins the witness is a unit functional (dual norm); for
/// lambda_S it is a unit vector of the space.
struct MarginReport {
  double value = 0.0;
  Vector witness;
  SearchMethod method = SearchMethod::ClosedForm;
  int certified_dim = 0;  // sphere dimension covered by the dense grid, 0 if none
  bool defined = true;
  bool spanning = true;   // the subspaces of the system sum to the whole space
  double dense_value = 0.0;
  double multistart_value = 0.0;
  /// Minimizing partition (psr_margin) or split (schauder_block_margin).
  std::vector<std::vector<int>> witness_blocks;
};

/// All 2^{n-1} compositions, the unsplit one first. Rejects n > 20.
std::vector<Partition> sequential_partitions(int n);

/// Sum over blocks of ||phi restricted to the span of the block||.
double F1(const SubspaceSystem& S, const Partition& pi, const Functional& phi);

/// inf over unit phi of min over sequential partitions of F1. The inner
/// minimum is an exact dynamic program over block end points.
MarginReport psr_margin(const SubspaceSystem& S, const SearchOptions& opts = {});
/// The psr objective at a given functional, with its minimizing partition.
double psr_objective(const SubspaceSystem& S, const Vector& phi, Partition* argmin = nullptr);

/// min over unit phi of max_k ||phi|_{X_k}||.
MarginReport apss_margin(const SubspaceSystem& S, const SearchOptions& opts = {});
double apss_objective(const SubspaceSystem& S, const Vector& phi);

/// max over unit x of min_k d(x, X_k).
MarginReport lambda_S(const SubspaceSystem& S, const SearchOptions& opts = {});
double lambda_objective(const SubspaceSystem& S, const Vector& x);

/// sqrt(1 + tau^2 - 2 tau eps).
double net_radius(double tau, double eps);

struct NetCheck {
  double covering_radius = 0.0;  // measured directly on the unit sphere
  double apss = 0.0;
  double predicted_radius = 0.0;  // net_radius(tau, apss)
  bool is_net = false;            // covering_radius <= lambda
  bool predicted_net = false;     // apss >= (1 + tau^2 - lambda^2) / (2 tau)
};

/// Measures how well tau * D(S) covers the unit sphere (Euclidean only) and
/// compares with the prediction from the apss margin.
NetCheck check_net(const SubspaceSystem& S, double tau, double lambda, const SearchOptions& opts = {});

/// inf over splits n and unit phi in sum_{k<=n} X_k', psi in sum_{k>n} X_k'
/// of ||phi + psi|| / ||phi||, where X_k' are the annihilators. Reported as
/// undefined when every annihilator is trivial.
MarginReport schauder_block_margin(const SubspaceSystem& S, const SearchOptions& opts = {});

/// min over unit phi in Y^perp of max_k ||phi|_{X_k}||.
MarginReport finite_codim_margin(const SubspaceSystem& S, const Subspace& Y, const SearchOptions& opts = {});

struct DeltaMembership {
  bool member = false;
  double min_distance = 0.0;
  int argmin = 1;
  std::vector<double> profile;  // d(x, X_k) over one period
};

/// For a cyclic system liminf_k d(x, X_k) is the minimum over one period.
DeltaMembership delta_membership(const SubspaceSystem& S, const Vector& x, double tol);

}  // namespace subrep
