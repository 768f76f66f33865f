#pragma once

#include "subrep/linalg.hpp"

#include <string>
#include <utility>
#include <vector>

namespace subrep {

/// x = sum of components, each tagged with the 1-based index of the subspace
/// it belongs to. residual_trace[t] is the norm of the remainder after the
/// first t+1 terms.
struct Decomposition {
  struct Term {
    int index = 0;
    Vector component;
  };
  std::vector<Term> terms;
  std::vector<double> residual_trace;
  Vector target;
  /// Largest observed step ratio ||y_{k+1}|| / ||y_k|| (greedy only).
  double max_ratio = 0.0;

  Vector partial_sum(std::size_t count) const;
};

/// Raised when the greedy step stops contracting. Carries the trace so far.
class StagnationError : public NumericError {
public:
  StagnationError(const std::string& what, Decomposition partial)
      : NumericError(what), partial_(std::move(partial)) {}
  const Decomposition& partial() const { return partial_; }

private:
  Decomposition partial_;
};

/// Greedy pursuit: at each step take the best approximant of the current
/// residual from the nearest subspace (smallest index on ties).
Decomposition greedy_decompose(const SubspaceSystem& S, const Vector& x, int max_terms, double stop_tol);

/// x_n = P_{X_n} E_{n-1} x with E_n = (I - P_{X_n}) ... (I - P_{X_1}).
/// Euclidean only. Finite systems are padded with {0} past their end.
Decomposition alternating_decompose(const SubspaceSystem& S, const Vector& x, int n_steps);

/// Cyclic system X_k = H_{i(k)}^perp. The map must use every index, and
/// neighbouring entries (including last and first) must differ.
SubspaceSystem halperin_system(const std::vector<Subspace>& H, const std::vector<int>& index_map);

/// Parameters for the replication construction.
struct ReplicationSchedule {
  std::vector<Subspace> generators;
  int stages = 6;
  int n_cap = 64;
  int r_cap = 4096;
  /// Fraction of the stage slack spent on realizing pieces in the system,
  /// in (0, 1).
  double closeness = 0.5;
  /// Each generator must be within this gap of some member of the period.
  double recurrence_tol = 1e-9;
};

struct PrefixDeviation {
  std::size_t prefix = 0;  // number of terms summed
  int stage = 1;
  double delta = 0.0;
  double bound = 0.0;  // 6 * 2^{-stage}
};

struct ReplicationResult {
  Decomposition decomposition;
  std::vector<PrefixDeviation> deviations;
  /// (N(k), r(k)) per executed stage.
  std::vector<std::pair<int, int>> stage_sizes;
  double scale = 1.0;  // x was multiplied by this before running
};

/// Series x = sum y_{k,i,j} with every piece placed in a later member of the
/// cyclic system than the previous one. Euclidean only.
ReplicationResult replication_decompose(const SubspaceSystem& S, const Vector& x,
                                        const ReplicationSchedule& schedule);

struct RepresentationReport {
  double final_residual = 0.0;
  double sup_partial_sum = 0.0;
  double absolute_sum = 0.0;
  std::vector<double> membership;
  double max_membership = 0.0;
  bool members_ok = true;  // every membership distance <= 1e-9
  bool trace_ok = true;    // residual_trace matches the partial sums
};

RepresentationReport verify_representation(const SubspaceSystem& S, const Decomposition& dec);

/// z_k = sum of the terms with index k, ordered by k.
std::vector<std::pair<int, Vector>> group_by_subspace(const Decomposition& dec);

}  // namespace subrep
