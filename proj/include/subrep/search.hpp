#pragma once

// Global search over the unit sphere of a subspace. Used for every min-max
// quantity whose optimum has no closed form: a dense angular grid certifies
// results in up to three real dimensions, and deterministic multi-start
// pattern search covers the rest.

#include "subrep/core.hpp"

#include <functional>

namespace subrep {

enum class SearchMethod { DenseSampling, Multistart, ClosedForm };

std::string to_string(SearchMethod m);

struct SearchOptions {
  double grid_step = 0.01;   // radians between neighbouring grid points
  int dense_max_dim = 3;     // largest sphere dimension (real) the grid covers
  bool dense = true;
  int starts = 64;
  int grid_refine = 4;       // best grid points handed to local refinement
  std::uint64_t seed = 0x5eed5eedULL;
  int threads = 0;
  double initial_step = 0.25;
  double final_step = 1e-10;
  int max_evals_per_start = 20000;
};

struct SearchResult {
  double value = 0.0;
  Vector point;          // ambient coordinates, unit in the requested norm
  SearchMethod method = SearchMethod::Multistart;
  int certified_dim = 0; // real sphere dimension covered by the dense grid, 0 if none
  double dense_value = 0.0;      // best grid point after local polishing (inf if no grid)
  double multistart_value = 0.0; // best of the random starts alone
  bool dense_ran = false;
};

using SphereObjective = std::function<double(const Vector&)>;

/// Minimizes f(x) over { x = B u : ||B u||_r = 1 }, B the given basis.
SearchResult minimize_on_sphere(const Matrix& basis, NormKind r, const SphereObjective& f,
                                const SearchOptions& opts = {});

/// Maximizes f over the same sphere.
SearchResult maximize_on_sphere(const Matrix& basis, NormKind r, const SphereObjective& f,
                                const SearchOptions& opts = {});

/// Euclidean-sphere grid directions in R^k (k <= 3) with the given angular step.
std::vector<Vector> sphere_grid(int k, double step);

}  // namespace subrep
