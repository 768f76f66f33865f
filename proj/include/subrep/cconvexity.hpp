#pragma once

// Sign-averaging constants C(n, Y): the least possible value of
// max_{signs} ||sum a_k y_k|| over n vectors of norm at least one, and the
// removal experiment for periodic systems.

#include "subrep/linalg.hpp"
#include "subrep/search.hpp"

#include <string>
#include <vector>

namespace subrep {

struct CConvOptions {
  int starts = 128;
  int max_rounds = 40;      // convexification rounds per start
  double round_tol = 1e-10; // stop a start once a round gains less than this
  std::uint64_t seed = 0xc0c0ULL;
  int threads = 0;
  int phases = 8;           // phase grid for the complex constant
  bool dense = true;        // grid oracle for real dim <= 2, n <= 3
  int dense_steps = 120;    // grid points per vector over a half turn
};

struct CConstantReport {
  int n = 0;
  double value = 0.0;
  std::vector<Vector> witness_vectors;
  std::vector<int> witness_signs;      // +-1, real constant only
  std::vector<double> witness_phases;  // radians, complex constant only
  SearchMethod method = SearchMethod::Multistart;
  double dense_value = 0.0;            // inf when the grid did not run
  double multistart_value = 0.0;
  bool complex_phases = false;
};

/// max over sign patterns of ||sum a_k y_k||, exact by enumeration. The
/// first sign is fixed to +1 (the norm is even). `signs` receives the argmax.
double sign_max(const AmbientSpace& amb, const std::vector<Vector>& ys, std::vector<int>* signs = nullptr);

/// Same over phases a_k = exp(2 pi i j / phases), a_1 = 1; complex spaces only.
/// A lower estimate of the maximum over the unit circle.
double phase_max(const AmbientSpace& amb, const std::vector<Vector>& ys, int phases,
                 std::vector<double>* argmax = nullptr);

/// Estimate of C(n, Y) for Y the given space; 1 <= n <= 12.
CConstantReport c_constant(const AmbientSpace& amb, int n, const CConvOptions& opts = {});

/// Complex constant with the phase grid in place of signs; 8^(n-1) <= 4096.
CConstantReport c_constant_complex(const AmbientSpace& amb, int n, const CConvOptions& opts = {});

struct RemovalReport {
  int horizon = 0;
  double base_margin = 0.0;
  std::vector<double> margins;       // apss margin with family j removed
  bool lemma_holds = false;          // some margin > 1e-6
  std::vector<double> tail_margins;  // family j shifted past the first period
  bool tail_holds = false;
  std::string note;
};

/// Removes each index family from the periodic system (evaluated on a finite
/// horizon) and measures the apss margin of what is left. Every index may
/// belong to at most m families.
RemovalReport removal_experiment(const SubspaceSystem& S, const std::vector<std::vector<int>>& families, int m,
                                 const SearchOptions& opts = {});

}  // namespace subrep
