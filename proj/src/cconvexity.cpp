#include "subrep/cconvexity.hpp"

#include "subrep/criteria.hpp"
#include "subrep/parallel.hpp"
#include "subrep/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <set>

namespace subrep {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// One coefficient pattern as a linear map from the stacked vector
// (y_1, ..., y_n) to sum a_k y_k.
struct Pattern {
  Matrix M;
  std::vector<int> signs;
  std::vector<double> phases;
};

Matrix rotation_block(int d, double theta, bool complex) {
  Matrix R = std::cos(theta) * Matrix::Identity(d, d);
  if (complex) {
    for (int i = 0; i + 1 < d; i += 2) {
      R(i, i + 1) -= std::sin(theta);
      R(i + 1, i) += std::sin(theta);
    }
  }
  return R;
}

std::vector<Pattern> sign_patterns(int d, int n) {
  std::vector<Pattern> out;
  for (unsigned mask = 0; mask < (1u << (n - 1)); ++mask) {
    Pattern p;
    p.M = Matrix::Zero(d, d * n);
    for (int k = 0; k < n; ++k) {
      const int s = k == 0 || !(mask & (1u << (k - 1))) ? 1 : -1;
      p.signs.push_back(s);
      p.M.middleCols(k * d, d) = s * Matrix::Identity(d, d);
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<Pattern> phase_patterns(int d, int n, int phases) {
  std::vector<Pattern> out;
  std::size_t total = 1;
  for (int k = 1; k < n; ++k) total *= static_cast<std::size_t>(phases);
  for (std::size_t code = 0; code < total; ++code) {
    Pattern p;
    p.M = Matrix::Zero(d, d * n);
    std::size_t c = code;
    for (int k = 0; k < n; ++k) {
      int j = 0;
      if (k > 0) {
        j = static_cast<int>(c % static_cast<std::size_t>(phases));
        c /= static_cast<std::size_t>(phases);
      }
      const double theta = 2.0 * std::numbers::pi * j / phases;
      p.phases.push_back(theta);
      p.M.middleCols(k * d, d) = rotation_block(d, theta, true);
    }
    out.push_back(std::move(p));
  }
  return out;
}

Vector stack(const std::vector<Vector>& ys) {
  const Eigen::Index d = ys.front().size();
  Vector v(d * static_cast<Eigen::Index>(ys.size()));
  for (std::size_t k = 0; k < ys.size(); ++k) v.segment(static_cast<Eigen::Index>(k) * d, d) = ys[k];
  return v;
}

std::vector<Vector> unstack(const Vector& v, int d, int n) {
  std::vector<Vector> ys;
  for (int k = 0; k < n; ++k) ys.push_back(v.segment(k * d, d));
  return ys;
}

double pattern_max(const AmbientSpace& amb, const std::vector<Pattern>& pats, const Vector& y, std::size_t* arg) {
  double best = -1.0;
  for (std::size_t i = 0; i < pats.size(); ++i) {
    const double v = amb.norm(pats[i].M * y);
    if (v > best) {
      best = v;
      if (arg) *arg = i;
    }
  }
  return best;
}

// The objective is convex and even in each y_k, hence non-decreasing along
// rays: shrinking a vector to the unit sphere never raises it.
void to_unit(const AmbientSpace& amb, std::vector<Vector>& ys) {
  for (auto& y : ys) {
    const double r = amb.norm(y);
    if (r > 0.0) y /= r;
  }
}

// Convex subproblem with each constraint ||y_k|| >= 1 replaced by the
// supporting half-space g_k . y_k >= 1 (an inner approximation).
bool convexified_step(const AmbientSpace& amb, const std::vector<Pattern>& pats, std::vector<Vector>& ys) {
  const int n = static_cast<int>(ys.size());
  const int d = amb.real_dim();
  const int nv = n * d;
  std::vector<Vector> g;
  for (const auto& y : ys) g.push_back(norming_vector(y, amb.dual_space()));

  if (amb.p() == NormKind::L2) {
    solvers::ConeProgram cp(nv + 1);
    cp.cost(nv) = 1.0;
    for (const auto& p : pats) {
      Matrix A = Matrix::Zero(d, nv + 1);
      A.leftCols(nv) = p.M;
      cp.add_cone(std::move(A), Vector::Zero(d), Vector::Unit(nv + 1, nv), 0.0);
    }
    for (int k = 0; k < n; ++k) {
      Vector row = Vector::Zero(nv + 1);
      row.segment(k * d, d) = -g[static_cast<std::size_t>(k)];
      cp.add_le(row, -1.0);
    }
    Vector start(nv + 1);
    start.head(nv) = 1.01 * stack(ys);
    start(nv) = 2.0 * pattern_max(amb, pats, start.head(nv), nullptr) + 1.0;
    solvers::BarrierOptions bo;
    bo.gap_tol = 1e-9;
    const auto r = solvers::solve(cp, start, bo);
    if (r.status != solvers::Status::Optimal) return false;
    ys = unstack(r.x.head(nv), d, n);
    return true;
  }

  solvers::LinearProgram lp(nv + 1);
  lp.cost(nv) = 1.0;
  for (int k = 0; k < n; ++k) {
    Vector row = Vector::Zero(nv + 1);
    row.segment(k * d, d) = -g[static_cast<std::size_t>(k)];
    lp.add_le(row, -1.0);
  }
  for (const auto& p : pats) {
    Matrix A = Matrix::Zero(d, lp.n_vars());
    A.leftCols(nv) = p.M;
    lp.add_norm_le(A, Vector::Zero(d), amb.p(), Vector::Unit(lp.n_vars(), nv), 0.0);
  }
  const auto r = solvers::solve(lp);
  if (r.status != solvers::Status::Optimal) return false;
  ys = unstack(r.x.head(nv), d, n);
  return true;
}

struct StartResult {
  double value = kInf;
  std::vector<Vector> ys;
};

StartResult run_start(const AmbientSpace& amb, const std::vector<Pattern>& pats, int n, std::uint64_t seed,
                      const CConvOptions& opts) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  StartResult res;
  for (int k = 0; k < n; ++k) {
    Vector y(amb.real_dim());
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = gauss(rng);
    res.ys.push_back(y);
  }
  to_unit(amb, res.ys);
  res.value = pattern_max(amb, pats, stack(res.ys), nullptr);
  for (int round = 0; round < opts.max_rounds; ++round) {
    std::vector<Vector> next = res.ys;
    if (!convexified_step(amb, pats, next)) break;
    to_unit(amb, next);
    const double v = pattern_max(amb, pats, stack(next), nullptr);
    const double gain = res.value - v;
    if (v < res.value) {
      res.value = v;
      res.ys = std::move(next);
    }
    if (gain < opts.round_tol) break;
  }
  return res;
}

// Every n-tuple of planar unit vectors on a half-turn grid (the objective is
// even in each vector, so half a turn suffices).
StartResult dense_grid(const AmbientSpace& amb, const std::vector<Pattern>& pats, int n, int steps) {
  const int d = amb.real_dim();
  std::vector<Vector> dirs;
  if (d == 1) {
    dirs.push_back(Vector::Ones(1));
  } else {
    for (int i = 0; i < steps; ++i) {
      const double a = std::numbers::pi * i / steps;
      Vector v(2);
      v << std::cos(a), std::sin(a);
      dirs.push_back(v / amb.norm(v));
    }
  }
  StartResult best;
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  const int m = static_cast<int>(dirs.size());
  std::vector<Vector> ys(static_cast<std::size_t>(n));
  while (true) {
    for (int k = 0; k < n; ++k) ys[static_cast<std::size_t>(k)] = dirs[static_cast<std::size_t>(idx[static_cast<std::size_t>(k)])];
    const double v = pattern_max(amb, pats, stack(ys), nullptr);
    if (v < best.value) {
      best.value = v;
      best.ys = ys;
    }
    int k = 0;
    while (k < n && ++idx[static_cast<std::size_t>(k)] == m) idx[static_cast<std::size_t>(k++)] = 0;
    if (k == n) break;
  }
  return best;
}

CConstantReport estimate(const AmbientSpace& amb, int n, const std::vector<Pattern>& pats, bool complex_phases,
                         const CConvOptions& opts) {
  CConstantReport rep;
  rep.n = n;
  rep.complex_phases = complex_phases;
  const auto starts = parallel_map<StartResult>(static_cast<std::size_t>(std::max(1, opts.starts)), opts.threads,
                                                [&](std::size_t i) {
                                                  return run_start(amb, pats, n, mix_seed(opts.seed, i), opts);
                                                });
  StartResult best;
  for (const auto& s : starts)
    if (s.value < best.value) best = s;
  rep.multistart_value = best.value;
  rep.method = SearchMethod::Multistart;
  rep.dense_value = kInf;
  if (opts.dense && !amb.is_complex() && amb.real_dim() <= 2 && n <= 3) {
    const StartResult grid = dense_grid(amb, pats, n, opts.dense_steps);
    rep.dense_value = grid.value;
    if (grid.value < best.value) {
      best = grid;
      rep.method = SearchMethod::DenseSampling;
    }
  }
  rep.witness_vectors = best.ys;
  std::size_t arg = 0;
  rep.value = pattern_max(amb, pats, stack(best.ys), &arg);
  if (complex_phases)
    rep.witness_phases = pats[arg].phases;
  else
    rep.witness_signs = pats[arg].signs;
  return rep;
}

void check_vectors(const AmbientSpace& amb, const std::vector<Vector>& ys) {
  if (ys.empty()) throw ValidationError("need at least one vector");
  for (const auto& y : ys) amb.check_vector(y, "sign_max");
}

}  // namespace

double sign_max(const AmbientSpace& amb, const std::vector<Vector>& ys, std::vector<int>* signs) {
  check_vectors(amb, ys);
  if (ys.size() > 20) throw BudgetError("sign enumeration is capped at 20 vectors");
  const auto pats = sign_patterns(amb.real_dim(), static_cast<int>(ys.size()));
  std::size_t arg = 0;
  const double v = pattern_max(amb, pats, stack(ys), &arg);
  if (signs) *signs = pats[arg].signs;
  return v;
}

double phase_max(const AmbientSpace& amb, const std::vector<Vector>& ys, int phases, std::vector<double>* argmax) {
  check_vectors(amb, ys);
  if (!amb.is_complex()) throw ValidationError("phase_max needs a complex space");
  if (phases < 2) throw ValidationError("phase grid needs at least two points");
  if (std::pow(static_cast<double>(phases), static_cast<double>(ys.size()) - 1.0) > 4096.0)
    throw BudgetError("phase enumeration exceeds 4096 patterns");
  const auto pats = phase_patterns(amb.real_dim(), static_cast<int>(ys.size()), phases);
  std::size_t arg = 0;
  const double v = pattern_max(amb, pats, stack(ys), &arg);
  if (argmax) *argmax = pats[arg].phases;
  return v;
}

CConstantReport c_constant(const AmbientSpace& amb, int n, const CConvOptions& opts) {
  if (n < 1) throw ValidationError("c_constant needs n >= 1");
  if (n > 12) throw BudgetError("c_constant enumerates 2^n sign patterns; n is capped at 12");
  return estimate(amb, n, sign_patterns(amb.real_dim(), n), false, opts);
}

CConstantReport c_constant_complex(const AmbientSpace& amb, int n, const CConvOptions& opts) {
  if (!amb.is_complex()) throw ValidationError("c_constant_complex needs a complex space");
  if (n < 1) throw ValidationError("c_constant_complex needs n >= 1");
  if (opts.phases < 2) throw ValidationError("phase grid needs at least two points");
  if (std::pow(static_cast<double>(opts.phases), n - 1.0) > 4096.0)
    throw BudgetError("phase enumeration exceeds 4096 patterns");
  return estimate(amb, n, phase_patterns(amb.real_dim(), n, opts.phases), true, opts);
}

RemovalReport removal_experiment(const SubspaceSystem& S, const std::vector<std::vector<int>>& families, int m,
                                 const SearchOptions& opts) {
  if (families.empty()) throw ValidationError("removal_experiment needs at least one family");
  if (m < 1) throw ValidationError("multiplicity bound m must be positive");
  const int N = S.size();
  int max_index = 0;
  for (const auto& I : families)
    for (int k : I) {
      if (k < 1) throw ValidationError("indices are 1-based");
      if (!S.cyclic() && k > N) throw ValidationError("index " + std::to_string(k) + " is past the end of the system");
      max_index = std::max(max_index, k);
    }

  RemovalReport rep;
  rep.horizon = S.cyclic() ? std::max(2 * N, (max_index + N - 1) / N * N) : N;
  std::vector<int> count(static_cast<std::size_t>(rep.horizon + 1), 0);
  for (const auto& I : families) {
    const std::set<int> uniq(I.begin(), I.end());
    for (int k : uniq)
      if (++count[static_cast<std::size_t>(k)] > m)
        throw ValidationError("index " + std::to_string(k) + " lies in more than m families");
  }

  const auto members = S.unrolled(rep.horizon);
  rep.base_margin = apss_margin(SubspaceSystem(S.ambient(), members), opts).value;
  if (rep.base_margin <= 1e-6) throw ValidationError("removal_experiment needs an absolutely representing system");

  auto margin_without = [&](const std::set<int>& drop, int horizon) {
    const auto all = S.unrolled(horizon);
    std::vector<Subspace> kept;
    for (int k = 1; k <= horizon; ++k)
      if (!drop.count(k)) kept.push_back(all[static_cast<std::size_t>(k - 1)]);
    if (kept.empty()) throw ValidationError("removing a family leaves no subspaces");
    return apss_margin(SubspaceSystem(S.ambient(), kept), opts).value;
  };

  for (const auto& I : families) rep.margins.push_back(margin_without(std::set<int>(I.begin(), I.end()), rep.horizon));
  rep.lemma_holds = std::any_of(rep.margins.begin(), rep.margins.end(), [](double v) { return v > 1e-6; });
  if (!rep.lemma_holds) rep.note = "hypothesis violated at finite truncation";

  if (S.cyclic()) {
    // Finite removals that start after the first period.
    rep.tail_holds = true;
    for (const auto& I : families) {
      std::set<int> shifted;
      for (int k : I) shifted.insert(k + N);
      const int h = std::max(rep.horizon, (*shifted.rbegin() + N - 1) / N * N);
      rep.tail_margins.push_back(margin_without(shifted, h));
      rep.tail_holds = rep.tail_holds && rep.tail_margins.back() > 1e-6;
    }
  }
  return rep;
}

}  // namespace subrep
