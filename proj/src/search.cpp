#include "subrep/search.hpp"

#include "subrep/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace subrep {

std::string to_string(SearchMethod m) {
  switch (m) {
    case SearchMethod::DenseSampling: return "dense_sampling";
    case SearchMethod::Multistart: return "multistart";
    case SearchMethod::ClosedForm: return "closed_form";
  }
  return "unknown";
}

std::vector<Vector> sphere_grid(int k, double step) {
  std::vector<Vector> pts;
  if (k == 1) {
    pts.push_back(Vector::Constant(1, 1.0));
    pts.push_back(Vector::Constant(1, -1.0));
  } else if (k == 2) {
    const int n = static_cast<int>(std::ceil(2.0 * std::numbers::pi / step));
    pts.reserve(n);
    for (int i = 0; i < n; ++i) {
      const double a = 2.0 * std::numbers::pi * i / n;
      pts.push_back((Vector(2) << std::cos(a), std::sin(a)).finished());
    }
  } else if (k == 3) {
    const int n_polar = static_cast<int>(std::ceil(std::numbers::pi / step));
    for (int i = 0; i <= n_polar; ++i) {
      const double polar = std::numbers::pi * i / n_polar;
      const double s = std::sin(polar);
      const int n_az = std::max(1, static_cast<int>(std::ceil(2.0 * std::numbers::pi * s / step)));
      for (int j = 0; j < n_az; ++j) {
        const double az = 2.0 * std::numbers::pi * j / n_az;
        pts.push_back((Vector(3) << s * std::cos(az), s * std::sin(az), std::cos(polar)).finished());
      }
    }
  } else {
    throw ValidationError("dense sphere grid supports dimensions 1 to 3");
  }
  return pts;
}

namespace {

struct Candidate {
  double value = std::numeric_limits<double>::infinity();
  Vector u;
  bool from_grid = false;
};

class SphereProblem {
public:
  SphereProblem(const Matrix& basis, NormKind r, const SphereObjective& f)
      : basis_(basis), r_(r), f_(f) {}

  int dim() const { return static_cast<int>(basis_.cols()); }

  Vector point(const Vector& u) const {
    Vector x = basis_ * u;
    const double n = norm(x, r_);
    return n > 0.0 ? Vector(x / n) : x;
  }

  double eval(const Vector& u) const {
    const Vector x = basis_ * u;
    const double n = norm(x, r_);
    if (!(n > 0.0)) return std::numeric_limits<double>::infinity();
    return f_(x / n);
  }

  // Opportunistic compass search with a few random directions per sweep.
  Candidate refine(Vector u, double step, std::uint64_t seed, const SearchOptions& opts) const {
    const int k = dim();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    u.normalize();
    double fu = eval(u);
    int evals = 1;
    const double cap = step;
    std::vector<Vector> dirs;
    while (step > opts.final_step && evals < opts.max_evals_per_start) {
      dirs.clear();
      for (int i = 0; i < k; ++i) {
        dirs.push_back(Vector::Unit(k, i));
        dirs.push_back(-Vector::Unit(k, i));
      }
      for (int i = 0; i < k; ++i) {
        Vector d(k);
        for (int j = 0; j < k; ++j) d(j) = gauss(rng);
        d.normalize();
        dirs.push_back(d);
        dirs.push_back(-d);
      }
      bool improved = false;
      for (const auto& d : dirs) {
        Vector cand = u + step * d;
        const double cn = cand.norm();
        if (!(cn > 0.0)) continue;
        cand /= cn;
        const double fc = eval(cand);
        ++evals;
        if (fc < fu) {
          u = std::move(cand);
          fu = fc;
          improved = true;
          break;
        }
      }
      step = improved ? std::min(2.0 * step, cap) : 0.5 * step;
    }
    return {fu, u, false};
  }

private:
  const Matrix& basis_;
  NormKind r_;
  const SphereObjective& f_;
};

bool better(const Candidate& a, const Candidate& b) { return a.value < b.value; }

}  // namespace

SearchResult minimize_on_sphere(const Matrix& basis, NormKind r, const SphereObjective& f,
                                const SearchOptions& opts) {
  const int k = static_cast<int>(basis.cols());
  if (k == 0) throw ValidationError("unit sphere of the trivial subspace is empty");
  SphereProblem problem(basis, r, f);
  const double inf = std::numeric_limits<double>::infinity();

  SearchResult result;
  result.dense_value = inf;
  result.multistart_value = inf;

  Candidate best;
  std::vector<Candidate> seeds;
  if (opts.dense && k <= opts.dense_max_dim) {
    const std::vector<Vector> grid = sphere_grid(k, opts.grid_step);
    constexpr std::size_t kChunk = 2048;
    const std::size_t n_chunks = (grid.size() + kChunk - 1) / kChunk;
    const int keep = std::max(1, opts.grid_refine);
    using Top = std::vector<std::pair<double, std::size_t>>;
    auto tops = parallel_map<Top>(n_chunks, opts.threads, [&](std::size_t c) {
      Top top;
      const std::size_t end = std::min(grid.size(), (c + 1) * kChunk);
      for (std::size_t i = c * kChunk; i < end; ++i) top.emplace_back(problem.eval(grid[i]), i);
      const std::size_t m = std::min<std::size_t>(keep, top.size());
      std::partial_sort(top.begin(), top.begin() + m, top.end());
      top.resize(m);
      return top;
    });
    Top merged;
    for (const auto& t : tops) merged.insert(merged.end(), t.begin(), t.end());
    std::sort(merged.begin(), merged.end());
    if (merged.size() > static_cast<std::size_t>(keep)) merged.resize(keep);
    for (const auto& [v, i] : merged) seeds.push_back({v, grid[i], true});
    if (!merged.empty()) {
      best = seeds.front();
      result.dense_value = best.value;
    }
    result.dense_ran = true;
    result.certified_dim = k;
  }

  // Grid-seeded refinements first, then random starts; order fixes tie-breaks.
  struct Start {
    Vector u;
    double step;
    bool from_grid;
  };
  std::vector<Start> starts;
  for (const auto& s : seeds) starts.push_back({s.u, std::max(opts.grid_step, 1e-6), true});
  for (int i = 0; i < opts.starts; ++i) {
    std::mt19937_64 rng(mix_seed(opts.seed, static_cast<std::uint64_t>(i)));
    std::normal_distribution<double> gauss;
    Vector u(k);
    for (int j = 0; j < k; ++j) u(j) = gauss(rng);
    if (u.norm() == 0.0) u(0) = 1.0;
    starts.push_back({u, opts.initial_step, false});
  }
  auto refined = parallel_map<Candidate>(starts.size(), opts.threads, [&](std::size_t i) {
    Candidate c = problem.refine(starts[i].u, starts[i].step,
                                 mix_seed(opts.seed ^ 0xa5a5a5a5ULL, static_cast<std::uint64_t>(i)), opts);
    c.from_grid = starts[i].from_grid;
    return c;
  });
  for (const auto& c : refined) {
    if (c.from_grid)
      result.dense_value = std::min(result.dense_value, c.value);
    else
      result.multistart_value = std::min(result.multistart_value, c.value);
    if (better(c, best)) best = c;
  }
  if (!std::isfinite(best.value) && best.u.size() == 0) best.u = Vector::Unit(k, 0);

  result.value = best.value;
  result.point = problem.point(best.u);
  result.method = best.from_grid ? SearchMethod::DenseSampling : SearchMethod::Multistart;
  return result;
}

SearchResult maximize_on_sphere(const Matrix& basis, NormKind r, const SphereObjective& f,
                                const SearchOptions& opts) {
  SphereObjective neg = [&f](const Vector& x) { return -f(x); };
  SearchResult res = minimize_on_sphere(basis, r, neg, opts);
  res.value = -res.value;
  res.dense_value = -res.dense_value;
  res.multistart_value = -res.multistart_value;
  return res;
}

}  // namespace subrep
