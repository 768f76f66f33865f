#include "subrep/theta.hpp"

#include "subrep/criteria.hpp"
#include "subrep/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace subrep {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Bases of the first n members laid side by side: A = [B_1 ... B_n].
struct Stacked {
  Matrix A;
  std::vector<Eigen::Index> offset;  // first column of each member
  std::vector<Eigen::Index> width;
};

Stacked stack_members(const SubspaceSystem& S, int n) {
  Stacked st;
  const std::vector<Subspace> seq = S.unrolled(n);
  Eigen::Index cols = 0;
  for (const auto& X : seq) cols += X.basis().cols();
  st.A.resize(S.ambient().real_dim(), cols);
  Eigen::Index at = 0;
  for (const auto& X : seq) {
    st.offset.push_back(at);
    st.width.push_back(X.basis().cols());
    st.A.middleCols(at, X.basis().cols()) = X.basis();
    at += X.basis().cols();
  }
  return st;
}

// Prefix operator c -> x_1 + ... + x_k.
Matrix prefix(const Stacked& st, int k) {
  const Eigen::Index used = st.offset[static_cast<std::size_t>(k - 1)] + st.width[static_cast<std::size_t>(k - 1)];
  Matrix P = Matrix::Zero(st.A.rows(), st.A.cols());
  P.leftCols(used) = st.A.leftCols(used);
  return P;
}

std::vector<Vector> split(const Stacked& st, const Vector& c) {
  std::vector<Vector> out;
  for (std::size_t k = 0; k < st.offset.size(); ++k)
    out.push_back(st.A.middleCols(st.offset[k], st.width[k]) * c.segment(st.offset[k], st.width[k]));
  return out;
}

double tuple_value(const std::vector<Vector>& P, const AmbientSpace& amb) {
  double best = 0.0;
  Vector s = Vector::Zero(amb.real_dim());
  for (const auto& x : P) {
    s += x;
    best = std::max(best, amb.norm(s));
  }
  return best;
}

Matrix with_column(const Matrix& M, Eigen::Index total_cols) {
  Matrix out = Matrix::Zero(M.rows(), total_cols);
  out.leftCols(M.cols()) = M;
  return out;
}

ThetaSolve infeasible(const std::string& solver) {
  ThetaSolve r;
  r.value = kInf;
  r.feasible = false;
  r.trace = {solver, "infeasible", 0};
  return r;
}

ThetaSolve euclidean(const AmbientSpace& amb, const Stacked& st, const Vector& x, double eps, int n,
                     const ThetaOptions& opts) {
  const Eigen::Index m = st.A.cols();
  const Vector c0 = st.A.completeOrthogonalDecomposition().solve(x);
  const double r0 = (st.A * c0 - x).norm();
  const double slack = 1e-10 * std::max(1.0, x.norm());
  if (r0 > eps + slack) return infeasible("barrier");

  ThetaSolve out;
  if (r0 >= eps - slack) {
    // The eps-ball only touches the range of A: fix Sigma(P) = A c0 and
    // optimize over the null space of A.
    Eigen::JacobiSVD<Matrix> svd(st.A, Eigen::ComputeFullV);
    const Vector& sv = svd.singularValues();
    const double cut = 1e-10 * std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv(rank) > cut) ++rank;
    const Matrix N = svd.matrixV().rightCols(m - rank);
    if (N.cols() == 0) {
      out.tuple = split(st, c0);
      out.value = tuple_value(out.tuple, amb);
      out.trace = {"elimination", "optimal", 0};
      return out;
    }
    const Eigen::Index nz = N.cols();
    solvers::ConeProgram cp(static_cast<int>(nz + 1));
    cp.cost(nz) = 1.0;
    double t0 = 0.0;
    for (int k = 1; k <= n; ++k) {
      const Matrix Pk = prefix(st, k);
      const Vector b = Pk * c0;
      cp.add_cone(with_column(Pk * N, nz + 1), b, Vector::Unit(nz + 1, nz), 0.0);
      t0 = std::max(t0, b.norm());
    }
    Vector start = Vector::Zero(nz + 1);
    start(nz) = 2.0 * t0 + 1.0;
    const auto r = solvers::solve(cp, start, opts.barrier);
    if (r.status != solvers::Status::Optimal) throw NumericError("theta: barrier solver hit its iteration cap");
    out.tuple = split(st, c0 + N * r.x.head(nz));
    out.value = tuple_value(out.tuple, amb);
    out.trace = {"elimination", "optimal", r.newton_steps};
    return out;
  }

  solvers::ConeProgram cp(static_cast<int>(m + 1));
  cp.cost(m) = 1.0;
  double t0 = 0.0;
  for (int k = 1; k <= n; ++k) {
    const Matrix Pk = prefix(st, k);
    cp.add_cone(with_column(Pk, m + 1), Vector::Zero(amb.real_dim()), Vector::Unit(m + 1, m), 0.0);
    t0 = std::max(t0, (Pk * c0).norm());
  }
  cp.add_cone(with_column(st.A, m + 1), -x, Vector::Zero(m + 1), eps);
  Vector start(m + 1);
  start.head(m) = c0;
  start(m) = 2.0 * t0 + 1.0;
  const auto r = solvers::solve(cp, start, opts.barrier);
  if (r.status != solvers::Status::Optimal) throw NumericError("theta: barrier solver hit its iteration cap");
  out.tuple = split(st, r.x.head(m));
  out.value = tuple_value(out.tuple, amb);
  out.trace = {"barrier", "optimal", r.newton_steps};
  return out;
}

ThetaSolve polyhedral(const AmbientSpace& amb, const Stacked& st, const Vector& x, double eps, int n) {
  const Eigen::Index m = st.A.cols();
  solvers::LinearProgram lp(static_cast<int>(m + 1));
  lp.cost(m) = 1.0;
  auto pad = [&](const Matrix& M) { return with_column(M, lp.n_vars()); };
  for (int k = 1; k <= n; ++k) {
    const Matrix Pk = prefix(st, k);
    lp.add_norm_le(pad(Pk), Vector::Zero(amb.real_dim()), amb.p(), Vector::Unit(lp.n_vars(), m), 0.0);
  }
  lp.add_norm_le(pad(st.A), -x, amb.p(), Vector::Zero(lp.n_vars()), eps);
  const auto r = solvers::solve(lp);
  if (r.status == solvers::Status::Infeasible) return infeasible("simplex");
  if (r.status != solvers::Status::Optimal) throw NumericError("theta: simplex did not reach an optimum");
  ThetaSolve out;
  out.tuple = split(st, r.x.head(m));
  out.value = tuple_value(out.tuple, amb);
  out.trace = {"simplex", "optimal", r.iterations};
  return out;
}

Vector unit_sample(const AmbientSpace& amb, std::uint64_t seed, std::size_t i) {
  std::mt19937_64 rng(mix_seed(seed, i));
  std::normal_distribution<double> g;
  Vector v(amb.real_dim());
  for (Eigen::Index j = 0; j < v.size(); ++j) v(j) = g(rng);
  return v / amb.norm(v);
}

void require_pair(const SubspaceSystem& S, const SubspaceSystem& T) {
  if (!(S.ambient() == T.ambient())) throw ValidationError("perturbed system lives in another space");
  if (S.size() != T.size()) throw ValidationError("perturbed system has a different length");
  if (S.cyclic() != T.cyclic()) throw ValidationError("perturbed system differs in cyclicity");
}

}  // namespace

int theta_horizon(const SubspaceSystem& S, const ThetaOptions& opts) {
  return S.cyclic() ? S.size() * std::max(1, opts.horizon_periods) : S.size();
}

TupleTheta theta_tuple(const SubspaceSystem& S, const std::vector<Vector>& P) {
  const AmbientSpace& amb = S.ambient();
  if (P.empty()) throw ValidationError("theta_tuple needs at least one term");
  if (!S.cyclic() && static_cast<int>(P.size()) > S.size())
    throw ValidationError("tuple is longer than the system");
  for (std::size_t k = 0; k < P.size(); ++k) {
    amb.check_vector(P[k], "theta_tuple");
    const double d = distance(P[k], S.at(static_cast<int>(k) + 1));
    if (d > 1e-9 * std::max(1.0, amb.norm(P[k])))
      throw ValidationError("tuple term " + std::to_string(k + 1) + " is not in its subspace (distance " +
                            std::to_string(d) + ")");
  }
  TupleTheta out;
  out.value = tuple_value(P, amb);
  out.sum = Vector::Zero(amb.real_dim());
  for (const auto& x : P) out.sum += x;
  return out;
}

ThetaSolve theta_x_eps(const SubspaceSystem& S, const Vector& x, double eps, int n, const ThetaOptions& opts) {
  const AmbientSpace& amb = S.ambient();
  amb.check_vector(x, "theta_x_eps");
  if (!(eps >= 0.0)) throw ValidationError("theta_x_eps needs eps >= 0");
  const int L = theta_horizon(S, opts);
  if (n < 1 || n > L) throw ValidationError("tuple length must lie in 1.." + std::to_string(L));
  const Stacked st = stack_members(S, n);
  if (st.A.cols() == 0) {
    if (amb.norm(x) > eps) return infeasible("trivial");
    ThetaSolve out;
    out.tuple.assign(static_cast<std::size_t>(n), Vector::Zero(amb.real_dim()));
    out.value = 0.0;
    out.trace = {"trivial", "optimal", 0};
    return out;
  }
  return amb.p() == NormKind::L2 ? euclidean(amb, st, x, eps, n, opts) : polyhedral(amb, st, x, eps, n);
}

ThetaStar theta_star(const SubspaceSystem& S, const Vector& x, const ThetaOptions& opts) {
  const AmbientSpace& amb = S.ambient();
  amb.check_vector(x, "theta_star");
  ThetaStar out;
  const double xn = amb.norm(x);
  if (xn == 0.0) return out;
  const int L = theta_horizon(S, opts);
  for (double rel : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const double eps = rel * xn;
    double best = kInf;
    for (int n = 1; n <= L; ++n) best = std::min(best, theta_x_eps(S, x, eps, n, opts).value);
    out.eps.push_back(eps);
    out.values.push_back(best);
  }
  for (std::size_t i = 1; i < out.values.size(); ++i) {
    if (std::isinf(out.values[i - 1])) continue;
    if (out.values[i] < out.values[i - 1] - 1e-5 * std::max(1.0, xn)) {
      out.monotone = false;
      std::ostringstream msg;
      msg << "Theta(x, eps) decreased from " << out.values[i - 1] << " to " << out.values[i] << " as eps fell to "
          << out.eps[i];
      out.diagnostic = msg.str();
    }
  }
  out.value = out.values.back();
  return out;
}

ThetaBar theta_bar(const SubspaceSystem& S, const ThetaOptions& opts) {
  const AmbientSpace& amb = S.ambient();
  const int d = amb.real_dim();
  ThetaBar out;
  out.spanning = S.spans();
  if (!out.spanning) {
    out.value = kInf;
    out.method = SearchMethod::ClosedForm;
    out.dense_value = out.multistart_value = kInf;
    return out;
  }
  const int L = theta_horizon(S, opts);
  SearchOptions so = opts.search;
  if (d == 3) so.grid_step = std::max(so.grid_step, opts.grid_step_3d);
  const SearchResult r = maximize_on_sphere(
      Matrix::Identity(d, d), amb.p(),
      [&](const Vector& x) { return theta_x_eps(S, x, 1e-4 * amb.norm(x), L, opts).value; }, so);
  out.value = r.value;
  out.witness = r.point;
  out.method = r.method;
  out.certified_dim = r.dense_ran ? r.certified_dim : 0;
  out.dense_value = r.dense_value;
  out.multistart_value = r.multistart_value;
  return out;
}

PsrEquivalence psr_equivalence_report(const SubspaceSystem& S, int samples, std::uint64_t seed,
                                      const ThetaOptions& opts) {
  const AmbientSpace& amb = S.ambient();
  const int L = theta_horizon(S, opts);
  PsrEquivalence rep;
  rep.spanning = S.spans();
  rep.samples = samples;
  std::vector<Vector> xs;
  for (int i = 0; i < samples; ++i) xs.push_back(unit_sample(amb, seed, static_cast<std::size_t>(i)));

  auto per_sample = parallel_map<std::pair<double, double>>(xs.size(), opts.search.threads, [&](std::size_t i) {
    const double b = theta_x_eps(S, xs[i], rep.alpha * amb.norm(xs[i]), L, opts).value / amb.norm(xs[i]);
    return std::make_pair(b, theta_star(S, xs[i], opts).value);
  });
  rep.B = 0.0;
  rep.star_finite = true;
  for (const auto& [b, star] : per_sample) {
    rep.B = std::max(rep.B, b);
    rep.star_finite = rep.star_finite && std::isfinite(star);
  }
  rep.bounded = std::isfinite(rep.B);
  rep.theta_bar = theta_bar(S, opts).value;
  rep.bar_finite = std::isfinite(rep.theta_bar);
  rep.lemma_min_slack = kInf;
  if (rep.bounded) {
    const double cap = rep.B / (1.0 - rep.alpha);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double slack = cap * amb.norm(xs[i]) - per_sample[i].second;
      rep.lemma_min_slack = std::min(rep.lemma_min_slack, slack);
      if (slack < -1e-4) ++rep.lemma_violations;
    }
  }
  const bool all = rep.spanning && rep.bounded && rep.star_finite && rep.bar_finite;
  const bool none = !rep.spanning && !rep.bounded && !rep.star_finite && !rep.bar_finite;
  rep.consistent = (all || none) && rep.lemma_violations == 0;
  return rep;
}

PsrStability psr_stability_check(const SubspaceSystem& S, const SubspaceSystem& S_tilde, const ThetaOptions& opts,
                                 int certificate_samples) {
  return psr_stability_check(S, S_tilde, theta_bar(S, opts).value, opts, certificate_samples);
}

PsrStability psr_stability_check(const SubspaceSystem& S, const SubspaceSystem& S_tilde, double theta_bar_value,
                                 const ThetaOptions& opts, int certificate_samples) {
  require_pair(S, S_tilde);
  const AmbientSpace& amb = S.ambient();
  PsrStability rep;
  for (int k = 1; k <= S.size(); ++k)
    if (!S.at(k).is_trivial()) rep.sum_gap += gap_rho0(S.at(k), S_tilde.at(k));
  rep.theta_bar = theta_bar_value;
  rep.budget = std::isfinite(theta_bar_value) ? 1.0 / (2.0 * theta_bar_value) : 0.0;
  rep.within_budget = rep.sum_gap < rep.budget;
  if (!rep.within_budget) return rep;

  rep.perturbed_spans = S_tilde.spans();
  rep.perturbed_margin = psr_margin(S_tilde, opts.search).value;
  rep.holds = rep.perturbed_spans && rep.perturbed_margin > 1e-6;

  // Certificate pair from the proof: alpha in (2 Theta sum d, 1) and
  // B > Theta + 2 Theta sum d.
  const double lead = 2.0 * rep.theta_bar * rep.sum_gap;
  rep.alpha = 0.5 * (lead + 1.0);
  rep.B = (rep.theta_bar + lead) * (1.0 + 1e-3);
  rep.certificate_samples = certificate_samples;
  const int L = theta_horizon(S_tilde, opts);
  for (int i = 0; i < certificate_samples; ++i) {
    const Vector x = unit_sample(amb, 0xce47ULL, static_cast<std::size_t>(i));
    const double v = theta_x_eps(S_tilde, x, rep.alpha * amb.norm(x), L, opts).value;
    if (!(v <= rep.B * amb.norm(x) + 1e-9)) ++rep.certificate_failures;
  }
  return rep;
}

std::string ApssStability::csv_row(const std::string& id) const {
  std::ostringstream os;
  os.precision(10);
  os << id << ',' << eps << ',' << d << ',' << bound << ',' << measured;
  return os.str();
}

ApssStability apss_stability_check(const SubspaceSystem& S, const SubspaceSystem& S_tilde, const SearchOptions& opts) {
  require_pair(S, S_tilde);
  ApssStability rep;
  rep.eps = apss_margin(S, opts).value;
  for (int k = 1; k <= S.size(); ++k)
    if (!S.at(k).is_trivial()) rep.d = std::max(rep.d, gap_rho0(S.at(k), S_tilde.at(k)));
  rep.bound = (rep.eps - rep.d) / (1.0 + rep.d);
  rep.within_budget = rep.d < rep.eps;
  rep.measured = apss_margin(S_tilde, opts).value;
  rep.holds = !rep.within_budget || rep.measured >= rep.bound - 1e-3;
  return rep;
}

ThetaReport theta_report(const SubspaceSystem& S, const Vector& x, double eps, int n, bool with_bar,
                         const ThetaOptions& opts) {
  ThetaReport rep;
  rep.tuple_length = n;
  const ThetaSolve solve = theta_x_eps(S, x, eps, n, opts);
  rep.theta_x_eps_value = solve.value;
  rep.solver_trace.push_back(solve.trace);
  if (solve.feasible) rep.theta_tuple_value = theta_tuple(S, solve.tuple).value;
  rep.theta_star_value = theta_star(S, x, opts).value;
  if (with_bar) rep.theta_bar_value = theta_bar(S, opts).value;
  return rep;
}

}  // namespace subrep
