#include "subrep/suite.hpp"

#include "subrep/cconvexity.hpp"
#include "subrep/criteria.hpp"
#include "subrep/decompose.hpp"
#include "subrep/parallel.hpp"
#include "subrep/serialize.hpp"
#include "subrep/theta.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>

namespace subrep {

using io::fmt;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

class Rng {
public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(g_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(g_); }
  Vector gaussian(int n) {
    std::normal_distribution<double> d;
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = d(g_);
    return v;
  }

private:
  std::mt19937_64 g_;
};

Subspace random_subspace(const AmbientSpace& amb, int k, Rng& rng) {
  std::vector<Vector> vs;
  for (int i = 0; i < k; ++i) vs.push_back(rng.gaussian(amb.real_dim()));
  return orthonormalize(std::span<const Vector>(vs), amb);
}

SubspaceSystem random_system(const AmbientSpace& amb, int count, int max_subdim, Rng& rng, bool cyclic = false) {
  std::vector<Subspace> xs;
  for (int i = 0; i < count; ++i) xs.push_back(random_subspace(amb, rng.integer(1, max_subdim), rng));
  return SubspaceSystem(amb, xs, cyclic);
}

Subspace line(const AmbientSpace& amb, double angle) {
  Matrix B(2, 1);
  B << std::cos(angle), std::sin(angle);
  return Subspace::from_orthonormal(amb, B);
}

SubspaceSystem lines(const AmbientSpace& amb, const std::vector<double>& angles, bool cyclic = false) {
  std::vector<Subspace> xs;
  for (double a : angles) xs.push_back(line(amb, a));
  return SubspaceSystem(amb, xs, cyclic);
}

// Random spanning system, redrawn until it spans.
SubspaceSystem spanning_system(const AmbientSpace& amb, int count, int max_subdim, Rng& rng, bool cyclic = false) {
  for (;;) {
    SubspaceSystem S = random_system(amb, count, max_subdim, rng, cyclic);
    if (S.spans()) return S;
  }
}

double gap_total(const SubspaceSystem& S, const SubspaceSystem& T, bool sum) {
  double acc = 0.0;
  for (int k = 1; k <= S.size(); ++k) {
    const double g = gap_rho0(S.at(k), T.at(k));
    acc = sum ? acc + g : std::max(acc, g);
  }
  return acc;
}

// Moves every basis along a fixed random direction, scaled so that the sum
// (or max) of gaps lands just below `target`.
SubspaceSystem perturb(const SubspaceSystem& S, double target, bool sum, Rng& rng) {
  const AmbientSpace& amb = S.ambient();
  std::vector<Matrix> dirs;
  for (const auto& X : S.subspaces()) {
    Matrix G(X.basis().rows(), X.basis().cols());
    for (Eigen::Index c = 0; c < G.cols(); ++c) G.col(c) = rng.gaussian(static_cast<int>(G.rows()));
    dirs.push_back(G);
  }
  auto make = [&](double delta) {
    std::vector<Subspace> xs;
    for (std::size_t k = 0; k < dirs.size(); ++k) {
      const Matrix M = S.subspaces()[k].basis() + delta * dirs[k];
      std::vector<Vector> cols;
      for (Eigen::Index c = 0; c < M.cols(); ++c) cols.push_back(M.col(c));
      xs.push_back(orthonormalize(std::span<const Vector>(cols), amb));
    }
    return SubspaceSystem(amb, xs, S.cyclic());
  };
  double delta = target;
  for (int it = 0; it < 6; ++it) {
    const double m = gap_total(S, make(delta), sum);
    if (m <= 0.0) break;
    delta *= 0.97 * target / m;
  }
  SubspaceSystem T = make(delta);
  while (gap_total(S, T, sum) >= target) {
    delta *= 0.8;
    T = make(delta);
  }
  return T;
}

Vector unit(const Vector& v, NormKind p) { return v / norm(v, p); }

std::string pf(bool ok) { return ok ? "pass" : "fail"; }

void finish(CheckResult& r, const std::string& detail) {
  r.passed = r.failures == 0 && r.checks > 0;
  r.detail = detail;
}

// ---------------------------------------------------------------------------

CheckResult greedy_decay(std::uint64_t seed) {
  CheckResult r{1, "c01_greedy_decay", "greedy decay", false, 0, 0, "", "", {}};
  r.header = "system,dim,count,lambda,steps,worst_decay_slack,abs_sum_ratio,abs_sum_bound,result";
  int accepted = 0;
  double worst = kInf;
  for (std::uint64_t attempt = 0; accepted < 50 && attempt < 2000; ++attempt) {
    Rng rng(mix_seed(seed, 0x1000 + attempt));
    const int d = rng.integer(2, 4);
    const AmbientSpace amb(d);
    const SubspaceSystem S = random_system(amb, rng.integer(2, 6), d - 1, rng);
    if (!S.spans()) continue;
    SearchOptions so;
    so.seed = mix_seed(seed, attempt);
    const double lam_hat = lambda_S(S, so).value;
    if (lam_hat >= 0.95) continue;
    ++accepted;
    const double lam = lam_hat + 1e-6;
    const Vector x = rng.gaussian(d);
    const double xn = x.norm();
    const Decomposition dec = greedy_decompose(S, x, 80, 1e-13 * xn);
    bool ok = true;
    double slack = kInf, abs_sum = 0.0;
    for (std::size_t k = 0; k < dec.residual_trace.size(); ++k) {
      const double s = std::pow(lam, static_cast<double>(k + 1)) * xn - dec.residual_trace[k];
      slack = std::min(slack, s / xn);
      ok = ok && s >= -1e-12 * xn;
      abs_sum += dec.terms[k].component.norm();
    }
    const double ratio = abs_sum / xn, bound = (1 + lam) / (1 - lam);
    ok = ok && ratio <= bound;
    worst = std::min(worst, slack);
    ++r.checks;
    if (!ok) ++r.failures;
    r.rows.push_back(std::to_string(attempt) + "," + std::to_string(d) + "," + std::to_string(S.size()) + "," +
                     fmt(lam_hat) + "," + std::to_string(dec.terms.size()) + "," + fmt(slack) + "," + fmt(ratio) +
                     "," + fmt(bound) + "," + pf(ok));
  }
  if (accepted < 50) ++r.failures;
  finish(r, std::to_string(accepted) + " systems with lambda < 0.95; worst relative decay slack " + fmt(worst));
  return r;
}

CheckResult lambda_eps_identity(std::uint64_t seed) {
  CheckResult r{2, "c02_lambda_eps", "lambda-eps identity", false, 0, 0, "", "", {}};
  r.header = "system,dim,count,lambda,eps,identity_error,lambda_method,eps_method,certified_dim,lambda_multistart_gap,eps_multistart_gap,result";
  double worst = 0.0;
  int accepted = 0;
  for (std::uint64_t attempt = 0; accepted < 20 && attempt < 500; ++attempt) {
    Rng rng(mix_seed(seed, 0x2000 + attempt));
    const int d = 2 + accepted % 3;
    const AmbientSpace amb(d);
    const SubspaceSystem S = random_system(amb, rng.integer(2, 5), d - 1, rng);
    if (!S.spans()) continue;
    ++accepted;
    SearchOptions so;
    so.seed = mix_seed(seed, 0x2100 + attempt);
    const MarginReport lam = lambda_S(S, so);
    const MarginReport eps = apss_margin(S, so);
    const double err = std::abs(lam.value * lam.value + eps.value * eps.value - 1.0);
    const bool ok = err <= 2e-3;
    worst = std::max(worst, err);
    ++r.checks;
    if (!ok) ++r.failures;
    auto gap = [](const MarginReport& m) {
      return std::isfinite(m.dense_value) ? std::abs(m.dense_value - m.multistart_value) : 0.0;
    };
    r.rows.push_back(std::to_string(attempt) + "," + std::to_string(d) + "," + std::to_string(S.size()) + "," +
                     fmt(lam.value) + "," + fmt(eps.value) + "," + fmt(err) + "," + to_string(lam.method) + "," +
                     to_string(eps.method) + "," + std::to_string(lam.certified_dim) + "," + fmt(gap(lam)) + "," +
                     fmt(gap(eps)) + "," + pf(ok));
  }
  if (accepted < 20) ++r.failures;
  finish(r, std::to_string(accepted) + " systems; max |lambda^2 + eps^2 - 1| = " + fmt(worst));
  return r;
}

CheckResult alternating_rate(std::uint64_t seed) {
  CheckResult r{3, "c03_alternating", "alternating projections", false, 0, 0, "", "", {}};
  r.header = "angle_deg,step,ratio,cos_angle,ratio_error,identity_error,result";
  const AmbientSpace R2(2);
  Rng rng(mix_seed(seed, 0x3000));
  double worst_ratio = 0.0, worst_id = 0.0;
  for (double degs : {15.0, 45.0, 75.0}) {
    const double th = degs * kPi / 180.0;
    const SubspaceSystem S = lines(R2, {0.0, th}, true);
    const Vector x = rng.gaussian(2);
    const int steps = 12;
    const Decomposition dec = alternating_decompose(S, x, steps);
    // Independent product of complementary projectors.
    Vector u1(2), u2(2);
    u1 << 1.0, 0.0;
    u2 << std::cos(th), std::sin(th);
    const Matrix Q1 = Matrix::Identity(2, 2) - u1 * u1.transpose();
    const Matrix Q2 = Matrix::Identity(2, 2) - u2 * u2.transpose();
    Vector E = x, partial = Vector::Zero(2);
    for (int n = 1; n <= steps; ++n) {
      E = (n % 2 == 1 ? Q1 : Q2) * E;
      partial += dec.terms[static_cast<std::size_t>(n - 1)].component;
      const double id_err = (x - partial - E).norm();
      const double ratio = dec.residual_trace[static_cast<std::size_t>(n - 1)] /
                           (n == 1 ? x.norm() : dec.residual_trace[static_cast<std::size_t>(n - 2)]);
      const double rerr = std::abs(ratio - std::cos(th));
      bool ok = id_err <= 1e-12 && dec.terms[static_cast<std::size_t>(n - 1)].index == n;
      if (n > 5) ok = ok && rerr <= 1e-6;
      worst_id = std::max(worst_id, id_err);
      if (n > 5) worst_ratio = std::max(worst_ratio, rerr);
      ++r.checks;
      if (!ok) ++r.failures;
      r.rows.push_back(fmt(degs) + "," + std::to_string(n) + "," + fmt(ratio) + "," + fmt(std::cos(th)) + "," +
                       fmt(rerr) + "," + fmt(id_err) + "," + pf(ok));
    }
  }
  finish(r, "max ratio error after 5 steps " + fmt(worst_ratio) + "; max identity error " + fmt(worst_id));
  return r;
}

CheckResult net_formula(std::uint64_t seed) {
  CheckResult r{4, "c04_net", "net formula", false, 0, 0, "", "", {}};
  r.header = "item,value,expected,error,result";
  Rng rng(mix_seed(seed, 0x4000));
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    // Half the pairs live in C^2 (realified), half in R^3.
    const int d = i % 2 == 0 ? 4 : 3;
    const Vector x = unit(rng.gaussian(d), NormKind::L2);
    const Vector phi = unit(rng.gaussian(d), NormKind::L2);
    const double tau = rng.uniform(0.0, 3.0);
    const double lhs = (phi - tau * x).squaredNorm();
    const double rhs = 1.0 + tau * tau - 2.0 * tau * x.dot(phi);
    const double err = std::abs(lhs - rhs);
    worst = std::max(worst, err);
    ++r.checks;
    if (err > 1e-12) ++r.failures;
  }
  r.rows.push_back("identity_pairs," + fmt(worst) + ",0," + fmt(worst) + "," + pf(worst <= 1e-12));

  const AmbientSpace R2(2);
  const SubspaceSystem axes = lines(R2, {0.0, kPi / 2});
  const double expect = std::sqrt(2.0 - std::sqrt(2.0));
  SearchOptions so;
  so.seed = mix_seed(seed, 0x4100);
  const NetCheck nc = check_net(axes, 1.0, expect + 1e-3, so);
  const double e1 = std::abs(nc.covering_radius - expect), e2 = std::abs(nc.predicted_radius - expect);
  const bool ok1 = e1 <= 1e-4, ok2 = e2 <= 1e-4, ok3 = nc.is_net == nc.predicted_net;
  r.checks += 3;
  r.failures += !ok1 + !ok2 + !ok3;
  r.rows.push_back("axes_covering_radius," + fmt(nc.covering_radius) + "," + fmt(expect) + "," + fmt(e1) + "," + pf(ok1));
  r.rows.push_back("axes_predicted_radius," + fmt(nc.predicted_radius) + "," + fmt(expect) + "," + fmt(e2) + "," + pf(ok2));
  r.rows.push_back(std::string("axes_net_agreement,") + (nc.is_net ? "1" : "0") + "," + (nc.predicted_net ? "1" : "0") +
                   ",0," + pf(ok3));
  finish(r, "max identity error " + fmt(worst) + "; axes covering radius " + fmt(nc.covering_radius));
  return r;
}

CheckResult f1_inequality(std::uint64_t seed) {
  CheckResult r{5, "c05_f1", "F1 inequality", false, 0, 0, "", "", {}};
  r.header = "system,dim,p,count,theta_bar,threshold,min_ratio,partitions,result";
  int failures_total = 0;
  double worst_margin = kInf;
  for (int i = 0; i < 10; ++i) {
    Rng rng(mix_seed(seed, 0x5000 + static_cast<std::uint64_t>(i)));
    const NormKind p = (i == 6 || i == 7) ? NormKind::Linf : NormKind::L2;
    const int d = i >= 8 ? 3 : 2;
    const AmbientSpace amb(d, Field::Real, p);
    const SubspaceSystem S = spanning_system(amb, d == 2 ? rng.integer(3, 4) : rng.integer(3, 4), d - 1, rng);
    ThetaOptions to;
    to.search.seed = mix_seed(seed, 0x5100 + static_cast<std::uint64_t>(i));
    const double tb = theta_bar(S, to).value;
    const double threshold = 1.0 / (2.0 * tb) - 1e-3;
    const auto parts = sequential_partitions(S.size());
    const NormKind q = dual(p);
    double min_ratio = kInf;
    int fails = 0;
    for (int s = 0; s < 1000; ++s) {
      const Functional phi(amb, unit(rng.gaussian(d), q));
      for (const auto& pi : parts) {
        const double ratio = F1(S, pi, phi) / phi.norm();
        min_ratio = std::min(min_ratio, ratio);
        if (ratio < threshold) ++fails;
      }
    }
    worst_margin = std::min(worst_margin, min_ratio - threshold);
    failures_total += fails;
    ++r.checks;
    if (fails) ++r.failures;
    r.rows.push_back(std::to_string(i) + "," + std::to_string(d) + "," + to_string(p) + "," + std::to_string(S.size()) +
                     "," + fmt(tb) + "," + fmt(threshold) + "," + fmt(min_ratio) + "," + std::to_string(parts.size()) +
                     "," + pf(fails == 0));
  }
  finish(r, "10 systems x 1000 functionals; smallest F1 margin over threshold " + fmt(worst_margin) + "; violations " +
                std::to_string(failures_total));
  return r;
}

CheckResult apss_stability(std::uint64_t seed) {
  CheckResult r{6, "c06_apss_stability", "absolute representation stability", false, 0, 0, "", "", {}};
  r.header = "id,eps,d,bound,measured,within_budget,result";
  const AmbientSpace R2(2);
  const SubspaceSystem axes = lines(R2, {0.0, kPi / 2});
  const SubspaceSystem rot = lines(R2, {10.0 * kPi / 180.0, kPi / 2 + 10.0 * kPi / 180.0});
  SearchOptions so;
  so.seed = mix_seed(seed, 0x6000);
  const ApssStability ax = apss_stability_check(axes, rot, so);
  const bool ax_ok = ax.within_budget && ax.measured >= ax.bound - 1e-3 && std::abs(ax.eps - std::sqrt(0.5)) <= 1e-3 &&
                     std::abs(ax.d - std::sin(10.0 * kPi / 180.0)) <= 1e-9;
  ++r.checks;
  if (!ax_ok) ++r.failures;
  r.rows.push_back(ax.csv_row("axes_rot10") + "," + (ax.within_budget ? "1" : "0") + "," + pf(ax_ok));
  double worst = kInf;
  for (int i = 0; i < 20; ++i) {
    Rng rng(mix_seed(seed, 0x6100 + static_cast<std::uint64_t>(i)));
    const int d = i % 2 == 0 ? 2 : 3;
    const AmbientSpace amb(d);
    const SubspaceSystem S = spanning_system(amb, rng.integer(2, 4), d - 1, rng);
    SearchOptions o;
    o.seed = mix_seed(seed, 0x6200 + static_cast<std::uint64_t>(i));
    const double eps = apss_margin(S, o).value;
    const SubspaceSystem T = perturb(S, rng.uniform(0.2, 0.8) * eps, false, rng);
    const ApssStability st = apss_stability_check(S, T, o);
    const bool ok = st.within_budget && st.measured > 1e-6 && st.holds;
    worst = std::min(worst, st.measured - st.bound);
    ++r.checks;
    if (!ok) ++r.failures;
    r.rows.push_back(st.csv_row("random" + std::to_string(i)) + "," + (st.within_budget ? "1" : "0") + "," + pf(ok));
  }
  finish(r, "axes rotated 10 deg: measured " + fmt(ax.measured) + " vs bound " + fmt(ax.bound) +
                "; random perturbations: min(measured - bound) " + fmt(worst));
  return r;
}

CheckResult psr_stability(std::uint64_t seed) {
  CheckResult r{7, "c07_psr_stability", "representation stability", false, 0, 0, "", "", {}};
  r.header = "id,sum_gap,theta_bar,budget,perturbed_margin,certificate_failures,result";
  double min_margin = kInf;
  int cert_fail = 0;
  for (int b = 0; b < 5; ++b) {
    Rng rng(mix_seed(seed, 0x7000 + static_cast<std::uint64_t>(b)));
    const int d = b < 3 ? 2 : 3;
    const AmbientSpace amb(d);
    const SubspaceSystem S = spanning_system(amb, 3, d - 1, rng);
    ThetaOptions to;
    to.search.seed = mix_seed(seed, 0x7100 + static_cast<std::uint64_t>(b));
    const double tb = theta_bar(S, to).value;
    const double budget = 1.0 / (2.0 * tb);
    for (int j = 0; j < 4; ++j) {
      const SubspaceSystem T = perturb(S, rng.uniform(0.2, 0.9) * budget, true, rng);
      const PsrStability st = psr_stability_check(S, T, tb, to);
      const bool ok = st.within_budget && st.holds && st.perturbed_margin > 1e-6;
      min_margin = std::min(min_margin, st.perturbed_margin);
      cert_fail += st.certificate_failures;
      ++r.checks;
      if (!ok) ++r.failures;
      r.rows.push_back(std::to_string(b) + "." + std::to_string(j) + "," + fmt(st.sum_gap) + "," + fmt(st.theta_bar) +
                       "," + fmt(st.budget) + "," + fmt(st.perturbed_margin) + "," +
                       std::to_string(st.certificate_failures) + "," + pf(ok));
    }
  }
  finish(r, "20 perturbations inside the budget; smallest perturbed margin " + fmt(min_margin) +
                "; certificate sample failures " + std::to_string(cert_fail));
  return r;
}

CheckResult c_constants(std::uint64_t seed) {
  CheckResult r{8, "c08_c_constants", "C-constants", false, 0, 0, "", "", {}};
  r.header = "space,n,value,expected,error,tolerance,method,result";
  auto add = [&](const std::string& space, int n, double value, double expected, double err, double tol,
                 const std::string& method) {
    const bool ok = err <= tol;
    ++r.checks;
    if (!ok) ++r.failures;
    r.rows.push_back(space + "," + std::to_string(n) + "," + fmt(value) + "," + fmt(expected) + "," + fmt(err) + "," +
                     fmt(tol) + "," + method + "," + pf(ok));
  };
  CConvOptions o;
  o.seed = mix_seed(seed, 0x8000);
  for (int n = 1; n <= 5; ++n) {
    const CConstantReport c = c_constant(AmbientSpace(n), n, o);
    const double e = std::sqrt(static_cast<double>(n));
    add("euclidean_R" + std::to_string(n), n, c.value, e, std::abs(c.value / e - 1.0), 0.02, to_string(c.method));
  }
  for (int n = 1; n <= 6; ++n) {
    const CConstantReport c = c_constant(AmbientSpace(1), n, o);
    add("R1", n, c.value, n, std::abs(c.value - n), 1e-9, to_string(c.method));
  }
  for (int n = 1; n <= 5; ++n) {
    const CConstantReport c = c_constant(AmbientSpace(n, Field::Real, NormKind::Linf), n, o);
    add("linf_" + std::to_string(n), n, c.value, 1.0, std::abs(c.value - 1.0), 1e-6, to_string(c.method));
  }
  finish(r, std::to_string(r.checks - r.failures) + "/" + std::to_string(r.checks) + " constants within tolerance");
  return r;
}

CheckResult replication(std::uint64_t seed) {
  CheckResult r{9, "c09_replication", "replication decomposition", false, 0, 0, "", "", {}};
  r.header = "run,dim,terms,max_delta_over_bound,final_residual,result";
  double worst = 0.0;
  for (int run = 0; run < 10; ++run) {
    Rng rng(mix_seed(seed, 0x9000 + static_cast<std::uint64_t>(run)));
    const int d = run % 2 == 0 ? 2 : 3;
    const AmbientSpace amb(d);
    const SubspaceSystem S = spanning_system(amb, 3, d - 1, rng, true);
    ReplicationSchedule rs;
    rs.generators = S.subspaces();
    rs.stages = 6;
    const Vector x = unit(rng.gaussian(d), NormKind::L2) * rng.uniform(0.2, 0.95);
    bool ok = true;
    double ratio = 0.0, final_res = kInf;
    std::size_t terms = 0;
    try {
      const ReplicationResult res = replication_decompose(S, x, rs);
      const Vector xs = x * res.scale;
      const auto& dec = res.decomposition;
      terms = dec.terms.size();
      ok = res.deviations.size() == terms + 1;
      Vector partial = Vector::Zero(d);
      for (std::size_t s = 0; s < res.deviations.size() && ok; ++s) {
        if (s > 0) partial += dec.terms[s - 1].component;
        const double delta = (xs - partial).norm();
        const double bound = 6.0 * std::ldexp(1.0, -res.deviations[s].stage);
        ratio = std::max(ratio, delta / bound);
        ok = ok && delta < bound && std::abs(delta - res.deviations[s].delta) <= 1e-12;
      }
      final_res = (xs - partial).norm();
      ok = ok && final_res < std::ldexp(1.0, -rs.stages);
    } catch (const Error&) {
      ok = false;
    }
    worst = std::max(worst, ratio);
    ++r.checks;
    if (!ok) ++r.failures;
    r.rows.push_back(std::to_string(run) + "," + std::to_string(d) + "," + std::to_string(terms) + "," + fmt(ratio) +
                     "," + fmt(final_res) + "," + pf(ok));
  }
  finish(r, "10 runs, 6 stages; max delta / (6 * 2^-k) = " + fmt(worst));
  return r;
}

// Brute force over the two line coefficients x_1 = a u, x_2 = b v.
double grid_theta(const Vector& u, const Vector& v, const Vector& x, double eps, int n) {
  const double step = 1e-3;
  double best = kInf;
  if (n == 1) {
    // x_1 = a u: the feasible a form an interval around (u.x).
    const double c = u.dot(x), h2 = eps * eps - (x - c * u).squaredNorm();
    if (h2 < 0) return kInf;
    for (double a = c - std::sqrt(h2) - step; a <= c + std::sqrt(h2) + step; a += step * 1e-2)
      if ((a * u - x).norm() <= eps) best = std::min(best, std::abs(a));
    return best;
  }
  Matrix M(2, 2);
  M << u, v;
  const Vector c = M.fullPivLu().solve(x);
  const double w = eps / std::abs(u(0) * v(1) - u(1) * v(0)) + 0.01;
  for (double a = c(0) - w; a <= c(0) + w; a += step)
    for (double b = c(1) - w; b <= c(1) + w; b += step) {
      const Vector s = a * u + b * v;
      if ((s - x).norm() <= eps) best = std::min(best, std::max(std::abs(a), s.norm()));
    }
  return best;
}

CheckResult theta_oracle(std::uint64_t seed) {
  CheckResult r{10, "c10_theta_oracle", "theta oracle equivalence", false, 0, 0, "", "", {}};
  r.header = "item,n,value,oracle,error,tolerance,result";
  const AmbientSpace R2(2);
  double worst_grid = 0.0, worst_scale = 0.0;
  for (int i = 0; i < 10; ++i) {
    Rng rng(mix_seed(seed, 0xa000 + static_cast<std::uint64_t>(i)));
    const double a1 = rng.uniform(0.0, kPi);
    const double a2 = a1 + rng.uniform(20.0, 160.0) * kPi / 180.0;
    const SubspaceSystem S = lines(R2, {a1, a2});
    Vector u(2), v(2);
    u << std::cos(a1), std::sin(a1);
    v << std::cos(a2), std::sin(a2);
    const Vector x = unit(rng.gaussian(2), NormKind::L2) * rng.uniform(0.5, 1.5);
    const double eps = rng.uniform(0.05, 0.3);
    for (int n = 1; n <= 2; ++n) {
      const double got = theta_x_eps(S, x, eps, n).value;
      const double want = grid_theta(u, v, x, eps, n);
      const double err = std::isinf(want) && std::isinf(got) ? 0.0 : std::abs(got - want);
      const bool ok = err <= 5e-3;
      if (std::isfinite(err)) worst_grid = std::max(worst_grid, err);
      ++r.checks;
      if (!ok) ++r.failures;
      r.rows.push_back("grid" + std::to_string(i) + "," + std::to_string(n) + "," + fmt(got) + "," + fmt(want) + "," +
                       fmt(err) + ",0.005," + pf(ok));
    }
    const Vector y = rng.gaussian(2);
    const double c = rng.uniform(0.2, 5.0) * (rng.integer(0, 1) ? 1.0 : -1.0);
    const double base = theta_star(S, y).value;
    const double scaled = theta_star(S, c * y).value;
    const double err = std::abs(scaled - std::abs(c) * base);
    const bool ok = err <= 1e-5;
    worst_scale = std::max(worst_scale, err);
    ++r.checks;
    if (!ok) ++r.failures;
    r.rows.push_back("scale" + std::to_string(i) + ",2," + fmt(scaled) + "," + fmt(std::abs(c) * base) + "," +
                     fmt(err) + ",1e-05," + pf(ok));
  }
  finish(r, "max grid-oracle error " + fmt(worst_grid) + "; max homogeneity error " + fmt(worst_scale));
  return r;
}

}  // namespace

bool SuiteResult::passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return !checks.empty();
}

std::vector<std::string> suite_names() { return {"decompose", "criteria", "stability", "cconv", "all"}; }

std::vector<int> suite_checks(const std::string& name) {
  if (name == "decompose") return {1, 3, 9};
  if (name == "criteria") return {2, 4, 5};
  if (name == "stability") return {6, 7, 10};
  if (name == "cconv") return {8};
  if (name == "all") return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  throw ValidationError("no bundled suite named '" + name + "'");
}

CheckResult run_check(int id, std::uint64_t seed) {
  switch (id) {
    case 1: return greedy_decay(seed);
    case 2: return lambda_eps_identity(seed);
    case 3: return alternating_rate(seed);
    case 4: return net_formula(seed);
    case 5: return f1_inequality(seed);
    case 6: return apss_stability(seed);
    case 7: return psr_stability(seed);
    case 8: return c_constants(seed);
    case 9: return replication(seed);
    case 10: return theta_oracle(seed);
  }
  throw ValidationError("no check with id " + std::to_string(id));
}

SuiteResult run_suite(const std::string& name, std::uint64_t seed) {
  SuiteResult out;
  out.name = name;
  out.seed = seed;
  for (int id : suite_checks(name)) out.checks.push_back(run_check(id, seed));
  return out;
}

namespace {

std::string csv_text(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ValidationError("cannot write " + p.string());
  f << text;
  if (!f) throw ValidationError("cannot write " + p.string());
}

}  // namespace

void write_suite(const SuiteResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw ValidationError("cannot create output directory " + dir.string());

  std::string summary = "criterion,name,passed,checks,failures,detail\n";
  io::json checks = io::json::array();
  for (const auto& c : result.checks) {
    summary += std::to_string(c.id) + "," + csv_text(c.title) + "," + (c.passed ? "true" : "false") + "," +
               std::to_string(c.checks) + "," + std::to_string(c.failures) + "," + csv_text(c.detail) + "\n";
    std::string table = c.header + "\n";
    for (const auto& row : c.rows) table += row + "\n";
    write_file(dir / (c.slug + ".csv"), table);
    checks.push_back({{"criterion", c.id},
                      {"name", c.title},
                      {"passed", c.passed},
                      {"checks", c.checks},
                      {"failures", c.failures},
                      {"detail", c.detail},
                      {"table", c.slug + ".csv"}});
  }
  write_file(dir / "summary.csv", summary);
  const io::json report = {{"schema_version", io::kSchemaVersion},
                           {"suite", result.name},
                           {"seed", result.seed},
                           {"passed", result.passed()},
                           {"checks", checks}};
  write_file(dir / "suite.json", report.dump(2) + "\n");
}

}  // namespace subrep
