#include "subrep/theta.hpp"

#include "subrep/criteria.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <limits>

using namespace subrep;
using namespace subrep::testing;

namespace {

const AmbientSpace R2(2);
constexpr double kInf = std::numeric_limits<double>::infinity();

// Brute force over the two line coefficients: x_1 = a u, x_2 = b v.
// Scans a window around the exact coordinates of x at the given step.
double grid_theta_two_lines(const Vector& u, const Vector& v, const Vector& x, double eps, int n, double step) {
  Matrix M(2, 2);
  M << u, v;
  const Vector c = M.fullPivLu().solve(x);
  const double sine = std::abs(u(0) * v(1) - u(1) * v(0));
  const double w = eps / sine + 0.02;
  double best = kInf;
  if (n == 1) {
    for (double a = -4.0; a <= 4.0; a += step * 0.1) {
      if ((a * u - x).norm() <= eps) best = std::min(best, std::abs(a));
    }
    return best;
  }
  for (double a = c(0) - w; a <= c(0) + w; a += step) {
    for (double b = c(1) - w; b <= c(1) + w; b += step) {
      const Vector s = a * u + b * v;
      if ((s - x).norm() > eps) continue;
      best = std::min(best, std::max(std::abs(a), s.norm()));
    }
  }
  return best;
}

SubspaceSystem rotated(const SubspaceSystem& S, double angle) {
  const Matrix R = rotation2(angle);
  std::vector<Subspace> xs;
  for (const auto& X : S.subspaces()) xs.push_back(Subspace::from_orthonormal(S.ambient(), R * X.basis()));
  return SubspaceSystem(S.ambient(), xs, S.cyclic());
}

}  // namespace

TEST_CASE("theta_tuple on prefix sums") {
  const SubspaceSystem S = axes(2);
  CHECK(theta_tuple(S, {vec({1, 0}), vec({0, 1})}).value == doctest::Approx(std::sqrt(2.0)));
  CHECK(theta_tuple(S, {vec({3, 0})}).value == doctest::Approx(3.0));
  const TupleTheta z = theta_tuple(S, {vec({1, 0}), vec({0, 0})});
  CHECK(z.value == doctest::Approx(1.0));
  CHECK(z.sum.isApprox(vec({1, 0})));
  CHECK_THROWS_AS(theta_tuple(S, {vec({0, 1})}), ValidationError);
  CHECK_THROWS_AS(theta_tuple(S, {vec({1, 0}), vec({0, 1}), vec({0, 0})}), ValidationError);
}

TEST_CASE("theta_x_eps examples") {
  const SubspaceSystem S = axes(2);
  const Vector x = vec({1, 1});
  CHECK(theta_x_eps(S, x, 0.0, 2).value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-5));
  CHECK(theta_x_eps(S, x, 0.1, 2).value == doctest::Approx(std::sqrt(2.0) - 0.1).epsilon(1e-4));

  const SubspaceSystem line(R2, {span_of(R2, {vec({1, 0})})});
  const ThetaSolve inf = theta_x_eps(line, vec({0, 1}), 0.5, 1);
  CHECK(std::isinf(inf.value));
  CHECK_FALSE(inf.feasible);
  CHECK_THROWS_AS(theta_x_eps(S, x, -1.0, 2), ValidationError);
  CHECK_THROWS_AS(theta_x_eps(S, x, 0.1, 3), ValidationError);
}

TEST_CASE("theta_x_eps in polyhedral norms") {
  // Axes in l_inf: Theta(P) = max(|a|, max(|a|,|b|)) -> ||x||_inf - eps.
  const SubspaceSystem Sinf = axes(2, NormKind::Linf);
  CHECK(theta_x_eps(Sinf, vec({1, 0.5}), 0.0, 2).value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(theta_x_eps(Sinf, vec({1, 0.5}), 0.2, 2).value == doctest::Approx(0.8).epsilon(1e-9));
  // Axes in l_1: prefix sums grow, Theta = ||Sigma||_1 >= ||x||_1 - eps.
  const SubspaceSystem S1 = axes(2, NormKind::L1);
  CHECK(theta_x_eps(S1, vec({1, 0.5}), 0.0, 2).value == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(theta_x_eps(S1, vec({1, 0.5}), 0.25, 2).value == doctest::Approx(1.25).epsilon(1e-9));
  const SubspaceSystem line(AmbientSpace(2, Field::Real, NormKind::L1), {span_of(AmbientSpace(2, Field::Real, NormKind::L1), {vec({1, 0})})});
  CHECK(std::isinf(theta_x_eps(line, vec({0, 1}), 0.5, 1).value));
}

TEST_CASE("theta_x_eps matches a grid search over tuple coordinates") {
  Gen g(101);
  int checked = 0;
  for (int inst = 0; inst < 6; ++inst) {
    const double a1 = g.uniform(0, kPi);
    const double a2 = a1 + g.uniform(deg(20), deg(160));
    const SubspaceSystem S = lines({a1, a2});
    const Vector u = S.at(1).basis().col(0);
    const Vector v = S.at(2).basis().col(0);
    const Vector x = g.unit(2) * g.uniform(0.5, 1.5);
    const double eps = g.uniform(0.05, 0.3);
    for (int n = 1; n <= 2; ++n) {
      const double got = theta_x_eps(S, x, eps, n).value;
      const double want = grid_theta_two_lines(u, v, x, eps, n, 1e-3);
      if (std::isinf(want)) {
        CHECK(std::isinf(got));
      } else {
        CHECK(std::abs(got - want) <= 5e-3);
        ++checked;
      }
    }
  }
  CHECK(checked >= 6);
}

TEST_CASE("theta_x_eps lower bound and monotonicity") {
  Gen g(7);
  for (int inst = 0; inst < 12; ++inst) {
    const NormKind p = inst % 3 == 0 ? NormKind::L2 : (inst % 3 == 1 ? NormKind::L1 : NormKind::Linf);
    const AmbientSpace amb(3, Field::Real, p);
    const SubspaceSystem S = g.system(amb, 3, 2);
    const Vector x = g.gaussian(3);
    const double xn = amb.norm(x);
    double prev_eps = kInf;
    for (double rel : {0.0, 0.01, 0.1, 0.4}) {
      const double eps = rel * xn;
      double prev_n = kInf;
      for (int n = 1; n <= 3; ++n) {
        const double v = theta_x_eps(S, x, eps, n).value;
        CHECK(v >= xn - eps - 1e-6);
        CHECK(v <= prev_n + 1e-5);
        prev_n = v;
      }
      CHECK(prev_n <= prev_eps + 1e-5);
      prev_eps = prev_n;
    }
  }
}

TEST_CASE("theta_x_eps on the boundary of feasibility") {
  // eps equals the distance from x to the span: the solver works on the
  // null space of the stacked basis.
  const AmbientSpace R3(3);
  const SubspaceSystem S(R3, {span_of(R3, {vec({1, 0, 0})}), span_of(R3, {vec({1, 1, 0})})});
  const ThetaSolve r = theta_x_eps(S, vec({2, 0, 1}), 1.0, 2);
  REQUIRE(r.feasible);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-6));
  const ThetaSolve r2 = theta_x_eps(S, vec({0, 2, 1}), 1.0, 2);
  // Sigma = (0,2,0): x_1 = (-2,0,0), x_2 = (2,2,0) is forced.
  CHECK(r2.value == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(r2.trace.solver == "elimination");
}

TEST_CASE("theta_star") {
  const SubspaceSystem S = axes(2);
  CHECK(theta_star(S, vec({1, 1})).value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-3));
  CHECK(theta_star(S, vec({0, 0})).value == 0.0);

  const SubspaceSystem whole(R2, {Subspace::whole(R2)});
  const ThetaStar one = theta_star(whole, vec({0.3, -0.4}));
  CHECK(one.value == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(one.monotone);
  REQUIRE(one.values.size() == 4);
  for (std::size_t i = 1; i < one.values.size(); ++i) CHECK(one.values[i] >= one.values[i - 1] - 1e-9);

  const SubspaceSystem line(R2, {span_of(R2, {vec({1, 0})})});
  CHECK(std::isinf(theta_star(line, vec({0, 1})).value));
}

TEST_CASE("theta_star is homogeneous") {
  Gen g(23);
  for (int inst = 0; inst < 8; ++inst) {
    const NormKind p = inst % 2 == 0 ? NormKind::L2 : NormKind::Linf;
    const SubspaceSystem S = lines({g.uniform(0, kPi), g.uniform(0, kPi), g.uniform(0, kPi)}, p);
    const Vector x = g.gaussian(2);
    const double base = theta_star(S, x).value;
    for (double c : {-2.5, 0.3, 7.0}) CHECK(std::abs(theta_star(S, c * x).value - std::abs(c) * base) <= 1e-5 * std::max(1.0, std::abs(c)));
  }
}

TEST_CASE("theta_bar examples") {
  CHECK(theta_bar(axes(2)).value == doctest::Approx(1.0).epsilon(2e-3));
  const SubspaceSystem whole(R2, {Subspace::whole(R2)});
  CHECK(theta_bar(whole).value == doctest::Approx(1.0).epsilon(2e-3));

  // Two lines 10 degrees apart: the worst x is orthogonal to the second line,
  // forcing a first term of length 1/sin(10 deg).
  const ThetaBar tb = theta_bar(lines({0.0, deg(10)}));
  CHECK(tb.value > 1.0);
  CHECK(tb.value == doctest::Approx(1.0 / std::sin(deg(10))).epsilon(1e-2));
  CHECK(std::abs(tb.dense_value - tb.multistart_value) <= 1e-2 * tb.value);
  CHECK(tb.certified_dim == 2);

  const SubspaceSystem line(R2, {span_of(R2, {vec({1, 0})})});
  CHECK(std::isinf(theta_bar(line).value));
}

TEST_CASE("F1 is bounded below by the theta_bar constant") {
  Gen g(55);
  for (int inst = 0; inst < 3; ++inst) {
    const SubspaceSystem S = lines({g.uniform(0, kPi), g.uniform(0, kPi), g.uniform(0, kPi)});
    if (!S.spans()) continue;
    const double c = 1.0 / (2.0 * theta_bar(S).value) - 1e-3;
    const auto parts = sequential_partitions(S.size());
    for (int i = 0; i < 200; ++i) {
      const Functional phi(R2, g.unit(2));
      for (const auto& pi : parts) CHECK(F1(S, pi, phi) >= c * phi.norm());
    }
  }
}

TEST_CASE("psr_equivalence_report") {
  const PsrEquivalence ax = psr_equivalence_report(axes(2));
  CHECK(ax.spanning);
  CHECK(ax.bounded);
  CHECK(ax.star_finite);
  CHECK(ax.bar_finite);
  CHECK(ax.lemma_violations == 0);
  CHECK(ax.lemma_min_slack >= 0.0);
  CHECK(ax.consistent);

  const SubspaceSystem whole(R2, {Subspace::whole(R2)});
  const PsrEquivalence w = psr_equivalence_report(whole, 30);
  CHECK(w.B <= 1.0 + 1e-6);
  CHECK(w.consistent);

  const SubspaceSystem line(R2, {span_of(R2, {vec({1, 0})})});
  const PsrEquivalence nl = psr_equivalence_report(line, 20);
  CHECK_FALSE(nl.spanning);
  CHECK_FALSE(nl.bounded);
  CHECK_FALSE(nl.star_finite);
  CHECK_FALSE(nl.bar_finite);
  CHECK(nl.consistent);
}

TEST_CASE("psr stability examples") {
  const SubspaceSystem S = axes(2);
  const PsrStability r5 = psr_stability_check(S, rotated(S, deg(5)));
  CHECK(r5.sum_gap == doctest::Approx(2 * std::sin(deg(5))).epsilon(1e-6));
  CHECK(r5.budget == doctest::Approx(0.5).epsilon(2e-3));
  CHECK(r5.within_budget);
  CHECK(r5.perturbed_spans);
  CHECK(r5.perturbed_margin > 1e-6);
  CHECK(r5.holds);
  CHECK(r5.alpha > 2 * r5.theta_bar * r5.sum_gap);
  CHECK(r5.alpha < 1.0);
  CHECK(r5.certificate_failures == 0);

  const PsrStability same = psr_stability_check(S, S);
  CHECK(same.sum_gap == doctest::Approx(0.0));
  CHECK(same.holds);

  const PsrStability r40 = psr_stability_check(S, rotated(S, deg(40)));
  CHECK(r40.sum_gap == doctest::Approx(2 * std::sin(deg(40))).epsilon(1e-6));
  CHECK_FALSE(r40.within_budget);
  CHECK(r40.holds);

  CHECK_THROWS_AS(psr_stability_check(S, lines({0.0}), 1.0), ValidationError);
}

TEST_CASE("apss stability examples") {
  const SubspaceSystem S = axes(2);
  const ApssStability r = apss_stability_check(S, rotated(S, deg(10)));
  CHECK(r.eps == doctest::Approx(std::sqrt(0.5)).epsilon(1e-3));
  CHECK(r.d == doctest::Approx(std::sin(deg(10))).epsilon(1e-6));
  CHECK(r.bound == doctest::Approx(0.4546).epsilon(1e-3));
  CHECK(r.within_budget);
  CHECK(r.measured >= r.bound - 1e-3);
  CHECK(r.holds);
  CHECK(r.csv_row("axes10").rfind("axes10,", 0) == 0);

  const ApssStability same = apss_stability_check(S, S);
  CHECK(same.measured == doctest::Approx(same.eps).epsilon(1e-9));

  const ApssStability far = apss_stability_check(S, rotated(S, deg(60)));
  CHECK_FALSE(far.within_budget);
  CHECK(far.holds);
}

TEST_CASE("random perturbations inside the budgets") {
  Gen g(314);
  int psr_checked = 0;
  for (int inst = 0; inst < 6; ++inst) {
    const SubspaceSystem S = lines({g.uniform(0, kPi), g.uniform(0, kPi), g.uniform(0, kPi)});
    const double tb = theta_bar(S).value;
    const double budget = 1.0 / (2.0 * tb);
    std::vector<double> ang;
    for (const auto& X : S.subspaces()) {
      const Vector b = X.basis().col(0);
      ang.push_back(std::atan2(b(1), b(0)) + g.uniform(-0.9, 0.9) * budget / 3.0);
    }
    const SubspaceSystem T = lines(ang);
    const PsrStability ps = psr_stability_check(S, T, tb);
    if (ps.within_budget) {
      ++psr_checked;
      CHECK(ps.holds);
    }
    CHECK(apss_stability_check(S, T).holds);
  }
  CHECK(psr_checked >= 4);
}

TEST_CASE("cyclic systems unroll to the horizon") {
  const SubspaceSystem S = axes(2, NormKind::L2, true);
  CHECK(theta_horizon(S) == 6);
  CHECK(theta_x_eps(S, vec({1, 1}), 0.0, 6).value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-5));
  // Three periods let the x-component be split into thirds without helping.
  CHECK(theta_star(S, vec({0, 1})).value == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("theta_report bundles the quantities") {
  const ThetaReport r = theta_report(axes(2), vec({1, 1}), 0.1, 2, false);
  REQUIRE(r.theta_x_eps_value);
  CHECK(*r.theta_x_eps_value == doctest::Approx(std::sqrt(2.0) - 0.1).epsilon(1e-4));
  REQUIRE(r.theta_tuple_value);
  CHECK(*r.theta_tuple_value == doctest::Approx(*r.theta_x_eps_value).epsilon(1e-9));
  REQUIRE(r.theta_star_value);
  CHECK(*r.theta_star_value >= *r.theta_x_eps_value - 1e-9);
  CHECK_FALSE(r.theta_bar_value);
  CHECK(r.solver_trace.size() == 1);
}
