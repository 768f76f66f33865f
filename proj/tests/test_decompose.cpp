#include "subrep/decompose.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>

using namespace subrep;
using namespace subrep::testing;

namespace {

const AmbientSpace R2(2);

// For lines through the origin at the given angles, sup_x min_k d(x, X_k) is
// sin(half the widest angular gap between neighbouring lines, mod pi).
double lines_lambda(std::vector<double> angles) {
  for (double& a : angles) a = std::fmod(std::fmod(a, kPi) + kPi, kPi);
  std::sort(angles.begin(), angles.end());
  double widest = angles.front() + kPi - angles.back();
  for (std::size_t i = 1; i < angles.size(); ++i) widest = std::max(widest, angles[i] - angles[i - 1]);
  return std::sin(widest / 2.0);
}

}  // namespace

TEST_CASE("greedy on the coordinate axes") {
  const Decomposition d = greedy_decompose(axes(2), vec({0.6, 0.8}), 10, 1e-12);
  REQUIRE(d.terms.size() == 2);
  CHECK(d.terms[0].index == 2);
  CHECK((d.terms[0].component - vec({0, 0.8})).norm() < 1e-15);
  CHECK(d.terms[1].index == 1);
  CHECK((d.terms[1].component - vec({0.6, 0})).norm() < 1e-15);
  REQUIRE(d.residual_trace.size() == 2);
  CHECK(d.residual_trace[0] == doctest::Approx(0.6));
  CHECK(d.residual_trace[1] == doctest::Approx(0.0));

  const RepresentationReport rep = verify_representation(axes(2), d);
  CHECK(rep.absolute_sum == doctest::Approx(1.4));
  CHECK(rep.sup_partial_sum == doctest::Approx(1.0));
  CHECK(rep.final_residual == doctest::Approx(0.0));
  CHECK(rep.members_ok);
  CHECK(rep.trace_ok);
}

TEST_CASE("greedy edge cases") {
  const Decomposition empty = greedy_decompose(axes(2), vec({0, 0}), 10, 1e-12);
  CHECK(empty.terms.empty());
  const RepresentationReport rep = verify_representation(axes(2), empty);
  CHECK(rep.absolute_sum == 0.0);
  CHECK(rep.sup_partial_sum == 0.0);
  CHECK(rep.final_residual == 0.0);

  const SubspaceSystem only_e1(R2, {span_of(R2, {vec({1, 0})})});
  try {
    greedy_decompose(only_e1, vec({0, 1}), 10, 1e-12);
    FAIL("expected stagnation");
  } catch (const StagnationError& e) {
    CHECK(e.partial().terms.size() == 1);
    CHECK(e.partial().residual_trace.back() == doctest::Approx(1.0));
  }
}

TEST_CASE("greedy in polyhedral norms keeps residuals non-increasing") {
  for (NormKind p : {NormKind::L1, NormKind::Linf}) {
    const SubspaceSystem S = lines({0.0, deg(50), deg(110)}, p);
    const Vector x = vec({0.3, -0.9});
    const Decomposition d = greedy_decompose(S, x, 40, 1e-8);
    double prev = norm(x, p);
    for (double r : d.residual_trace) {
      CHECK(r <= prev + 1e-12);
      prev = r;
    }
    CHECK(d.residual_trace.back() <= 1e-8 * norm(x, p));
    const RepresentationReport rep = verify_representation(S, d);
    CHECK(rep.members_ok);
    CHECK(rep.trace_ok);
  }
}

TEST_CASE("property: greedy decay and fast-representation bounds") {
  Gen gen(31);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<double> angles;
    const int count = gen.integer(2, 5);
    for (int i = 0; i < count; ++i) angles.push_back(gen.uniform(0.0, kPi));
    const double lam = lines_lambda(angles) + 1e-6;
    if (lam >= 0.98) continue;
    const SubspaceSystem S = lines(angles);
    const Vector x = gen.gaussian(2);
    const double xn = x.norm();
    const Decomposition d = greedy_decompose(S, x, 2000, 1e-10);
    double abs_sum = 0.0;
    for (std::size_t k = 0; k < d.terms.size(); ++k) {
      const double yk = d.residual_trace[k];
      CHECK(yk <= std::pow(lam, k + 1) * xn + 1e-12);
      const double ck = d.terms[k].component.norm();
      CHECK(ck <= std::pow(lam, k) * (1 + lam) * xn + 1e-12);
      abs_sum += ck;
    }
    CHECK(abs_sum <= (1 + lam) / (1 - lam) * xn + 1e-12);
    CHECK(d.max_ratio <= lam + 1e-12);

    // Summing terms by subspace gives a finite representation of x.
    Vector total = Vector::Zero(2);
    for (const auto& [k, z] : group_by_subspace(d)) {
      CHECK(distance(z, S.at(k)) < 1e-12);
      total += z;
    }
    CHECK((total - x).norm() <= 1e-10 * xn + 1e-15);
  }
}

TEST_CASE("alternating projections on two lines") {
  const SubspaceSystem S = lines({0.0, deg(45)}, NormKind::L2, true);
  const Vector x = vec({0, 1});
  const Decomposition d = alternating_decompose(S, x, 12);
  REQUIRE(d.terms.size() == 12);
  CHECK(d.terms[0].component.norm() < 1e-15);
  CHECK((d.terms[1].component - vec({0.5, 0.5})).norm() < 1e-15);
  CHECK(d.residual_trace[0] == doctest::Approx(1.0));
  CHECK(d.residual_trace[1] == doctest::Approx(0.70710678).epsilon(1e-8));
  CHECK(d.residual_trace[2] == doctest::Approx(0.5));
  for (std::size_t n = 2; n < d.residual_trace.size(); ++n)
    CHECK(d.residual_trace[n] / d.residual_trace[n - 1] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
  CHECK(d.terms[5].index == 6);
}

TEST_CASE("alternating edge cases") {
  const SubspaceSystem S = lines({0.0, deg(45)}, NormKind::L2, true);
  const Decomposition in_first = alternating_decompose(S, vec({2, 0}), 5);
  CHECK((in_first.terms[0].component - vec({2, 0})).norm() < 1e-15);
  for (double r : in_first.residual_trace) CHECK(r < 1e-15);

  const SubspaceSystem whole(R2, {Subspace::whole(R2)});
  const Decomposition w = alternating_decompose(whole, vec({0.3, -0.7}), 3);
  CHECK((w.terms[0].component - vec({0.3, -0.7})).norm() < 1e-15);
  CHECK(w.terms[1].component.norm() == 0.0);

  CHECK_THROWS_AS(alternating_decompose(axes(2, NormKind::Linf), vec({1, 1}), 3), ValidationError);
}

TEST_CASE("property: alternating identity x = partial sum + E_n x") {
  Gen gen(77);
  for (int trial = 0; trial < 40; ++trial) {
    const int dim = gen.integer(2, 5);
    const AmbientSpace amb(dim);
    const SubspaceSystem S0 = gen.system(amb, gen.integer(1, 4), dim);
    const SubspaceSystem S(amb, S0.subspaces(), trial % 2 == 0);
    const Vector x = gen.gaussian(dim);
    const int steps = gen.integer(1, 25);
    const Decomposition d = alternating_decompose(S, x, steps);
    // Independent replay of E_n with explicit projector matrices.
    Vector e = x;
    for (int n = 1; n <= steps; ++n) {
      const Subspace X = (S.cyclic() || n <= S.size()) ? S.at(n) : Subspace::zero(amb);
      e = (Matrix::Identity(dim, dim) - X.projector()) * e;
      CHECK((x - d.partial_sum(n) - e).norm() < 1e-12);
      CHECK(d.residual_trace[n - 1] == doctest::Approx(e.norm()).epsilon(1e-12));
    }
  }
}

TEST_CASE("halperin_system construction and validation") {
  const std::vector<Subspace> H = {line_at(R2, 0.0), line_at(R2, deg(30))};
  const SubspaceSystem S = halperin_system(H, {1, 2});
  CHECK(S.cyclic());
  CHECK(S.size() == 2);
  CHECK(gap_rho0(S.at(1), line_at(R2, deg(90))) < 1e-12);
  CHECK(gap_rho0(S.at(2), line_at(R2, deg(120))) < 1e-12);

  const AmbientSpace R3(3);
  const std::vector<Subspace> H3 = {span_of(R3, {vec({1, 0, 0})}), span_of(R3, {vec({0, 1, 0})}),
                                    span_of(R3, {vec({0, 0, 1})})};
  const SubspaceSystem S3 = halperin_system(H3, {1, 2, 3});
  CHECK(S3.spans());
  CHECK(sum_dimension(S3.subspaces()) == 3);

  CHECK_THROWS_AS(halperin_system(H, {1, 1, 2}), ValidationError);
  CHECK_THROWS_AS(halperin_system(H, {1, 2, 1}), ValidationError);  // wraps back to 1
  CHECK_THROWS_AS(halperin_system(H3, {1, 2}), ValidationError);
  CHECK_THROWS_AS(halperin_system(H, {1, 3}), ValidationError);
}

TEST_CASE("property: two-line alternating rate tends to cos(angle)") {
  for (double a : {10.0, 25.0, 45.0, 70.0, 85.0}) {
    const SubspaceSystem S = halperin_system({line_at(R2, 0.0), line_at(R2, deg(a))}, {1, 2});
    const Decomposition d = alternating_decompose(S, vec({0.37, -1.2}), 8);
    for (std::size_t n = 5; n < d.residual_trace.size(); ++n)
      CHECK(std::abs(d.residual_trace[n] / d.residual_trace[n - 1] - std::cos(deg(a))) < 1e-6);
  }
}

TEST_CASE("replication decomposition") {
  const SubspaceSystem S = axes(2, NormKind::L2, true);
  ReplicationSchedule sched;
  sched.generators = S.subspaces();
  sched.stages = 6;

  SUBCASE("zero vector") {
    const ReplicationResult r = replication_decompose(S, vec({0, 0}), sched);
    CHECK(r.decomposition.terms.empty());
  }

  SUBCASE("exact membership finishes in stage 1") {
    const ReplicationResult r = replication_decompose(S, vec({0.5, 0}), sched);
    REQUIRE(r.stage_sizes.size() == 1);
    CHECK(r.decomposition.residual_trace.back() <= std::ldexp(1.0, -6));
    int prev = 0;
    for (const auto& t : r.decomposition.terms) {
      CHECK(t.index > prev);
      prev = t.index;
    }
    CHECK(verify_representation(S, r.decomposition).members_ok);
  }

  SUBCASE("random vectors meet the prefix bound") {
    Gen gen(404);
    const SubspaceSystem L = lines({0.0, deg(35), deg(100)}, NormKind::L2, true);
    ReplicationSchedule ls;
    ls.generators = {L.at(2), L.at(3)};
    for (int trial = 0; trial < 20; ++trial) {
      const Vector x = gen.unit(2) * 0.9;
      const ReplicationResult r = replication_decompose(L, x, ls);
      const Decomposition& d = r.decomposition;
      REQUIRE(r.deviations.size() == d.terms.size() + 1);
      // Re-evaluate every prefix norm from the terms.
      Vector partial = Vector::Zero(2);
      int prev = 0;
      for (std::size_t s = 0; s <= d.terms.size(); ++s) {
        if (s > 0) {
          partial += d.terms[s - 1].component;
          CHECK(d.terms[s - 1].index > prev);
          prev = d.terms[s - 1].index;
        }
        const auto& dev = r.deviations[s];
        CHECK(dev.prefix == s);
        CHECK((x - partial).norm() == doctest::Approx(dev.delta).epsilon(1e-12));
        CHECK((x - partial).norm() < 6.0 * std::ldexp(1.0, -dev.stage));
      }
      CHECK((x - partial).norm() < std::ldexp(1.0, -ls.stages));
      CHECK(verify_representation(L, d).members_ok);
    }
  }

  SUBCASE("large vectors are rescaled and scaled back") {
    const ReplicationResult r = replication_decompose(S, vec({3, -4}), sched);
    CHECK(r.scale == doctest::Approx(0.125));
    CHECK(verify_representation(S, r.decomposition).final_residual < 1e-12);
  }

  SUBCASE("generators outside every member are rejected") {
    ReplicationSchedule bad = sched;
    bad.generators = {line_at(R2, deg(20)), line_at(R2, deg(70))};
    CHECK_THROWS_AS(replication_decompose(S, vec({0.5, 0.1}), bad), ValidationError);
  }

  SUBCASE("non-spanning generators are rejected") {
    ReplicationSchedule bad = sched;
    bad.generators = {S.at(1)};
    CHECK_THROWS_AS(replication_decompose(S, vec({0.5, 0.1}), bad), ValidationError);
  }

  SUBCASE("replication cap is enforced") {
    ReplicationSchedule tight = sched;
    tight.r_cap = 1;
    CHECK_THROWS_AS(replication_decompose(S, vec({0.9, 0.1}), tight), BudgetError);
  }
}

TEST_CASE("verify_representation flags a misplaced term") {
  Decomposition d;
  d.target = vec({1, 1});
  d.terms = {{1, vec({1, 0})}, {1, vec({0, 1})}};
  d.residual_trace = {1.0, 0.0};
  const RepresentationReport rep = verify_representation(axes(2), d);
  CHECK_FALSE(rep.members_ok);
  CHECK(rep.max_membership > 1e-9);
  CHECK(rep.trace_ok);
}
