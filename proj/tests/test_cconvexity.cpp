#include "subrep/cconvexity.hpp"

#include "test_support.hpp"

#include <doctest.h>

using namespace subrep;
using namespace subrep::testing;

namespace {

// All 2^n sign patterns, no symmetry reduction.
double all_signs_max(const AmbientSpace& amb, const std::vector<Vector>& ys) {
  const int n = static_cast<int>(ys.size());
  double best = 0.0;
  for (int mask = 0; mask < (1 << n); ++mask) {
    Vector s = Vector::Zero(amb.real_dim());
    for (int k = 0; k < n; ++k) s += (mask & (1 << k) ? -1.0 : 1.0) * ys[static_cast<std::size_t>(k)];
    best = std::max(best, amb.norm(s));
  }
  return best;
}

void check_witness(const AmbientSpace& amb, const CConstantReport& r) {
  REQUIRE(static_cast<int>(r.witness_vectors.size()) == r.n);
  for (const auto& y : r.witness_vectors) CHECK(amb.norm(y) >= 1.0 - 1e-9);
  CHECK(all_signs_max(amb, r.witness_vectors) == doctest::Approx(r.value).epsilon(1e-6));
  REQUIRE(static_cast<int>(r.witness_signs.size()) == r.n);
  Vector s = Vector::Zero(amb.real_dim());
  for (int k = 0; k < r.n; ++k) s += r.witness_signs[static_cast<std::size_t>(k)] * r.witness_vectors[static_cast<std::size_t>(k)];
  CHECK(amb.norm(s) == doctest::Approx(r.value).epsilon(1e-9));
}

CConvOptions quick(int starts = 32) {
  CConvOptions o;
  o.starts = starts;
  return o;
}

}  // namespace

TEST_CASE("sign_max enumerates patterns") {
  const AmbientSpace R2(2);
  std::vector<int> signs;
  CHECK(sign_max(R2, {vec({1, 0}), vec({1, 0})}, &signs) == doctest::Approx(2.0));
  CHECK(signs == std::vector<int>{1, 1});
  CHECK(sign_max(R2, {vec({1, 0}), vec({0, 1})}) == doctest::Approx(std::sqrt(2.0)));
  CHECK_THROWS_AS(sign_max(R2, {}), ValidationError);
  CHECK_THROWS_AS(sign_max(R2, {vec({1, 0, 0})}), ValidationError);
}

TEST_CASE("c_constant with one vector is one") {
  for (NormKind p : {NormKind::L1, NormKind::L2, NormKind::Linf}) {
    const AmbientSpace amb(3, Field::Real, p);
    const CConstantReport r = c_constant(amb, 1, quick(8));
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-9));
    check_witness(amb, r);
  }
}

TEST_CASE("c_constant on the real line is n") {
  for (int n = 1; n <= 6; ++n) {
    const AmbientSpace R1(1, Field::Real, NormKind::L2);
    const CConstantReport r = c_constant(R1, n, quick(8));
    CHECK(std::abs(r.value - n) <= 1e-9);
    check_witness(R1, r);
  }
}

TEST_CASE("Euclidean c_constant is sqrt n") {
  for (int n = 2; n <= 5; ++n) {
    const AmbientSpace amb(n);
    const CConstantReport r = c_constant(amb, n, quick());
    // The parallelogram average bounds every feasible point from below.
    CHECK(r.value >= std::sqrt(static_cast<double>(n)) - 1e-9);
    CHECK(r.value <= 1.02 * std::sqrt(static_cast<double>(n)));
    check_witness(amb, r);
  }
}

TEST_CASE("l_inf c_constant is one when d >= n") {
  for (int n = 2; n <= 4; ++n) {
    const AmbientSpace amb(n, Field::Real, NormKind::Linf);
    const CConstantReport r = c_constant(amb, n, quick());
    CHECK(std::abs(r.value - 1.0) <= 1e-6);
    check_witness(amb, r);
  }
}

TEST_CASE("planar estimates agree with a brute-force grid") {
  for (NormKind p : {NormKind::L1, NormKind::L2, NormKind::Linf}) {
    const AmbientSpace amb(2, Field::Real, p);
    for (int n = 2; n <= 3; ++n) {
      CConvOptions o = quick();
      o.dense = false;
      const CConstantReport r = c_constant(amb, n, o);
      // Independent grid: 90 directions per vector over a half turn.
      double grid = 1e9;
      std::vector<Vector> dirs;
      for (int i = 0; i < 90; ++i) {
        Vector v = vec({std::cos(kPi * i / 90), std::sin(kPi * i / 90)});
        dirs.push_back(v / norm(v, p));
      }
      for (const auto& a : dirs)
        for (const auto& b : dirs) {
          if (n == 2) {
            grid = std::min(grid, all_signs_max(amb, {a, b}));
            continue;
          }
          for (const auto& c : dirs) grid = std::min(grid, all_signs_max(amb, {a, b, c}));
        }
      CHECK(r.value <= grid + 1e-9);
      CHECK(r.value >= grid * 0.98);
      check_witness(amb, r);
    }
  }
}

TEST_CASE("c_constant is non-decreasing in n") {
  for (NormKind p : {NormKind::L1, NormKind::L2, NormKind::Linf}) {
    const AmbientSpace amb(3, Field::Real, p);
    double prev = 0.0;
    for (int n = 1; n <= 4; ++n) {
      const double v = c_constant(amb, n, quick(16)).value;
      CHECK(v >= prev * 0.98);
      prev = v;
    }
  }
}

TEST_CASE("complex constant is at most twice the real one") {
  const AmbientSpace C2(2, Field::Complex);
  for (int n = 1; n <= 3; ++n) {
    const CConstantReport real = c_constant(C2, n, quick(16));
    const CConstantReport cx = c_constant_complex(C2, n, quick(16));
    CHECK(cx.value <= 2.0 * real.value + 1e-6);
    CHECK(cx.value >= 1.0 - 1e-9);
    REQUIRE(cx.witness_phases.size() == static_cast<std::size_t>(n));
    CHECK(cx.witness_phases[0] == 0.0);
    CHECK(phase_max(C2, cx.witness_vectors, 8) == doctest::Approx(cx.value).epsilon(1e-9));
  }
  CHECK_THROWS_AS(c_constant_complex(AmbientSpace(2), 2), ValidationError);
}

TEST_CASE("c_constant limits") {
  CHECK_THROWS_AS(c_constant(AmbientSpace(2), 0), ValidationError);
  CHECK_THROWS_AS(c_constant(AmbientSpace(2), 13), BudgetError);
  CHECK_THROWS_AS(c_constant_complex(AmbientSpace(2, Field::Complex), 6), BudgetError);
}

TEST_CASE("c_constant is reproducible across thread counts") {
  const AmbientSpace amb(3, Field::Real, NormKind::L1);
  CConvOptions a = quick(12);
  a.threads = 1;
  CConvOptions b = a;
  b.threads = 3;
  const CConstantReport ra = c_constant(amb, 3, a);
  const CConstantReport rb = c_constant(amb, 3, b);
  CHECK(ra.value == rb.value);
  CHECK(ra.witness_signs == rb.witness_signs);
}

TEST_CASE("removal experiment examples") {
  const SubspaceSystem cyc = axes(2, NormKind::L2, true);
  const RemovalReport r = removal_experiment(cyc, {{1}, {2}}, 1);
  CHECK(r.horizon == 4);
  REQUIRE(r.margins.size() == 2);
  for (double v : r.margins) CHECK(v == doctest::Approx(std::sqrt(0.5)).epsilon(1e-3));
  CHECK(r.lemma_holds);
  CHECK(r.tail_holds);
  CHECK(r.note.empty());

  // Families that strip every copy of a direction: the finite truncation
  // loses the hypothesis and the report says so.
  const RemovalReport bad = removal_experiment(cyc, {{1, 3}, {2, 4}}, 1);
  CHECK_FALSE(bad.lemma_holds);
  for (double v : bad.margins) CHECK(v <= 1e-9);
  CHECK(bad.note == "hypothesis violated at finite truncation");

  const SubspaceSystem three = lines({0.0, deg(60), deg(120)});
  const RemovalReport t = removal_experiment(three, {{1}, {2}, {3}}, 1);
  REQUIRE(t.margins.size() == 3);
  for (double v : t.margins) CHECK(v > 1e-6);
  CHECK(t.lemma_holds);

  CHECK_THROWS_AS(removal_experiment(cyc, {{1}, {1}}, 1), ValidationError);
  CHECK_THROWS_AS(removal_experiment(three, {{1, 2, 3}}, 1), ValidationError);
  CHECK_THROWS_AS(removal_experiment(three, {{4}}, 1), ValidationError);
  CHECK_THROWS_AS(removal_experiment(lines({0.0}), {{1}}, 1), ValidationError);
}
