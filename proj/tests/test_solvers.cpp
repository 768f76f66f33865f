#include "subrep/solvers.hpp"

#include "test_support.hpp"

#include <doctest.h>

using namespace subrep;
using namespace subrep::solvers;
using subrep::testing::vec;

TEST_CASE("simplex solves a small bounded LP") {
  // max x + y  s.t. x + 2y <= 4, 3x + y <= 6, x, y >= 0  ->  optimum 2.8 at (1.6, 1.2)
  LinearProgram lp(2);
  lp.cost = vec({-1, -1});
  lp.add_le(vec({1, 2}), 4);
  lp.add_le(vec({3, 1}), 6);
  lp.add_le(vec({-1, 0}), 0);
  lp.add_le(vec({0, -1}), 0);
  const auto r = solve(lp);
  REQUIRE(r.status == Status::Optimal);
  CHECK(r.value == doctest::Approx(-2.8).epsilon(1e-12));
  CHECK(r.x(0) == doctest::Approx(1.6));
  CHECK(r.x(1) == doctest::Approx(1.2));
}

TEST_CASE("simplex handles equalities, negative right-hand sides and free variables") {
  // min |v - 3| style: min t s.t. -t <= v - 3 <= t, v = -2 + w, w <= 1  ->  v <= -1, t = 4
  LinearProgram lp(3);  // v, t, w
  lp.cost = vec({0, 1, 0});
  lp.add_le(vec({1, -1, 0}), 3);
  lp.add_le(vec({-1, -1, 0}), -3);
  lp.add_eq(vec({1, 0, -1}), -2);
  lp.add_le(vec({0, 0, 1}), 1);
  const auto r = solve(lp);
  REQUIRE(r.status == Status::Optimal);
  CHECK(r.value == doctest::Approx(4.0));
}

TEST_CASE("simplex reports infeasible and unbounded programs") {
  LinearProgram infeasible(1);
  infeasible.add_le(vec({1}), -1);
  infeasible.add_le(vec({-1}), -1);
  CHECK(solve(infeasible).status == Status::Infeasible);

  LinearProgram unbounded(1);
  unbounded.cost = vec({-1});
  unbounded.add_le(vec({-1}), 0);
  CHECK(solve(unbounded).status == Status::Unbounded);
}

TEST_CASE("norm constraints expand to the right polyhedra") {
  const Matrix M = Matrix::Identity(3, 3);
  const Vector shift = vec({-1, 2, -0.5});
  for (NormKind p : {NormKind::L1, NormKind::Linf}) {
    // min t s.t. ||v - a||_p <= t, v fixed by equalities -> t = ||a - v0||_p
    LinearProgram lp(4);
    lp.cost(3) = 1.0;
    Matrix Mx = Matrix::Zero(3, 4);
    Mx.leftCols(3) = M;
    lp.add_norm_le(Mx, shift, p, Vector::Unit(4, 3), 0.0);
    for (int i = 0; i < 3; ++i) {
      Vector row = Vector::Zero(lp.n_vars());
      row(i) = 1.0;
      lp.add_eq(row, 0.0);
    }
    const auto r = solve(lp);
    REQUIRE(r.status == Status::Optimal);
    CHECK(r.value == doctest::Approx(norm(shift, p)).epsilon(1e-12));
  }
}

TEST_CASE("barrier method matches a closed-form second-order cone optimum") {
  // min t s.t. ||v - a|| <= t, ||v|| <= 1 with ||a|| = 3  ->  t = 2
  ConeProgram cp(3);
  cp.cost(2) = 1.0;
  Matrix A = Matrix::Zero(2, 3);
  A.leftCols(2) = Matrix::Identity(2, 2);
  cp.add_cone(A, -vec({3, 0}) * 1.0, Vector::Unit(3, 2), 0.0);
  cp.add_cone(A, Vector::Zero(2), Vector::Zero(3), 1.0);
  const auto r = solve(cp, vec({0, 0, 10}));
  REQUIRE(r.status == Status::Optimal);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(r.x(0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("barrier rejects an infeasible start") {
  ConeProgram cp(1);
  cp.add_le(vec({1}), 0.0);
  CHECK_THROWS_AS(solve(cp, vec({1})), ValidationError);
}
