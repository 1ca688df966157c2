#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lpnorm/rng.hpp"
#include "lpnorm/solver.hpp"

using namespace lpnorm;

TEST_CASE("tiny LP") {
  ConicProgram p;
  const int x = p.add_var();
  p.add_linear(LinExpr::var(x), Rel::GE, 1.0);
  p.set_objective(LinExpr::var(x), false);
  const auto res = solve(p);
  REQUIRE(res.status == SolveStatus::Optimal);
  CHECK(*res.objective == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(res.x[x] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("LP with equalities and nonnegativity") {
  // min 2a + 3b s.t. a + b = 1, a, b >= 0  ->  a = 1, value 2
  ConicProgram p;
  const int a = p.add_var(true), b = p.add_var(true);
  p.add_linear(LinExpr::var(a) + LinExpr::var(b), Rel::EQ, 1.0);
  p.set_objective(2.0 * LinExpr::var(a) + 3.0 * LinExpr::var(b), false);
  const auto res = solve(p);
  REQUIRE(res.status == SolveStatus::Optimal);
  CHECK(*res.objective == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("least squares via a second-order cone") {
  Rng rng(5);
  for (int rep = 0; rep < 10; ++rep) {
    const int m = 6, n = 3;
    Mat a(m, n);
    Vec b(m);
    for (int i = 0; i < m; ++i) {
      b[i] = rng.uniform(-1, 1);
      for (int j = 0; j < n; ++j) a(i, j) = rng.uniform(-1, 1);
    }
    ConicProgram p;
    const auto x = p.add_vars(n);
    const int t = p.add_var();
    SocConstraint soc;
    soc.bound = LinExpr::var(t);
    for (int i = 0; i < m; ++i) {
      LinExpr row(-b[i]);
      for (int j = 0; j < n; ++j) row += a(i, j) * LinExpr::var(x[j]);
      soc.body.push_back(row);
    }
    p.add_soc(std::move(soc));
    p.set_objective(LinExpr::var(t), false);
    const auto res = solve(p);
    REQUIRE(res.status == SolveStatus::Optimal);
    const Vec xstar = a.colPivHouseholderQr().solve(b);
    CHECK(*res.objective == doctest::Approx((a * xstar - b).norm()).epsilon(1e-6));
  }
}

TEST_CASE("identity SDP") {
  // max <I, X> s.t. X >= 0, diag <= 1  ->  2
  ConicProgram p;
  const int x00 = p.add_var(), x01 = p.add_var(), x11 = p.add_var();
  p.psd_embed({{LinExpr::var(x00), LinExpr::var(x01)}, {LinExpr::var(x01), LinExpr::var(x11)}});
  p.add_linear(LinExpr::var(x00), Rel::LE, 1.0);
  p.add_linear(LinExpr::var(x11), Rel::LE, 1.0);
  p.set_objective(LinExpr::var(x00) + LinExpr::var(x11), true);
  const auto res = solve(p);
  REQUIRE(res.status == SolveStatus::Optimal);
  CHECK(*res.objective == doctest::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("largest eigenvalue via an SDP matches the dense eigensolver") {
  Rng rng(17);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 3 + static_cast<int>(rng.uniform_index(3));
    Mat a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) {
        a(i, j) = rng.uniform(-1, 1);
        a(j, i) = a(i, j);
      }
    ConicProgram p;
    const int t = p.add_var();
    std::vector<std::vector<LinExpr>> expr(n, std::vector<LinExpr>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        expr[i][j] = LinExpr(-a(i, j));
        if (i == j) expr[i][j] += LinExpr::var(t);
      }
    p.psd_embed(expr);
    p.set_objective(LinExpr::var(t), false);
    const auto res = solve(p);
    REQUIRE(res.status == SolveStatus::Optimal);
    Eigen::SelfAdjointEigenSolver<Mat> eig(a, Eigen::EigenvaluesOnly);
    CHECK(*res.objective == doctest::Approx(eig.eigenvalues().maxCoeff()).epsilon(1e-7));
  }
}

TEST_CASE("mixed cones: lp ball meets SOC and PSD") {
  // max x + y s.t. ||(x, y)|| <= 1, [[1, x], [x, 1]] >= 0, y <= 0.6
  ConicProgram p;
  const int x = p.add_var(), y = p.add_var();
  SocConstraint soc;
  soc.bound = LinExpr(1.0);
  soc.body = {LinExpr::var(x), LinExpr::var(y)};
  p.add_soc(std::move(soc));
  p.psd_embed({{LinExpr(1.0), LinExpr::var(x)}, {LinExpr::var(x), LinExpr(1.0)}});
  p.add_linear(LinExpr::var(y), Rel::LE, 0.6);
  p.set_objective(LinExpr::var(x) + LinExpr::var(y), true);
  const auto res = solve(p);
  REQUIRE(res.status == SolveStatus::Optimal);
  // optimum: y = 0.6, x = 0.8 on the circle
  CHECK(*res.objective == doctest::Approx(1.4).epsilon(1e-7));
}

TEST_CASE("infeasible and unbounded detection") {
  {
    ConicProgram p;
    const int x = p.add_var();
    p.add_linear(LinExpr::var(x), Rel::GE, 1.0);
    p.add_linear(LinExpr::var(x), Rel::LE, 0.0);
    p.set_objective(LinExpr::var(x), false);
    CHECK(solve(p).status == SolveStatus::Infeasible);
  }
  {
    ConicProgram p;
    const int x = p.add_var();
    p.add_linear(LinExpr::var(x), Rel::LE, 0.0);
    p.set_objective(LinExpr::var(x), false);
    CHECK(solve(p).status == SolveStatus::Unbounded);
  }
}

TEST_CASE("program serialization round-trip is exact") {
  ConicProgram p;
  const int x = p.add_var(true, "x"), y = p.add_var(false, "y");
  p.add_linear(2.0 * LinExpr::var(x) - LinExpr::var(y), Rel::LE, 0.25);
  SocConstraint soc;
  soc.bound = LinExpr::var(x) + LinExpr(1.0);
  soc.body = {LinExpr::var(y), 0.5 * LinExpr::var(x)};
  p.add_soc(std::move(soc));
  p.psd_embed({{LinExpr::var(x), LinExpr(0.125)}, {LinExpr(0.125), LinExpr::var(y)}});
  p.set_objective(LinExpr::var(x) - 3.0 * LinExpr::var(y), true);

  const auto j = p.to_json();
  const auto q = ConicProgram::from_json(j);
  CHECK(q.to_json() == j);
  CHECK(q.to_json().dump() == j.dump());
}

TEST_CASE("adding then rolling back a block keeps the optimum") {
  Rng rng(23);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 2 + static_cast<int>(rng.uniform_index(3));
    ConicProgram p;
    const auto x = p.add_vars(n, true);
    LinExpr obj;
    for (int i = 0; i < n; ++i) {
      p.add_linear(LinExpr::var(x[i]), Rel::LE, 1.0 + rng.uniform());
      obj += rng.uniform(0.1, 2.0) * LinExpr::var(x[i]);
    }
    p.set_objective(obj, true);

    const auto before = solve(p);
    REQUIRE(before.status == SolveStatus::Optimal);

    const auto cp = p.checkpoint();
    // a throwaway constrained block over two fresh variables
    const int a = p.add_var(true), b = p.add_var(true);
    SocConstraint soc;
    soc.bound = LinExpr(2.0);
    soc.body = {LinExpr::var(a), LinExpr::var(b)};
    p.add_soc(std::move(soc));
    p.add_linear(LinExpr::var(a) + LinExpr::var(b), Rel::LE, 1.0);
    p.rollback(cp);

    const auto after = solve(p);
    REQUIRE(after.status == SolveStatus::Optimal);
    CHECK(*after.objective == doctest::Approx(*before.objective).epsilon(1e-8));
  }
}

TEST_CASE("feasibility margin") {
  {
    // 0 <= x <= 1: deepest point is the middle
    ConicProgram p;
    const int x = p.add_var(true);
    p.add_linear(LinExpr::var(x), Rel::LE, 1.0);
    CHECK(feasibility_margin(p) == doctest::Approx(0.5).epsilon(1e-6));
  }
  {
    // empty set: x >= 1 and x <= 0
    ConicProgram p;
    const int x = p.add_var();
    p.add_linear(LinExpr::var(x), Rel::GE, 1.0);
    p.add_linear(LinExpr::var(x), Rel::LE, 0.0);
    CHECK(feasibility_margin(p) == doctest::Approx(-0.5).epsilon(1e-6));
  }
  {
    // PSD margin: X = [[1,0],[0,1]] fixed by equalities, margin 1 capped
    ConicProgram p;
    const int x00 = p.add_var(), x01 = p.add_var(), x11 = p.add_var();
    p.add_linear(LinExpr::var(x00), Rel::EQ, 1.0);
    p.add_linear(LinExpr::var(x01), Rel::EQ, 0.0);
    p.add_linear(LinExpr::var(x11), Rel::EQ, 1.0);
    p.psd_embed({{LinExpr::var(x00), LinExpr::var(x01)}, {LinExpr::var(x01), LinExpr::var(x11)}});
    CHECK(feasibility_margin(p) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("solver is deterministic") {
  ConicProgram p;
  const auto x = p.add_vars(3, true);
  p.add_linear(LinExpr::var(x[0]) + LinExpr::var(x[1]) + LinExpr::var(x[2]), Rel::EQ, 1.0);
  SocConstraint soc;
  soc.bound = LinExpr::var(x[0]) + LinExpr(0.5);
  soc.body = {LinExpr::var(x[1]), LinExpr::var(x[2])};
  p.add_soc(std::move(soc));
  p.set_objective(LinExpr::var(x[1]) + 2.0 * LinExpr::var(x[2]), true);
  const auto r1 = solve(p), r2 = solve(p);
  REQUIRE(r1.status == SolveStatus::Optimal);
  CHECK(*r1.objective == *r2.objective);
  CHECK(r1.x == r2.x);
}
