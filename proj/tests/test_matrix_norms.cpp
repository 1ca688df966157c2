#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lpnorm/matrix_norms.hpp"

using namespace lpnorm;

namespace {

Mat random_matrix(int m, int n, Rng& rng, bool nonneg = false) {
  Mat a(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = nonneg ? rng.uniform() : rng.uniform(-1.0, 1.0);
  return a;
}

// The maximization route to ||A||_pv: max <B, X> over X >= 0 with the two
// diagonal power-sum budgets, modeled with X as svec variables and
// x_ii^(p/2) <= s_i via (s_i, x_ii, 1) in K3_p. Independent of matrix_pv's
// minimization program; used for the strong-duality check.
double pv_via_primal(const Mat& a, const RationalExponent& p) {
  const int m = static_cast<int>(a.rows()), n = static_cast<int>(a.cols());
  const int side = m + n;
  ConicProgram prog;
  std::vector<std::vector<int>> x(side, std::vector<int>(side, -1));
  for (int j = 0; j < side; ++j)
    for (int i = 0; i <= j; ++i) {
      x[i][j] = prog.add_var();
      x[j][i] = x[i][j];
    }
  const int one = prog.add_var();
  prog.add_linear(LinExpr::var(one), Rel::EQ, 1.0);
  const auto s = prog.add_vars(side, true, "s");
  const ConeBlock block = k3p_block(p);
  LinExpr budget_rows, budget_cols;
  for (int i = 0; i < side; ++i) {
    prog.add_block(block, {s[i], x[i][i], one});
    (i < m ? budget_rows : budget_cols) += LinExpr::var(s[i]);
  }
  prog.add_linear(budget_rows, Rel::LE, 1.0);
  prog.add_linear(budget_cols, Rel::LE, 1.0);

  std::vector<std::vector<LinExpr>> psd(side, std::vector<LinExpr>(side));
  for (int i = 0; i < side; ++i)
    for (int j = 0; j < side; ++j) psd[i][j] = LinExpr::var(x[i][j]);
  prog.psd_embed(psd);

  LinExpr obj;  // <B, X> with B = [[0, A/2], [A'/2, 0]]: sum_ij a_ij x_{i, m+j}
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) obj += a(i, j) * LinExpr::var(x[i][m + j]);
  prog.set_objective(obj, /*maximize=*/true);
  const auto res = solve(prog);
  REQUIRE(res.status == SolveStatus::Optimal);
  return *res.objective;
}

}  // namespace

TEST_CASE("pv on zero and rank-one matrices") {
  const auto p = RationalExponent::parse("3");
  CHECK(matrix_pv(Mat::Zero(2, 3), p).value == 0.0);

  Mat e11 = Mat::Zero(2, 2);
  e11(0, 0) = 1.0;
  const double pv = matrix_pv(e11, p).value;
  CHECK(pv >= 1.0 - 1e-7);
  CHECK(pv <= kDeltaG + 1e-7);

  Rng rng(3);
  const double q = p.conjugate();
  for (int rep = 0; rep < 10; ++rep) {
    Vec u(3), v(4);
    for (int i = 0; i < 3; ++i) u[i] = rng.uniform();
    for (int i = 0; i < 4; ++i) v[i] = rng.uniform();
    const double truth = lp_norm(u, q) * lp_norm(v, q);
    const double val = matrix_pv(u * v.transpose(), p).value;
    CHECK(val >= truth - 1e-6);
    CHECK(val <= kDeltaG * truth + 1e-6);
  }
}

TEST_CASE("pu on zero and rank-one matrices, with certificates") {
  const auto p = RationalExponent::parse("3");
  CHECK(matrix_pu(Mat::Zero(3, 2), p).value == 0.0);

  Rng rng(5);
  for (int rep = 0; rep < 8; ++rep) {
    Vec u(3), v(3);
    for (int i = 0; i < 3; ++i) {
      u[i] = rng.uniform();
      v[i] = rng.uniform();
    }
    const double truth = lp_norm(u, p.value()) * lp_norm(v, p.value());
    const auto est = matrix_pu(u * v.transpose(), p);
    CHECK(est.value >= truth / kDeltaG - 1e-6);
    CHECK(est.value <= truth + 1e-6);
    REQUIRE(est.certificate.has_value());
    CHECK(matrix_pv(*est.certificate, p).value <= 1.0 + 1e-6);
  }
}

TEST_CASE("strong duality: primal maximization equals the dual minimization") {
  const auto p = RationalExponent::parse("3");
  Rng rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    const Mat a = random_matrix(4, 5, rng);
    const double dual = matrix_pv(a, p).value;
    const double primal = pv_via_primal(a, p);
    CHECK(primal == doctest::Approx(dual).epsilon(1e-5));
  }
}

TEST_CASE("oracle basics") {
  const auto p = 3.0;
  Rng rng(11);
  Mat e11 = Mat::Zero(2, 2);
  e11(0, 0) = 1.0;
  CHECK(spectral_pnorm_oracle(e11, p, 20, rng) == doctest::Approx(1.0).epsilon(1e-10));

  const double q = 1.5;
  for (int rep = 0; rep < 5; ++rep) {
    Vec u(4), v(3);
    for (int i = 0; i < 4; ++i) u[i] = rng.uniform();
    for (int i = 0; i < 3; ++i) v[i] = rng.uniform();
    CHECK(spectral_pnorm_oracle(u * v.transpose(), p, 50, rng) ==
          doctest::Approx(lp_norm(u, q) * lp_norm(v, q)).epsilon(1e-8));
  }
}

TEST_CASE("spectral sandwich: oracle <= pv <= delta_G * oracle") {
  Rng rng(13);
  int idx = 0;
  for (const auto& pstr : {"5/2", "3", "4"}) {
    const auto p = RationalExponent::parse(pstr);
    for (int rep = 0; rep < 17; ++rep, ++idx) {
      const int m = 3 + idx % 3, n = 3 + (idx / 2) % 3;
      const Mat a = random_matrix(m, n, rng);
      const double pv = matrix_pv(a, p).value;
      const double oracle = spectral_pnorm_oracle(a, p.value(), 200, rng);
      CHECK(oracle <= pv + 1e-6);
      CHECK(pv <= kDeltaG * oracle + 1e-6);
    }
  }
}

TEST_CASE("pv homogeneity") {
  const auto p = RationalExponent::parse("3");
  Rng rng(17);
  const Mat a = random_matrix(3, 4, rng);
  const double base = matrix_pv(a, p).value;
  for (double c : {2.0, -3.0, 0.1}) {
    CHECK(matrix_pv(c * a, p).value == doctest::Approx(std::abs(c) * base).epsilon(1e-8));
  }
}

TEST_CASE("oracle never exceeds pv") {
  Rng rng(19);
  const auto p = RationalExponent::parse("7/2");
  for (int rep = 0; rep < 5; ++rep) {
    const Mat a = random_matrix(3, 3, rng);
    const double pv = matrix_pv(a, p).value;
    const double oracle = spectral_pnorm_oracle(a, p.value(), 100, rng);
    CHECK(oracle <= pv + 1e-7);
  }
}
