#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lpnorm/power_cone.hpp"
#include "lpnorm/rng.hpp"

using namespace lpnorm;

namespace {

// max y subject to geo_mean_block with the x's pinned to constants
double max_geo_mean(const std::vector<double>& xs) {
  int k = 0;
  while ((1 << k) < static_cast<int>(xs.size())) ++k;
  REQUIRE((1 << k) == static_cast<int>(xs.size()));
  ConicProgram prog;
  std::vector<int> handles;
  for (size_t i = 0; i < xs.size(); ++i) {
    const int h = prog.add_var();
    prog.add_linear(LinExpr::var(h), Rel::EQ, xs[i]);
    handles.push_back(h);
  }
  const int y = prog.add_var();
  handles.push_back(y);
  prog.add_block(geo_mean_block(k), handles);
  prog.set_objective(LinExpr::var(y), true);
  const auto res = solve(prog);
  REQUIRE(res.status == SolveStatus::Optimal);
  return *res.objective;
}

}  // namespace

TEST_CASE("theta_p") {
  CHECK(theta_p(4.0) == doctest::Approx(0.25).epsilon(1e-14));
  for (double p : {2.2, 2.5, 3.0, 3.5, 4.0, 7.5, 16.0}) CHECK(theta_p(p) > 0.0);
  CHECK_THROWS_AS(theta_p(2.0), Error);
}

TEST_CASE("rational_decompose") {
  const auto d3 = rational_decompose(RationalExponent::parse("3"));
  CHECK(d3.a == 1);
  CHECK(d3.b == 3);
  CHECK(d3.k == 2);
  const auto d4 = rational_decompose(RationalExponent::parse("4"));
  CHECK(d4.a == 1);
  CHECK(d4.b == 4);
  CHECK(d4.k == 3);
  const auto d52 = rational_decompose(RationalExponent::parse("5/2"));
  CHECK(d52.a == 2);
  CHECK(d52.b == 5);
  CHECK(d52.k == 3);
  CHECK_THROWS_AS(rational_decompose(RationalExponent::parse("2")), Error);
  CHECK_THROWS_AS(rational_decompose(RationalExponent::parse("3/2")), Error);
}

TEST_CASE("cone block shape matches the displayed tree") {
  for (const auto& pstr : {"3", "4", "5/2", "7/2"}) {
    const auto p = RationalExponent::parse(pstr);
    const auto dec = rational_decompose(p);
    const ConeBlock block = k3p_block(p);
    CHECK(block.num_bound == 3);
    CHECK(block.num_aux == (1 << dec.k) - 2);
    // root + internal + leaf constraints across socs and linears
    int internal = 0;
    for (int i = 1; i <= dec.k - 2; ++i) internal += 1 << i;
    CHECK(static_cast<int>(block.socs.size() + block.linear.size()) ==
          1 + internal + (1 << (dec.k - 1)));
  }
}

TEST_CASE("geo mean block reproduces the geometric mean") {
  CHECK(max_geo_mean({1.0, 1.0}) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(max_geo_mean({4.0, 1.0}) == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(max_geo_mean({1.0, 2.0, 4.0, 8.0}) == doctest::Approx(std::pow(64.0, 0.25)).epsilon(1e-7));

  Rng rng(101);
  for (int k = 1; k <= 3; ++k) {
    for (int rep = 0; rep < 17; ++rep) {
      std::vector<double> xs(1 << k);
      double logprod = 0.0;
      for (auto& x : xs) {
        x = rng.uniform(0.05, 4.0);
        logprod += std::log(x);
      }
      const double expect = std::exp(std::ldexp(logprod, -k));
      CHECK(max_geo_mean(xs) == doctest::Approx(expect).epsilon(1e-7));
    }
  }
}

TEST_CASE("k3p membership agrees with the direct inequality") {
  const auto p4 = RationalExponent::parse("4");
  CHECK(k3p_membership(1.0, 1.0, 1.0, p4).member);
  CHECK(!k3p_membership(1.0, 2.0, 1.0, p4).member);
  CHECK(k3p_gap(1.0, 2.0, 1.0, 4.0) == doctest::Approx(-3.0));
  // boundary: v^2 = 4 = t u
  const auto verdict = k3p_membership(4.0, 2.0, 1.0, p4);
  CHECK(std::abs(verdict.margin) < 1e-6);

  Rng rng(77);
  for (const auto& pstr : {"5/2", "3", "4", "7/2"}) {
    const auto p = RationalExponent::parse(pstr);
    int checked = 0;
    for (int rep = 0; rep < 60; ++rep) {
      const double u = rng.uniform(0.0, 2.0), v = rng.uniform(0.0, 2.0),
                   t = rng.uniform(0.0, 2.0);
      const double gap = k3p_gap(u, v, t, p.value());
      if (std::abs(gap) < 1e-6) continue;  // boundary band: either verdict accepted
      ++checked;
      CHECK(k3p_membership(u, v, t, p).member == (gap > 0.0));
    }
    CHECK(checked > 40);
  }
}
