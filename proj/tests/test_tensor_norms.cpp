#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lpnorm/tensor_norms.hpp"

using namespace lpnorm;

namespace {

const double kAlphaStar = (5.0 + std::sqrt(33.0)) / 2.0;

Vec random_unit(int n, double p, Rng& rng, bool nonneg) {
  Vec x(n);
  for (int i = 0; i < n; ++i) x[i] = nonneg ? rng.uniform() : rng.uniform(-1, 1);
  return x / lp_norm(x, p);
}

}  // namespace

TEST_CASE("vector bounds") {
  Rng rng(3);
  {
    std::vector<Vec> fs;
    for (int k = 0; k < 3; ++k) fs.push_back(random_unit(3, 3.0, rng, true));
    const auto [lo, hi] = vector_bounds(rank_one(fs), 3.0);
    CHECK(lo == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(lo <= hi + 1e-12);
  }
  {
    const auto [lo, hi] = vector_bounds(gen_identity_tensor(4, 3), 3.0);
    CHECK(lo == doctest::Approx(std::pow(4.0, 1.0 / 3.0)));
    CHECK(hi == doctest::Approx(4.0));
  }
  for (int rep = 0; rep < 10; ++rep) {
    DenseTensor t({2, 3, 2});
    for (auto& v : t.data()) v = rng.uniform(-1, 1);
    const auto [lo, hi] = vector_bounds(t, 3.0);
    CHECK(lo <= hi + 1e-12);
  }
}

TEST_CASE("identity tensors") {
  CHECK(identity_spectral_value(4, 3, 3.0) == 1.0);
  CHECK(identity_spectral_value(4, 3, 4.0) == doctest::Approx(std::pow(4.0, 0.25)));
  CHECK(identity_spectral_value(1, 5, 7.0) == 1.0);
  const DenseTensor t = gen_identity_tensor(3, 3);
  CHECK(t.frobenius_norm() == doctest::Approx(std::sqrt(3.0)));
  CHECK(multilinear_form(t, {Vec::Unit(3, 1), Vec::Unit(3, 1), Vec::Unit(3, 1)}) == 1.0);
}

TEST_CASE("tensor spectral oracle finds known values") {
  Rng rng(5);
  for (int n = 2; n <= 4; ++n)
    CHECK(tensor_spectral_oracle(gen_identity_tensor(n, 3), 3.0, 30, rng) ==
          doctest::Approx(1.0).epsilon(1e-5));
  // rank-one: product of q-norms of the factors
  for (int rep = 0; rep < 4; ++rep) {
    std::vector<Vec> fs;
    double expect = 1.0;
    for (int k = 0; k < 3; ++k) {
      Vec f(3);
      for (int i = 0; i < 3; ++i) f[i] = rng.uniform(-1, 1);
      expect *= lp_norm(f, 1.5);
      fs.push_back(f);
    }
    CHECK(tensor_spectral_oracle(rank_one(fs), 3.0, 60, rng) ==
          doctest::Approx(expect).epsilon(1e-7));
  }
}

TEST_CASE("known nuclear instances") {
  Rng rng(7);
  for (int rep = 0; rep < 5; ++rep) {
    const auto inst = gen_known_nuclear_instance(3, 3, 4, rng);
    double sum = 0.0;
    for (double l : inst.lambdas) sum += l;
    CHECK(inst.nuclear_value == doctest::Approx(sum));
    const auto [lo, hi] = vector_bounds(inst.tensor, 3.0);
    CHECK(lo <= inst.nuclear_value + 1e-9);
    CHECK(inst.nuclear_value <= hi + 1e-9);
  }
  // repeated factors keep the value: T = (l1 + l2) x^(x)d is rank-one
  {
    const Vec x = random_unit(3, 3.0, rng, true);
    const double l1 = 0.4, l2 = 0.35;
    DenseTensor t = rank_one({x, x, x});
    for (auto& v : t.data()) v *= l1 + l2;
    const auto est = alg3_unfold_nuclear(t, RationalExponent::parse("3"));
    CHECK(est.value == doctest::Approx(l1 + l2).epsilon(1e-4));
  }
}

TEST_CASE("unfolding method") {
  const auto p = RationalExponent::parse("3");
  Rng rng(11);
  {
    DenseTensor zero({2, 2, 2});
    CHECK(alg3_unfold_nuclear(zero, p).value == 0.0);
  }
  for (int rep = 0; rep < 3; ++rep) {
    const auto inst = gen_known_nuclear_instance(3, 3, 1, rng);
    const auto est = alg3_unfold_nuclear(inst.tensor, p);
    CHECK(est.value / inst.nuclear_value == doctest::Approx(1.0).epsilon(1e-4));
  }
  {
    const auto inst = gen_known_nuclear_instance(3, 3, 5, rng);
    const double ratio = alg3_unfold_nuclear(inst.tensor, p).value / inst.nuclear_value;
    CHECK(ratio >= 0.61);
    CHECK(ratio <= 1.0 + 1e-6);
  }
  // bracket validity on known-value instances
  for (int rep = 0; rep < 3; ++rep) {
    const auto inst = gen_known_nuclear_instance(3, 3, 3, rng);
    const auto est = alg3_unfold_nuclear(inst.tensor, p);
    CHECK(est.lower <= inst.nuclear_value * (1.0 + 1e-4));
    CHECK(inst.nuclear_value <= est.upper * (1.0 + 1e-4));
  }
  // partitions must split the two largest modes
  CHECK_THROWS_AS(
      alg3_unfold_nuclear(gen_identity_tensor(2, 3), p, ModePartition{{0, 2}, {1}}),
      Error);
}

TEST_CASE("slice-partition method") {
  const auto p = RationalExponent::parse("3");
  Rng rng(13);
  for (int rep = 0; rep < 3; ++rep) {
    const auto inst = gen_known_nuclear_instance(3, 3, 1, rng);
    const auto est = alg4_partition_nuclear(inst.tensor, p);
    CHECK(est.value / inst.nuclear_value == doctest::Approx(1.0).epsilon(1e-4));
  }
  {
    // single-slice tensor: reduces to matrix_pu of the only slice
    DenseTensor t({1, 3, 3});
    for (auto& v : t.data()) v = rng.uniform(-1, 1);
    Mat slice(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) slice(i, j) = t({0, i, j});
    const auto est = alg4_partition_nuclear(t, p);
    CHECK(est.value == doctest::Approx(matrix_pu(slice, p).value).epsilon(1e-7));
  }
  {
    const auto inst = gen_known_nuclear_instance(3, 3, 5, rng);
    const double ratio = alg4_partition_nuclear(inst.tensor, p).value / inst.nuclear_value;
    CHECK(ratio >= 0.6);
    CHECK(ratio <= 1.0 + 1e-6);
  }
}

TEST_CASE("spectral covering method") {
  const auto p = RationalExponent::parse("3");
  const auto h2 = build_h2(2, 3.0, 2.0, 3.0);
  {
    const DenseTensor t = gen_identity_tensor(2, 3);
    const auto est = alg2_spectral(t, p, {h2});
    CHECK(est.value >= h2.tau / kDeltaG - 1e-6);
    CHECK(est.value <= 1.0 + 1e-6);  // true spectral value is 1
  }
  {
    // rank-one with the leading factor inside the set
    Rng rng(17);
    const Vec& xhat = h2.vectors[0];
    const Vec y = random_unit(2, 3.0, rng, true), z = random_unit(2, 3.0, rng, true);
    const DenseTensor t = rank_one({xhat, y, z});
    const auto est = alg2_spectral(t, p, {h2});
    const double floor =
        xhat.squaredNorm() * lp_norm(y, 1.5) * lp_norm(z, 1.5) / kDeltaG;
    CHECK(est.value >= floor - 1e-6);
    // contraction never beats the full spectral norm
    CHECK(est.value <= tensor_spectral_oracle(t, 3.0, 100, rng) + 1e-6);
  }
  {
    // monotone under adding vectors to the set
    Rng rng(19);
    DenseTensor t({2, 2, 2});
    for (auto& v : t.data()) v = rng.uniform(-1, 1);
    const auto base = alg2_spectral(t, p, {h2});
    HittingSet bigger = h2;
    bigger.vectors.push_back(random_unit(2, 3.0, rng, false));
    const auto more = alg2_spectral(t, p, {bigger});
    CHECK(more.value >= base.value - 1e-9);
  }
}

TEST_CASE("covering relaxation: zero tensor and singleton cross-check") {
  const auto p = RationalExponent::parse("3");
  {
    DenseTensor zero({2, 2, 2});
    const auto h = build_h2(2, 3.0, 2.0, 3.0);
    CHECK(alg5_cover_nuclear_order3(zero, p, h).value == 0.0);
  }
  {
    // with n1 = 1 and the singleton {(1)}, the program is exactly matrix_pu
    Rng rng(23);
    DenseTensor t({1, 3, 3});
    for (auto& v : t.data()) v = rng.uniform(-1, 1);
    Mat slice(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) slice(i, j) = t({0, i, j});
    HittingSet single;
    single.p = 3.0;
    single.n = 1;
    single.tau = 0.37;
    single.vectors = {Vec::Ones(1)};
    const auto est = alg5_cover_nuclear_order3(t, p, single);
    CHECK(est.value ==
          doctest::Approx(single.tau * matrix_pu(slice, p).value).epsilon(1e-6));
  }
}

TEST_CASE("covering relaxation on known-value instances") {
  const auto p = RationalExponent::parse("3");
  const auto h2 = build_h2(3, 3.0, kAlphaStar, kAlphaStar + 1.0);
  Rng rng(29);
  for (int rep = 0; rep < 3; ++rep) {
    const auto inst = gen_known_nuclear_instance(3, 3, 2, rng);
    const auto est = alg5_cover_nuclear_order3(inst.tensor, p, h2);
    // certified value stays below the true norm; bracket holds
    CHECK(est.value <= inst.nuclear_value * (1.0 + 1e-4));
    CHECK(est.value >= h2.tau / kDeltaG * inst.nuclear_value * (1.0 - 1e-6));
    CHECK(inst.nuclear_value <= est.upper * (1.0 + 1e-4));
  }
}

TEST_CASE("order-4 covering relaxation with p = 4") {
  const auto p = RationalExponent::parse("4");
  const auto h = build_h2(2, 4.0, 2.0, 3.0);
  Rng rng(31);
  // symmetric nonnegative instance with known nuclear 4-norm
  const auto inst = gen_known_nuclear_instance(2, 4, 2, rng);
  const auto est = alg6_cover_nuclear(inst.tensor, p, {h, h});
  const double taus = h.tau * h.tau;
  CHECK(est.value <= inst.nuclear_value * (1.0 + 1e-4));
  CHECK(est.value >= taus / kDeltaG * inst.nuclear_value * (1.0 - 1e-6));
}

TEST_CASE("randomized covering is seed-reproducible") {
  const auto p = RationalExponent::parse("3");
  Rng rng(37);
  const auto inst = gen_known_nuclear_instance(3, 3, 2, rng);
  RandCoverConstants cc;
  cc.delta3 = 2.0;  // small set keeps this test quick
  Rng r1(99), r2(99);
  const auto a = alg7_randomized(inst.tensor, p, 0.05, cc, r1);
  const auto b = alg7_randomized(inst.tensor, p, 0.05, cc, r2);
  CHECK(a.value == b.value);
  CHECK(a.relaxation_value == b.relaxation_value);
  CHECK(a.value <= inst.nuclear_value * (1.0 + 1e-4));
}
