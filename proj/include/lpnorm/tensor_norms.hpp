#pragma once

#include "lpnorm/covering.hpp"
#include "lpnorm/matrix_norms.hpp"

namespace lpnorm {

/// Entrywise lp norm and sum of last-mode fiber lp norms; the pair brackets
/// the nuclear p-norm from below and above.
std::pair<double, double> vector_bounds(const DenseTensor& t, double p);

struct TensorNormOptions {
  SolverOptions solver;
  /// Rough cap on tuples x psd-block size; programs estimated above it are
  /// refused instead of thrashing the solver.
  std::int64_t program_budget = 200'000'000;
};

/// Spectral approximation: max of matrix_pv over contractions with all
/// hitting-set tuples, divided by delta_G. Bracket
/// [(prod tau / delta_G) ||T||_ps, ||T||_ps].
NormEstimate alg2_spectral(const DenseTensor& t, const RationalExponent& p,
                           const std::vector<HittingSet>& covers,
                           const TensorNormOptions& opts = {});

/// Nuclear approximation via one unfolding; `rows`/`cols` (optional) refer to
/// the ascending-dimension mode order and must keep the two largest modes on
/// opposite sides.
NormEstimate alg3_unfold_nuclear(const DenseTensor& t, const RationalExponent& p,
                                 const TensorNormOptions& opts = {});
NormEstimate alg3_unfold_nuclear(const DenseTensor& t, const RationalExponent& p,
                                 const ModePartition& part, const TensorNormOptions& opts = {});

/// Nuclear approximation via the lp norm of per-slice matrix_pu values.
NormEstimate alg4_partition_nuclear(const DenseTensor& t, const RationalExponent& p,
                                    const TensorNormOptions& opts = {});

/// Covering relaxation for order-3 tensors (single hitting set).
NormEstimate alg5_cover_nuclear_order3(const DenseTensor& t, const RationalExponent& p,
                                       const HittingSet& cover,
                                       const TensorNormOptions& opts = {});

/// Covering relaxation for order-d tensors: one shared Z, per-tuple K3_p
/// blocks; returns (prod tau_k) times the optimum.
NormEstimate alg6_cover_nuclear(const DenseTensor& t, const RationalExponent& p,
                                const std::vector<HittingSet>& covers,
                                const TensorNormOptions& opts = {});

/// Randomized covering: d-2 sampled hitting sets at per-set confidence
/// 1 - eps/(d-2), then the covering relaxation; the upper bracket holds with
/// probability at least 1 - eps.
NormEstimate alg7_randomized(const DenseTensor& t, const RationalExponent& p, double eps,
                             const RandCoverConstants& constants, Rng& rng,
                             const TensorNormOptions& opts = {});

/// sum_i e_i^(x)d and its exact spectral p-norm (1 if p <= d, else
/// n^(1 - d/p)).
DenseTensor gen_identity_tensor(int n, int d);
double identity_spectral_value(int n, int d, double p);

/// Nonnegative symmetric instance with known nuclear p-norm (p = d):
/// T = sum lambda_i x_i^(x)d with lambda ~ U[0,1], x_i = normalized U[0,1]^n;
/// the true nuclear value is sum lambda_i.
struct KnownNuclearInstance {
  DenseTensor tensor;
  double nuclear_value;
  std::vector<double> lambdas;
};
KnownNuclearInstance gen_known_nuclear_instance(int n, int d, int r, Rng& rng);

/// Multistart alternating maximization of the multilinear form over unit lp
/// spheres; a certified lower-bound witness for the spectral p-norm.
double tensor_spectral_oracle(const DenseTensor& t, double p, int restarts, Rng& rng);

}  // namespace lpnorm
