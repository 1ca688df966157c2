#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lpnorm/rng.hpp"
#include "lpnorm/tensor.hpp"

namespace lpnorm {

/// Universal constants of the randomized construction; the published source
/// only asserts their existence, so they are configuration with defaults
/// chosen to reproduce the reported evaluations (delta3 follows the reported
/// practical reduction).
struct RandCoverConstants {
  double delta0 = 2.0;
  double delta1 = 1.0;
  double delta2 = 1.0;
  double delta3 = 20.0;
};

/// Finite set of unit-lp vectors with a certified hitting ratio tau: every x
/// on the dual sphere S_q^n has inner product >= tau with some member.
struct HittingSet {
  double p = 0.0;
  int n = 0;
  std::vector<Vec> vectors;
  double tau = 0.0;          // 0 when uncertified
  bool probabilistic = false;
  double confidence = 1.0;   // 1 - eps for probabilistic certificates
  std::string construction;  // tag, e.g. "hh"
  std::map<std::string, double> params;

  int size() const { return static_cast<int>(vectors.size()); }
  double q() const { return p / (p - 1.0); }

  nlohmann::json to_json() const;
  static HittingSet from_json(const nlohmann::json& j);
};

/// mu_{alpha,beta} = (alpha/(beta(alpha+1)))^(1/p) (1 - 1/alpha).
double mu_alpha_beta(double alpha, double beta, double p);
/// nu_{alpha,beta}, the asymptotic per-dimension cardinality base (without
/// the vanishing correction).
double nu_alpha_beta(double alpha, double beta);

inline constexpr std::int64_t kDefaultCardinalityCap = 1'000'000;

/// Exhaustive sign/level construction over all admissible index partitions;
/// hitting ratio mu_{alpha,beta}. Exponential cardinality, guarded by `cap`.
HittingSet build_hh(int n, double p, double alpha, double beta,
                    std::int64_t cap = kDefaultCardinalityCap);

/// Normalized integer grid points in the lp ball of radius gamma n^(1/p);
/// hitting ratio 1 - 1/gamma.
HittingSet build_hb(int n, double p, double gamma, std::int64_t cap = kDefaultCardinalityCap);

/// E^{n2} (kron) H, tau / n2^(1/q), cardinality m * n2.
HittingSet lift_kron(const HittingSet& h, int n2);

/// (H1 v 0) u (0 v H2), tau = tau1 tau2 / (tau1^q + tau2^q)^(1/q).
HittingSet combine_append(const HittingSet& h1, const HittingSet& h2);

/// Block-recursive sign transform of size 2^k m; symmetric, squares to 2^k I.
struct ExtendedHadamard {
  int m = 1;
  int k = 0;
  int dim() const { return m << k; }
};

Vec hadamard_apply(const ExtendedHadamard& h, const Vec& x);

/// 2^(-k/p) I_{m,k} (E^{2^k} (kron) H); tau' = 2^(-k/2) m^(1/2 - 1/q) tau.
HittingSet lift_hadamard(const HittingSet& h, int k, double p);

/// Truncation to the first n1 coordinates (zero prefixes dropped,
/// renormalized, deduplicated); tau is preserved.
HittingSet cut(const HittingSet& h, int n1);

/// Kron lift of the exhaustive set to ~n/ln n blocks plus an appended tail;
/// tau = mu (ln n / (n + ln n))^(1/q).
HittingSet build_h1(int n, double p, double alpha, double beta,
                    std::int64_t cap = kDefaultCardinalityCap);

/// Hadamard-lifted exhaustive set cut back to dimension n;
/// tau = mu (ln n)^(1/p) / sqrt(2n). Requires p >= 2, n >= 2.
HittingSet build_h2(int n, double p, double alpha, double beta,
                    std::int64_t cap = kDefaultCardinalityCap);

/// Normalized grid with coordinates in {0, +-1/m, ..., +-1}; uncertified.
HittingSet build_hg(int n, double p, int m, std::int64_t cap = kDefaultCardinalityCap);

/// Even distribution on S_p^n: |x_i|^p ~ Gamma(1/p, 1) with independent
/// signs, then normalized. p = inf draws uniform coordinates on [-1, 1].
Vec sample_even_lp(int n, double p, Rng& rng);

/// i.i.d. even samples; cardinality ceil(d3 n^d2 ((1/2 + 1/q) n ln n +
/// ln(1/eps))), tau = sqrt(d0 ln n / (2n)) with confidence 1 - eps.
HittingSet build_h3(int n, double p, double eps, const RandCoverConstants& constants, Rng& rng);

enum class ProbeMode { Random, Adversarial };

/// Empirical min over probes x in S_q^n of max_{v in H} v'x: an upper bound
/// on the true hitting ratio and a certificate sanity check from below.
double probe_hitting_ratio(const HittingSet& h, int num_probes, Rng& rng,
                           ProbeMode mode = ProbeMode::Adversarial);

}  // namespace lpnorm
