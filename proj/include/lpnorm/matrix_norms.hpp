#pragma once

#include <optional>

#include "lpnorm/power_cone.hpp"
#include "lpnorm/rng.hpp"
#include "lpnorm/tensor.hpp"

namespace lpnorm {

/// Upper bound on the Grothendieck constant, used wherever a certified
/// bracket is scaled; an upper bound keeps every bracket valid.
inline constexpr double kDeltaG = 1.78221;

/// A computed norm value together with a certified bracket on the true norm
/// and an optional dual certificate.
struct NormEstimate {
  double value = 0.0;
  double lower = 0.0;   // guaranteed lower bound on the true norm
  double upper = 0.0;   // guaranteed upper bound (may be +inf)
  /// Optimum of the underlying relaxation before certified scaling: the
  /// covering methods return tau-scaled values but their raw optimum is the
  /// natural point estimate (equal to `value` for the other methods).
  double relaxation_value = 0.0;
  std::string method;
  double delta_g_used = kDeltaG;
  std::optional<Mat> certificate;      // Z with matrix_pv(Z) <= 1 + tol
  std::vector<double> taus;            // hitting ratios used, if any
  SolverStats stats;

  nlohmann::json to_json() const;
};

/// ||A||_pv via the second-order-cone / semidefinite minimization
///   min u1 + u2 + theta_p sum t_i  s.t.  (u_row, v_i, t_i) in K3_p,
///   D(v) >= [[0, A/2], [A'/2, 0]].
/// Bracket [value/delta_G, value] holds for the spectral p-norm.
NormEstimate matrix_pv(const Mat& a, const RationalExponent& p, const SolverOptions& opts = {});

/// ||A||_pu = max <A, Z> over matrices with ||Z||_pv <= 1, expressed with the
/// same cone blocks; bracket [value, delta_G * value] holds for the nuclear
/// p-norm. When `with_certificate`, the optimal Z is rescaled by
/// 1/max(1, ||Z||_pv) and attached.
NormEstimate matrix_pu(const Mat& a, const RationalExponent& p, const SolverOptions& opts = {},
                       bool with_certificate = true);

/// Multistart alternating maximization of <A, x (x) y> over unit lp spheres
/// with Holder-optimal updates. Always a valid lower bound on the spectral
/// p-norm; near-exact on small matrices with enough restarts.
double spectral_pnorm_oracle(const Mat& a, double p, int restarts, Rng& rng);

/// Internal builder shared with the tensor programs: appends the K3_p blocks
/// and budget row for the pu program; `m_expr` is the (rows x cols) affine
/// matrix appearing in the PSD corner.
struct PuBlockRefs {
  std::vector<int> v;  // diagonal handles
};
PuBlockRefs add_pu_constraints(ConicProgram& prog, const std::vector<std::vector<LinExpr>>& m_expr,
                               const RationalExponent& p, const ConeBlock& block);

}  // namespace lpnorm
