#pragma once

#include "lpnorm/conic.hpp"
#include "lpnorm/solver.hpp"

namespace lpnorm {

/// theta_p = (2/p)^(2/(p-2)) - (2/p)^(p/(p-2)), positive for p > 2.
double theta_p(double p);

struct RationalDecomposition {
  std::int64_t a, b;  // 1/p = a/b reduced, b > 2a
  int k;              // ceil(log2(b+1))
};

/// Requires p rational in (2, inf).
RationalDecomposition rational_decompose(const RationalExponent& p);

/// SOC tree for y <= (prod x_i)^(2^-k) over x in R_+^(2^k). Bound slots:
/// x_0..x_{2^k - 1}, then y.
ConeBlock geo_mean_block(int k);

/// SOC block for (u, v, t) in K3_p = {v^(p/(p-2)) <= t u^(2/(p-2)), u,v,t >= 0}.
/// Bound slots: u, v, t.
ConeBlock k3p_block(const RationalExponent& p);

/// Decides (u, v, t) in K3_p with the SOC block and a feasibility-margin
/// solve; positive margin inside, negative outside.
struct MembershipVerdict {
  bool member;
  double margin;
};
MembershipVerdict k3p_membership(double u, double v, double t, const RationalExponent& p,
                                 const SolverOptions& opts = {});

/// Direct evaluation t*u^(2/(p-2)) - v^(p/(p-2)) of the defining inequality.
double k3p_gap(double u, double v, double t, double p);

}  // namespace lpnorm
