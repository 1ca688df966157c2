#include "lpnorm/power_cone.hpp"

#include <cmath>

namespace lpnorm {

double theta_p(double p) {
  if (p <= 2.0) throw Error("theta_p requires p > 2");
  const double r = 2.0 / p;
  return std::pow(r, 2.0 / (p - 2.0)) - std::pow(r, p / (p - 2.0));
}

RationalDecomposition rational_decompose(const RationalExponent& p) {
  if (!p.greater_than_two()) throw Error("exponent must exceed 2 (got " + p.str() + ")");
  const std::int64_t a = p.a(), b = p.b();
  int k = 0;
  while ((std::int64_t{1} << k) < b + 1) ++k;
  return {a, b, k};
}

namespace {

// Shared tree layers: root ties `root_slot` to z^1, internal layers pair
// z^(i+1) into z^i. Aux slot of z^i_j is offset(i) + j with
// offset(i) = 2^i - 2 (levels 1..k-1).
int aux_slot(int level, int j) { return (1 << level) - 2 + j; }

void emit_tree(ConeBlock& block, int k, int root_slot) {
  if (k < 2) throw Error("geo-mean tree needs depth >= 2");
  block.num_aux = (1 << k) - 2;  // z^1..z^(k-1)
  for (int i = 1; i <= k - 1; ++i)
    for (int j = 0; j < (1 << i); ++j)
      block.aux_names.push_back("z" + std::to_string(i) + "[" + std::to_string(j) + "]");
  for (int i = 0; i < block.num_aux; ++i) block.nonneg.push_back(ConeBlock::aux(i));

  block.socs.push_back(
      {root_slot, ConeBlock::aux(aux_slot(1, 0)), ConeBlock::aux(aux_slot(1, 1))});
  for (int i = 1; i <= k - 2; ++i)
    for (int j = 0; j < (1 << i); ++j)
      block.socs.push_back({ConeBlock::aux(aux_slot(i, j)),
                            ConeBlock::aux(aux_slot(i + 1, 2 * j)),
                            ConeBlock::aux(aux_slot(i + 1, 2 * j + 1))});
}

}  // namespace

ConeBlock geo_mean_block(int k) {
  if (k < 1) throw Error("geo_mean_block requires k >= 1");
  ConeBlock block;
  const int nx = 1 << k;
  block.num_bound = nx + 1;  // x_0..x_{nx-1}, y
  const int y = nx;
  for (int i = 0; i <= nx; ++i) block.nonneg.push_back(i);
  if (k == 1) {
    block.socs.push_back({y, 0, 1});
    return block;
  }
  emit_tree(block, k, y);
  // leaves pair the x's into z^(k-1)
  for (int j = 0; j < (1 << (k - 1)); ++j)
    block.socs.push_back({ConeBlock::aux(aux_slot(k - 1, j)), 2 * j, 2 * j + 1});
  return block;
}

ConeBlock k3p_block(const RationalExponent& p) {
  const auto [a, b, k] = rational_decompose(p);
  ConeBlock block;
  block.num_bound = 3;  // u, v, t
  constexpr int U = 0, V = 1, T = 2;
  for (int i = 0; i < 3; ++i) block.nonneg.push_back(i);
  emit_tree(block, k, V);

  // leaves bind to the pattern (u x 2a, t x (b-2a), v x (2^k - b)):
  //   j in [0, a)              -> z <= u
  //   j in [a, floor(b/2))     -> z <= t
  //   j = floor(b/2), b odd    -> || (z, (t-v)/2) || <= (t+v)/2
  //   j in [ceil(b/2), 2^(k-1)) -> z <= v
  const std::int64_t half_lo = b / 2, half_hi = (b + 1) / 2;
  for (std::int64_t j = 0; j < (std::int64_t{1} << (k - 1)); ++j) {
    const int z = ConeBlock::aux(aux_slot(k - 1, static_cast<int>(j)));
    if (j < a) {
      block.linear.push_back({z, U});
    } else if (j < half_lo) {
      block.linear.push_back({z, T});
    } else if (j < half_hi) {
      block.socs.push_back({z, T, V});
    } else {
      block.linear.push_back({z, V});
    }
  }
  return block;
}

double k3p_gap(double u, double v, double t, double p) {
  if (p <= 2.0) throw Error("k3p_gap requires p > 2");
  return t * std::pow(u, 2.0 / (p - 2.0)) - std::pow(v, p / (p - 2.0));
}

MembershipVerdict k3p_membership(double u, double v, double t, const RationalExponent& p,
                                 const SolverOptions& opts) {
  ConicProgram prog;
  const int hu = prog.add_var(false, "u");
  const int hv = prog.add_var(false, "v");
  const int ht = prog.add_var(false, "t");
  prog.add_linear(LinExpr::var(hu), Rel::EQ, u);
  prog.add_linear(LinExpr::var(hv), Rel::EQ, v);
  prog.add_linear(LinExpr::var(ht), Rel::EQ, t);
  prog.add_block(k3p_block(p), {hu, hv, ht});
  const double margin = feasibility_margin(prog, opts);
  return {margin >= 0.0, margin};
}

}  // namespace lpnorm
