#include "lpnorm/tensor_norms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lpnorm {

namespace {

// Ascending-dimension mode order, ties broken by original index.
std::vector<int> ascending_perm(const DenseTensor& t) {
  std::vector<int> perm(t.order());
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(),
                   [&](int a, int b) { return t.dim(a) < t.dim(b); });
  return perm;
}

void require_order3plus(const DenseTensor& t) {
  if (t.order() < 3) throw Error("tensor algorithms require order >= 3");
}

void check_covers(const DenseTensor& t, const RationalExponent& p,
                  const std::vector<HittingSet>& covers) {
  const int d = t.order();
  if (static_cast<int>(covers.size()) != d - 2)
    throw Error("need one hitting set per covered mode (d - 2 total)");
  for (int k = 0; k < d - 2; ++k) {
    if (covers[k].vectors.empty()) throw Error("empty hitting set");
    if (covers[k].n != t.dim(k)) throw Error("hitting set dimension mismatch on mode " +
                                             std::to_string(k));
    if (std::abs(covers[k].p - p.value()) > 1e-12)
      throw Error("hitting set exponent mismatch");
  }
}

// Contracts the first d-2 modes with the given vectors.
Mat contract_leading(const DenseTensor& t, const std::vector<const Vec*>& xs) {
  DenseTensor cur = t;
  for (const Vec* x : xs) cur = mode_product(cur, 0, *x);
  const int r = cur.dim(0), c = cur.dim(1);
  Mat m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = cur.data()[i * c + j];
  return m;
}

double tau_product(const std::vector<HittingSet>& covers) {
  double t = 1.0;
  for (const auto& h : covers) t *= h.tau;
  return t;
}

}  // namespace

std::pair<double, double> vector_bounds(const DenseTensor& t, double p) {
  const int d = t.order();
  const int nd = t.dim(d - 1);
  const std::int64_t fibers = t.size() / nd;
  double upper = 0.0;
  for (std::int64_t f = 0; f < fibers; ++f) {
    Vec fiber(nd);
    for (int i = 0; i < nd; ++i) fiber[i] = t.data()[f * nd + i];
    upper += lp_norm(fiber, p);
  }
  const Vec all = Eigen::Map<const Vec>(t.data().data(), t.size());
  return {lp_norm(all, p), upper};
}

NormEstimate alg2_spectral(const DenseTensor& t, const RationalExponent& p,
                           const std::vector<HittingSet>& covers,
                           const TensorNormOptions& opts) {
  require_order3plus(t);
  const DenseTensor tp = permute_modes(t, ascending_perm(t));
  check_covers(tp, p, covers);
  const int d = tp.order();

  double tuples = 1.0;
  for (const auto& h : covers) tuples *= h.size();
  if (tuples < 1.0) throw Error("empty hitting set");
  const double side = tp.dim(d - 2) + tp.dim(d - 1);
  if (tuples * side * side > static_cast<double>(opts.program_budget))
    throw Error("contraction count exceeds program budget");

  NormEstimate est;
  est.method = "spectral-cover";
  for (const auto& h : covers) est.taus.push_back(h.tau);

  double best = 0.0;
  std::vector<int> idx(d - 2, 0);
  for (;;) {
    std::vector<const Vec*> xs(d - 2);
    for (int k = 0; k < d - 2; ++k) xs[k] = &covers[k].vectors[idx[k]];
    const Mat m = contract_leading(tp, xs);
    const NormEstimate pv = matrix_pv(m, p, opts.solver);
    best = std::max(best, pv.value);
    int k = d - 3;
    while (k >= 0 && ++idx[k] == covers[k].size()) idx[k--] = 0;
    if (k < 0) break;
  }
  const double taus = tau_product(covers);
  est.value = best / kDeltaG;
  est.relaxation_value = best;
  est.lower = est.value;
  est.upper = taus > 0.0 ? best / taus : kInf;
  return est;
}

NormEstimate alg3_unfold_nuclear(const DenseTensor& t, const RationalExponent& p,
                                 const TensorNormOptions& opts) {
  require_order3plus(t);
  const int d = t.order();
  ModePartition part;
  for (int k = 0; k < d - 1; ++k) part.row_modes.push_back(k);
  part.col_modes.push_back(d - 1);
  return alg3_unfold_nuclear(t, p, part, opts);
}

NormEstimate alg3_unfold_nuclear(const DenseTensor& t, const RationalExponent& p,
                                 const ModePartition& part, const TensorNormOptions& opts) {
  require_order3plus(t);
  const DenseTensor tp = permute_modes(t, ascending_perm(t));
  const int d = tp.order();
  part.validate(d);
  const bool rows_have = std::count(part.row_modes.begin(), part.row_modes.end(), d - 2) > 0;
  const bool cols_have = std::count(part.col_modes.begin(), part.col_modes.end(), d - 1) > 0;
  if (!rows_have || !cols_have)
    throw Error("unfolding must split the two largest modes across rows and columns");

  NormEstimate est = matrix_pu(unfold(tp, part), p, opts.solver, /*with_certificate=*/false);
  est.method = "unfold";
  est.relaxation_value = est.value;
  const double q = p.conjugate();
  double blowup = 1.0;
  for (int k = 0; k < d - 2; ++k) blowup *= std::pow(tp.dim(k), 1.0 / q);
  est.lower = est.value;
  est.upper = kDeltaG * blowup * est.value;
  return est;
}

NormEstimate alg4_partition_nuclear(const DenseTensor& t, const RationalExponent& p,
                                    const TensorNormOptions& opts) {
  require_order3plus(t);
  const DenseTensor tp = permute_modes(t, ascending_perm(t));
  const int d = tp.order();
  const auto slices = slice_partition(tp, d - 2, d - 1);
  Vec values(static_cast<Eigen::Index>(slices.size()));
  SolverStats last;
  for (size_t i = 0; i < slices.size(); ++i) {
    NormEstimate e = matrix_pu(slices[i], p, opts.solver, /*with_certificate=*/false);
    values[static_cast<Eigen::Index>(i)] = e.value;
    last = e.stats;
  }
  NormEstimate est;
  est.method = "partition";
  est.stats = last;
  est.value = lp_norm(values, p.value());
  est.relaxation_value = est.value;
  const double q = p.conjugate();
  double blowup = 1.0;
  for (int k = 0; k < d - 2; ++k) blowup *= std::pow(tp.dim(k), 1.0 / q);
  est.lower = est.value;
  est.upper = kDeltaG * blowup * est.value;
  return est;
}

NormEstimate alg6_cover_nuclear(const DenseTensor& t, const RationalExponent& p,
                                const std::vector<HittingSet>& covers,
                                const TensorNormOptions& opts) {
  require_order3plus(t);
  const DenseTensor tp0 = permute_modes(t, ascending_perm(t));
  check_covers(tp0, p, covers);
  const int d = tp0.order();
  const int r = tp0.dim(d - 2), c = tp0.dim(d - 1);

  double tuples = 1.0;
  for (const auto& h : covers) tuples *= h.size();
  const double side = r + c;
  if (tuples * side * side * side > static_cast<double>(opts.program_budget))
    throw Error("covering program exceeds program budget");

  const double scale = tp0.frobenius_norm();
  NormEstimate est;
  est.method = "cover";
  for (const auto& h : covers) est.taus.push_back(h.tau);
  if (scale == 0.0) return est;

  DenseTensor tp = tp0;
  for (auto& v : tp.data()) v /= scale;

  ConicProgram prog;
  const auto zvars = prog.add_vars(static_cast<int>(tp.size()), false, "Z");
  const ConeBlock block = k3p_block(p);

  const std::int64_t lead = tp.size() / (static_cast<std::int64_t>(r) * c);
  std::vector<int> idx(d - 2, 0);
  for (;;) {
    // coefficient of Z_(i1..i_{d-2}, j, k) in the contracted matrix entry (j, k)
    std::vector<std::vector<LinExpr>> m_expr(r, std::vector<LinExpr>(c));
    for (std::int64_t f = 0; f < lead; ++f) {
      std::int64_t rem = f;
      double coeff = 1.0;
      for (int k = d - 3; k >= 0; --k) {
        const int ik = static_cast<int>(rem % tp.dim(k));
        rem /= tp.dim(k);
        coeff *= covers[k].vectors[idx[k]][ik];
      }
      if (coeff == 0.0) continue;
      const std::int64_t base = f * r * c;
      for (int j = 0; j < r; ++j)
        for (int k2 = 0; k2 < c; ++k2)
          m_expr[j][k2] += coeff * LinExpr::var(zvars[base + j * c + k2]);
    }
    add_pu_constraints(prog, m_expr, p, block);
    int k = d - 3;
    while (k >= 0 && ++idx[k] == covers[k].size()) idx[k--] = 0;
    if (k < 0) break;
  }

  LinExpr obj;
  for (std::int64_t i = 0; i < tp.size(); ++i)
    if (tp.data()[i] != 0.0) obj += tp.data()[i] * LinExpr::var(zvars[i]);
  prog.set_objective(obj, /*maximize=*/true);

  SolveResult res = solve(prog, opts.solver);
  est.stats = res.stats;
  if (res.status != SolveStatus::Optimal)
    throw SolverError("covering program failed (" + to_string(res.status) + "): " +
                          res.stats.message,
                      res.stats);
  const double taus = tau_product(covers);
  est.relaxation_value = *res.objective * scale;
  est.value = taus * est.relaxation_value;
  est.lower = est.value;
  est.upper = kDeltaG * est.relaxation_value;
  return est;
}

NormEstimate alg5_cover_nuclear_order3(const DenseTensor& t, const RationalExponent& p,
                                       const HittingSet& cover, const TensorNormOptions& opts) {
  if (t.order() != 3) throw Error("order-3 specialization requires a 3-tensor");
  return alg6_cover_nuclear(t, p, {cover}, opts);
}

NormEstimate alg7_randomized(const DenseTensor& t, const RationalExponent& p, double eps,
                             const RandCoverConstants& constants, Rng& rng,
                             const TensorNormOptions& opts) {
  require_order3plus(t);
  const DenseTensor tp = permute_modes(t, ascending_perm(t));
  const int d = tp.order();
  std::vector<HittingSet> covers;
  covers.reserve(d - 2);
  for (int k = 0; k < d - 2; ++k) {
    Rng sub = rng.fork(static_cast<std::uint64_t>(k) + 1);
    covers.push_back(build_h3(tp.dim(k), p.value(), eps / (d - 2), constants, sub));
  }
  NormEstimate est = alg6_cover_nuclear(tp, p, covers, opts);
  est.method = "rand";
  return est;
}

DenseTensor gen_identity_tensor(int n, int d) {
  if (n < 1 || d < 1) throw Error("identity tensor needs n, d >= 1");
  DenseTensor t(std::vector<int>(d, n));
  std::int64_t stride = 0;
  for (int k = 0; k < d; ++k) stride = stride * n + 1;
  for (int i = 0; i < n; ++i) t.data()[i * stride] = 1.0;
  return t;
}

double identity_spectral_value(int n, int d, double p) {
  if (!(p >= 2.0)) throw Error("identity spectral value needs p >= 2");
  if (p <= static_cast<double>(d)) return 1.0;
  return std::pow(n, 1.0 - static_cast<double>(d) / p);
}

KnownNuclearInstance gen_known_nuclear_instance(int n, int d, int r, Rng& rng) {
  if (d < 2) throw Error("instance generator needs d >= 2");
  if (n < 1 || r < 1) throw Error("instance generator needs n, r >= 1");
  const double p = d;  // the construction requires p = d
  KnownNuclearInstance inst;
  inst.tensor = DenseTensor(std::vector<int>(d, n));
  inst.nuclear_value = 0.0;
  for (int i = 0; i < r; ++i) {
    const double lambda = rng.uniform();
    Vec x(n);
    for (int j = 0; j < n; ++j) x[j] = rng.uniform();
    x /= lp_norm(x, p);
    const DenseTensor rk = rank_one(std::vector<Vec>(d, x));
    for (std::int64_t k = 0; k < rk.size(); ++k) inst.tensor.data()[k] += lambda * rk.data()[k];
    inst.nuclear_value += lambda;
    inst.lambdas.push_back(lambda);
  }
  return inst;
}

double tensor_spectral_oracle(const DenseTensor& t, double p, int restarts, Rng& rng) {
  if (p <= 1.0) throw Error("tensor_spectral_oracle requires p > 1");
  const int d = t.order();
  if (d == 1) {
    const Vec x = Eigen::Map<const Vec>(t.data().data(), t.size());
    return lp_norm(x, p / (p - 1.0));
  }

  double best = 0.0;
  auto run = [&](std::vector<Vec> xs) {
    for (auto& x : xs) {
      const double nx = lp_norm(x, p);
      if (nx == 0.0) return;
      x /= nx;
    }
    double val = 0.0;
    for (int sweep = 0; sweep < 200; ++sweep) {
      double sweep_val = 0.0;
      for (int k = 0; k < d; ++k) {
        // contracting in descending mode order leaves pending indices intact
        DenseTensor cur = t;
        for (int j = d - 1; j >= 0; --j) {
          if (j == k) continue;
          cur = mode_product(cur, j, xs[j]);
        }
        Vec w = Eigen::Map<const Vec>(cur.data().data(), cur.size());
        const Vec xk = lp_dual_vector(w, p);
        if (lp_norm(xk, p) == 0.0) return;
        xs[k] = xk;
        sweep_val = lp_norm(w, p / (p - 1.0));
      }
      if (sweep_val <= val + 1e-14 * std::max(1.0, val)) {
        val = std::max(val, sweep_val);
        break;
      }
      val = sweep_val;
    }
    best = std::max(best, val);
  };

  // structured starts: aligned basis tuples and the all-ones tuple
  const int nmin = *std::min_element(t.shape().begin(), t.shape().end());
  for (int i = 0; i < nmin; ++i) {
    std::vector<Vec> xs;
    for (int k = 0; k < d; ++k) xs.push_back(Vec::Unit(t.dim(k), i));
    run(std::move(xs));
  }
  {
    std::vector<Vec> xs;
    for (int k = 0; k < d; ++k) xs.push_back(Vec::Ones(t.dim(k)));
    run(std::move(xs));
  }
  for (int rix = 0; rix < restarts; ++rix) {
    std::vector<Vec> xs;
    for (int k = 0; k < d; ++k) {
      Vec x(t.dim(k));
      for (int i = 0; i < t.dim(k); ++i) x[i] = rng.normal();
      xs.push_back(std::move(x));
    }
    run(std::move(xs));
  }
  return best;
}

}  // namespace lpnorm
