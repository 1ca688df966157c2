#include "lpnorm/solver.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

namespace lpnorm {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

// Internal standard form:
//   min c'x  s.t.  A x = b,  G x + s = h,  s in K,
// with K = R+^l  x  SOC(q_0) x ... x  PSD(s_0) x ...
// PSD slacks are stored in svec form (column-major upper triangle, off-diagonal
// entries scaled by sqrt(2)) so all cone inner products are plain dot products.

struct Cones {
  int l = 0;
  std::vector<int> q;
  std::vector<int> s;

  int dim() const {
    int n = l;
    for (int m : q) n += m;
    for (int m : s) n += svec_size(m);
    return n;
  }
  int degree() const {
    int d = l + static_cast<int>(q.size());
    for (int m : s) d += m;
    return d;
  }
};

struct StandardForm {
  int nx = 0;
  Vec c;
  double obj_offset = 0.0;
  double obj_sign = 1.0;  // result = obj_sign * (c'x) + obj_offset
  SpMat A;                // equalities
  Vec b;
  SpMat G;                // cone rows
  Vec h;
  Cones cones;
};

void append_row(std::vector<Triplet>& trip, int row, const LinExpr& e, double scale) {
  for (const auto& [h, c] : e.terms)
    if (c != 0.0) trip.emplace_back(row, h, scale * c);
}

StandardForm to_standard_form(const ConicProgram& prog) {
  StandardForm sf;
  sf.nx = prog.num_vars();
  sf.c = Vec::Zero(sf.nx);
  sf.obj_sign = prog.maximize() ? -1.0 : 1.0;
  for (const auto& [h, c] : prog.objective().terms) sf.c[h] += sf.obj_sign * c;
  sf.obj_offset = prog.objective().constant;

  std::vector<Triplet> atrip, gtrip;
  std::vector<double> bvals, hvals;

  for (const auto& lc : prog.linear()) {
    if (lc.rel == Rel::EQ) {
      append_row(atrip, static_cast<int>(bvals.size()), lc.lhs, 1.0);
      bvals.push_back(lc.rhs - lc.lhs.constant);
    }
  }

  // R+ rows: a'x <= rhs  ->  a'x + s = rhs
  auto add_ineq = [&](const LinExpr& lhs, double rhs, double sign) {
    append_row(gtrip, static_cast<int>(hvals.size()), lhs, sign);
    hvals.push_back(sign * (rhs - lhs.constant));
  };
  for (const auto& lc : prog.linear()) {
    if (lc.rel == Rel::LE) add_ineq(lc.lhs, lc.rhs, 1.0);
    else if (lc.rel == Rel::GE) add_ineq(lc.lhs, lc.rhs, -1.0);
  }
  for (int i = 0; i < prog.num_vars(); ++i) {
    if (prog.is_nonneg(i)) {
      gtrip.emplace_back(static_cast<int>(hvals.size()), i, -1.0);
      hvals.push_back(0.0);
    }
  }
  sf.cones.l = static_cast<int>(hvals.size());

  // SOC rows: s = (bound(x), body(x)) in Q
  for (const auto& soc : prog.socs()) {
    append_row(gtrip, static_cast<int>(hvals.size()), soc.bound, -1.0);
    hvals.push_back(soc.bound.constant);
    for (const auto& e : soc.body) {
      append_row(gtrip, static_cast<int>(hvals.size()), e, -1.0);
      hvals.push_back(e.constant);
    }
    sf.cones.q.push_back(static_cast<int>(soc.body.size()) + 1);
  }

  // PSD rows: s = svec(M(x))
  const double rt2 = std::sqrt(2.0);
  for (const auto& psd : prog.psds()) {
    const int n = psd.side;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i <= j; ++i) {
        const LinExpr& e = psd.upper[svec_index(i, j, n)];
        const double scale = (i == j) ? 1.0 : rt2;
        append_row(gtrip, static_cast<int>(hvals.size()), e, -scale);
        hvals.push_back(scale * e.constant);
      }
    sf.cones.s.push_back(n);
  }

  sf.A = SpMat(static_cast<int>(bvals.size()), sf.nx);
  sf.A.setFromTriplets(atrip.begin(), atrip.end());
  sf.b = Eigen::Map<Vec>(bvals.data(), static_cast<Eigen::Index>(bvals.size()));
  sf.G = SpMat(static_cast<int>(hvals.size()), sf.nx);
  sf.G.setFromTriplets(gtrip.begin(), gtrip.end());
  sf.h = Eigen::Map<Vec>(hvals.data(), static_cast<Eigen::Index>(hvals.size()));
  return sf;
}

// ---- svec/mat helpers -------------------------------------------------------

Mat svec_to_mat(const double* v, int n) {
  const double inv_rt2 = 1.0 / std::sqrt(2.0);
  Mat m(n, n);
  int k = 0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i <= j; ++i, ++k) {
      const double x = (i == j) ? v[k] : v[k] * inv_rt2;
      m(i, j) = x;
      m(j, i) = x;
    }
  return m;
}

void mat_to_svec(const Mat& m, double* v) {
  const int n = static_cast<int>(m.rows());
  const double rt2 = std::sqrt(2.0);
  int k = 0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i <= j; ++i, ++k) v[k] = (i == j) ? m(i, j) : m(i, j) * rt2;
}

// ---- Nesterov-Todd scaling --------------------------------------------------

struct Scaling {
  Vec d;                     // R+ block: W = diag(d)
  std::vector<Mat> soc_w;    // per SOC block, symmetric W
  std::vector<double> soc_beta;
  std::vector<Mat> psd_r;    // PSD: W u = svec(r' U r)
  Vec lambda;                // scaled point, full cone layout
};

double jnrm2(const Eigen::Ref<const Vec>& u) {
  const double t = u[0] * u[0] - u.tail(u.size() - 1).squaredNorm();
  return std::sqrt(std::max(t, 0.0));
}

// W = I scaling with lambda = e (used before the first iteration).
Scaling identity_scaling(const Cones& cones) {
  Scaling w;
  w.d = Vec::Ones(cones.l);
  w.lambda = Vec::Zero(cones.dim());
  int off = 0;
  w.lambda.head(cones.l).setOnes();
  off += cones.l;
  for (int m : cones.q) {
    w.soc_w.push_back(Mat::Identity(m, m));
    w.soc_beta.push_back(1.0);
    w.lambda[off] = 1.0;
    off += m;
  }
  for (int m : cones.s) {
    w.psd_r.push_back(Mat::Identity(m, m));
    for (int j = 0; j < m; ++j) w.lambda[off + svec_index(j, j, m)] = 1.0;
    off += svec_size(m);
  }
  return w;
}

bool compute_scaling(const Cones& cones, const Vec& s, const Vec& z, Scaling& w) {
  w.d.resize(cones.l);
  w.soc_w.assign(cones.q.size(), Mat());
  w.soc_beta.assign(cones.q.size(), 1.0);
  w.psd_r.assign(cones.s.size(), Mat());
  w.lambda.resize(cones.dim());

  for (int i = 0; i < cones.l; ++i) {
    if (s[i] <= 0.0 || z[i] <= 0.0) return false;
    w.d[i] = std::sqrt(s[i] / z[i]);
    w.lambda[i] = std::sqrt(s[i] * z[i]);
  }
  int off = cones.l;
  for (size_t k = 0; k < cones.q.size(); ++k) {
    const int m = cones.q[k];
    const auto sk = s.segment(off, m);
    const auto zk = z.segment(off, m);
    const double as = jnrm2(sk), az = jnrm2(zk);
    if (as <= 0.0 || az <= 0.0) return false;
    const Vec sbar = sk / as;
    const Vec zbar = zk / az;
    const double gamma = std::sqrt((1.0 + sbar.dot(zbar)) / 2.0);
    if (!(gamma > 0.0)) return false;

    // hyperbolic Householder vector v with v'Jv = 1 such that
    // W = beta (2 v v' - J) maps z to lambda and s to lambda under W^{-T}.
    Vec jz = zbar;
    jz.tail(m - 1) = -zbar.tail(m - 1);
    Vec v = (sbar + jz) / (2.0 * gamma);
    v[0] += 1.0;
    v /= std::sqrt(2.0 * v[0]);

    const double beta = std::sqrt(as / az);
    Mat W = 2.0 * (v * v.transpose());
    W(0, 0) -= 1.0;
    for (int i = 1; i < m; ++i) W(i, i) += 1.0;
    W *= beta;
    w.soc_w[k] = W;
    w.soc_beta[k] = beta;

    const double dd = sbar[0] + zbar[0] + 2.0 * gamma;
    Vec lam(m);
    lam[0] = gamma;
    lam.tail(m - 1) = ((gamma + zbar[0]) / dd) * sbar.tail(m - 1) +
                      ((gamma + sbar[0]) / dd) * zbar.tail(m - 1);
    lam *= std::sqrt(as * az);
    w.lambda.segment(off, m) = lam;
    off += m;
  }
  for (size_t k = 0; k < cones.s.size(); ++k) {
    const int m = cones.s[k];
    const Mat S = svec_to_mat(s.data() + off, m);
    const Mat Z = svec_to_mat(z.data() + off, m);
    Eigen::LLT<Mat> ls(S), lz(Z);
    if (ls.info() != Eigen::Success || lz.info() != Eigen::Success) return false;
    const Mat Ls = ls.matrixL();
    const Mat Lz = lz.matrixL();
    Eigen::JacobiSVD<Mat> svd(Lz.transpose() * Ls, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vec sig = svd.singularValues();
    if (sig.minCoeff() <= 0.0) return false;
    const Vec isqrt = sig.cwiseSqrt().cwiseInverse();
    w.psd_r[k] = Ls * svd.matrixV() * isqrt.asDiagonal();
    Vec lam = Vec::Zero(svec_size(m));
    for (int j = 0; j < m; ++j) lam[svec_index(j, j, m)] = sig[j];
    w.lambda.segment(off, svec_size(m)) = lam;
    off += svec_size(m);
  }
  return true;
}

enum class ScaleOp { W, WT, Winv, WinvT };

// Applies the scaling (or transpose/inverse) blockwise.
//   W:     l: d.*u      q: W u                 s: r' U r
//   WT:    l: d.*u      q: W u   (symmetric)   s: r U r'
//   Winv:  l: u./d      q: (1/b^2) J W J u     s: r^{-T} U r^{-1}
//   WinvT: l: u./d      q: same                s: r^{-1} U r^{-T}
Vec apply_scaling(const Cones& cones, const Scaling& w, const Vec& u, ScaleOp op) {
  Vec out(u.size());
  const bool inv = (op == ScaleOp::Winv || op == ScaleOp::WinvT);
  for (int i = 0; i < cones.l; ++i) out[i] = inv ? u[i] / w.d[i] : u[i] * w.d[i];
  int off = cones.l;
  for (size_t k = 0; k < cones.q.size(); ++k) {
    const int m = cones.q[k];
    if (!inv) {
      out.segment(off, m) = w.soc_w[k] * u.segment(off, m);
    } else {
      Vec ju = u.segment(off, m);
      ju.tail(m - 1) = -ju.tail(m - 1);
      Vec r = w.soc_w[k] * ju;
      r.tail(m - 1) = -r.tail(m - 1);
      out.segment(off, m) = r / (w.soc_beta[k] * w.soc_beta[k]);
    }
    off += m;
  }
  for (size_t k = 0; k < cones.s.size(); ++k) {
    const int m = cones.s[k];
    const Mat U = svec_to_mat(u.data() + off, m);
    const Mat& r = w.psd_r[k];
    Mat res;
    switch (op) {
      case ScaleOp::W: res = r.transpose() * U * r; break;
      case ScaleOp::WT: res = r * U * r.transpose(); break;
      case ScaleOp::Winv: {
        Eigen::PartialPivLU<Mat> lu(r.transpose());
        res = lu.solve(U);                          // r^{-T} U
        res = lu.solve(res.transpose()).transpose();  // r^{-T} U r^{-1}
        break;
      }
      case ScaleOp::WinvT: {
        Eigen::PartialPivLU<Mat> lu(r);
        res = lu.solve(U);                          // r^{-1} U
        res = lu.solve(res.transpose()).transpose();  // r^{-1} U r^{-T}
        break;
      }
    }
    mat_to_svec(res, out.data() + off);
    off += svec_size(m);
  }
  return out;
}

// Jordan product u o v per cone block.
Vec jordan_product(const Cones& cones, const Vec& u, const Vec& v) {
  Vec out(u.size());
  for (int i = 0; i < cones.l; ++i) out[i] = u[i] * v[i];
  int off = cones.l;
  for (int m : cones.q) {
    const auto uk = u.segment(off, m);
    const auto vk = v.segment(off, m);
    out[off] = uk.dot(vk);
    out.segment(off + 1, m - 1) = uk[0] * vk.tail(m - 1) + vk[0] * uk.tail(m - 1);
    off += m;
  }
  for (int m : cones.s) {
    const Mat U = svec_to_mat(u.data() + off, m);
    const Mat V = svec_to_mat(v.data() + off, m);
    const Mat P = 0.5 * (U * V + V * U);
    mat_to_svec(P, out.data() + off);
    off += svec_size(m);
  }
  return out;
}

// Solves lambda o u = b where lambda is the scaled point (diagonal for PSD).
Vec jordan_solve_lambda(const Cones& cones, const Vec& lambda, const Vec& b) {
  Vec out(b.size());
  for (int i = 0; i < cones.l; ++i) out[i] = b[i] / lambda[i];
  int off = cones.l;
  for (int m : cones.q) {
    const auto lk = lambda.segment(off, m);
    const auto bk = b.segment(off, m);
    const double l0 = lk[0];
    const double det = l0 * l0 - lk.tail(m - 1).squaredNorm();
    const double u0 = (l0 * bk[0] - lk.tail(m - 1).dot(bk.tail(m - 1))) / det;
    out[off] = u0;
    out.segment(off + 1, m - 1) = (bk.tail(m - 1) - u0 * lk.tail(m - 1)) / l0;
    off += m;
  }
  for (int m : cones.s) {
    Vec diag(m);
    for (int j = 0; j < m; ++j) diag[j] = lambda[off + svec_index(j, j, m)];
    int k = 0;
    for (int j = 0; j < m; ++j)
      for (int i = 0; i <= j; ++i, ++k) out[off + k] = 2.0 * b[off + k] / (diag[i] + diag[j]);
    off += svec_size(m);
  }
  return out;
}

// Identity element of the cone algebra.
Vec cone_identity(const Cones& cones) {
  Vec e = Vec::Zero(cones.dim());
  e.head(cones.l).setOnes();
  int off = cones.l;
  for (int m : cones.q) {
    e[off] = 1.0;
    off += m;
  }
  for (int m : cones.s) {
    for (int j = 0; j < m; ++j) e[off + svec_index(j, j, m)] = 1.0;
    off += svec_size(m);
  }
  return e;
}

// Smallest cone-eigenvalue of u (per-block minimum).
double min_cone_eig(const Cones& cones, const Vec& u) {
  double m = kInf;
  for (int i = 0; i < cones.l; ++i) m = std::min(m, u[i]);
  int off = cones.l;
  for (int mq : cones.q) {
    m = std::min(m, u[off] - u.segment(off + 1, mq - 1).norm());
    off += mq;
  }
  for (int ms : cones.s) {
    const Mat U = svec_to_mat(u.data() + off, ms);
    Eigen::SelfAdjointEigenSolver<Mat> eig(U, Eigen::EigenvaluesOnly);
    m = std::min(m, eig.eigenvalues().minCoeff());
    off += svec_size(ms);
  }
  return m;
}

// Largest alpha in [0, cap] with lambda + alpha * d in the cone; lambda is the
// current scaled point (strictly interior).
double max_step_scaled(const Cones& cones, const Vec& lambda, const Vec& d, double cap) {
  double alpha = cap;
  for (int i = 0; i < cones.l; ++i)
    if (d[i] < 0.0) alpha = std::min(alpha, -lambda[i] / d[i]);
  int off = cones.l;
  for (int m : cones.q) {
    const auto lk = lambda.segment(off, m);
    const auto dk = d.segment(off, m);
    // roots of (l0 + a d0)^2 - ||l1 + a d1||^2 = 0
    const double a = dk[0] * dk[0] - dk.tail(m - 1).squaredNorm();
    const double b = 2.0 * (lk[0] * dk[0] - lk.tail(m - 1).dot(dk.tail(m - 1)));
    const double c = lk[0] * lk[0] - lk.tail(m - 1).squaredNorm();
    double root = kInf;
    const double disc = b * b - 4.0 * a * c;
    if (std::abs(a) < 1e-300) {
      if (b < 0.0) root = -c / b;
    } else if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      const double r1 = (-b - sq) / (2.0 * a);
      const double r2 = (-b + sq) / (2.0 * a);
      root = kInf;
      if (r1 > 0.0) root = std::min(root, r1);
      if (r2 > 0.0) root = std::min(root, r2);
    }
    if (dk[0] < 0.0) root = std::min(root, -lk[0] / dk[0]);
    alpha = std::min(alpha, root);
    off += m;
  }
  for (int m : cones.s) {
    Vec diag(m);
    for (int j = 0; j < m; ++j) diag[j] = lambda[off + svec_index(j, j, m)];
    Mat D = svec_to_mat(d.data() + off, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) D(i, j) /= std::sqrt(diag[i] * diag[j]);
    Eigen::SelfAdjointEigenSolver<Mat> eig(D, Eigen::EigenvaluesOnly);
    const double lmin = eig.eigenvalues().minCoeff();
    if (lmin < 0.0) alpha = std::min(alpha, -1.0 / lmin);
    off += svec_size(m);
  }
  return std::max(alpha, 0.0);
}

// Dense svec-space matrix of U -> M U M for symmetric M (the PSD block of
// W'W uses M = r r').
Mat sym_congruence_svec(const Mat& M) {
  const int n = static_cast<int>(M.rows());
  const int nn = svec_size(n);
  const double inv_rt2 = 1.0 / std::sqrt(2.0);
  Mat out(nn, nn);
  Vec tmp(nn);
  int col = 0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i <= j; ++i, ++col) {
      Mat B;
      if (i == j) {
        B = M.col(i) * M.col(i).transpose();
      } else {
        B = (M.col(i) * M.col(j).transpose() + M.col(j) * M.col(i).transpose()) * inv_rt2;
      }
      mat_to_svec(B, tmp.data());
      out.col(col) = tmp;
    }
  return out;
}

struct KktSolver {
  const StandardForm& sf;
  const SolverOptions& opts;
  int nx, ny, nz, ntotal;
  SpMat K;       // regularized KKT matrix, lower triangle
  Vec reg_sign;  // +1 on x block, -1 on y/z blocks
  Eigen::SimplicialLDLT<SpMat> ldlt;
  bool analyzed = false;
  double delta;

  KktSolver(const StandardForm& sf_, const SolverOptions& opts_)
      : sf(sf_), opts(opts_), nx(sf_.nx), ny(static_cast<int>(sf_.A.rows())),
        nz(static_cast<int>(sf_.G.rows())), ntotal(nx + ny + nz), delta(opts_.static_reg) {
    reg_sign = Vec::Ones(ntotal);
    reg_sign.tail(ny + nz) = -Vec::Ones(ny + nz);
  }

  // Builds K = [dI A' G'; A -dI 0; G 0 -W'W-dI] (lower triangle stored).
  bool factorize(const Scaling& w) {
    std::vector<Triplet> trip;
    trip.reserve(static_cast<size_t>(sf.A.nonZeros() + sf.G.nonZeros()) + ntotal + 1024);
    for (int i = 0; i < ntotal; ++i) trip.emplace_back(i, i, reg_sign[i] * delta);
    for (int k = 0; k < sf.A.outerSize(); ++k)
      for (SpMat::InnerIterator it(sf.A, k); it; ++it)
        trip.emplace_back(nx + static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    for (int k = 0; k < sf.G.outerSize(); ++k)
      for (SpMat::InnerIterator it(sf.G, k); it; ++it)
        trip.emplace_back(nx + ny + static_cast<int>(it.row()), static_cast<int>(it.col()),
                          it.value());
    const int base = nx + ny;
    for (int i = 0; i < sf.cones.l; ++i)
      trip.emplace_back(base + i, base + i, -w.d[i] * w.d[i]);
    int off = sf.cones.l;
    for (size_t k = 0; k < sf.cones.q.size(); ++k) {
      const int m = sf.cones.q[k];
      const Mat WW = w.soc_w[k] * w.soc_w[k];  // W symmetric
      for (int j = 0; j < m; ++j)
        for (int i = j; i < m; ++i) trip.emplace_back(base + off + i, base + off + j, -WW(i, j));
      off += m;
    }
    for (size_t k = 0; k < sf.cones.s.size(); ++k) {
      const int m = sf.cones.s[k];
      const Mat M = w.psd_r[k] * w.psd_r[k].transpose();
      const Mat WW = sym_congruence_svec(M);
      const int nn = svec_size(m);
      for (int j = 0; j < nn; ++j)
        for (int i = j; i < nn; ++i) trip.emplace_back(base + off + i, base + off + j, -WW(i, j));
      off += nn;
    }
    SpMat Kn(ntotal, ntotal);
    Kn.setFromTriplets(trip.begin(), trip.end());
    K = std::move(Kn);
    if (!analyzed) {
      ldlt.analyzePattern(K);
      analyzed = true;
    }
    ldlt.factorize(K);
    return ldlt.info() == Eigen::Success;
  }

  // One solve with iterative refinement against the unregularized system.
  void solve(Vec& rhs, const Scaling& w) const {
    const Vec b0 = rhs;
    Vec u = ldlt.solve(rhs);
    for (int round = 0; round < opts.refinement_rounds; ++round) {
      const Vec r = b0 - apply_kkt(u, w);
      if (r.lpNorm<Eigen::Infinity>() < 1e-14 * std::max(1.0, b0.lpNorm<Eigen::Infinity>())) break;
      u += ldlt.solve(r);
    }
    rhs = u;
  }

  // Applies the exact (unregularized) KKT matrix.
  Vec apply_kkt(const Vec& u, const Scaling& w) const {
    const auto ux = u.head(nx);
    const auto uy = u.segment(nx, ny);
    const auto uz = u.tail(nz);
    Vec out(ntotal);
    out.head(nx) = sf.A.transpose() * uy + sf.G.transpose() * uz;
    out.segment(nx, ny) = sf.A * ux;
    Vec wwz = apply_scaling(sf.cones, w, uz, ScaleOp::W);
    wwz = apply_scaling(sf.cones, w, wwz, ScaleOp::WT);
    out.tail(nz) = sf.G * ux - wwz;
    return out;
  }
};

}  // namespace

SolveResult solve(const ConicProgram& prog, const SolverOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  StandardForm sf = to_standard_form(prog);
  const Cones& cones = sf.cones;
  const int nx = sf.nx, ny = static_cast<int>(sf.A.rows()), nz = static_cast<int>(sf.G.rows());

  SolveResult result;
  auto finish = [&](SolveStatus st, double obj, const Vec& x, SolverStats stats) {
    result.status = st;
    result.stats = std::move(stats);
    result.stats.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.x.assign(x.data(), x.data() + x.size());
    if (st == SolveStatus::Optimal) result.objective = sf.obj_sign * obj + sf.obj_offset;
    return result;
  };

  SolverStats stats;
  if (nz == 0) {
    stats.message = "program has no cone constraints";
    return finish(SolveStatus::NumericalTrouble, 0, Vec::Zero(nx), stats);
  }

  const Vec e = cone_identity(cones);
  const double degree = cones.degree() + 1;

  Scaling w = identity_scaling(cones);
  KktSolver kkt(sf, opts);
  if (!kkt.factorize(w)) {
    kkt.delta *= 100;
    if (!kkt.factorize(w)) {
      stats.message = "initial factorization failed";
      return finish(SolveStatus::NumericalTrouble, 0, Vec::Zero(nx), stats);
    }
  }

  // initial point: least-norm primal/dual from two KKT solves, shifted into
  // the interior of the cone
  Vec x, y, s, z;
  {
    Vec rhs = Vec::Zero(nx + ny + nz);
    rhs.segment(nx, ny) = sf.b;
    rhs.tail(nz) = sf.h;
    kkt.solve(rhs, w);
    x = rhs.head(nx);
    s = -rhs.tail(nz);
    const double me = min_cone_eig(cones, s);
    if (me < 1e-8 * std::max(1.0, s.norm())) s += (1.0 - me) * e;
  }
  {
    Vec rhs = Vec::Zero(nx + ny + nz);
    rhs.head(nx) = -sf.c;
    kkt.solve(rhs, w);
    y = rhs.segment(nx, ny);
    z = rhs.tail(nz);
    const double me = min_cone_eig(cones, z);
    if (me < 1e-8 * std::max(1.0, z.norm())) z += (1.0 - me) * e;
  }
  double tau = 1.0, kappa = 1.0;

  const double norm_c = std::max(1.0, sf.c.norm());
  const double norm_bh = std::max(1.0, std::sqrt(sf.b.squaredNorm() + sf.h.squaredNorm()));

  Vec best_x = Vec::Zero(nx);
  double best_res = kInf, best_obj = 0.0;

  for (int iter = 0; iter < opts.max_iters; ++iter) {
    const Vec rx = sf.A.transpose() * y + sf.G.transpose() * z + sf.c * tau;
    const Vec ry = sf.A * x - sf.b * tau;
    const Vec rz = sf.G * x + s - sf.h * tau;
    const double rtau = sf.c.dot(x) + sf.b.dot(y) + sf.h.dot(z) + kappa;

    const double gap = s.dot(z);
    const double mu = (gap + tau * kappa) / degree;

    const double pres = std::sqrt(ry.squaredNorm() + rz.squaredNorm()) / (tau * norm_bh);
    const double dres = rx.norm() / (tau * norm_c);
    const double pobj = sf.c.dot(x) / tau;
    const double dobj = -(sf.b.dot(y) + sf.h.dot(z)) / tau;
    const double agap = gap / (tau * tau);
    const double rgap = agap / std::max({1.0, std::abs(pobj), std::abs(dobj)});

    stats.iterations = iter;
    stats.primal_residual = pres;
    stats.dual_residual = dres;
    stats.duality_gap = agap;

    if (opts.verbose)
      std::fprintf(stderr,
                   "it %3d  pobj % .8e  dobj % .8e  pres %.2e  dres %.2e  rgap %.2e  "
                   "tau %.2e kap %.2e\n",
                   iter, pobj, dobj, pres, dres, rgap, tau, kappa);

    const double res_score = std::max({pres, dres, rgap});
    if (res_score < best_res) {
      best_res = res_score;
      best_x = x / tau;
      best_obj = pobj;
    }

    if (pres <= opts.tol && dres <= opts.tol && (agap <= opts.tol || rgap <= opts.tol)) {
      stats.message = "converged";
      return finish(SolveStatus::Optimal, pobj, x / tau, stats);
    }

    if (tau < 1e-8 * std::max(1.0, kappa) || mu < 1e-16) {
      const double hzby = sf.b.dot(y) + sf.h.dot(z);
      if (hzby < 0.0 &&
          (sf.A.transpose() * y + sf.G.transpose() * z).norm() <= 1e-6 * (-hzby)) {
        stats.message = "primal infeasibility certificate";
        return finish(SolveStatus::Infeasible, 0, best_x, stats);
      }
      const double cx = sf.c.dot(x);
      if (cx < 0.0 && std::sqrt((sf.A * x).squaredNorm() + (sf.G * x + s).squaredNorm()) <=
                          1e-6 * (-cx)) {
        stats.message = "dual infeasibility certificate (objective unbounded)";
        return finish(SolveStatus::Unbounded, 0, best_x, stats);
      }
      stats.message = "tau collapsed without certificate";
      return finish(SolveStatus::NumericalTrouble, 0, best_x, stats);
    }

    if (!compute_scaling(cones, s, z, w)) {
      stats.message = "scaling breakdown (iterate left the cone)";
      return finish(SolveStatus::NumericalTrouble, 0, best_x, stats);
    }
    bool ok = kkt.factorize(w);
    if (!ok) {
      kkt.delta *= 100.0;
      ok = kkt.factorize(w);
      kkt.delta = opts.static_reg;
    }
    if (!ok) {
      stats.message = "KKT factorization failed";
      return finish(SolveStatus::NumericalTrouble, 0, best_x, stats);
    }

    // constant solve for this factorization
    Vec sol1(nx + ny + nz);
    sol1.head(nx) = -sf.c;
    sol1.segment(nx, ny) = sf.b;
    sol1.tail(nz) = sf.h;
    kkt.solve(sol1, w);
    const Vec x1 = sol1.head(nx), y1 = sol1.segment(nx, ny), z1 = sol1.tail(nz);
    const double denom0 = sf.c.dot(x1) + sf.b.dot(y1) + sf.h.dot(z1) - kappa / tau;

    const Vec lam_sq = jordan_product(cones, w.lambda, w.lambda);

    // Newton direction for residual factor f and complementarity targets
    // (bs, bkappa); also returns the scaled slack direction W^{-T} ds.
    auto newton = [&](double f, const Vec& bs, double bkappa, Vec& dx_, Vec& dy_, Vec& dz_,
                      Vec& ds_, Vec& ds_scaled_, double& dtau_, double& dkappa_) -> bool {
      Vec rhs(nx + ny + nz);
      rhs.head(nx) = -f * rx;
      rhs.segment(nx, ny) = -f * ry;
      const Vec lbs = jordan_solve_lambda(cones, w.lambda, bs);
      rhs.tail(nz) = -f * rz - apply_scaling(cones, w, lbs, ScaleOp::WT);
      kkt.solve(rhs, w);
      const Vec dx2 = rhs.head(nx), dy2 = rhs.segment(nx, ny), dz2 = rhs.tail(nz);

      if (std::abs(denom0) < 1e-300) return false;
      const double btau = -f * rtau;
      dtau_ = (btau - bkappa / tau - (sf.c.dot(dx2) + sf.b.dot(dy2) + sf.h.dot(dz2))) / denom0;
      dx_ = dx2 + dtau_ * x1;
      dy_ = dy2 + dtau_ * y1;
      dz_ = dz2 + dtau_ * z1;
      ds_scaled_ = lbs - apply_scaling(cones, w, dz_, ScaleOp::W);  // = W^{-T} ds
      ds_ = apply_scaling(cones, w, ds_scaled_, ScaleOp::WT);
      dkappa_ = (bkappa - kappa * dtau_) / tau;
      return true;
    };

    auto step_len = [&](const Vec& ds_scaled_, const Vec& dz_, double dtau_, double dkappa_) {
      const Vec dzw = apply_scaling(cones, w, dz_, ScaleOp::W);
      double a = max_step_scaled(cones, w.lambda, ds_scaled_, kInf);
      a = std::min(a, max_step_scaled(cones, w.lambda, dzw, kInf));
      if (dtau_ < 0.0) a = std::min(a, -tau / dtau_);
      if (dkappa_ < 0.0) a = std::min(a, -kappa / dkappa_);
      return a;
    };

    Vec dx, dy, dz, ds, ds_scaled;
    double dtau, dkappa;
    if (!newton(1.0, -lam_sq, -tau * kappa, dx, dy, dz, ds, ds_scaled, dtau, dkappa)) {
      stats.message = "degenerate embedding step";
      return finish(SolveStatus::NumericalTrouble, 0, best_x, stats);
    }

    const double alpha_aff = std::min(1.0, step_len(ds_scaled, dz, dtau, dkappa));
    const double sigma = std::pow(1.0 - alpha_aff, 3.0);

    const Vec dzw_aff = apply_scaling(cones, w, dz, ScaleOp::W);
    const Vec corr = jordan_product(cones, ds_scaled, dzw_aff);
    const Vec bs = sigma * mu * e - lam_sq - corr;
    const double bk = sigma * mu - tau * kappa - dtau * dkappa;
    if (!newton(1.0 - sigma, bs, bk, dx, dy, dz, ds, ds_scaled, dtau, dkappa)) {
      stats.message = "degenerate embedding step";
      return finish(SolveStatus::NumericalTrouble, 0, best_x, stats);
    }

    double alpha = std::min(1.0, opts.step_damping * step_len(ds_scaled, dz, dtau, dkappa));
    if (!(alpha > 1e-13)) {
      stats.message = "step length collapsed";
      return finish(SolveStatus::NumericalTrouble, 0, best_x, stats);
    }

    x += alpha * dx;
    y += alpha * dy;
    z += alpha * dz;
    s += alpha * ds;
    tau += alpha * dtau;
    kappa += alpha * dkappa;
  }

  stats.message = "iteration limit reached";
  return finish(SolveStatus::NumericalTrouble, best_obj, best_x, stats);
}

double feasibility_margin(const ConicProgram& prog, const SolverOptions& opts) {
  ConicProgram out;
  for (int i = 0; i < prog.num_vars(); ++i) out.add_var(false, prog.var_names()[i]);
  const int sigma = out.add_var(false, "margin");
  out.add_linear(LinExpr::var(sigma), Rel::LE, 1.0);  // keeps the phase-1 bounded

  for (int i = 0; i < prog.num_vars(); ++i)
    if (prog.is_nonneg(i)) out.add_linear(LinExpr::var(sigma) - LinExpr::var(i), Rel::LE, 0.0);
  for (const auto& lc : prog.linear()) {
    if (lc.rel == Rel::EQ) {
      out.add_linear(lc.lhs, Rel::EQ, lc.rhs);
    } else if (lc.rel == Rel::LE) {
      out.add_linear(lc.lhs + LinExpr::var(sigma), Rel::LE, lc.rhs);
    } else {
      out.add_linear(lc.lhs - LinExpr::var(sigma), Rel::GE, lc.rhs);
    }
  }
  for (const auto& soc : prog.socs()) {
    SocConstraint c = soc;
    c.bound = c.bound - LinExpr::var(sigma);
    out.add_soc(std::move(c));
  }
  for (const auto& psd : prog.psds()) {
    PsdConstraint c = psd;
    for (int j = 0; j < c.side; ++j) c.upper[svec_index(j, j, c.side)] -= LinExpr::var(sigma);
    out.add_psd(std::move(c));
  }
  out.set_objective(LinExpr::var(sigma), /*maximize=*/true);

  const SolveResult res = solve(out, opts);
  if (res.status != SolveStatus::Optimal)
    throw SolverError("feasibility probe failed: " + res.stats.message, res.stats);
  return *res.objective;
}

}  // namespace lpnorm
