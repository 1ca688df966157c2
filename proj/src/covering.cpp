#include "lpnorm/covering.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

namespace lpnorm {

nlohmann::json HittingSet::to_json() const {
  nlohmann::json j;
  j["p"] = p;
  j["n"] = n;
  j["tau"] = tau;
  j["construction"] = construction;
  j["params"] = params;
  j["probabilistic"] = probabilistic;
  j["confidence"] = confidence;
  nlohmann::json vs = nlohmann::json::array();
  for (const auto& v : vectors) vs.push_back(vec_to_json(v));
  j["vectors"] = vs;
  return j;
}

HittingSet HittingSet::from_json(const nlohmann::json& j) {
  HittingSet h;
  h.p = j.at("p").get<double>();
  h.n = j.at("n").get<int>();
  h.tau = j.at("tau").get<double>();
  h.construction = j.at("construction").get<std::string>();
  if (j.contains("params")) h.params = j.at("params").get<std::map<std::string, double>>();
  if (j.contains("probabilistic")) h.probabilistic = j.at("probabilistic").get<bool>();
  if (j.contains("confidence")) h.confidence = j.at("confidence").get<double>();
  for (const auto& v : j.at("vectors")) h.vectors.push_back(vec_from_json(v));
  return h;
}

double mu_alpha_beta(double alpha, double beta, double p) {
  return std::pow(alpha / (beta * (alpha + 1.0)), 1.0 / p) * (1.0 - 1.0 / alpha);
}

double nu_alpha_beta(double alpha, double beta) {
  const double bm1 = beta - 1.0;
  double tail = 1.0;
  if (beta - alpha - 1.0 > 0.0)
    tail = std::pow(bm1 / (beta - alpha - 1.0), (beta - alpha - 1.0) / bm1);
  return std::pow(2.0, (beta + alpha - 1.0) / bm1) * std::pow(alpha, -alpha / bm1) *
         std::pow(beta, alpha * beta / (bm1 * bm1)) * tail;
}

namespace {

void check_params(double p, double alpha, double beta) {
  if (!(p > 1.0) || std::isinf(p)) throw Error("construction requires p in (1, inf)");
  if (alpha < 1.0) throw Error("alpha must be >= 1");
  if (beta < alpha + 1.0) throw Error("beta must be >= alpha + 1");
}

// Block sizes of the admissible partitions: |I_j| = floor(alpha n / beta^(j-1))
// for j >= 2, |I_1| = remainder.
std::vector<int> hh_block_sizes(int n, double alpha, double beta) {
  int m = static_cast<int>(std::ceil(std::log(alpha * n) / std::log(beta)));
  if (m < 1) m = 1;
  std::vector<int> sizes(m);
  int rest = n;
  for (int j = 2; j <= m; ++j) {
    sizes[j - 1] = static_cast<int>(std::floor(alpha * n / std::pow(beta, j - 1)));
    rest -= sizes[j - 1];
  }
  if (rest < 0) throw Error("internal: negative first block");
  sizes[0] = rest;
  return sizes;
}

double partition_count(int n, const std::vector<int>& sizes) {
  // multinomial n! / prod sizes_j!
  double count = 1.0;
  int rest = n;
  for (size_t j = 1; j < sizes.size(); ++j) {
    // C(rest, sizes[j])
    double c = 1.0;
    for (int i = 0; i < sizes[j]; ++i) c = c * (rest - i) / (i + 1);
    count *= c;
    rest -= sizes[j];
  }
  return count;
}

// Enumerates all ways to assign each index to a block of the given sizes
// (blocks 2..m chosen as subsets, block 1 = remainder), invoking `emit` with
// the per-index block id (0-based).
void enumerate_partitions(int n, const std::vector<int>& sizes,
                          const std::function<void(const std::vector<int>&)>& emit) {
  std::vector<int> block_of(n, 0);
  std::vector<int> pool(n);
  for (int i = 0; i < n; ++i) pool[i] = i;

  // choose sizes[j] elements for block j out of the not-yet-assigned pool
  std::function<void(int)> rec = [&](int j) {
    if (j == static_cast<int>(sizes.size())) {
      emit(block_of);
      return;
    }
    std::vector<int> avail;
    for (int i = 0; i < n; ++i)
      if (block_of[i] == 0) avail.push_back(i);
    const int k = sizes[j];
    std::vector<int> pick(k);
    std::function<void(int, int)> choose = [&](int start, int depth) {
      if (depth == k) {
        for (int i : pick) block_of[i] = j;
        rec(j + 1);
        for (int i : pick) block_of[i] = 0;
        return;
      }
      for (int s = start; s <= static_cast<int>(avail.size()) - (k - depth); ++s) {
        pick[depth] = avail[s];
        choose(s + 1, depth + 1);
      }
    };
    choose(0, 0);
  };
  rec(1);
}

HittingSet normalize_and_finish(std::vector<Vec> raw, int n, double p, double tau,
                                const std::string& tag, std::map<std::string, double> params,
                                bool dedup = true) {
  std::vector<Vec> out;
  out.reserve(raw.size());
  for (auto& z : raw) {
    const double nz = lp_norm(z, p);
    if (nz == 0.0) continue;
    out.push_back(z / nz);
  }
  if (dedup) out = dedup_exact(std::move(out));
  HittingSet h;
  h.p = p;
  h.n = n;
  h.tau = tau;
  h.construction = tag;
  h.params = std::move(params);
  h.vectors = std::move(out);
  return h;
}

}  // namespace

HittingSet build_hh(int n, double p, double alpha, double beta, std::int64_t cap) {
  check_params(p, alpha, beta);
  if (n < 1) throw Error("dimension must be >= 1");
  const auto sizes = hh_block_sizes(n, alpha, beta);

  // projected cardinality: partitions x per-coordinate choices
  double choices = 1.0;
  for (size_t j = 0; j < sizes.size(); ++j)
    choices *= std::pow(j == 0 ? 2.0 : 4.0, sizes[j]);
  const double projected = partition_count(n, sizes) * choices;
  if (projected > static_cast<double>(cap))
    throw Error("projected cardinality " + std::to_string(projected) + " exceeds cap " +
                std::to_string(cap));

  // level value of block j (0-based): beta^(j/p); block 0 has level 1
  std::vector<double> level(sizes.size());
  for (size_t j = 0; j < sizes.size(); ++j) level[j] = std::pow(beta, static_cast<double>(j) / p);

  std::vector<Vec> raw;
  enumerate_partitions(n, sizes, [&](const std::vector<int>& block_of) {
    // odometer over per-coordinate values: block 0 -> {+-1}, else {+-1, +-L}
    std::vector<int> digit(n, 0);
    std::vector<int> radix(n);
    for (int i = 0; i < n; ++i) radix[i] = block_of[i] == 0 ? 2 : 4;
    for (;;) {
      Vec z(n);
      for (int i = 0; i < n; ++i) {
        const double mag = digit[i] < 2 ? 1.0 : level[block_of[i]];
        z[i] = (digit[i] % 2 == 0 ? 1.0 : -1.0) * mag;
      }
      raw.push_back(std::move(z));
      int i = n - 1;
      while (i >= 0 && ++digit[i] == radix[i]) digit[i--] = 0;
      if (i < 0) break;
    }
  });

  const double tau = mu_alpha_beta(alpha, beta, p);
  if (tau == 0.0)
    std::fprintf(stderr, "warning: alpha = 1 gives a vacuous certificate (tau = 0)\n");
  return normalize_and_finish(std::move(raw), n, p, tau, "hh",
                              {{"alpha", alpha},
                               {"beta", beta},
                               {"mu", tau},
                               {"nu", nu_alpha_beta(alpha, beta)}});
}

HittingSet build_hb(int n, double p, double gamma, std::int64_t cap) {
  if (!(gamma > 1.0)) throw Error("gamma must exceed 1");
  if (!(p >= 1.0)) throw Error("p must be >= 1");
  if (n < 1) throw Error("dimension must be >= 1");
  const double radius = gamma * std::pow(n, 1.0 / p);
  const int r = static_cast<int>(std::floor(radius));
  const double projected = std::pow(2.0 * r + 1.0, n);
  if (projected > static_cast<double>(cap))
    throw Error("projected cardinality exceeds cap");

  std::vector<Vec> raw;
  std::vector<int> digit(n, -r);
  for (;;) {
    Vec z(n);
    bool zero = true;
    for (int i = 0; i < n; ++i) {
      z[i] = digit[i];
      zero = zero && digit[i] == 0;
    }
    if (!zero && lp_norm(z, p) <= radius) raw.push_back(std::move(z));
    int i = n - 1;
    while (i >= 0 && ++digit[i] > r) digit[i--] = -r;
    if (i < 0) break;
  }
  return normalize_and_finish(std::move(raw), n, p, 1.0 - 1.0 / gamma, "hb", {{"gamma", gamma}});
}

HittingSet lift_kron(const HittingSet& h, int n2) {
  if (n2 < 1) throw Error("lift_kron requires n2 >= 1");
  const double q = h.q();
  std::vector<Vec> vs;
  vs.reserve(static_cast<size_t>(h.size()) * n2);
  for (int i = 0; i < n2; ++i)
    for (const auto& v : h.vectors) vs.push_back(kron(Vec::Unit(n2, i), v));
  HittingSet out;
  out.p = h.p;
  out.n = h.n * n2;
  out.tau = h.tau / std::pow(n2, 1.0 / q);
  out.construction = "derived-kron";
  out.params = {{"n2", static_cast<double>(n2)}, {"base_tau", h.tau}};
  out.vectors = dedup_exact(std::move(vs));
  return out;
}

HittingSet combine_append(const HittingSet& h1, const HittingSet& h2) {
  if (h1.p != h2.p) throw Error("combine_append requires matching p");
  if (!(h1.tau > 0.0) || !(h2.tau > 0.0))
    throw Error("combine_append requires positive hitting ratios");
  const double q = h1.q();
  std::vector<Vec> vs;
  vs.reserve(h1.size() + h2.size());
  const Vec zero1 = Vec::Zero(h1.n), zero2 = Vec::Zero(h2.n);
  for (const auto& v : h1.vectors) vs.push_back(append(v, zero2));
  for (const auto& v : h2.vectors) vs.push_back(append(zero1, v));
  HittingSet out;
  out.p = h1.p;
  out.n = h1.n + h2.n;
  out.tau = h1.tau * h2.tau /
            std::pow(std::pow(h1.tau, q) + std::pow(h2.tau, q), 1.0 / q);
  out.construction = "derived-append";
  out.params = {{"tau1", h1.tau}, {"tau2", h2.tau}};
  out.vectors = dedup_exact(std::move(vs));
  return out;
}

Vec hadamard_apply(const ExtendedHadamard& h, const Vec& x) {
  if (x.size() != h.dim()) throw Error("hadamard_apply dimension mismatch");
  Vec y = x;
  // butterfly over 2^k super-coordinates of length m
  for (int half = h.m; half < h.dim(); half *= 2) {
    for (int start = 0; start < h.dim(); start += 2 * half) {
      for (int i = 0; i < half; ++i) {
        const double a = y[start + i];
        const double b = y[start + half + i];
        y[start + i] = a + b;
        y[start + half + i] = a - b;
      }
    }
  }
  return y;
}

HittingSet lift_hadamard(const HittingSet& h, int k, double p) {
  if (!(p >= 2.0) || std::isinf(p)) throw Error("lift_hadamard requires p in [2, inf)");
  if (k < 0) throw Error("lift_hadamard requires k >= 0");
  if (h.p != p) throw Error("lift_hadamard requires matching p");
  const ExtendedHadamard had{h.n, k};
  const double scale = std::pow(2.0, -static_cast<double>(k) / p);
  const int blocks = 1 << k;
  std::vector<Vec> vs;
  vs.reserve(static_cast<size_t>(h.size()) * blocks);
  for (int i = 0; i < blocks; ++i)
    for (const auto& v : h.vectors)
      vs.push_back(scale * hadamard_apply(had, kron(Vec::Unit(blocks, i), v)));
  const double q = h.q();
  HittingSet out;
  out.p = p;
  out.n = had.dim();
  out.tau = std::pow(2.0, -k / 2.0) * std::pow(h.n, 0.5 - 1.0 / q) * h.tau;
  out.construction = "derived-hadamard";
  out.params = {{"k", static_cast<double>(k)}, {"m", static_cast<double>(h.n)},
                {"base_tau", h.tau}};
  out.vectors = dedup_exact(std::move(vs));
  return out;
}

HittingSet cut(const HittingSet& h, int n1) {
  if (n1 < 1 || n1 > h.n) throw Error("cut requires 1 <= n1 <= n");
  if (!(h.tau > 0.0)) throw Error("cut requires a positive hitting ratio");
  std::vector<Vec> vs;
  for (const auto& v : h.vectors) {
    Vec head = v.head(n1);
    const double norm = lp_norm(head, h.p);
    if (norm == 0.0) continue;  // zero prefixes are dropped
    vs.push_back(head / norm);
  }
  if (vs.empty()) throw Error("cut removed every vector (all prefixes zero)");
  HittingSet out;
  out.p = h.p;
  out.n = n1;
  out.tau = h.tau;
  out.construction = "derived-cut";
  out.params = {{"from", static_cast<double>(h.n)}};
  out.vectors = dedup_exact(std::move(vs));
  return out;
}

HittingSet build_h1(int n, double p, double alpha, double beta, std::int64_t cap) {
  check_params(p, alpha, beta);
  if (n < 2) throw Error("build_h1 requires n >= 2");
  const int n1 = static_cast<int>(std::ceil(std::log(n)));
  const int n2 = n / n1;
  const int n3 = n - n1 * n2;
  HittingSet h = lift_kron(build_hh(n1, p, alpha, beta, cap), n2);
  if (n3 > 0) h = combine_append(h, build_hh(n3, p, alpha, beta, cap));
  const double q = p / (p - 1.0);
  const double mu = mu_alpha_beta(alpha, beta, p);
  h.construction = "h1";
  h.params = {{"alpha", alpha}, {"beta", beta},
              {"n1", static_cast<double>(n1)}, {"n2", static_cast<double>(n2)},
              {"n3", static_cast<double>(n3)}, {"tau_chain", h.tau}};
  h.tau = mu * std::pow(std::log(n) / (n + std::log(n)), 1.0 / q);
  return h;
}

HittingSet build_h2(int n, double p, double alpha, double beta, std::int64_t cap) {
  check_params(p, alpha, beta);
  if (!(p >= 2.0)) throw Error("build_h2 requires p in [2, inf)");
  if (n < 2) throw Error("build_h2 requires n >= 2");
  const int k = static_cast<int>(std::floor(std::log2(n / std::log(n))));
  const int m = static_cast<int>(std::ceil(std::ldexp(static_cast<double>(n), -k)));
  HittingSet h = cut(lift_hadamard(build_hh(m, p, alpha, beta, cap), k, p), n);
  const double mu = mu_alpha_beta(alpha, beta, p);
  h.construction = "h2";
  h.params = {{"alpha", alpha}, {"beta", beta},
              {"k", static_cast<double>(k)}, {"m", static_cast<double>(m)},
              {"tau_chain", h.tau}};
  h.tau = mu * std::pow(std::log(n), 1.0 / p) / std::sqrt(2.0 * n);
  return h;
}

HittingSet build_hg(int n, double p, int m, std::int64_t cap) {
  if (m < 1) throw Error("grid resolution must be >= 1");
  if (n < 1) throw Error("dimension must be >= 1");
  const double projected = std::pow(2.0 * m + 1.0, n);
  if (projected > static_cast<double>(cap)) throw Error("projected cardinality exceeds cap");
  std::vector<Vec> raw;
  std::vector<int> digit(n, -m);
  for (;;) {
    bool zero = true;
    Vec z(n);
    for (int i = 0; i < n; ++i) {
      z[i] = static_cast<double>(digit[i]) / m;
      zero = zero && digit[i] == 0;
    }
    if (!zero) raw.push_back(std::move(z));
    int i = n - 1;
    while (i >= 0 && ++digit[i] > m) digit[i--] = -m;
    if (i < 0) break;
  }
  return normalize_and_finish(std::move(raw), n, p, 0.0, "hg", {{"m", static_cast<double>(m)}});
}

Vec sample_even_lp(int n, double p, Rng& rng) {
  if (n < 1) throw Error("dimension must be >= 1");
  Vec x(n);
  if (std::isinf(p)) {
    for (int i = 0; i < n; ++i) x[i] = rng.uniform(-1.0, 1.0);
  } else {
    if (!(p >= 1.0)) throw Error("sample_even_lp requires p >= 1");
    for (int i = 0; i < n; ++i) {
      const double g = rng.gamma(1.0 / p);
      x[i] = rng.sign() * std::pow(g, 1.0 / p);
    }
  }
  const double norm = lp_norm(x, p);
  if (norm == 0.0) return sample_even_lp(n, p, rng);
  return x / norm;
}

HittingSet build_h3(int n, double p, double eps, const RandCoverConstants& constants, Rng& rng) {
  if (n < 2) throw Error("build_h3 requires n >= 2");
  if (!(p > 2.0) || std::isinf(p)) throw Error("build_h3 requires p in (2, inf)");
  if (!(eps > 0.0 && eps < 1.0)) throw Error("eps must be in (0, 1)");
  const double q = p / (p - 1.0);
  const double count = std::ceil(constants.delta3 * std::pow(n, constants.delta2) *
                                 ((0.5 + 1.0 / q) * n * std::log(n) + std::log(1.0 / eps)));
  const auto num = static_cast<std::int64_t>(count);
  HittingSet h;
  h.p = p;
  h.n = n;
  h.tau = std::sqrt(constants.delta0 * std::log(n) / (2.0 * n));
  h.probabilistic = true;
  h.confidence = 1.0 - eps;
  h.construction = "h3";
  h.params = {{"eps", eps},
              {"seed", static_cast<double>(rng.seed())},
              {"delta0", constants.delta0},
              {"delta2", constants.delta2},
              {"delta3", constants.delta3}};
  h.vectors.reserve(num);
  for (std::int64_t i = 0; i < num; ++i) h.vectors.push_back(sample_even_lp(n, p, rng));
  return h;
}

double probe_hitting_ratio(const HittingSet& h, int num_probes, Rng& rng, ProbeMode mode) {
  if (h.vectors.empty()) throw Error("cannot probe an empty hitting set");
  const double q = h.p <= 1.0 ? kInf : h.q();
  double worst = kInf;
  auto consider = [&](const Vec& x) {
    double best = -kInf;
    for (const auto& v : h.vectors) best = std::max(best, v.dot(x));
    worst = std::min(worst, best);
  };
  if (mode == ProbeMode::Adversarial) {
    const int n = h.n;
    for (int i = 0; i < n; ++i) {
      consider(Vec::Unit(n, i));
      consider(-Vec::Unit(n, i));
    }
    Vec ones = Vec::Ones(n) / lp_norm(Vec::Ones(n), q);
    consider(ones);
    consider(-ones);
    for (const auto& v : h.vectors) {
      Vec s(n);
      for (int i = 0; i < n; ++i) s[i] = v[i] > 0.0 ? 1.0 : (v[i] < 0.0 ? -1.0 : 0.0);
      const double norm = lp_norm(s, q);
      if (norm == 0.0) continue;
      consider(s / norm);
      consider(-s / norm);
    }
  }
  for (int i = 0; i < num_probes; ++i) consider(sample_even_lp(h.n, q, rng));
  return worst;
}

}  // namespace lpnorm
