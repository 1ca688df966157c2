#include "lpnorm/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

namespace lpnorm {

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  if (j.contains("p")) {
    if (j["p"].is_string()) cfg.p = j["p"].get<std::string>();
    else cfg.p = std::to_string(j["p"].get<int>());
  }
  if (j.contains("d")) cfg.d = j["d"].get<int>();
  if (j.contains("n")) cfg.n_values = j["n"].get<std::vector<int>>();
  if (j.contains("r")) cfg.r_values = j["r"].get<std::vector<int>>();
  if (j.contains("instances")) cfg.instances = j["instances"].get<int>();
  if (j.contains("methods")) cfg.methods = j["methods"].get<std::vector<std::string>>();
  if (j.contains("eps")) cfg.eps = j["eps"].get<double>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("solver_tol")) cfg.solver_tol = j["solver_tol"].get<double>();
  if (j.contains("alpha")) cfg.alpha = j["alpha"].get<double>();
  if (j.contains("beta")) cfg.beta = j["beta"].get<double>();
  else if (j.contains("alpha")) cfg.beta = cfg.alpha + 1.0;
  if (j.contains("delta")) {
    const auto& dj = j["delta"];
    if (dj.contains("delta0")) cfg.delta.delta0 = dj["delta0"].get<double>();
    if (dj.contains("delta1")) cfg.delta.delta1 = dj["delta1"].get<double>();
    if (dj.contains("delta2")) cfg.delta.delta2 = dj["delta2"].get<double>();
    if (dj.contains("delta3")) cfg.delta.delta3 = dj["delta3"].get<double>();
  }
  if (j.contains("cardinality_cap")) cfg.cardinality_cap = j["cardinality_cap"].get<std::int64_t>();
  if (j.contains("program_budget")) cfg.program_budget = j["program_budget"].get<std::int64_t>();
  if (j.contains("threads")) cfg.threads = j["threads"].get<int>();
  cfg.validate();
  return cfg;
}

nlohmann::json ExperimentConfig::to_json() const {
  return nlohmann::json{
      {"p", p},
      {"d", d},
      {"n", n_values},
      {"r", r_values},
      {"instances", instances},
      {"methods", methods},
      {"eps", eps},
      {"seed", seed},
      {"solver_tol", solver_tol},
      {"alpha", alpha},
      {"beta", beta},
      {"delta",
       {{"delta0", delta.delta0},
        {"delta1", delta.delta1},
        {"delta2", delta.delta2},
        {"delta3", delta.delta3}}},
      {"cardinality_cap", cardinality_cap},
      {"program_budget", program_budget},
      {"threads", threads}};
}

void ExperimentConfig::validate() const {
  const RationalExponent pr = RationalExponent::parse(p);
  if (pr.a() != 1 || pr.b() != d)
    throw Error("known-nuclear instances require p = d exactly (got p = " + pr.str() +
                ", d = " + std::to_string(d) + ")");
  if (d < 3) throw Error("benchmark requires d >= 3");
  if (instances < 1) throw Error("instances must be >= 1");
  static const std::vector<std::string> known = {"vector",   "unfold",   "partition",
                                                 "cover-h1", "cover-h2", "rand"};
  for (const auto& m : methods)
    if (std::find(known.begin(), known.end(), m) == known.end())
      throw Error("unknown method '" + m + "'");
  if (!(eps > 0.0 && eps < 1.0)) throw Error("eps must be in (0, 1)");
}

double method_bound(const std::string& method, int d, int n, double q,
                    const std::vector<double>& taus) {
  if (method == "vector") return std::pow(n, -static_cast<double>(d - 1) / q);
  if (method == "unfold" || method == "partition")
    return std::pow(n, -static_cast<double>(d - 2) / q) / kDeltaG;
  double t = 1.0;
  for (double tau : taus) t *= tau;
  return t / kDeltaG;
}

namespace {

struct InstanceRecord {
  int n = 0, r = 0, index = 0;
  std::uint64_t seed = 0;
  double true_value = 0.0;
  std::map<std::string, double> value, estimate, ratio, time_s;
  std::map<std::string, int> iterations;
};

void parallel_for(int count, int threads, const std::function<void(int)>& body) {
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&]() {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

BenchReport run_bench(const ExperimentConfig& cfg) {
  cfg.validate();
  const RationalExponent p = RationalExponent::parse(cfg.p);
  const double q = p.conjugate();

  TensorNormOptions topts;
  topts.solver.tol = cfg.solver_tol;
  topts.program_budget = cfg.program_budget;

  const bool want_h1 = std::count(cfg.methods.begin(), cfg.methods.end(), "cover-h1") > 0;
  const bool want_h2 = std::count(cfg.methods.begin(), cfg.methods.end(), "cover-h2") > 0;

  BenchReport report;
  nlohmann::json instances_json = nlohmann::json::array();
  std::map<std::string, HittingSet> h1_cache, h2_cache;

  for (int n : cfg.n_values) {
    if (want_h1) h1_cache[std::to_string(n)] = build_h1(n, p.value(), cfg.alpha, cfg.beta,
                                                        cfg.cardinality_cap);
    if (want_h2) h2_cache[std::to_string(n)] = build_h2(n, p.value(), cfg.alpha, cfg.beta,
                                                        cfg.cardinality_cap);
  }

  for (int n : cfg.n_values) {
    for (int r : cfg.r_values) {
      std::vector<InstanceRecord> records(cfg.instances);
      parallel_for(cfg.instances, cfg.threads, [&](int i) {
        InstanceRecord rec;
        rec.n = n;
        rec.r = r;
        rec.index = i;
        rec.seed = subseed(cfg.seed, static_cast<std::uint64_t>(n),
                           static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(i));
        Rng rng(rec.seed);
        const KnownNuclearInstance inst = gen_known_nuclear_instance(n, cfg.d, r, rng);
        rec.true_value = inst.nuclear_value;

        for (const auto& method : cfg.methods) {
          const auto tm0 = std::chrono::steady_clock::now();
          double value = 0.0, estimate = 0.0;
          int iters = 0;
          if (method == "vector") {
            value = estimate = vector_bounds(inst.tensor, p.value()).first;
          } else {
            NormEstimate e;
            if (method == "unfold") {
              e = alg3_unfold_nuclear(inst.tensor, p, topts);
            } else if (method == "partition") {
              e = alg4_partition_nuclear(inst.tensor, p, topts);
            } else if (method == "cover-h1" || method == "cover-h2") {
              const HittingSet& h = method == "cover-h1" ? h1_cache[std::to_string(n)]
                                                         : h2_cache[std::to_string(n)];
              e = alg6_cover_nuclear(inst.tensor, p, std::vector<HittingSet>(cfg.d - 2, h),
                                     topts);
            } else if (method == "rand") {
              Rng mrng(subseed(rec.seed, 0x72616e64ULL));
              e = alg7_randomized(inst.tensor, p, cfg.eps, cfg.delta, mrng, topts);
            }
            value = e.value;
            estimate = e.relaxation_value;
            iters = e.stats.iterations;
          }
          rec.value[method] = value;
          rec.estimate[method] = estimate;
          // accuracy of the point estimate against the exact value, counting
          // overshoot of the relaxation symmetrically
          rec.ratio[method] = std::min(estimate, rec.true_value) /
                              std::max(estimate, rec.true_value);
          rec.time_s[method] =
              std::chrono::duration<double>(std::chrono::steady_clock::now() - tm0).count();
          rec.iterations[method] = iters;
        }
        records[i] = std::move(rec);
      });

      for (const auto& rec : records) {
        nlohmann::json jr{{"n", rec.n},       {"r", rec.r},
                          {"instance", rec.index}, {"seed", rec.seed},
                          {"true_value", rec.true_value}};
        for (const auto& [m, v] : rec.value) {
          jr["value"][m] = v;
          jr["estimate"][m] = rec.estimate.at(m);
          jr["ratio"][m] = rec.ratio.at(m);
          jr["time_s"][m] = rec.time_s.at(m);
          jr["iterations"][m] = rec.iterations.at(m);
        }
        instances_json.push_back(std::move(jr));
      }

      for (const auto& method : cfg.methods) {
        ResultRow row;
        row.method = method;
        row.n = n;
        row.r = r;
        row.min_ratio = kInf;
        row.max_ratio = -kInf;
        for (const auto& rec : records) {
          const double ratio = rec.ratio.at(method);
          row.min_ratio = std::min(row.min_ratio, ratio);
          row.max_ratio = std::max(row.max_ratio, ratio);
          row.avg_ratio += ratio / cfg.instances;
          row.avg_time_s += rec.time_s.at(method) / cfg.instances;
        }
        std::vector<double> taus;
        if (method == "cover-h1") taus.assign(cfg.d - 2, h1_cache[std::to_string(n)].tau);
        if (method == "cover-h2") taus.assign(cfg.d - 2, h2_cache[std::to_string(n)].tau);
        if (method == "rand")
          taus.assign(cfg.d - 2,
                      std::sqrt(cfg.delta.delta0 * std::log(n) / (2.0 * n)));
        row.theoretical_bound = method_bound(method, cfg.d, n, q, taus);
        report.rows.push_back(row);
      }
    }
  }

  // rows ordered deterministically by (method, n, r)
  std::sort(report.rows.begin(), report.rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.method, a.n, a.r) < std::tie(b.method, b.n, b.r);
  });

  report.detail = nlohmann::json{{"config", cfg.to_json()}, {"instances", instances_json}};
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows)
    rows.push_back({{"method", r.method},
                    {"n", r.n},
                    {"r", r.r},
                    {"min_ratio", r.min_ratio},
                    {"avg_ratio", r.avg_ratio},
                    {"max_ratio", r.max_ratio},
                    {"avg_time_s", r.avg_time_s},
                    {"theoretical_bound", r.theoretical_bound}});
  report.detail["rows"] = std::move(rows);
  return report;
}

std::string BenchReport::to_csv() const {
  std::ostringstream out;
  out << "method,n,r,min_ratio,avg_ratio,max_ratio,avg_time_s,theoretical_bound\n";
  out.precision(6);
  out << std::fixed;
  for (const auto& r : rows)
    out << r.method << ',' << r.n << ',' << r.r << ',' << r.min_ratio << ',' << r.avg_ratio << ','
        << r.max_ratio << ',' << r.avg_time_s << ',' << r.theoretical_bound << '\n';
  return out.str();
}

nlohmann::json strip_timing(nlohmann::json j) {
  if (j.is_object()) {
    nlohmann::json out = nlohmann::json::object();
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it.key().find("time") != std::string::npos) continue;
      out[it.key()] = strip_timing(it.value());
    }
    return out;
  }
  if (j.is_array()) {
    nlohmann::json out = nlohmann::json::array();
    for (auto& v : j) out.push_back(strip_timing(v));
    return out;
  }
  return j;
}

}  // namespace lpnorm
