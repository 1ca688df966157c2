#pragma once

#include <cmath>

#include "lpnorm/tensor_norms.hpp"

namespace lpnorm {

/// One benchmark campaign: known-nuclear-norm instances per (n, r) cell, a
/// set of approximation methods, ratios against the exact value.
struct ExperimentConfig {
  std::string p = "3";
  int d = 3;
  std::vector<int> n_values = {3};
  std::vector<int> r_values = {1, 2, 3, 4, 5, 10};
  int instances = 20;
  std::vector<std::string> methods = {"vector", "unfold", "partition", "cover-h2", "rand"};
  double eps = 0.05;
  std::uint64_t seed = 1;
  double solver_tol = 1e-8;
  double alpha = (5.0 + std::sqrt(33.0)) / 2.0;
  double beta = (5.0 + std::sqrt(33.0)) / 2.0 + 1.0;
  RandCoverConstants delta;
  std::int64_t cardinality_cap = kDefaultCardinalityCap;
  std::int64_t program_budget = 200'000'000;
  int threads = 0;  // 0 = hardware

  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  void validate() const;
};

struct ResultRow {
  std::string method;
  int n = 0;
  int r = 0;
  double min_ratio = 0.0;
  double avg_ratio = 0.0;
  double max_ratio = 0.0;
  double avg_time_s = 0.0;
  double theoretical_bound = 0.0;
};

struct BenchReport {
  std::vector<ResultRow> rows;
  nlohmann::json detail;  // full provenance incl. per-instance records

  std::string to_csv() const;
};

/// Runs the campaign; fully deterministic given the config (timing fields in
/// the detail record aside).
BenchReport run_bench(const ExperimentConfig& cfg);

/// Removes wall-clock fields ("*time*") recursively; used to compare two
/// runs for reproducibility.
nlohmann::json strip_timing(nlohmann::json j);

/// Theoretical lower bound on value/true for a method at the given sets' taus
/// (the certified approximation factor including the Grothendieck constant).
double method_bound(const std::string& method, int d, int n, double q,
                    const std::vector<double>& taus);

}  // namespace lpnorm
