#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "lpnorm/bench.hpp"

using namespace lpnorm;

namespace {

ExperimentConfig quick_config() {
  ExperimentConfig cfg;
  cfg.p = "3";
  cfg.d = 3;
  cfg.n_values = {3};
  cfg.r_values = {1, 2};
  cfg.instances = 3;
  cfg.methods = {"vector", "unfold", "partition", "cover-h2"};
  cfg.seed = 4242;
  return cfg;
}

}  // namespace

TEST_CASE("config validation") {
  ExperimentConfig cfg = quick_config();
  cfg.p = "4";  // p != d
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = quick_config();
  cfg.methods = {"sorcery"};
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = quick_config();
  const auto j = cfg.to_json();
  const auto back = ExperimentConfig::from_json(j);
  CHECK(back.to_json() == j);
}

TEST_CASE("bench report shape and bounds") {
  const ExperimentConfig cfg = quick_config();
  const BenchReport report = run_bench(cfg);

  CHECK(report.rows.size() == cfg.methods.size() * cfg.n_values.size() * cfg.r_values.size());
  const std::string csv = report.to_csv();
  std::istringstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "method,n,r,min_ratio,avg_ratio,max_ratio,avg_time_s,theoretical_bound");
  int lines = 0;
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) ++lines;
  CHECK(lines == static_cast<int>(report.rows.size()));

  const double q = 1.5;
  for (const auto& row : report.rows) {
    CHECK(row.min_ratio <= row.avg_ratio + 1e-12);
    CHECK(row.avg_ratio <= row.max_ratio + 1e-12);
    CHECK(row.max_ratio <= 1.0 + 1e-4);
    CHECK(row.min_ratio >= row.theoretical_bound - 1e-9);
    if (row.method == "vector")
      CHECK(row.theoretical_bound == doctest::Approx(std::pow(3.0, -2.0 / q)));
    if (row.method == "unfold" || row.method == "partition")
      CHECK(row.theoretical_bound == doctest::Approx(std::pow(3.0, -1.0 / q) / kDeltaG));
    if (row.method == "cover-h2") {
      const auto h = build_h2(3, 3.0, cfg.alpha, cfg.beta);
      CHECK(row.theoretical_bound == doctest::Approx(h.tau / kDeltaG));
    }
  }
}

TEST_CASE("bench reproducibility modulo timing") {
  ExperimentConfig cfg = quick_config();
  cfg.methods = {"vector", "unfold", "rand"};
  cfg.delta.delta3 = 1.0;  // tiny sampled sets keep the test quick
  const BenchReport a = run_bench(cfg);
  const BenchReport b = run_bench(cfg);
  CHECK(strip_timing(a.detail).dump() == strip_timing(b.detail).dump());
  CHECK(strip_timing(a.detail) != a.detail);  // timing fields were present
}

TEST_CASE("rank-one cells sit at ratio one") {
  ExperimentConfig cfg = quick_config();
  cfg.r_values = {1};
  cfg.methods = {"unfold", "partition"};
  const BenchReport report = run_bench(cfg);
  for (const auto& row : report.rows) {
    CHECK(row.min_ratio == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(row.max_ratio == doctest::Approx(1.0).epsilon(1e-4));
  }
}
