#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include <json.hpp>

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(LPNORM_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  nlohmann::json j;
  in >> j;
  return j;
}

}  // namespace

TEST_CASE("cli round trip: generate, bound, probe") {
  const std::string dir = "cli_tmp";
  std::system(("rm -rf " + dir + " && mkdir -p " + dir).c_str());

  CHECK(run_cli("gen --kind identity --n 2 --d 3 --out " + dir + "/t.json") == 0);
  CHECK(run_cli("norm tensor --method vector --in " + dir + "/t.json --p 3 --out " + dir +
                "/vb.json") == 0);
  const auto vb = read_json(dir + "/vb.json");
  CHECK(vb["lower"].get<double>() == doctest::Approx(std::pow(2.0, 1.0 / 3.0)));
  CHECK(vb["upper"].get<double>() == doctest::Approx(2.0));

  CHECK(run_cli("hitset build --kind hh --n 3 --p 3 --alpha 2 --beta 3 --out " + dir +
                "/h.json") == 0);
  CHECK(run_cli("hitset probe --in " + dir + "/h.json --probes 2000 --seed 7 --out " + dir +
                "/probe.json") == 0);
  const auto probe = read_json(dir + "/probe.json");
  CHECK(probe["empirical_ratio"].get<double>() >=
        probe["certified_tau"].get<double>() - 1e-9);

  CHECK(run_cli("norm matrix --op pv --in " + dir + "/missing.json --p 3") == 2);
  CHECK(run_cli("norm matrix --op pv --in " + dir + "/t.json --p 2") == 2);  // p must exceed 2
  CHECK(run_cli("gen --kind known-nuclear --n 2 --d 3 --r 2 --seed 5 --out " + dir +
                "/kn.json") == 0);
  CHECK(run_cli("norm tensor --method unfold --in " + dir + "/kn.json --p 3 --out " + dir +
                "/u.json") == 0);
  const auto kn = read_json(dir + "/kn.json");
  const auto uf = read_json(dir + "/u.json");
  CHECK(uf["value"].get<double>() <= kn["nuclear_value"].get<double>() * (1 + 1e-6));

  std::system(("rm -rf " + dir).c_str());
}
