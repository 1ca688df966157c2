#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "lpnorm/bench.hpp"

namespace {

using nlohmann::json;

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw lpnorm::Error("cannot open '" + path + "'");
  json j;
  in >> j;
  return j;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw lpnorm::Error("cannot write '" + path + "'");
  out << text;
}

void emit(const json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    write_text_file(out_path, j.dump(2) + "\n");
  }
}

lpnorm::DenseTensor load_tensor(const std::string& path) {
  if (path.size() > 4 && path.substr(path.size() - 4) == ".bin") {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw lpnorm::Error("cannot open '" + path + "'");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return lpnorm::DenseTensor::from_binary(bytes);
  }
  return lpnorm::DenseTensor::from_json(read_json_file(path));
}

int run(int argc, char** argv) {
  CLI::App app{"lp-sphere covering and matrix/tensor p-norm approximation toolkit"};
  app.require_subcommand(1);

  // ---- hitset ----
  auto* hitset = app.add_subcommand("hitset", "build, probe and tabulate hitting sets");
  hitset->require_subcommand(1);

  auto* hs_build = hitset->add_subcommand("build", "construct a hitting set");
  std::string kind, p_str = "3", out_path;
  int n = 3, grid_m = 2;
  double alpha = (5.0 + std::sqrt(33.0)) / 2.0, beta = -1.0, gamma = 2.0, eps = 0.05;
  std::uint64_t seed = 1;
  std::int64_t cap = lpnorm::kDefaultCardinalityCap;
  lpnorm::RandCoverConstants delta;
  hs_build->add_option("--kind", kind, "hh|hb|h1|h2|hg|h3")->required();
  hs_build->add_option("--n", n, "ambient dimension")->required();
  hs_build->add_option("--p", p_str, "exponent, 'b/a' or decimal");
  hs_build->add_option("--alpha", alpha, "exhaustive-set alpha");
  hs_build->add_option("--beta", beta, "exhaustive-set beta (default alpha + 1)");
  hs_build->add_option("--gamma", gamma, "grid-ball gamma");
  hs_build->add_option("--m", grid_m, "grid resolution");
  hs_build->add_option("--eps", eps, "failure probability for the sampled set");
  hs_build->add_option("--seed", seed, "random seed");
  hs_build->add_option("--cap", cap, "cardinality cap");
  hs_build->add_option("--delta0", delta.delta0, "sampled-set constant delta0");
  hs_build->add_option("--delta2", delta.delta2, "sampled-set constant delta2");
  hs_build->add_option("--delta3", delta.delta3, "sampled-set constant delta3");
  hs_build->add_option("--out", out_path, "output file (stdout if omitted)");

  auto* hs_probe = hitset->add_subcommand("probe", "empirical hitting-ratio probe");
  std::string in_path, mode = "adversarial";
  int probes = 10000;
  hs_probe->add_option("--in", in_path, "hitting set JSON")->required();
  hs_probe->add_option("--probes", probes, "number of random probes");
  hs_probe->add_option("--mode", mode, "random|adversarial");
  hs_probe->add_option("--seed", seed, "random seed");
  hs_probe->add_option("--out", out_path, "output file (stdout if omitted)");

  auto* hs_bounds = hitset->add_subcommand("bounds", "cardinality-bound comparison curve");
  double alpha_min = 1.5, alpha_max = 12.0;
  int steps = 50;
  hs_bounds->add_option("--p", p_str, "exponent");
  hs_bounds->add_option("--alpha-min", alpha_min, "alpha range start");
  hs_bounds->add_option("--alpha-max", alpha_max, "alpha range end");
  hs_bounds->add_option("--steps", steps, "number of samples");
  hs_bounds->add_option("--out", out_path, "CSV output (stdout if omitted)");

  // ---- norm ----
  auto* norm = app.add_subcommand("norm", "matrix and tensor norm approximations");
  norm->require_subcommand(1);

  auto* nm = norm->add_subcommand("matrix", "matrix spectral/nuclear surrogates");
  std::string op = "pv";
  double tol = 1e-8;
  int restarts = 200;
  nm->add_option("--op", op, "pv|pu|oracle")->required();
  nm->add_option("--in", in_path, "matrix JSON ({shape:[m,n], data:[...]})")->required();
  nm->add_option("--p", p_str, "exponent");
  nm->add_option("--tol", tol, "solver tolerance");
  nm->add_option("--restarts", restarts, "oracle restarts");
  nm->add_option("--seed", seed, "oracle seed");
  nm->add_option("--out", out_path, "output file");

  auto* nt = norm->add_subcommand("tensor", "tensor nuclear-norm approximations");
  std::string method = "vector";
  std::vector<std::string> hitset_files;
  double rand_eps = -1.0;
  std::int64_t budget = 200'000'000;
  nt->add_option("--method", method, "vector|unfold|partition|cover")->required();
  nt->add_option("--in", in_path, "tensor JSON or .bin")->required();
  nt->add_option("--p", p_str, "exponent");
  nt->add_option("--hitset", hitset_files, "hitting set files for the covering method");
  nt->add_option("--rand-eps", rand_eps, "sampled covering with this failure probability");
  nt->add_option("--tol", tol, "solver tolerance");
  nt->add_option("--seed", seed, "seed for the sampled covering");
  nt->add_option("--budget", budget, "program size budget");
  nt->add_option("--delta0", delta.delta0, "sampled-set constant delta0");
  nt->add_option("--delta2", delta.delta2, "sampled-set constant delta2");
  nt->add_option("--delta3", delta.delta3, "sampled-set constant delta3");
  nt->add_option("--out", out_path, "output file");

  // ---- gen ----
  auto* gen = app.add_subcommand("gen", "instance generators");
  std::string gen_kind = "identity";
  int d = 3, r = 1;
  gen->add_option("--kind", gen_kind, "identity|known-nuclear")->required();
  gen->add_option("--n", n, "dimension")->required();
  gen->add_option("--d", d, "order");
  gen->add_option("--r", r, "number of rank-one terms");
  gen->add_option("--seed", seed, "random seed");
  gen->add_option("--out", out_path, "output file");

  // ---- bench ----
  auto* bench = app.add_subcommand("bench", "experiment campaigns");
  bench->require_subcommand(1);
  auto* bench_run = bench->add_subcommand("run", "run a campaign from a config file");
  std::string config_path, csv_path;
  bench_run->add_option("--config", config_path, "config JSON")->required();
  bench_run->add_option("--out", csv_path, "CSV output path")->required();

  CLI11_PARSE(app, argc, argv);

  if (beta < 0.0) beta = alpha + 1.0;
  const auto parse_p = [&]() { return lpnorm::RationalExponent::parse(p_str); };

  if (hs_build->parsed()) {
    const double p = parse_p().value();
    lpnorm::HittingSet h;
    if (kind == "hh") h = lpnorm::build_hh(n, p, alpha, beta, cap);
    else if (kind == "hb") h = lpnorm::build_hb(n, p, gamma, cap);
    else if (kind == "h1") h = lpnorm::build_h1(n, p, alpha, beta, cap);
    else if (kind == "h2") h = lpnorm::build_h2(n, p, alpha, beta, cap);
    else if (kind == "hg") h = lpnorm::build_hg(n, p, grid_m, cap);
    else if (kind == "h3") {
      lpnorm::Rng rng(seed);
      h = lpnorm::build_h3(n, p, eps, delta, rng);
    } else {
      throw lpnorm::Error("unknown hitting-set kind '" + kind + "'");
    }
    emit(h.to_json(), out_path);
    return 0;
  }
  if (hs_probe->parsed()) {
    const auto h = lpnorm::HittingSet::from_json(read_json_file(in_path));
    lpnorm::Rng rng(seed);
    const auto pm =
        mode == "random" ? lpnorm::ProbeMode::Random : lpnorm::ProbeMode::Adversarial;
    const double ratio = lpnorm::probe_hitting_ratio(h, probes, rng, pm);
    emit(json{{"empirical_ratio", ratio}, {"certified_tau", h.tau}, {"probes", probes},
              {"mode", mode}, {"cardinality", h.size()}},
         out_path);
    return 0;
  }
  if (hs_bounds->parsed()) {
    // per-dimension cardinality bases of the grid-ball and exhaustive sets at
    // equal hitting ratio (beta = alpha + 1)
    const double p = parse_p().value();
    std::ostringstream csv;
    csv << "alpha,hitting_ratio,grid_ball_base,exhaustive_base\n";
    for (int i = 0; i < steps; ++i) {
      const double a = alpha_min + (alpha_max - alpha_min) * i / std::max(1, steps - 1);
      const double ratio = lpnorm::mu_alpha_beta(a, a + 1.0, p);
      if (ratio >= 1.0 || ratio <= 0.0) continue;
      const double g = 1.0 / (1.0 - ratio);
      const double hb_base =
          std::exp(p / 12.0) * (2.0 * g + 1.0) * std::max(1.0, std::sqrt(2.0 * M_PI / p));
      csv << a << ',' << ratio << ',' << hb_base << ',' << lpnorm::nu_alpha_beta(a, a + 1.0)
          << '\n';
    }
    if (out_path.empty()) std::cout << csv.str();
    else write_text_file(out_path, csv.str());
    return 0;
  }
  if (nm->parsed()) {
    const auto a = load_tensor(in_path);
    if (a.order() != 2) throw lpnorm::Error("matrix input must have order 2");
    lpnorm::Mat m(a.dim(0), a.dim(1));
    for (int i = 0; i < a.dim(0); ++i)
      for (int j = 0; j < a.dim(1); ++j) m(i, j) = a.data()[i * a.dim(1) + j];
    lpnorm::SolverOptions sopts;
    sopts.tol = tol;
    if (op == "oracle") {
      lpnorm::Rng rng(seed);
      const double v = lpnorm::spectral_pnorm_oracle(m, parse_p().value(), restarts, rng);
      emit(json{{"value", v}, {"method", "oracle"}, {"restarts", restarts}}, out_path);
    } else if (op == "pv" || op == "pu") {
      const auto est = op == "pv" ? lpnorm::matrix_pv(m, parse_p(), sopts)
                                  : lpnorm::matrix_pu(m, parse_p(), sopts);
      emit(est.to_json(), out_path);
    } else {
      throw lpnorm::Error("unknown matrix op '" + op + "'");
    }
    return 0;
  }
  if (nt->parsed()) {
    const auto t = load_tensor(in_path);
    const auto p = parse_p();
    lpnorm::TensorNormOptions topts;
    topts.solver.tol = tol;
    topts.program_budget = budget;
    json out;
    if (method == "vector") {
      const auto [lo, hi] = lpnorm::vector_bounds(t, p.value());
      out = json{{"method", "vector"}, {"lower", lo}, {"upper", hi}, {"value", lo}};
    } else if (method == "unfold") {
      out = lpnorm::alg3_unfold_nuclear(t, p, topts).to_json();
    } else if (method == "partition") {
      out = lpnorm::alg4_partition_nuclear(t, p, topts).to_json();
    } else if (method == "cover") {
      if (rand_eps > 0.0) {
        lpnorm::Rng rng(seed);
        out = lpnorm::alg7_randomized(t, p, rand_eps, delta, rng, topts).to_json();
        out["seed"] = seed;
      } else {
        if (hitset_files.empty())
          throw lpnorm::Error("covering method needs --hitset files or --rand-eps");
        std::vector<lpnorm::HittingSet> covers;
        for (const auto& f : hitset_files)
          covers.push_back(lpnorm::HittingSet::from_json(read_json_file(f)));
        out = lpnorm::alg6_cover_nuclear(t, p, covers, topts).to_json();
      }
    } else {
      throw lpnorm::Error("unknown tensor method '" + method + "'");
    }
    emit(out, out_path);
    return 0;
  }
  if (gen->parsed()) {
    if (gen_kind == "identity") {
      emit(lpnorm::gen_identity_tensor(n, d).to_json(), out_path);
    } else if (gen_kind == "known-nuclear") {
      lpnorm::Rng rng(seed);
      const auto inst = lpnorm::gen_known_nuclear_instance(n, d, r, rng);
      json j = inst.tensor.to_json();
      j["nuclear_value"] = inst.nuclear_value;
      j["lambdas"] = inst.lambdas;
      j["seed"] = seed;
      emit(j, out_path);
    } else {
      throw lpnorm::Error("unknown generator kind '" + gen_kind + "'");
    }
    return 0;
  }
  if (bench_run->parsed()) {
    const auto cfg = lpnorm::ExperimentConfig::from_json(read_json_file(config_path));
    const auto report = lpnorm::run_bench(cfg);
    write_text_file(csv_path, report.to_csv());
    std::string json_path = csv_path;
    const auto dot = json_path.rfind('.');
    json_path = (dot == std::string::npos ? json_path : json_path.substr(0, dot)) + ".json";
    write_text_file(json_path, report.detail.dump(2) + "\n");
    std::cout << report.to_csv();
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const lpnorm::SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 3;
  } catch (const lpnorm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
