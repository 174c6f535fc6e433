// tucker-ra: synth | decompose | bench | info

#include "tucker_ra/report.hpp"
#include "tucker_ra/tucker_ra.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace tucker_ra;

constexpr int kExitError = 1;
constexpr int kExitToleranceMissed = 3;

std::vector<std::size_t> parse_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(item, &pos);
    if (pos != item.size()) throw std::invalid_argument("bad list entry '" + item + "'");
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

void apply_thread_cap() {
  if (const char* env = std::getenv("TUCKER_RA_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) Eigen::setNbThreads(n);
  }
}

void print_written(const std::string& path, const DenseTensor& t, const std::string& extra) {
  std::cout << "wrote " << path << "\n"
            << "shape " << shape_to_string(t.shape()) << "\n"
            << "norm " << format_double(frobenius_norm(t)) << "\n"
            << extra;
}

std::string bench_help() {
  std::string s =
      "Runs a JSON-configured benchmark matrix and writes CSV, one row per\n"
      "(tolerance, algorithm, seed). Config keys: dataset, algorithms, tolerances,\n"
      "seeds, max_iter. Algorithms: t-hosvd st-hosvd greedy-bu greedy-td ra-hooi\n"
      "ra-hooi-random.\nCSV columns (schema " +
      std::to_string(kBenchSchemaVersion) + "): " + csv_header();
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  apply_thread_cap();
  CLI::App app{"Truncated Tucker decompositions with rank-adaptive HOOI"};
  app.require_subcommand(1);

  // synth -------------------------------------------------------------------
  auto* synth = app.add_subcommand("synth", "Generate a tensor and write it as a TNSR file");
  synth->require_subcommand(1);
  std::string out_path;
  std::string shape_text, rank_text;
  double delta = 1e-2;
  std::uint64_t seed = 0;
  std::size_t size = 0;
  double lo = -100.0, hi = 100.0;

  auto* noisy = synth->add_subcommand("noisy-lowrank", "A/||A|| + delta E/||E|| with A of given multilinear rank");
  noisy->add_option("--shape", shape_text, "Comma-separated dimensions")->required();
  noisy->add_option("--rank", rank_text, "Comma-separated multilinear rank")->required();
  noisy->add_option("--delta", delta, "Noise level")->capture_default_str();
  noisy->add_option("--seed", seed, "Seed (signal uses seed, noise uses seed + 1)")->capture_default_str();
  noisy->add_option("-o,--output", out_path, "Output TNSR file")->required();

  auto* lowrank = synth->add_subcommand("lowrank", "Random tensor of given multilinear rank (no noise)");
  lowrank->add_option("--shape", shape_text, "Comma-separated dimensions")->required();
  lowrank->add_option("--rank", rank_text, "Comma-separated multilinear rank")->required();
  lowrank->add_option("--seed", seed, "Seed")->capture_default_str();
  lowrank->add_option("-o,--output", out_path, "Output TNSR file")->required();

  auto* coulomb = synth->add_subcommand("coulomb", "ln(0.1 + |x1-x2| + |x3-x4|) on an I^4 grid");
  coulomb->add_option("--size", size, "Grid points per mode")->required();
  coulomb->add_option("--lo", lo, "Grid start")->capture_default_str();
  coulomb->add_option("--hi", hi, "Grid end")->capture_default_str();
  coulomb->add_option("-o,--output", out_path, "Output TNSR file")->required();

  // decompose ---------------------------------------------------------------
  auto* decompose = app.add_subcommand("decompose", "Decompose a TNSR tensor and print a JSON report");
  std::string input_path, algorithm = "ra-hooi", init_text, report_path, model_path;
  std::string trunc_text;
  double tol = 0.0;
  std::size_t max_iter = 500;
  double fit_tol = 1e-8;
  decompose->add_option("input", input_path, "Input TNSR file")->required();
  decompose
      ->add_option("-a,--algorithm", algorithm, "t-hosvd | st-hosvd | greedy-bu | greedy-td | hooi | ra-hooi | als")
      ->capture_default_str();
  auto* rank_opt = decompose->add_option("--rank", trunc_text, "Fixed truncation R1,...,RN");
  auto* tol_opt = decompose->add_option("--tol", tol, "Relative error tolerance");
  rank_opt->excludes(tol_opt);
  decompose->add_option("--init", init_text, "st-hosvd | random (ra-hooi); t-hosvd | random (hooi)");
  decompose->add_option("--seed", seed, "Seed for random initialization")->capture_default_str();
  decompose->add_option("--max-iter", max_iter, "Maximum sweeps")->capture_default_str();
  decompose->add_option("--fit-tol", fit_tol, "Core-norm stagnation threshold")->capture_default_str();
  decompose->add_option("--report", report_path, "Write the JSON report here instead of stdout");
  decompose->add_option("--save-model", model_path, "Write core and factors as a TNSR model file");

  // bench -------------------------------------------------------------------
  auto* bench = app.add_subcommand("bench", bench_help());
  std::string config_path, csv_path;
  bench->add_option("config", config_path, "JSON config file")->required();
  bench->add_option("-o,--output", csv_path, "Write CSV here instead of stdout");

  // info --------------------------------------------------------------------
  auto* info = app.add_subcommand("info", "Print shape, norm and multilinear rank of a TNSR file");
  double rank_tol = 1e-10;
  info->add_option("input", input_path, "Input TNSR file")->required();
  info->add_option("--tol", rank_tol, "Relative singular value cutoff for the rank")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      if (noisy->parsed() || lowrank->parsed()) {
        const Shape shape = parse_list(shape_text);
        const Truncation trunc(parse_list(rank_text));
        const DenseTensor t = noisy->parsed() ? noisy_low_rank_tensor(NoisySpec{shape, trunc, delta, seed})
                                              : random_low_rank_tensor(shape, trunc, seed);
        save_tensor(out_path, t);
        print_written(out_path, t, "seed " + std::to_string(seed) + "\n");
      } else {
        const DenseTensor t = coulomb_kernel_tensor(size, lo, hi);
        save_tensor(out_path, t);
        print_written(out_path, t, "");
      }
      return 0;
    }

    if (decompose->parsed()) {
      const DenseTensor a = load_tensor(input_path);
      RunRequest req;
      req.algorithm = parse_algorithm(algorithm);
      if (*rank_opt) req.rank = Truncation(parse_list(trunc_text));
      if (*tol_opt) req.tolerance = tol;
      if (!init_text.empty()) req.init = parse_init(init_text);
      req.seed = seed;
      req.config.max_iter = max_iter;
      req.config.fit_tol = fit_tol;
      const RunOutcome run = run_decomposition(a, req);
      const std::string text = to_json(run.report).dump(2) + "\n";
      if (report_path.empty()) {
        std::cout << text;
      } else {
        std::ofstream os(report_path, std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open " + report_path + " for writing");
        os << text;
      }
      if (!model_path.empty()) save_model(model_path, run.model);
      if (!run.report.tolerance_met()) {
        std::cerr << "tolerance not met: rel_error " << format_double(run.report.rel_error) << "\n";
        return kExitToleranceMissed;
      }
      return 0;
    }

    if (bench->parsed()) {
      std::ifstream is(config_path);
      if (!is) throw std::runtime_error("cannot open " + config_path);
      const nlohmann::json config = nlohmann::json::parse(is);
      const BenchResult result = run_bench(config);
      if (csv_path.empty()) {
        std::cout << result.csv;
      } else {
        std::ofstream os(csv_path, std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open " + csv_path + " for writing");
        os << result.csv;
      }
      for (const auto& r : result.reports) {
        if (!r.tolerance_met()) return kExitToleranceMissed;
      }
      return 0;
    }

    if (info->parsed()) {
      const DenseTensor t = load_tensor(input_path);
      const MultilinearRank mr = multilinear_rank(t, rank_tol);
      std::cout << "shape " << shape_to_string(t.shape()) << "\n"
                << "order " << t.order() << "\n"
                << "entries " << t.size() << "\n"
                << "norm " << format_double(frobenius_norm(t)) << "\n"
                << "multilinear_rank " << shape_to_string(mr.ranks) << (mr.degenerate ? " (zero tensor)" : "")
                << "\n"
                << "rank_tol " << format_double(rank_tol) << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return 0;
}
