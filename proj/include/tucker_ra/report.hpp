#pragma once

// Run orchestration behind the command-line tool: algorithm dispatch,
// DecompositionReport (JSON), and benchmark matrices (CSV).

#include "tucker_ra/hooi.hpp"
#include "tucker_ra/hosvd.hpp"
#include "tucker_ra/synth.hpp"
#include "tucker_ra/tnsr_io.hpp"
#include "tucker_ra/tucker_model.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tucker_ra {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr int kBenchSchemaVersion = 1;

enum class Algorithm { t_hosvd, st_hosvd, greedy_bu, greedy_td, hooi, ra_hooi, als };
enum class InitKind { st_hosvd, random, t_hosvd };

inline constexpr std::array<std::pair<std::string_view, Algorithm>, 7> kAlgorithmNames{{
    {"t-hosvd", Algorithm::t_hosvd},
    {"st-hosvd", Algorithm::st_hosvd},
    {"greedy-bu", Algorithm::greedy_bu},
    {"greedy-td", Algorithm::greedy_td},
    {"hooi", Algorithm::hooi},
    {"ra-hooi", Algorithm::ra_hooi},
    {"als", Algorithm::als},
}};

inline Algorithm parse_algorithm(std::string_view name) {
  for (const auto& [key, value] : kAlgorithmNames) {
    if (key == name) return value;
  }
  throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
}

inline std::string algorithm_name(Algorithm a) {
  for (const auto& [key, value] : kAlgorithmNames) {
    if (value == a) return std::string(key);
  }
  return "?";
}

inline InitKind parse_init(std::string_view name) {
  if (name == "st-hosvd") return InitKind::st_hosvd;
  if (name == "random") return InitKind::random;
  if (name == "t-hosvd") return InitKind::t_hosvd;
  throw std::invalid_argument("unknown init '" + std::string(name) + "'");
}

inline std::string init_name(InitKind k) {
  switch (k) {
    case InitKind::st_hosvd: return "st-hosvd";
    case InitKind::random: return "random";
    case InitKind::t_hosvd: return "t-hosvd";
  }
  return "?";
}

inline bool takes_tolerance(Algorithm a) {
  return a == Algorithm::t_hosvd || a == Algorithm::st_hosvd || a == Algorithm::greedy_bu ||
         a == Algorithm::greedy_td || a == Algorithm::ra_hooi;
}

inline bool takes_rank(Algorithm a) {
  return a == Algorithm::t_hosvd || a == Algorithm::st_hosvd || a == Algorithm::hooi || a == Algorithm::als;
}

struct RunRequest {
  Algorithm algorithm = Algorithm::ra_hooi;
  std::optional<Truncation> rank;
  std::optional<double> tolerance;
  std::optional<InitKind> init;  // hooi / ra-hooi; defaults depend on algorithm
  std::uint64_t seed = 0;
  HooiConfig config;

  void validate(std::size_t order) const {
    if (rank.has_value() == tolerance.has_value()) {
      throw std::invalid_argument("exactly one of a rank truncation or a tolerance is required");
    }
    if (tolerance && !takes_tolerance(algorithm)) {
      throw std::invalid_argument(algorithm_name(algorithm) + " does not support tolerance mode");
    }
    if (rank && !takes_rank(algorithm)) {
      throw std::invalid_argument(algorithm_name(algorithm) + " does not support fixed-rank mode");
    }
    if (tolerance && !(*tolerance > 0.0 && *tolerance < 1.0)) {
      throw std::invalid_argument("tolerance must lie in (0, 1)");
    }
    if (rank && rank->order() != order) {
      throw std::invalid_argument("rank has " + std::to_string(rank->order()) + " entries but the tensor has order " +
                                  std::to_string(order));
    }
  }

  InitKind effective_init() const {
    if (init) return *init;
    return algorithm == Algorithm::ra_hooi ? InitKind::st_hosvd : InitKind::t_hosvd;
  }
};

struct DecompositionReport {
  std::string algorithm;
  std::string init;  // empty for non-iterative algorithms
  std::optional<double> tolerance;
  double rel_error = 0.0;
  Truncation truncation;
  std::vector<Truncation> rank_history;
  std::size_t num_params = 0;
  double compression_rate = 0.0;
  std::size_t sweeps = 0;
  double wall_time_s = 0.0;
  std::uint64_t seed = 0;

  bool tolerance_met() const { return !tolerance || rel_error <= *tolerance; }
};

struct RunOutcome {
  DecompositionReport report;
  TuckerModel model;
};

namespace detail {

inline std::vector<Matrix> random_factors(const Shape& shape, const Truncation& trunc, std::uint64_t seed) {
  GaussianStream rng(seed);
  std::vector<Matrix> out;
  for (std::size_t n = 0; n < shape.size(); ++n) out.push_back(random_orthonormal(rng, shape[n], trunc[n]));
  return out;
}

}  // namespace detail

/// Runs one decomposition. Wall time covers the algorithm call only.
inline RunOutcome run_decomposition(const DenseTensor& a, const RunRequest& req) {
  req.validate(a.order());
  RunOutcome out;
  DecompositionReport& rep = out.report;
  rep.algorithm = algorithm_name(req.algorithm);
  rep.tolerance = req.tolerance;
  rep.seed = req.seed;

  const auto start = std::chrono::steady_clock::now();
  switch (req.algorithm) {
    case Algorithm::t_hosvd:
      out.model = req.rank ? t_hosvd_rank(a, *req.rank) : t_hosvd_tol(a, *req.tolerance);
      break;
    case Algorithm::st_hosvd:
      out.model = req.rank ? st_hosvd_rank(a, *req.rank) : st_hosvd_tol(a, *req.tolerance);
      break;
    case Algorithm::greedy_bu:
      out.model = greedy_hosvd_bottom_up(a, *req.tolerance);
      break;
    case Algorithm::greedy_td:
      out.model = greedy_hosvd_top_down(a, *req.tolerance);
      break;
    case Algorithm::hooi: {
      const InitKind kind = req.effective_init();
      if (kind == InitKind::st_hosvd) throw std::invalid_argument("hooi supports init t-hosvd or random");
      rep.init = init_name(kind);
      std::vector<Matrix> init = kind == InitKind::random ? detail::random_factors(a.shape(), *req.rank, req.seed)
                                                          : t_hosvd_rank(a, *req.rank).factors;
      HooiResult r = hooi(a, *req.rank, std::move(init), req.config);
      out.model = std::move(r.model);
      rep.sweeps = r.sweeps;
      break;
    }
    case Algorithm::ra_hooi: {
      const InitKind kind = req.effective_init();
      if (kind == InitKind::t_hosvd) throw std::invalid_argument("ra-hooi supports init st-hosvd or random");
      rep.init = init_name(kind);
      HooiConfig cfg = req.config;
      cfg.epsilon = *req.tolerance;
      std::vector<Matrix> init =
          kind == InitKind::random ? init_random(a, cfg.epsilon, req.seed) : init_st_hosvd(a, cfg.epsilon);
      AdaptiveResult r = rank_adaptive_hooi(a, cfg, std::move(init));
      out.model = std::move(r.model);
      rep.sweeps = r.sweeps;
      rep.rank_history = r.history.truncations;
      break;
    }
    case Algorithm::als: {
      rep.init = init_name(InitKind::t_hosvd);
      AlsResult r = classical_als(a, *req.rank, req.config);
      out.model = std::move(r.model);
      rep.sweeps = r.cycles;
      break;
    }
  }
  rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  rep.rel_error = rel_error(a, out.model);
  rep.truncation = out.model.truncation();
  rep.num_params = num_params(out.model);
  rep.compression_rate = compression_rate(out.model);
  return out;
}

inline nlohmann::json to_json(const DecompositionReport& r) {
  nlohmann::json j;
  j["schema_version"] = kReportSchemaVersion;
  j["algorithm"] = r.algorithm;
  j["init"] = r.init.empty() ? nlohmann::json(nullptr) : nlohmann::json(r.init);
  j["tolerance"] = r.tolerance ? nlohmann::json(*r.tolerance) : nlohmann::json(nullptr);
  j["rel_error"] = r.rel_error;
  j["truncation"] = r.truncation.ranks();
  auto history = nlohmann::json::array();
  for (const auto& t : r.rank_history) history.push_back(t.ranks());
  j["rank_history"] = history;
  j["num_params"] = r.num_params;
  j["compression_rate"] = r.compression_rate;
  j["sweeps"] = r.sweeps;
  j["wall_time_s"] = r.wall_time_s;
  j["seed"] = r.seed;
  return j;
}

// ---------------------------------------------------------------------------
// Datasets and benchmark matrices

/// Builds a tensor from a JSON dataset description:
///   {"kind": "coulomb", "size": I, "lo": -100, "hi": 100}
///   {"kind": "noisy-lowrank", "shape": [...], "rank": [...], "delta": d, "seed": s}
///   {"kind": "lowrank", "shape": [...], "rank": [...], "seed": s}
///   {"kind": "file", "path": "..."}
inline DenseTensor make_dataset(const nlohmann::json& spec) {
  const std::string kind = spec.at("kind").get<std::string>();
  if (kind == "coulomb") {
    return coulomb_kernel_tensor(spec.at("size").get<std::size_t>(), spec.value("lo", -100.0),
                                 spec.value("hi", 100.0));
  }
  if (kind == "noisy-lowrank") {
    NoisySpec ns{spec.at("shape").get<Shape>(), Truncation(spec.at("rank").get<std::vector<std::size_t>>()),
                 spec.value("delta", 1e-2), spec.value("seed", std::uint64_t{0})};
    return noisy_low_rank_tensor(ns);
  }
  if (kind == "lowrank") {
    return random_low_rank_tensor(spec.at("shape").get<Shape>(),
                                  Truncation(spec.at("rank").get<std::vector<std::size_t>>()),
                                  spec.value("seed", std::uint64_t{0}));
  }
  if (kind == "file") return load_tensor(spec.at("path").get<std::string>());
  throw std::invalid_argument("unknown dataset kind '" + kind + "'");
}

/// Column order of the benchmark CSV. Append-only; bump kBenchSchemaVersion
/// on any change.
inline constexpr std::array<std::string_view, 12> kBenchColumns{
    "schema",    "algorithm",   "init",  "tolerance", "seed",         "rel_error",
    "truncation", "num_params", "compression_rate", "sweeps", "wall_time_s", "rank_history"};

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string history_string(const std::vector<Truncation>& history) {
  std::string s;
  for (std::size_t k = 0; k < history.size(); ++k) {
    if (k) s += '|';
    s += history[k].to_string('x');
  }
  return s;
}

inline std::string csv_header() {
  std::string s;
  for (std::size_t i = 0; i < kBenchColumns.size(); ++i) {
    if (i) s += ',';
    s += kBenchColumns[i];
  }
  return s;
}

inline std::string csv_row(const DecompositionReport& r) {
  std::ostringstream os;
  os << kBenchSchemaVersion << ',' << r.algorithm << ',' << r.init << ','
     << (r.tolerance ? format_double(*r.tolerance) : std::string()) << ',' << r.seed << ','
     << format_double(r.rel_error) << ',' << r.truncation.to_string('x') << ',' << r.num_params << ','
     << format_double(r.compression_rate) << ',' << r.sweeps << ',' << format_double(r.wall_time_s) << ','
     << history_string(r.rank_history);
  return os.str();
}

struct BenchCell {
  std::string name;  // as listed in the config
  RunRequest request;
};

/// Config algorithm names: the tolerance-mode algorithms plus
/// "ra-hooi-random" (rank-adaptive HOOI with random initialization).
inline RunRequest bench_request(const std::string& name, double tol, std::uint64_t seed, std::size_t max_iter) {
  RunRequest req;
  req.tolerance = tol;
  req.seed = seed;
  req.config.max_iter = max_iter;
  if (name == "ra-hooi-random") {
    req.algorithm = Algorithm::ra_hooi;
    req.init = InitKind::random;
  } else {
    req.algorithm = parse_algorithm(name);
    if (!takes_tolerance(req.algorithm)) {
      throw std::invalid_argument("bench: algorithm '" + name + "' has no tolerance mode");
    }
  }
  return req;
}

struct BenchResult {
  std::string csv;
  std::vector<DecompositionReport> reports;
};

/// Rows ordered by tolerance, then algorithm (config order), then seed.
inline BenchResult run_bench(const nlohmann::json& config) {
  const auto algorithms = config.value("algorithms", std::vector<std::string>{});
  const auto tolerances = config.value("tolerances", std::vector<double>{});
  const auto seeds = config.value("seeds", std::vector<std::uint64_t>{0});
  const auto max_iter = config.value("max_iter", std::size_t{500});

  BenchResult out;
  out.csv = csv_header() + "\n";
  if (algorithms.empty() || tolerances.empty()) return out;

  // Validate every cell before doing any work.
  for (const auto& name : algorithms) (void)bench_request(name, tolerances.front(), 0, max_iter);

  const DenseTensor a = make_dataset(config.at("dataset"));
  for (double tol : tolerances) {
    for (const auto& name : algorithms) {
      for (std::uint64_t seed : seeds) {
        RunOutcome run = run_decomposition(a, bench_request(name, tol, seed, max_iter));
        out.csv += csv_row(run.report) + "\n";
        out.reports.push_back(std::move(run.report));
      }
    }
  }
  return out;
}

}  // namespace tucker_ra
