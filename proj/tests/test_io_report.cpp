#include "test_support.hpp"

#include "tucker_ra/report.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace tucker_ra;
using namespace tucker_ra::testing;

namespace {

std::string tnsr_bytes(const DenseTensor& t) {
  std::ostringstream os(std::ios::binary);
  write_tnsr(os, t);
  return os.str();
}

DenseTensor parse_bytes(const std::string& bytes) {
  std::istringstream is(bytes, std::ios::binary);
  return read_tnsr(is);
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("tucker_ra_test_" + name);
}

}  // namespace

TEST(Tnsr, HeaderLayout) {
  const std::string b = tnsr_bytes(DenseTensor({2, 3}, {1, 2, 3, 4, 5, 6}));
  ASSERT_EQ(b.size(), 4u + 2 + 2 + 2 * 8 + 6 * 8);
  EXPECT_EQ(b.substr(0, 4), "TNSR");
  EXPECT_EQ(static_cast<unsigned char>(b[4]), 1);
  EXPECT_EQ(static_cast<unsigned char>(b[5]), 0);
  EXPECT_EQ(static_cast<unsigned char>(b[6]), 2);
  EXPECT_EQ(static_cast<unsigned char>(b[8]), 2);
  EXPECT_EQ(static_cast<unsigned char>(b[16]), 3);
  double first = 0.0;
  std::memcpy(&first, b.data() + 24, 8);
  EXPECT_EQ(first, 1.0);
}

TEST(Tnsr, RoundTripIsBitExact) {
  const DenseTensor t = random_tensor({3, 1, 4, 2}, 5);
  EXPECT_TRUE(bit_equal(parse_bytes(tnsr_bytes(t)), t));
  const auto path = temp_file("roundtrip.tnsr");
  save_tensor(path.string(), t);
  EXPECT_TRUE(bit_equal(load_tensor(path.string()), t));
  std::filesystem::remove(path);
}

TEST(Tnsr, RejectsCorruptInput) {
  const std::string good = tnsr_bytes(random_tensor({2, 2}, 1));
  std::string bad_magic = good;
  bad_magic[0] = 'X';
  EXPECT_THROW(parse_bytes(bad_magic), TnsrFormatError);
  std::string bad_version = good;
  bad_version[4] = 9;
  EXPECT_THROW(parse_bytes(bad_version), TnsrFormatError);
  EXPECT_THROW(parse_bytes(good.substr(0, good.size() - 3)), TnsrFormatError);
  EXPECT_THROW(parse_bytes(good.substr(0, 2)), TnsrFormatError);
  std::string zero_dim = good;
  zero_dim[8] = 0;
  EXPECT_THROW(parse_bytes(zero_dim), TnsrFormatError);
  std::string huge = good;
  huge[15] = 0x10;  // first dimension around 2^60
  EXPECT_THROW(parse_bytes(huge), TnsrFormatError);
  std::string nan_value = good;
  const double nan = std::nan("");
  std::memcpy(nan_value.data() + 24, &nan, 8);
  EXPECT_THROW(parse_bytes(nan_value), TnsrFormatError);
  EXPECT_THROW(load_tensor("/nonexistent/path.tnsr"), std::runtime_error);
}

TEST(TnsrModel, RoundTrip) {
  const DenseTensor a = random_tensor({5, 4, 3}, 2);
  const TuckerModel m = st_hosvd_rank(a, Truncation({2, 3, 1}));
  const auto path = temp_file("model.tnsr");
  save_model(path.string(), m);
  const TuckerModel back = load_model(path.string());
  EXPECT_TRUE(bit_equal(back.core, m.core));
  ASSERT_EQ(back.factors.size(), 3u);
  for (std::size_t n = 0; n < 3; ++n) EXPECT_EQ(back.factors[n], m.factors[n]);
  std::filesystem::remove(path);
}

TEST(Report, NamesRoundTrip) {
  for (const char* name : {"t-hosvd", "st-hosvd", "greedy-bu", "greedy-td", "hooi", "ra-hooi", "als"}) {
    EXPECT_EQ(algorithm_name(parse_algorithm(name)), name);
  }
  EXPECT_THROW(parse_algorithm("tucker"), std::invalid_argument);
  EXPECT_EQ(init_name(parse_init("random")), "random");
  EXPECT_THROW(parse_init("zeros"), std::invalid_argument);
}

TEST(Report, RequestValidation) {
  const DenseTensor a = random_tensor({4, 4, 4}, 3);
  RunRequest r;
  r.algorithm = Algorithm::ra_hooi;
  EXPECT_THROW(run_decomposition(a, r), std::invalid_argument);
  r.rank = Truncation({2, 2, 2});
  EXPECT_THROW(run_decomposition(a, r), std::invalid_argument);
  r.algorithm = Algorithm::greedy_bu;
  EXPECT_THROW(run_decomposition(a, r), std::invalid_argument);
  r.algorithm = Algorithm::hooi;
  r.rank = Truncation({2, 2});
  EXPECT_THROW(run_decomposition(a, r), std::invalid_argument);
  r.rank.reset();
  r.algorithm = Algorithm::t_hosvd;
  r.tolerance = 1.5;
  EXPECT_THROW(run_decomposition(a, r), std::invalid_argument);
}

TEST(Report, MetricsMatchLibrary) {
  const DenseTensor a = noisy_low_rank_tensor(NoisySpec{{10, 9, 8}, Truncation({2, 3, 2}), 1e-2, 4});
  for (const char* name : {"t-hosvd", "st-hosvd", "greedy-bu", "greedy-td", "ra-hooi"}) {
    RunRequest r;
    r.algorithm = parse_algorithm(name);
    r.tolerance = 5e-2;
    const RunOutcome out = run_decomposition(a, r);
    EXPECT_NEAR(out.report.rel_error, rel_error(a, out.model), 1e-13 * out.report.rel_error);
    EXPECT_EQ(out.report.num_params, num_params(out.model));
    EXPECT_EQ(out.report.truncation, out.model.truncation());
    EXPECT_TRUE(out.report.tolerance_met());
    EXPECT_LT(pythagoras_defect(a, out.model), 1e-10);
  }
  RunRequest r;
  r.algorithm = Algorithm::t_hosvd;
  r.tolerance = 5e-2;
  const RunOutcome lib = run_decomposition(a, r);
  const TuckerModel direct = t_hosvd_tol(a, 5e-2);
  EXPECT_NEAR(lib.report.rel_error, rel_error(a, direct), 1e-13 * lib.report.rel_error);
}

TEST(Report, FixedRankAlgorithms) {
  const DenseTensor a = random_tensor({6, 5, 4}, 5);
  for (const char* name : {"t-hosvd", "st-hosvd", "hooi", "als"}) {
    RunRequest r;
    r.algorithm = parse_algorithm(name);
    r.rank = Truncation({2, 2, 2});
    const RunOutcome out = run_decomposition(a, r);
    EXPECT_EQ(out.report.truncation, Truncation({2, 2, 2}));
    EXPECT_TRUE(out.report.tolerance_met());
    EXPECT_LT(pythagoras_defect(a, out.model), 1e-10);
  }
}

TEST(Report, JsonFields) {
  const DenseTensor a = random_tensor({5, 5, 5}, 6);
  RunRequest r;
  r.algorithm = Algorithm::ra_hooi;
  r.tolerance = 0.5;
  r.seed = 11;
  const nlohmann::json j = to_json(run_decomposition(a, r).report);
  for (const char* key : {"schema_version", "algorithm", "init", "tolerance", "rel_error", "truncation",
                          "rank_history", "num_params", "compression_rate", "sweeps", "wall_time_s", "seed"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["algorithm"], "ra-hooi");
  EXPECT_EQ(j["init"], "st-hosvd");
  EXPECT_EQ(j["seed"], 11);
  EXPECT_EQ(j["rank_history"].size(), j["sweeps"].get<std::size_t>() + 1);

  r.algorithm = Algorithm::t_hosvd;
  const nlohmann::json k = to_json(run_decomposition(a, r).report);
  EXPECT_TRUE(k["init"].is_null());
  EXPECT_TRUE(k["rank_history"].empty());
}

TEST(Bench, EmptyListsGiveHeaderOnly) {
  nlohmann::json cfg = {{"dataset", {{"kind", "coulomb"}, {"size", 4}}}, {"algorithms", nlohmann::json::array()},
                        {"tolerances", {0.1}}};
  EXPECT_EQ(run_bench(cfg).csv, csv_header() + "\n");
  cfg["algorithms"] = {"t-hosvd"};
  cfg["tolerances"] = nlohmann::json::array();
  EXPECT_EQ(run_bench(cfg).csv, csv_header() + "\n");
}

TEST(Bench, RowOrderAndColumns) {
  const nlohmann::json cfg = {
      {"dataset", {{"kind", "noisy-lowrank"}, {"shape", {6, 6, 6}}, {"rank", {2, 2, 2}}, {"delta", 1e-2}, {"seed", 1}}},
      {"algorithms", {"st-hosvd", "ra-hooi-random"}},
      {"tolerances", {0.1, 0.05}},
      {"seeds", {3, 4}}};
  const BenchResult b = run_bench(cfg);
  ASSERT_EQ(b.reports.size(), 8u);
  EXPECT_EQ(b.reports[0].algorithm, "st-hosvd");
  EXPECT_EQ(b.reports[2].algorithm, "ra-hooi");
  EXPECT_EQ(b.reports[2].init, "random");
  EXPECT_EQ(b.reports[3].seed, 4u);
  EXPECT_EQ(*b.reports[4].tolerance, 0.05);
  std::istringstream lines(b.csv);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, csv_header());
  std::size_t rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 11) << line;
  }
  EXPECT_EQ(rows, 8u);
  EXPECT_THROW(run_bench({{"dataset", {{"kind", "coulomb"}, {"size", 3}}}, {"algorithms", {"hooi"}},
                          {"tolerances", {0.1}}}),
               std::invalid_argument);
}
