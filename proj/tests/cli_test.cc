// Copyright 2026 The encrep Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "encrep/cli.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "repeater_keyrate");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Result r;
  r.code = encrep::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::map<std::string, std::string> key_values(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("encrep_cli_test_" + name);
}

}  // namespace

TEST(cli, keyrate_optimized_positive) {
  const auto r = run({"keyrate", "--distance", "600", "--fidelity", "0.98", "--gate-quality", "0.992", "--optimize"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto kv = key_values(r.out);
  EXPECT_GT(std::stod(kv.at("K_per_mem_per_s")), 0.0);
  EXPECT_GE(std::stoi(kv.at("N")), 1);
  EXPECT_EQ(kv.at("M"), "6");
}

TEST(cli, keyrate_perfect_inputs) {
  const auto r = run({"keyrate", "--fidelity", "1", "--gate-quality", "1", "--distance", "100", "--nesting", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(std::stod(key_values(r.out).at("r_inf")), 1.0, 1e-9);
}

TEST(cli, keyrate_below_fidelity_threshold) {
  const auto r = run({"keyrate", "--fidelity", "0.90", "--gate-quality", "0.992", "--distance", "600", "--optimize"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(std::stod(key_values(r.out).at("K_per_mem_per_s")), 0.0);
}

TEST(cli, invalid_parameters_name_the_field) {
  auto r = run({"keyrate", "--fidelity", "1.5"});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("F0"), std::string::npos);
  r = run({"keyrate", "--distance", "-3"});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("distance"), std::string::npos);
  r = run({"keyrate", "--stations", "5"});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("2^N - 1"), std::string::npos);
  r = run({"keyrate", "--beta", "0.1", "--gate-quality", "0.9"});
  EXPECT_NE(r.code, 0);
  r = run({"keyrate", "--t0", "soon"});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("t0"), std::string::npos);
  r = run({});
  EXPECT_NE(r.code, 0);
}

TEST(cli, threshold_rows) {
  const auto r = run({"threshold", "--r-list", "1,31"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 3u);
  EXPECT_EQ(ls[0], "r,N,pG_min,F0_min,pG_min_full,F0_min_full");
  EXPECT_EQ(ls[1].substr(0, 16), "1,1,0.984,0.943,");
  EXPECT_EQ(ls[2].substr(0, 17), "31,5,0.997,0.989,");
}

TEST(cli, threshold_rejects_bad_station_count) {
  const auto r = run({"threshold", "--r-list", "2"});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("not of the form"), std::string::npos);
}

TEST(cli, distance_sweep_csv) {
  const auto args = std::vector<std::string>{"sweep", "--fidelity", "0.99", "--gate-quality", "0.995",
                                             "--l-min", "100", "--l-max", "1000", "--l-step", "150"};
  const auto r = run(args);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 8u);
  EXPECT_EQ(ls[0], encrep::cli::kDistanceHeader);
  EXPECT_EQ(ls[1].substr(0, 4), "100,");
  EXPECT_EQ(ls[7].substr(0, 5), "1000,");
  auto threaded = args;
  threaded.insert(threaded.end(), {"--threads", "3"});
  EXPECT_EQ(run(threaded).out, r.out);
  EXPECT_EQ(run(args).out, r.out);
}

TEST(cli, distance_sweep_key_falls_within_plateaus) {
  const auto r = run({"sweep", "--fidelity", "0.995", "--gate-quality", "0.998", "--l-min", "100", "--l-max",
                      "2000", "--l-step", "50"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ls = lines(r.out);
  int last_n = -1;
  double last_k = 0.0;
  for (std::size_t i = 1; i < ls.size(); ++i) {
    std::vector<std::string> cells;
    std::istringstream in(ls[i]);
    std::string c;
    while (std::getline(in, c, ',')) cells.push_back(c);
    ASSERT_EQ(cells.size(), 11u);
    const int n = std::stoi(cells[1]);
    const double k = std::stod(cells[10]);
    if (n == last_n) {
      EXPECT_LE(k, last_k);
    }
    last_n = n;
    last_k = k;
  }
}

TEST(cli, surface_sweep_marks_zero_cells) {
  const auto r = run({"sweep", "--sweep", "surface", "--distance", "600", "--f0-min", "0.93", "--f0-max", "0.99",
                      "--f0-step", "0.03", "--pg-min", "0.98", "--pg-max", "1", "--pg-step", "0.01"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 10u);
  EXPECT_EQ(ls[0], "F0,pG,K_per_mem_per_s,N_opt");
  EXPECT_EQ(ls[1].substr(0, 10), "0.93,0.98,");
  bool zero = false, positive = false;
  for (std::size_t i = 1; i < ls.size(); ++i) {
    const auto a = ls[i].find(',', ls[i].find(',') + 1);
    const double k = std::stod(ls[i].substr(a + 1));
    zero = zero || k == 0.0;
    positive = positive || k > 0.0;
  }
  EXPECT_TRUE(zero);
  EXPECT_TRUE(positive);
}

TEST(cli, empty_sweep_range_is_an_error) {
  auto r = run({"sweep", "--l-min", "500", "--l-max", "100"});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("empty"), std::string::npos);
  r = run({"sweep", "--l-step", "0"});
  EXPECT_NE(r.code, 0);
}

TEST(cli, cost_with_reference_defaults) {
  const auto r = run({"cost", "--paper-fig8-defaults", "--l-min", "500", "--l-max", "5000", "--l-step", "500"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 11u);
  EXPECT_EQ(ls[0], encrep::cli::kCostHeader);
  for (std::size_t i = 1; i < ls.size(); ++i) {
    std::vector<std::string> cells;
    std::istringstream in(ls[i]);
    std::string c;
    while (std::getline(in, c, ',')) cells.push_back(c);
    ASSERT_EQ(cells.size(), 6u);
    EXPECT_TRUE(std::isfinite(std::stod(cells[2])));
    const double l0 = std::stod(cells[4]);
    EXPECT_GE(l0, 30.0);
    EXPECT_LE(l0, 120.0);
  }
}

TEST(cli, wider_nesting_range_never_raises_cost) {
  auto cost_at = [](const std::string& max) {
    const auto r = run({"cost", "--paper-fig8-defaults", "--l-min", "1500", "--l-max", "1500", "--max-nesting", max});
    return std::stod(lines(r.out).at(1).substr(5));
  };
  EXPECT_GE(cost_at("3"), cost_at("5"));
  EXPECT_GE(cost_at("5"), cost_at("10"));
}

TEST(cli, enumerate_errors) {
  const auto r = run({"enumerate-errors"});
  ASSERT_EQ(r.code, 0);
  const auto kv = key_values(r.out);
  EXPECT_EQ(kv.at("raw_combos"), "216");
  EXPECT_EQ(kv.at("admissible_combos"), "160");
  EXPECT_EQ(kv.at("with_cnot_orderings"), "960");
  EXPECT_EQ(kv.at("distinct_states"), "64");
}

TEST(cli, validate_suite_passes) {
  const auto r = run({"validate", "--trials", "200000"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("combo counts 216/160/960"), std::string::npos);
  EXPECT_NE(r.out.find("Monte Carlo"), std::string::npos);
  EXPECT_NE(r.out.find("decode: ideal encoded pair"), std::string::npos);
}

TEST(cli, config_file_and_precedence) {
  const auto path = temp_file("config.ini");
  {
    std::ofstream f(path);
    f << "distance=250\nfidelity=0.99\nbeta=0.001\nnesting=2\n";
  }
  auto r = run({"keyrate", "--config", path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  auto kv = key_values(r.out);
  EXPECT_EQ(kv.at("L_km"), "250");
  EXPECT_EQ(kv.at("N"), "2");

  r = run({"keyrate", "--config", path.string(), "--distance", "300"});
  kv = key_values(r.out);
  EXPECT_EQ(kv.at("L_km"), "300");
  EXPECT_EQ(kv.at("N"), "2");

  ::setenv(encrep::cli::kConfigEnv, path.string().c_str(), 1);
  r = run({"keyrate"});
  ::unsetenv(encrep::cli::kConfigEnv);
  EXPECT_EQ(key_values(r.out).at("L_km"), "250");
  std::filesystem::remove(path);
}

TEST(cli, output_file) {
  const auto path = temp_file("keyrate.csv");
  const auto r = run({"keyrate", "--distance", "200", "--output", path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream f(path);
  std::string header, row;
  std::getline(f, header);
  std::getline(f, row);
  EXPECT_EQ(header, encrep::cli::kDistanceHeader);
  EXPECT_EQ(row.substr(0, 6), "200,1,");
  std::filesystem::remove(path);
}

TEST(cli, help_lists_defaults) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  for (const char* s : {"--alpha", "0.17", "--speed", "200000", "M = 6", "--swap-exponent", "--config",
                        "REPEATER_KEYRATE_CONFIG", "keyrate", "validate"}) {
    EXPECT_NE(r.out.find(s), std::string::npos) << s;
  }
}

TEST(cli, binary_exit_codes) {
  EXPECT_EQ(std::system(REPEATER_KEYRATE_BIN " enumerate-errors > /dev/null"), 0);
  EXPECT_NE(std::system(REPEATER_KEYRATE_BIN " keyrate --fidelity 7 2> /dev/null"), 0);
}
