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

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "encrep/encswap.hpp"
#include "encrep/rates.hpp"
#include "encrep/validate.hpp"

/// Command-line front end of the repeater key-rate model.
namespace encrep::cli {

enum class Command { kKeyrate, kThreshold, kSweep, kCost, kEnumerateErrors, kValidate };

enum class SweepKind { kDistance, kSurface };

/// Inclusive arithmetic grid min, min+step, ..., <= max.
struct Range {
  double min = 0.0;
  double max = 0.0;
  double step = 1.0;

  void validate(const std::string& name) const {
    if (!(step > 0.0)) throw std::invalid_argument(name + " step must be positive");
    if (!(max >= min)) throw std::invalid_argument(name + " range is empty");
  }

  std::vector<double> values() const {
    const auto n = static_cast<std::int64_t>(std::floor((max - min) / step + 1e-9)) + 1;
    std::vector<double> out;
    for (std::int64_t i = 0; i < n; ++i) out.push_back(min + static_cast<double>(i) * step);
    return out;
  }
};

struct RunConfig {
  Command command = Command::kKeyrate;
  RepeaterParams params;
  bool optimize = false;
  NestingRange nesting_range;
  std::string output;
  std::uint64_t seed = 42;
  std::int64_t trials = 1000000;
  std::vector<int> stations_list = {1, 3, 7, 15, 31, 63, 127};
  double threshold_tol = kThresholdTol;
  SweepKind sweep_kind = SweepKind::kDistance;
  Range distance_range{100.0, 1000.0, 100.0};
  Range f0_range{0.94, 1.0, 0.005};
  Range pg_range{0.98, 1.0, 0.001};
  int threads = 1;

  void validate() const {
    params.validate();
    nesting_range.validate();
    if (trials < 2) throw std::invalid_argument("trials must be at least 2");
    if (threads < 1) throw std::invalid_argument("threads must be at least 1");
    if (!(threshold_tol > 0.0)) throw std::invalid_argument("threshold tolerance must be positive");
    if (command == Command::kThreshold) {
      if (stations_list.empty()) throw std::invalid_argument("station list is empty");
      for (int r : stations_list) nesting_for_stations(r);
    }
    if (command == Command::kSweep || command == Command::kCost) {
      distance_range.validate("distance");
      if (!(distance_range.min > 0.0)) throw std::invalid_argument("distance must be positive");
    }
    if (command == Command::kSweep && sweep_kind == SweepKind::kSurface) {
      f0_range.validate("fidelity");
      pg_range.validate("gate-quality");
      if (f0_range.min < 0.0 || f0_range.max > 1.0) throw std::invalid_argument("fidelity range must lie in [0, 1]");
      if (pg_range.min < 0.0 || pg_range.max > 1.0) throw std::invalid_argument("gate-quality range must lie in [0, 1]");
    }
  }
};

/// %.10g; infinities print as inf / -inf.
inline std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

/// Three decimals rounded up, so the printed minimum still yields a key.
inline std::string fmt3_up(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", std::ceil(x * 1000.0 - 1e-9) / 1000.0);
  return buf;
}

/// Evaluates f(0..n-1) on `threads` workers and returns the results in index order.
template <typename T, typename F>
std::vector<T> parallel_map(std::size_t n, int threads, F f) {
  std::vector<T> out(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        out[i] = f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || n < 2) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < std::min(workers, n); ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

inline const char* kDistanceHeader = "L_km,N_opt,L0_km,P0,Z,R_per_s,eX,eY,eZ,r_inf,K_per_mem_per_s";
inline const char* kSurfaceHeader = "F0,pG,K_per_mem_per_s,N_opt";
inline const char* kCostHeader = "L_km,C,C_prime,N_opt,L0_km,K_per_mem_per_s";

inline std::string distance_row(double distance, const RateReport& r) {
  std::ostringstream s;
  s << fmt(distance) << ',' << r.nesting << ',' << fmt(r.segment_km) << ',' << fmt(r.p0) << ','
    << fmt(r.z) << ',' << fmt(r.rate) << ',' << fmt(r.errors.e_x) << ',' << fmt(r.errors.e_y) << ','
    << fmt(r.errors.e_z) << ',' << fmt(r.r_inf) << ',' << fmt(r.key_rate);
  return s.str();
}

inline int cmd_keyrate(const RunConfig& cfg, std::ostream& out) {
  const LinkModel link = make_link(cfg.params.beta, cfg.params.f0);
  const RateReport r = cfg.optimize ? optimize_over_stations(cfg.params, cfg.nesting_range, link).best
                                    : key_rate(cfg.params, link);
  out << "N=" << r.nesting << '\n'
      << "stations=" << r.stations << '\n'
      << "swap_rounds=" << r.rounds << '\n'
      << "L_km=" << fmt(cfg.params.distance_km) << '\n'
      << "L0_km=" << fmt(r.segment_km) << '\n'
      << "P0=" << fmt(r.p0) << '\n'
      << "Z=" << fmt(r.z) << '\n'
      << "R_per_s=" << fmt(r.rate) << '\n'
      << "p_s=" << fmt(r.p_s) << '\n'
      << "P_r=" << fmt(r.chain_prob) << '\n'
      << "eX=" << fmt(r.errors.e_x) << '\n'
      << "eY=" << fmt(r.errors.e_y) << '\n'
      << "eZ=" << fmt(r.errors.e_z) << '\n'
      << "r_inf=" << fmt(r.r_inf) << '\n'
      << "M=" << r.memories << '\n'
      << "K_per_mem_per_s=" << fmt(r.key_rate) << '\n'
      << "physical=" << (r.physical ? "true" : "false") << '\n';
  if (!cfg.output.empty()) {
    std::ofstream f(cfg.output);
    if (!f) throw std::runtime_error("cannot open output file " + cfg.output);
    f << kDistanceHeader << '\n' << distance_row(cfg.params.distance_km, r) << '\n';
  }
  return 0;
}

/// Writes `text` to the configured output file, or to `out` when none is set.
inline void emit(const RunConfig& cfg, std::ostream& out, const std::string& text) {
  if (cfg.output.empty()) {
    out << text;
    return;
  }
  std::ofstream f(cfg.output);
  if (!f) throw std::runtime_error("cannot open output file " + cfg.output);
  f << text;
}

inline int cmd_threshold(const RunConfig& cfg, std::ostream& out) {
  struct Row {
    Threshold pg, f0;
  };
  const auto& rs = cfg.stations_list;
  auto rows = parallel_map<Row>(rs.size(), cfg.threads, [&](std::size_t i) {
    return Row{threshold_gate_quality(rs[i], cfg.params.swap_exponent, cfg.threshold_tol),
               threshold_fidelity(rs[i], cfg.params.swap_exponent, cfg.threshold_tol)};
  });
  std::ostringstream s;
  s << "r,N,pG_min,F0_min,pG_min_full,F0_min_full\n";
  auto cell = [](const Threshold& t, bool full) {
    if (!t.found) return std::string("no threshold in bracket");
    return full ? fmt(t.minimum) : fmt3_up(t.minimum);
  };
  for (std::size_t i = 0; i < rs.size(); ++i) {
    s << rs[i] << ',' << nesting_for_stations(rs[i]) << ',' << cell(rows[i].pg, false) << ','
      << cell(rows[i].f0, false) << ',' << cell(rows[i].pg, true) << ',' << cell(rows[i].f0, true)
      << '\n';
  }
  emit(cfg, out, s.str());
  return 0;
}

inline int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  std::ostringstream s;
  if (cfg.sweep_kind == SweepKind::kDistance) {
    const LinkModel link = make_link(cfg.params.beta, cfg.params.f0);
    const auto ls = cfg.distance_range.values();
    auto rows = parallel_map<std::string>(ls.size(), cfg.threads, [&](std::size_t i) {
      RepeaterParams p = cfg.params;
      p.distance_km = ls[i];
      return distance_row(ls[i], optimize_over_stations(p, cfg.nesting_range, link).best);
    });
    s << kDistanceHeader << '\n';
    for (const auto& r : rows) s << r << '\n';
  } else {
    const auto fs = cfg.f0_range.values();
    const auto gs = cfg.pg_range.values();
    auto rows = parallel_map<std::string>(fs.size() * gs.size(), cfg.threads, [&](std::size_t i) {
      RepeaterParams p = cfg.params;
      p.f0 = std::min(fs[i / gs.size()], 1.0);
      p.beta = std::clamp(1.0 - gs[i % gs.size()], 0.0, 1.0);
      const auto best = optimize_over_stations(p, cfg.nesting_range);
      return fmt(fs[i / gs.size()]) + ',' + fmt(gs[i % gs.size()]) + ',' + fmt(best.best.key_rate) +
             ',' + std::to_string(best.best_nesting);
    });
    s << kSurfaceHeader << '\n';
    for (const auto& r : rows) s << r << '\n';
  }
  emit(cfg, out, s.str());
  return 0;
}

inline int cmd_cost(const RunConfig& cfg, std::ostream& out) {
  auto link = std::make_shared<const LinkModel>(make_link(cfg.params.beta, cfg.params.f0));
  const auto ls = cfg.distance_range.values();
  auto rows = parallel_map<std::string>(ls.size(), cfg.threads, [&](std::size_t i) {
    RepeaterParams p = cfg.params;
    p.distance_km = ls[i];
    const CostResult c = cost_coefficient(ls[i], encoded_scheme(p, link), cfg.nesting_range);
    std::ostringstream row;
    row << fmt(ls[i]) << ',' << fmt(c.cost) << ',' << fmt(c.cost_per_km) << ',';
    if (c.finite) {
      row << c.best_nesting << ',' << fmt(c.segment_km);
    } else {
      row << ",";
    }
    row << ',' << fmt(c.key_rate);
    return row.str();
  });
  std::ostringstream s;
  s << kCostHeader << '\n';
  for (const auto& r : rows) s << r << '\n';
  emit(cfg, out, s.str());
  return 0;
}

inline int cmd_enumerate_errors(const RunConfig& cfg, std::ostream& out) {
  const auto counts = enumerate_combos();
  const auto& states = shared_correctable_states().states;
  std::ostringstream s;
  s << "raw_combos=" << counts.raw_count << '\n'
    << "admissible_combos=" << counts.admissible_count << '\n'
    << "with_cnot_orderings=" << counts.permutation_count << '\n'
    << "distinct_states=" << states.size() << '\n';
  for (std::size_t i = 0; i < states.size(); ++i) {
    s << "state " << i << ": " << label(states[i].representative) << '\n';
  }
  emit(cfg, out, s.str());
  return 0;
}

inline int cmd_validate(const RunConfig& cfg, std::ostream& out) {
  const auto checks = run_validation({cfg.seed, cfg.trials});
  std::ostringstream s;
  bool ok = true;
  for (const auto& c : checks) {
    ok = ok && c.passed;
    s << (c.passed ? "PASS " : "FAIL ") << c.name << " observed=" << fmt(c.observed)
      << (c.lower_bound ? " required>=" : " tolerance<=") << fmt(c.tolerance) << '\n';
  }
  s << (ok ? "all checks passed" : "some checks failed") << '\n';
  emit(cfg, out, s.str());
  return ok ? 0 : 1;
}

inline int dispatch(const RunConfig& cfg, std::ostream& out) {
  cfg.validate();
  switch (cfg.command) {
    case Command::kKeyrate: return cmd_keyrate(cfg, out);
    case Command::kThreshold: return cmd_threshold(cfg, out);
    case Command::kSweep: return cmd_sweep(cfg, out);
    case Command::kCost: return cmd_cost(cfg, out);
    case Command::kEnumerateErrors: return cmd_enumerate_errors(cfg, out);
    case Command::kValidate: return cmd_validate(cfg, out);
  }
  return 1;
}

inline constexpr const char* kConfigEnv = "REPEATER_KEYRATE_CONFIG";

/// Parses the command line (flags > config file > defaults) and runs the
/// chosen subcommand. Returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Secret key rates of a quantum repeater built on the three-qubit repetition code."};
  app.footer("Memories per half node: M = " + std::to_string(kMemoriesPerHalfNode) + ".");
  app.set_config("--config", "", "Plain-text key=value configuration file")->envname(kConfigEnv);
  app.get_formatter()->column_width(40);

  RunConfig cfg;
  std::optional<double> pg, beta;
  std::optional<int> nesting, stations;
  std::string t0 = "physical";
  std::string exponent;
  std::string sweep_kind = "distance";
  bool cost_defaults = false;

  auto* o_distance = app.add_option("--distance", cfg.params.distance_km, "Total distance L in km")
                         ->capture_default_str();
  auto* o_f0 = app.add_option("--fidelity", cfg.params.f0, "Source pair fidelity F0")->capture_default_str();
  auto* o_pg = app.add_option("--gate-quality", pg, "Gate quality pG = 1 - beta (default 1)");
  auto* o_beta = app.add_option("--beta", beta, "Gate error beta (default 0)");
  o_pg->excludes(o_beta);
  auto* o_nest = app.add_option("--nesting", nesting, "Nesting level N, r = 2^N - 1 stations (default 1)");
  auto* o_stat = app.add_option("--stations", stations, "Repeater stations r = 2^N - 1");
  o_nest->excludes(o_stat);
  app.add_flag("--optimize", cfg.optimize, "Maximize K over the nesting range");
  app.add_option("--min-nesting", cfg.nesting_range.min, "Smallest nesting level scanned; 0 adds the unconnected pair")->capture_default_str();
  app.add_option("--max-nesting", cfg.nesting_range.max, "Largest nesting level scanned")->capture_default_str();
  app.add_option("--alpha", cfg.params.alpha, "Fiber attenuation in dB/km")->capture_default_str();
  app.add_option("--speed", cfg.params.speed, "Signal speed c in km/s")->capture_default_str();
  auto* o_t0 = app.add_option("--t0", t0, "Round time: 'physical' (L0/c) or a fixed value such as 1")
                   ->capture_default_str();
  app.add_option("--swap-exponent", exponent,
                 "Connection count in the swap success and weights: 'stations' (2^N - 1) or "
                 "'nesting' (N); defaults to 'nesting' for threshold and 'stations' otherwise")
      ->check(CLI::IsMember({"stations", "nesting"}));
  app.add_flag("--paper-fig8-defaults", cost_defaults, "Use F0 = 0.99995, pG = 0.9999, T0 = 1 unless given");
  app.add_option("--output", cfg.output, "Write tables to this file instead of stdout");
  app.add_option("--seed", cfg.seed, "Monte Carlo seed")->capture_default_str();
  app.add_option("--trials", cfg.trials, "Monte Carlo trials")->capture_default_str();
  app.add_option("--threads", cfg.threads, "Worker threads for tables")->capture_default_str();
  app.add_option("--r-list", cfg.stations_list, "Station counts for threshold rows")
      ->delimiter(',')
      ->capture_default_str();
  app.add_option("--threshold-tol", cfg.threshold_tol, "Bisection tolerance")->capture_default_str();
  app.add_option("--sweep", sweep_kind, "Sweep kind: 'distance' or 'surface'")
      ->check(CLI::IsMember({"distance", "surface"}))
      ->capture_default_str();
  app.add_option("--l-min", cfg.distance_range.min, "Sweep: first distance (km)")->capture_default_str();
  app.add_option("--l-max", cfg.distance_range.max, "Sweep: last distance (km)")->capture_default_str();
  app.add_option("--l-step", cfg.distance_range.step, "Sweep: distance step (km)")->capture_default_str();
  app.add_option("--f0-min", cfg.f0_range.min, "Surface: first F0")->capture_default_str();
  app.add_option("--f0-max", cfg.f0_range.max, "Surface: last F0")->capture_default_str();
  app.add_option("--f0-step", cfg.f0_range.step, "Surface: F0 step")->capture_default_str();
  app.add_option("--pg-min", cfg.pg_range.min, "Surface: first pG")->capture_default_str();
  app.add_option("--pg-max", cfg.pg_range.max, "Surface: last pG")->capture_default_str();
  app.add_option("--pg-step", cfg.pg_range.step, "Surface: pG step")->capture_default_str();
  (void)o_distance;

  const std::map<std::string, Command> commands = {
      {"keyrate", Command::kKeyrate},          {"threshold", Command::kThreshold},
      {"sweep", Command::kSweep},              {"cost", Command::kCost},
      {"enumerate-errors", Command::kEnumerateErrors}, {"validate", Command::kValidate}};
  const std::map<std::string, std::string> help = {
      {"keyrate", "Key rate at one parameter point"},
      {"threshold", "Minimal gate quality and fidelity per station count"},
      {"sweep", "CSV sweep over distance or over (F0, pG)"},
      {"cost", "Memory cost per secret bit over a distance grid"},
      {"enumerate-errors", "Counts of correctable Pauli patterns"},
      {"validate", "Run the built-in consistency checks"}};
  for (const auto& [name, cmd] : commands) app.add_subcommand(name, help.at(name))->fallthrough();
  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    for (const auto& [name, cmd] : commands) {
      if (app.got_subcommand(name)) cfg.command = cmd;
    }
    if (cost_defaults) {
      if (o_f0->count() == 0) cfg.params.f0 = 0.99995;
      if (!pg && !beta) pg = 0.9999;
      if (o_t0->count() == 0) t0 = "1";
    }
    if (pg) {
      check_probability("gate-quality", *pg);
      cfg.params.beta = 1.0 - *pg;
    }
    if (beta) cfg.params.beta = *beta;
    cfg.params.nesting = 1;
    if (nesting) cfg.params.nesting = *nesting;
    if (stations) cfg.params.nesting = nesting_for_stations(*stations);
    if (t0 == "physical") {
      cfg.params.t0_mode = T0Mode::kPhysical;
    } else {
      double v = 0.0;
      try {
        std::size_t used = 0;
        v = std::stod(t0, &used);
        if (used != t0.size()) throw std::invalid_argument(t0);
      } catch (const std::exception&) {
        throw std::invalid_argument("t0 must be 'physical' or a positive number, got " + t0);
      }
      cfg.params.t0_mode = T0Mode::kNormalized;
      cfg.params.fixed_t0 = v;
    }
    if (exponent.empty()) exponent = cfg.command == Command::kThreshold ? "nesting" : "stations";
    cfg.params.swap_exponent = exponent == "nesting" ? SwapExponent::kNestingLevel : SwapExponent::kStations;
    cfg.sweep_kind = sweep_kind == "surface" ? SweepKind::kSurface : SweepKind::kDistance;
    return dispatch(cfg, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace encrep::cli
