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
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "encrep/decode.hpp"
#include "encrep/encgen.hpp"
#include "encrep/encswap.hpp"

namespace encrep {

inline constexpr double kDefaultAlpha = 0.17;     // dB/km
inline constexpr double kDefaultSpeed = 2.0e5;    // km/s
inline constexpr int kMemoriesPerHalfNode = 6;

struct ErrorRates {
  double e_x = 0.0;
  double e_y = 0.0;
  double e_z = 0.0;
};

inline ErrorRates error_rates(const BellDiagCoeffs& c) {
  return {c.phi_minus + c.psi_minus, c.phi_minus + c.psi_plus, c.psi_plus + c.psi_minus};
}

/// h(p) in bits; h(0) = h(1) = 0.
inline double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

/// Asymptotic secret fraction. `value` is unclamped and is -inf when the
/// error rates describe no state.
struct SecretFraction {
  double value = 1.0;

  bool positive() const { return value > 0.0; }
  double clamped() const { return value > 0.0 ? value : 0.0; }
};

namespace detail {

// Entropy of a probability that may carry round-off; NaN for a real violation.
inline double entropy_of(double p) {
  constexpr double slack = 1e-12;
  if (!(p >= -slack && p <= 1.0 + slack)) return std::numeric_limits<double>::quiet_NaN();
  return binary_entropy(std::clamp(p, 0.0, 1.0));
}

}  // namespace detail

/// Six-state secret fraction of a Bell-diagonal state with error rates eX, eY, eZ.
inline SecretFraction secret_fraction_six_state(double e_x, double e_y, double e_z) {
  for (double e : {e_x, e_y, e_z}) {
    if (!(e >= 0.0 && e <= 1.0)) throw std::invalid_argument("error rates must lie in [0, 1]");
  }
  const double psi_minus = 0.5 * (e_x + e_z - e_y);
  const double phi_minus = e_x - psi_minus;
  const double phi_plus = 1.0 - e_z - phi_minus;
  const double psi_plus = e_z - psi_minus;
  for (double c : {psi_minus, phi_minus, phi_plus, psi_plus}) {
    if (c < -1e-12) return {-std::numeric_limits<double>::infinity()};
  }
  double r = 1.0 - detail::entropy_of(e_z);
  if (e_z > 0.0) r -= e_z * detail::entropy_of(psi_minus / e_z);
  const double flipped = phi_plus + phi_minus;
  if (1.0 - e_z > 0.0 && flipped > 0.0) r -= (1.0 - e_z) * detail::entropy_of(phi_plus / flipped);
  if (std::isnan(r)) r = -std::numeric_limits<double>::infinity();
  return {r};
}

inline SecretFraction secret_fraction_six_state(const ErrorRates& e) {
  return secret_fraction_six_state(e.e_x, e.e_y, e.e_z);
}

/// 10^(-alpha L0 / 10).
inline double transmission_prob(double l0_km, double alpha = kDefaultAlpha) {
  if (!(l0_km >= 0.0)) throw std::invalid_argument("segment length must be nonnegative");
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  return std::pow(10.0, -alpha * l0_km / 10.0);
}

/// Expected number of rounds until n independent links, each succeeding with
/// probability p0 per round, have all succeeded.
inline double z_n(int n, double p0) {
  if (n < 1) throw std::invalid_argument("z_n needs at least one link");
  if (!(p0 > 0.0 && p0 <= 1.0)) throw std::invalid_argument("P0 must lie in (0, 1]");
  if (p0 == 1.0) return 1.0;
  if (n <= 16) {
    // Inclusion-exclusion; extended precision absorbs the cancellation.
    const long double log_q = std::log1p(-static_cast<long double>(p0));
    long double sum = 0.0L, binom = 1.0L;
    for (int j = 1; j <= n; ++j) {
      binom = binom * static_cast<long double>(n - j + 1) / static_cast<long double>(j);
      // 1 - q^j without losing tiny P0
      const long double term = binom / -std::expm1(static_cast<long double>(j) * log_q);
      sum += (j % 2 == 1) ? term : -term;
    }
    return static_cast<double>(sum);
  }
  const double log_q = std::log1p(-p0);
  if (p0 >= 1e-4) {
    // E[max] = sum_{t>=0} P(max > t) = sum_t 1 - (1 - q^t)^n.
    double sum = 1.0;
    for (std::int64_t t = 1;; ++t) {
      const double qt = std::exp(static_cast<double>(t) * log_q);
      const double term = -std::expm1(static_cast<double>(n) * std::log1p(-qt));
      sum += term;
      if (term < 1e-17 * sum) break;
    }
    return sum;
  }
  // Continuum limit of the maximum of geometric waits.
  double harmonic = 0.0;
  for (int k = 1; k <= n; ++k) harmonic += 1.0 / k;
  return harmonic / -log_q + 0.5;
}

struct MonteCarloEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
};

/// Sample mean of the maximum of n geometric waits (attempts counted from 1).
inline MonteCarloEstimate z_n_monte_carlo(int n, double p0, std::int64_t trials,
                                          std::uint64_t seed = 42) {
  if (n < 1) throw std::invalid_argument("z_n needs at least one link");
  if (!(p0 > 0.0 && p0 <= 1.0)) throw std::invalid_argument("P0 must lie in (0, 1]");
  if (trials < 2) throw std::invalid_argument("Monte Carlo needs at least two trials");
  std::mt19937_64 rng(seed);
  std::geometric_distribution<std::int64_t> wait(p0);
  double mean = 0.0, m2 = 0.0;
  for (std::int64_t t = 0; t < trials; ++t) {
    std::int64_t worst = 0;
    for (int k = 0; k < n; ++k) worst = std::max(worst, wait(rng) + 1);
    const double x = static_cast<double>(worst);
    const double delta = x - mean;
    mean += delta / static_cast<double>(t + 1);
    m2 += delta * (x - mean);
  }
  const double var = m2 / static_cast<double>(trials - 1);
  return {mean, std::sqrt(var / static_cast<double>(trials))};
}

/// Exponent applied to the connection count in the chain success probability
/// and in the swapped-state weights.
enum class SwapExponent {
  kStations,      // one factor per repeater station, 2^N - 1
  kNestingLevel,  // one factor per nesting level, N
};

inline const char* label(SwapExponent e) {
  return e == SwapExponent::kStations ? "stations" : "nesting";
}

inline int stations_for_nesting(int nesting) {
  if (nesting < 0 || nesting > 30) throw std::invalid_argument("nesting level must lie in [0, 30]");
  return (1 << nesting) - 1;
}

/// Inverse of stations_for_nesting(); throws unless r = 2^N - 1.
inline int nesting_for_stations(int stations) {
  if (stations < 0) throw std::invalid_argument("station count must be nonnegative");
  int n = 0;
  while (stations_for_nesting(n) < stations) ++n;
  if (stations_for_nesting(n) != stations) {
    throw std::invalid_argument("station count " + std::to_string(stations) +
                                " is not of the form 2^N - 1");
  }
  return n;
}

inline int swap_rounds(int nesting, SwapExponent e) {
  return e == SwapExponent::kStations ? stations_for_nesting(nesting) : nesting;
}

enum class T0Mode {
  kPhysical,    // T0 = L0 / c
  kNormalized,  // T0 = fixed_t0, 1 by default
};

struct RepeaterParams {
  double beta = 0.0;
  double f0 = 1.0;
  double distance_km = 100.0;
  int nesting = 0;
  double alpha = kDefaultAlpha;
  double speed = kDefaultSpeed;
  T0Mode t0_mode = T0Mode::kPhysical;
  double fixed_t0 = 1.0;
  SwapExponent swap_exponent = SwapExponent::kStations;

  int stations() const { return stations_for_nesting(nesting); }
  int segments() const { return stations() + 1; }
  double segment_km() const { return distance_km / segments(); }
  int rounds() const { return swap_rounds(nesting, swap_exponent); }
  double t0() const { return t0_mode == T0Mode::kNormalized ? fixed_t0 : segment_km() / speed; }

  /// Throws std::invalid_argument naming the offending field.
  void validate() const {
    check_probability("beta", beta);
    check_probability("F0", f0);
    if (!(distance_km > 0.0)) throw std::invalid_argument("distance must be positive");
    if (nesting < 0 || nesting > 20) throw std::invalid_argument("nesting must lie in [0, 20]");
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
    if (!(speed > 0.0)) throw std::invalid_argument("speed must be positive");
    if (!(fixed_t0 > 0.0)) throw std::invalid_argument("t0 must be positive");
  }
};

/// 1 / (2 T0 Z_{3(r+1)}(P0)) with equally spaced stations.
inline double repeater_rate_qec(const RepeaterParams& p) {
  p.validate();
  const double p0 = transmission_prob(p.segment_km(), p.alpha);
  return 1.0 / (2.0 * p.t0() * z_n(kCodeQubits * p.segments(), p0));
}

/// m P0 / L0, the undistilled pair rate of a scheme with unlimited memories.
inline double jiang_rate(double m, double p0, double l0_km) {
  if (!(m >= 0.0)) throw std::invalid_argument("memory count must be nonnegative");
  check_probability("P0", p0);
  if (!(l0_km > 0.0)) throw std::invalid_argument("segment length must be positive");
  return m * p0 / l0_km;
}

/// jiang_rate() converted to pairs per second with signal speed c.
inline double jiang_rate_per_second(double m, double p0, double l0_km, double speed = kDefaultSpeed) {
  return jiang_rate(m, p0, l0_km) * speed;
}

/// Noisy encoded pair and its connection success probability, shared by
/// every nesting level at fixed (beta, F0).
struct LinkModel {
  EncodedPair encoded;
  double p_s = 1.0;
};

inline LinkModel make_link(double beta, double f0) {
  LinkModel l{encoded_pair(beta, f0), 1.0};
  l.p_s = swap_success_prob(l.encoded);
  return l;
}

struct RateReport {
  int nesting = 0;
  int stations = 0;
  int rounds = 0;
  double segment_km = 0.0;
  double p0 = 1.0;
  double z = 1.0;
  double rate = 0.0;  // R, pairs per second (per T0 in normalized mode)
  BellDiagCoeffs bell;
  ErrorRates errors;
  double r_inf = 0.0;  // unclamped
  double key_rate = 0.0;  // K, secret bits per memory per second
  int memories = kMemoriesPerHalfNode;
  double p_s = 1.0;
  double chain_prob = 1.0;
  bool physical = true;
};

/// Secret fraction of a final pair; states outside the state space carry none.
inline SecretFraction secret_fraction(const FinalPair& f) {
  if (!f.physical) return {-std::numeric_limits<double>::infinity()};
  const auto c = bell_diag_coeffs(f.state);
  auto e = error_rates(c);
  e.e_x = std::clamp(e.e_x, 0.0, 1.0);
  e.e_y = std::clamp(e.e_y, 0.0, 1.0);
  e.e_z = std::clamp(e.e_z, 0.0, 1.0);
  return secret_fraction_six_state(e);
}

inline RateReport key_rate(const RepeaterParams& p, const LinkModel& link) {
  p.validate();
  RateReport rep;
  rep.nesting = p.nesting;
  rep.stations = p.stations();
  rep.rounds = p.rounds();
  rep.segment_km = p.segment_km();
  rep.p0 = transmission_prob(rep.segment_km, p.alpha);
  rep.z = z_n(kCodeQubits * p.segments(), rep.p0);
  rep.rate = 1.0 / (2.0 * p.t0() * rep.z);
  const FinalPair f = final_state(make_swap_chain(link.encoded, link.p_s, rep.rounds));
  rep.p_s = f.p_s;
  rep.chain_prob = f.chain_prob;
  rep.physical = f.physical;
  rep.bell = bell_diag_coeffs(f.state);
  rep.errors = error_rates(rep.bell);
  rep.r_inf = secret_fraction(f).value;
  rep.key_rate = rep.rate * std::max(rep.r_inf, 0.0) / rep.memories;
  return rep;
}

inline RateReport key_rate(const RepeaterParams& p) {
  p.validate();
  return key_rate(p, make_link(p.beta, p.f0));
}

/// Nesting levels scanned by the optimizers. N = 0 (a single unconnected
/// encoded pair) is opt-in.
struct NestingRange {
  int min = 1;
  int max = 10;

  void validate() const {
    if (min < 0 || max < min || max > 20) throw std::invalid_argument("nesting range must satisfy 0 <= min <= max <= 20");
  }
};

struct OptimizedRate {
  int best_nesting = 0;
  RateReport best;
  std::vector<RateReport> scanned;
};

/// Maximizes K over the nesting level; ties go to fewer stations.
inline OptimizedRate optimize_over_stations(const RepeaterParams& base, NestingRange range,
                                            const LinkModel& link) {
  range.validate();
  OptimizedRate out;
  for (int n = range.min; n <= range.max; ++n) {
    RepeaterParams p = base;
    p.nesting = n;
    out.scanned.push_back(key_rate(p, link));
    if (n == range.min || out.scanned.back().key_rate > out.best.key_rate) {
      out.best = out.scanned.back();
      out.best_nesting = n;
    }
  }
  return out;
}

inline OptimizedRate optimize_over_stations(const RepeaterParams& base, NestingRange range = {}) {
  base.validate();
  return optimize_over_stations(base, range, make_link(base.beta, base.f0));
}

/// Unclamped secret fraction at (beta, F0) after the connections of `nesting`.
inline double secret_fraction_at(double beta, double f0, int nesting, SwapExponent e) {
  const LinkModel link = make_link(beta, f0);
  const int rounds = nesting == 0 ? 0 : swap_rounds(nesting, e);
  return secret_fraction(final_state(make_swap_chain(link.encoded, link.p_s, rounds))).value;
}

struct Threshold {
  bool found = false;
  /// Boundary of the swept parameter (beta or F0).
  double boundary = 0.0;
  /// Minimal gate quality 1 - beta* or minimal fidelity F0*.
  double minimum = 0.0;
};

/// Bisects on the sign of `key_positive(x)` over [lo, hi], where the good end
/// is `good` (lo or hi). Stops once the bracket is narrower than `tol`.
inline Threshold bisect_boundary(const std::function<bool(double)>& key_positive, double good,
                                 double bad, double tol) {
  Threshold t;
  if (!key_positive(good) || key_positive(bad)) return t;
  while (std::abs(bad - good) > tol) {
    const double mid = 0.5 * (good + bad);
    (key_positive(mid) ? good : bad) = mid;
  }
  t.found = true;
  t.boundary = 0.5 * (good + bad);
  return t;
}

inline constexpr double kThresholdTol = 1e-4;

/// Smallest p_G = 1 - beta with a positive secret fraction at F0 = 1 after r
/// stations; beta is bracketed in [0, 0.05].
inline Threshold threshold_gate_quality(int stations, SwapExponent e = SwapExponent::kStations,
                                        double tol = kThresholdTol) {
  const int n = nesting_for_stations(stations);
  auto t = bisect_boundary([&](double b) { return secret_fraction_at(b, 1.0, n, e) > 0.0; }, 0.0,
                           0.05, tol);
  t.minimum = 1.0 - t.boundary;
  return t;
}

/// Smallest F0 with a positive secret fraction at p_G = 1 after r stations;
/// F0 is bracketed in [0.9, 1].
inline Threshold threshold_fidelity(int stations, SwapExponent e = SwapExponent::kStations,
                                    double tol = kThresholdTol) {
  const int n = nesting_for_stations(stations);
  auto t = bisect_boundary([&](double f) { return secret_fraction_at(0.0, f, n, e) > 0.0; }, 1.0,
                           0.9, tol);
  t.minimum = t.boundary;
  return t;
}

/// Edge of the nonzero-key region at fixed distance with the rate optimized
/// over `range`: returns beta* at F0 = 1 and F0* at beta = 0.
struct RegionBoundary {
  Threshold beta;
  Threshold fidelity;
};

inline RegionBoundary key_region_boundary(const RepeaterParams& base, NestingRange range,
                                          double tol = kThresholdTol) {
  auto positive = [&](double beta, double f0) {
    RepeaterParams p = base;
    p.beta = beta;
    p.f0 = f0;
    return optimize_over_stations(p, range).best.key_rate > 0.0;
  };
  RegionBoundary out;
  out.beta = bisect_boundary([&](double b) { return positive(b, 1.0); }, 0.0, 0.05, tol);
  out.beta.minimum = 1.0 - out.beta.boundary;
  out.fidelity = bisect_boundary([&](double f) { return positive(0.0, f); }, 1.0, 0.9, tol);
  out.fidelity.minimum = out.fidelity.boundary;
  return out;
}

/// One repeater scheme at one nesting level, as seen by the cost function.
struct SchemePoint {
  double rate = 0.0;             // R
  double secret_fraction = 0.0;  // unclamped r_inf
  int memories = kMemoriesPerHalfNode;
  double total_memories = 2.0;   // memory qubits in the whole chain

  double key_rate() const { return rate * std::max(secret_fraction, 0.0) / memories; }
};

using Scheme = std::function<SchemePoint(int nesting)>;

/// The encoded repeater with 2^(N+1) memory qubits in total. `link` must
/// belong to (base.beta, base.f0).
inline Scheme encoded_scheme(const RepeaterParams& base, std::shared_ptr<const LinkModel> link) {
  base.validate();
  return [base, link = std::move(link)](int n) {
    RepeaterParams p = base;
    p.nesting = n;
    const auto rep = key_rate(p, *link);
    return SchemePoint{rep.rate, rep.r_inf, rep.memories, std::ldexp(1.0, n + 1)};
  };
}

inline Scheme encoded_scheme(const RepeaterParams& base) {
  base.validate();
  return encoded_scheme(base, std::make_shared<const LinkModel>(make_link(base.beta, base.f0)));
}

struct CostResult {
  bool finite = false;
  double cost = std::numeric_limits<double>::infinity();         // C
  double cost_per_km = std::numeric_limits<double>::infinity();  // C' = C / L
  int best_nesting = 0;
  double segment_km = 0.0;  // L0 at the optimum
  double key_rate = 0.0;
};

/// C = min over N of (total memory qubits) / K.
inline CostResult cost_coefficient(double distance_km, const Scheme& scheme, NestingRange range) {
  if (!(distance_km > 0.0)) throw std::invalid_argument("distance must be positive");
  range.validate();
  CostResult out;
  for (int n = range.min; n <= range.max; ++n) {
    const SchemePoint pt = scheme(n);
    const double k = pt.key_rate();
    if (!(k > 0.0)) continue;
    const double c = pt.total_memories / k;
    if (c < out.cost) {
      out.finite = true;
      out.cost = c;
      out.best_nesting = n;
      out.key_rate = k;
    }
  }
  if (out.finite) {
    out.cost_per_km = out.cost / distance_km;
    out.segment_km = std::ldexp(distance_km, -out.best_nesting);
  }
  return out;
}

inline CostResult cost_coefficient(const RepeaterParams& base, NestingRange range = {}) {
  return cost_coefficient(base.distance_km, encoded_scheme(base), range);
}

}  // namespace encrep
