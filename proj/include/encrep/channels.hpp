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

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "encrep/qstate.hpp"

namespace encrep {

inline void check_probability(const char* name, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument(std::string(name) + " must lie in [0, 1], got " + std::to_string(p));
  }
}

namespace detail {

// Tr_{i,j}(m) (x) 1_{i,j}/4 with the identity re-inserted at qubits i and j.
inline Matrix white_noise_on_pair(const Matrix& m, int n, int i, int j) {
  const std::size_t dim = std::size_t{1} << n;
  const std::size_t mi = std::size_t{1} << bit_of(i, n);
  const std::size_t mj = std::size_t{1} << bit_of(j, n);
  const std::size_t pair = mi | mj;
  const std::size_t pair_bits[4] = {0, mj, mi, mi | mj};
  Matrix out = Matrix::Zero(m.rows(), m.cols());
  for (std::size_t a = 0; a < dim; ++a) {
    if (a & pair) continue;
    for (std::size_t b = 0; b < dim; ++b) {
      if (b & pair) continue;
      cplx red = 0.0;
      for (auto s : pair_bits) red += m(a | s, b | s);
      red *= 0.25;
      for (auto s : pair_bits) out(a | s, b | s) = red;
    }
  }
  return out;
}

}  // namespace detail

/// Single two-qubit gate with depolarizing noise:
/// (1-beta) U rho U^dagger + beta Tr_{ij}(rho) (x) 1_{ij}/4.
inline Matrix depolarizing_gate(const Matrix& m, int n, const GatePlacement& g, double beta) {
  check_probability("beta", beta);
  if (!g.two_qubit()) throw std::invalid_argument("depolarizing gate must act on two qubits");
  g.check(n);
  Matrix out = m;
  apply_gate_inplace(out, n, g);
  out *= (1.0 - beta);
  if (beta > 0.0) out += beta * detail::white_noise_on_pair(m, n, g.first, g.second);
  return out;
}

inline DensityOperator depolarizing_gate(const DensityOperator& rho, const GatePlacement& g,
                                         double beta) {
  return DensityOperator(depolarizing_gate(rho.matrix(), rho.num_qubits(), g, beta));
}

/// Runs `seq` with perfect gates, except that gate `faulty` (if set) is
/// replaced by trace-out-and-insert-white-noise on its qubit pair.
inline Matrix run_sequence(const Matrix& m, int n, const GateSequence& seq,
                           std::optional<std::size_t> faulty = std::nullopt) {
  Matrix out = m;
  for (std::size_t a = 0; a < seq.size(); ++a) {
    const auto& g = seq[a];
    g.check(n);
    if (faulty && *faulty == a) {
      if (!g.two_qubit()) throw std::invalid_argument("only two-qubit gates can be faulty");
      out = detail::white_noise_on_pair(out, n, g.first, g.second);
    } else {
      apply_gate_inplace(out, n, g);
    }
  }
  return out;
}

/// Every gate of `seq` through the exact depolarizing map, in order.
inline Matrix run_sequence_exact(const Matrix& m, int n, const GateSequence& seq, double beta) {
  Matrix out = m;
  for (const auto& g : seq) {
    if (g.two_qubit()) {
      out = depolarizing_gate(out, n, g, beta);
    } else {
      apply_gate_inplace(out, n, g);
    }
  }
  return out;
}

/// One term of the first-order expansion of a noisy gate sequence.
struct FaultBranch {
  enum class Kind { kPerfect, kOneFaulty, kWhiteNoise };
  Kind kind = Kind::kPerfect;
  double weight = 0.0;
  std::size_t faulty_gate = 0;  // meaningful for kOneFaulty
};

/// Branches of the first-order map over n gates: the perfect run, one branch
/// per faulty gate (each weighted beta(1-beta)^(n-1)), and the white-noise
/// remainder 1 - (1-beta)^n - n beta (1-beta)^(n-1).
inline std::vector<FaultBranch> first_order_branches(std::size_t n, double beta) {
  check_probability("beta", beta);
  if (n == 0) throw std::invalid_argument("gate sequence must not be empty");
  const double perfect = std::pow(1.0 - beta, static_cast<double>(n));
  const double single = beta * std::pow(1.0 - beta, static_cast<double>(n - 1));
  std::vector<FaultBranch> out;
  out.push_back({FaultBranch::Kind::kPerfect, perfect, 0});
  for (std::size_t a = 0; a < n; ++a) out.push_back({FaultBranch::Kind::kOneFaulty, single, a});
  out.push_back({FaultBranch::Kind::kWhiteNoise, 1.0 - perfect - static_cast<double>(n) * single, 0});
  return out;
}

/// Uniform mixture over the n single-fault branches.
inline DensityOperator one_faulty_mix(const DensityOperator& rho, const GateSequence& seq) {
  if (seq.empty()) throw std::invalid_argument("gate sequence must not be empty");
  const int n = rho.num_qubits();
  Matrix acc = Matrix::Zero(rho.matrix().rows(), rho.matrix().cols());
  for (std::size_t a = 0; a < seq.size(); ++a) acc += run_sequence(rho.matrix(), n, seq, a);
  return DensityOperator(acc / static_cast<double>(seq.size()));
}

/// First-order concatenated noise map over the whole sequence; the remainder
/// term is the maximally mixed state of the full register.
inline DensityOperator concat_first_order(const DensityOperator& rho, const GateSequence& seq,
                                          double beta) {
  const int n = rho.num_qubits();
  const auto d = static_cast<Eigen::Index>(rho.dim());
  Matrix acc = Matrix::Zero(d, d);
  for (const auto& br : first_order_branches(seq.size(), beta)) {
    switch (br.kind) {
      case FaultBranch::Kind::kPerfect:
        acc += br.weight * run_sequence(rho.matrix(), n, seq);
        break;
      case FaultBranch::Kind::kOneFaulty:
        if (br.weight != 0.0) acc += br.weight * run_sequence(rho.matrix(), n, seq, br.faulty_gate);
        break;
      case FaultBranch::Kind::kWhiteNoise:
        acc += br.weight * Matrix::Identity(d, d) / static_cast<double>(d);
        break;
    }
  }
  return DensityOperator(std::move(acc));
}

/// Perfect run with weight (1-beta)^n, white noise otherwise.
inline DensityOperator concat_simple(const DensityOperator& rho, const GateSequence& seq,
                                     double beta) {
  check_probability("beta", beta);
  const auto d = static_cast<Eigen::Index>(rho.dim());
  const double w = std::pow(1.0 - beta, static_cast<double>(seq.size()));
  Matrix acc = w * run_sequence(rho.matrix(), rho.num_qubits(), seq);
  acc += (1.0 - w) * Matrix::Identity(d, d) / static_cast<double>(d);
  return DensityOperator(std::move(acc));
}

/// Bell pair of fidelity f0 mixed with white noise on the orthogonal complement.
inline DensityOperator source_state(double f0) {
  check_probability("F0", f0);
  const Matrix phi = DensityOperator::projector(PureState::ghz(2)).matrix();
  return DensityOperator(f0 * phi + (1.0 - f0) / 3.0 * (Matrix::Identity(4, 4) - phi));
}

}  // namespace encrep
