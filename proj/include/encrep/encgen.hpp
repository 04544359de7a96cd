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
#include <optional>
#include <vector>

#include "encrep/channels.hpp"
#include "encrep/qstate.hpp"

/// Generation of the noisy encoded Bell pair between two neighbouring stations.
///
/// Layout of the 12-qubit generation register:
///   0-2   code qubits at the left station (GHZ-prepared),
///   3-5   code qubits at the right station (prepared in |000>),
///   6+2k  left half a_k of source pair k,
///   7+2k  right half b_k of source pair k.
/// The resulting encoded pair keeps qubits 0-5.
namespace encrep {

inline constexpr int kCodeQubits = 3;
inline constexpr int kPairQubits = 2 * kCodeQubits;
inline constexpr int kGenerationQubits = 12;

/// Noisy GHZ preparation at the left station, in closed form.
inline DensityOperator ghz_prep(double beta) {
  check_probability("beta", beta);
  Matrix m = Matrix::Zero(8, 8);
  m(0, 0) = m(7, 7) = 0.5 * (1.0 + beta * (beta / 2.0 - 1.25));
  m(0, 7) = m(7, 0) = 0.5 * (1.0 - beta) * (1.0 - beta);
  m(5, 5) = m(2, 2) = beta / 4.0 * (1.5 - beta);
  for (int k : {1, 6, 4, 3}) m(k, k) = beta / 8.0;
  return DensityOperator(std::move(m));
}

/// Circuit route to the GHZ preparation: |+>|00> through exact depolarizing
/// CNOT(0->1) then CNOT(0->2).
inline DensityOperator ghz_prep_circuit(double beta) {
  const PureState plus = apply_gate(PureState::basis(3, 0), GatePlacement::h(0));
  Matrix m = DensityOperator::projector(plus).matrix();
  m = depolarizing_gate(m, 3, GatePlacement::cnot(0, 1), beta);
  m = depolarizing_gate(m, 3, GatePlacement::cnot(0, 2), beta);
  return DensityOperator(std::move(m));
}

/// A Z or X readout followed by an errorfree Pauli when the outcome is 1.
struct ConditionalCorrection {
  int measured = 0;
  Basis basis = Basis::kZ;
  GatePlacement correction;
};

/// The six physical CNOTs of the three teleportation-based CNOTs, in execution
/// order, with the readouts and corrections that follow them.
struct TeleportedCnotCircuit {
  GateSequence gates;
  std::vector<ConditionalCorrection> measurements;
};

inline TeleportedCnotCircuit teleported_cnot_sequence() {
  TeleportedCnotCircuit c;
  for (int k = 0; k < kCodeQubits; ++k) {
    const int control = k;
    const int target = kCodeQubits + k;
    const int a = kPairQubits + 2 * k;
    const int b = a + 1;
    c.gates.push_back(GatePlacement::cnot(control, a));
    c.gates.push_back(GatePlacement::cnot(b, target));
    c.measurements.push_back({a, Basis::kZ, GatePlacement::x(target)});
    c.measurements.push_back({b, Basis::kX, GatePlacement::z(control)});
  }
  return c;
}

/// Noisy encoded pair on six qubits (0-2 left station, 3-5 right station).
struct EncodedPair {
  DensityOperator state;
  double beta = 0.0;
  double f0 = 1.0;
};

namespace detail {

// One branch of the generation circuit, executed one teleported CNOT at a
// time so that the register never exceeds eight qubits.
inline Matrix generate_branch(const Matrix& start, const Matrix& source,
                              std::optional<std::size_t> faulty) {
  const auto circuit = teleported_cnot_sequence();
  Matrix state = start;
  for (int k = 0; k < kCodeQubits; ++k) {
    Matrix m = Eigen::kroneckerProduct(state, source).eval();
    // Source pair k sits on local qubits 6 and 7.
    for (int h = 0; h < 2; ++h) {
      const std::size_t global = static_cast<std::size_t>(2 * k + h);
      GatePlacement g = circuit.gates[global];
      auto local = [&](int q) { return q >= kPairQubits ? kPairQubits + (q - kPairQubits) % 2 : q; };
      g.first = local(g.first);
      g.second = local(g.second);
      if (faulty && *faulty == global) {
        m = white_noise_on_pair(m, 8, g.first, g.second);
      } else {
        apply_gate_inplace(m, 8, g);
      }
    }
    const auto& za = circuit.measurements[2 * k];
    const auto& xb = circuit.measurements[2 * k + 1];
    m = measure_and_correct(m, 8, kPairQubits, za.basis, {za.correction});
    state = measure_and_correct(m, 7, kPairQubits, xb.basis, {xb.correction});
  }
  return state;
}

}  // namespace detail

/// Encoded pair from the GHZ-prepared register, a |000> register and three
/// source pairs of fidelity f0, through three teleportation-based CNOTs whose
/// six physical gates follow the first-order noise map. Readouts are averaged
/// with their corrections applied.
inline EncodedPair encoded_pair(double beta, double f0) {
  check_probability("beta", beta);
  check_probability("F0", f0);
  const Matrix start =
      Eigen::kroneckerProduct(ghz_prep(beta).matrix(), DensityOperator::basis_projector(3, 0).matrix())
          .eval();
  const Matrix source = source_state(f0).matrix();
  const auto circuit = teleported_cnot_sequence();
  Matrix acc = Matrix::Zero(64, 64);
  for (const auto& br : first_order_branches(circuit.gates.size(), beta)) {
    if (br.weight == 0.0) continue;
    switch (br.kind) {
      case FaultBranch::Kind::kPerfect:
        acc += br.weight * detail::generate_branch(start, source, std::nullopt);
        break;
      case FaultBranch::Kind::kOneFaulty:
        acc += br.weight * detail::generate_branch(start, source, br.faulty_gate);
        break;
      case FaultBranch::Kind::kWhiteNoise:
        // Readout and correction map the white 12-qubit state to the white 6-qubit state.
        acc += br.weight * Matrix::Identity(64, 64) / 64.0;
        break;
    }
  }
  return {DensityOperator(std::move(acc)), beta, f0};
}

/// Reads out and corrects all six source-pair qubits of a 12-qubit generation
/// register, highest index first, leaving the six code qubits.
inline Matrix measure_generation_register(Matrix m) {
  auto measurements = teleported_cnot_sequence().measurements;
  std::sort(measurements.begin(), measurements.end(),
            [](const auto& x, const auto& y) { return x.measured > y.measured; });
  int n = kGenerationQubits;
  for (const auto& meas : measurements) {
    m = measure_and_correct(m, n, meas.measured, meas.basis, {meas.correction});
    --n;
  }
  return m;
}

/// Same state as encoded_pair(), built on the full 12-qubit register with all
/// six gates applied before any readout. Needs several 4096x4096 matrices.
inline EncodedPair encoded_pair_full_register(double beta, double f0) {
  check_probability("beta", beta);
  check_probability("F0", f0);
  DensityOperator src = source_state(f0);
  Matrix start = tensor(tensor(ghz_prep(beta), DensityOperator::basis_projector(3, 0)),
                        tensor(tensor(src, src), src))
                     .matrix();
  const auto circuit = teleported_cnot_sequence();
  Matrix acc = Matrix::Zero(64, 64);
  for (const auto& br : first_order_branches(circuit.gates.size(), beta)) {
    if (br.weight == 0.0) continue;
    if (br.kind == FaultBranch::Kind::kWhiteNoise) {
      const auto d = Eigen::Index{1} << kGenerationQubits;
      acc += br.weight *
             measure_generation_register(Matrix::Identity(d, d) / static_cast<double>(d));
      continue;
    }
    std::optional<std::size_t> faulty;
    if (br.kind == FaultBranch::Kind::kOneFaulty) faulty = br.faulty_gate;
    acc += br.weight *
           measure_generation_register(run_sequence(start, kGenerationQubits, circuit.gates, faulty));
  }
  return {DensityOperator(std::move(acc)), beta, f0};
}

}  // namespace encrep
