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
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "encrep/encgen.hpp"
#include "encrep/qstate.hpp"

/// Encoded connection of two encoded pairs at a repeater station.
///
/// The two pairs form a 12-qubit register: the left pair on qubits 0-5 and
/// the right pair on 6-11. Bell-measurement CNOT k (k = 0, 1, 2) has its
/// control on left qubit 3+k and its target on right qubit k.
namespace encrep {

/// Pauli pair (on control, on target) at one Bell-measurement CNOT that the
/// majority vote tolerates.
enum class ErrorPair { kXX, kYY, kZZ, kII, kIX, kXI };

inline constexpr std::array<ErrorPair, 6> kErrorPairs = {ErrorPair::kXX, ErrorPair::kYY,
                                                         ErrorPair::kZZ, ErrorPair::kII,
                                                         ErrorPair::kIX, ErrorPair::kXI};

inline const char* label(ErrorPair e) {
  switch (e) {
    case ErrorPair::kXX: return "XX";
    case ErrorPair::kYY: return "YY";
    case ErrorPair::kZZ: return "ZZ";
    case ErrorPair::kII: return "II";
    case ErrorPair::kIX: return "IX";
    case ErrorPair::kXI: return "XI";
  }
  return "??";
}

/// 'I', 'X', 'Y' or 'Z'.
inline char control_pauli(ErrorPair e) { return label(e)[0]; }
inline char target_pauli(ErrorPair e) { return label(e)[1]; }

/// IX and XI flip exactly one Z-basis readout of the measured triple.
inline bool flips_readout(ErrorPair e) { return e == ErrorPair::kIX || e == ErrorPair::kXI; }

using PauliCombo = std::array<ErrorPair, 3>;

/// At most one readout flip per triple survives the majority vote.
inline bool admissible(const PauliCombo& c) {
  int flips = 0;
  for (auto e : c) flips += flips_readout(e) ? 1 : 0;
  return flips <= 1;
}

inline std::string label(const PauliCombo& c) {
  return std::string(label(c[0])) + label(c[1]) + label(c[2]);
}

struct ComboCounts {
  int raw_count = 0;
  int admissible_count = 0;
  /// admissible_count times the 3! CNOT orderings, the conventional count of
  /// correctable error patterns; no formula depends on it.
  int permutation_count = 0;
  std::vector<PauliCombo> admissible_combos;
};

inline ComboCounts enumerate_combos() {
  ComboCounts out;
  for (auto a : kErrorPairs) {
    for (auto b : kErrorPairs) {
      for (auto c : kErrorPairs) {
        ++out.raw_count;
        PauliCombo combo{a, b, c};
        if (admissible(combo)) out.admissible_combos.push_back(combo);
      }
    }
  }
  out.admissible_count = static_cast<int>(out.admissible_combos.size());
  out.permutation_count = out.admissible_count * 6;
  return out;
}

namespace detail {

inline PureState apply_pauli(const PureState& psi, char pauli, int q) {
  switch (pauli) {
    case 'X': return apply_gate(psi, GatePlacement::x(q));
    case 'Y': return apply_gate(psi, GatePlacement::y(q));
    case 'Z': return apply_gate(psi, GatePlacement::z(q));
    default: return psi;
  }
}

}  // namespace detail

/// A correctable two-pair state in factorized form: left (x) right.
struct CorrectableState {
  PureState left;
  PureState right;
  PauliCombo representative{};

  /// The 4096-dimensional state.
  PureState full() const { return tensor(left, right); }
};

struct CorrectableStateSet {
  std::vector<CorrectableState> states;
  std::size_t size() const { return states.size(); }
};

/// Applies every admissible combo to two ideal encoded pairs and keeps one
/// state per class of states equal up to global phase.
///
/// Throws std::logic_error unless exactly 64 states remain.
inline CorrectableStateSet correctable_states() {
  const PureState ideal = PureState::ghz(kPairQubits);
  CorrectableStateSet set;
  for (const auto& combo : enumerate_combos().admissible_combos) {
    PureState left = ideal;
    PureState right = ideal;
    for (int k = 0; k < kCodeQubits; ++k) {
      left = detail::apply_pauli(left, control_pauli(combo[k]), kCodeQubits + k);
      right = detail::apply_pauli(right, target_pauli(combo[k]), k);
    }
    bool seen = false;
    for (const auto& s : set.states) {
      if (overlap_magnitude(s.left, left) * overlap_magnitude(s.right, right) > 1.0 - 1e-9) {
        seen = true;
        break;
      }
    }
    if (!seen) set.states.push_back({std::move(left), std::move(right), combo});
  }
  if (set.states.size() != 64) {
    throw std::logic_error("expected 64 correctable states, found " +
                           std::to_string(set.states.size()));
  }
  return set;
}

/// Process-wide immutable copy of correctable_states().
inline const CorrectableStateSet& shared_correctable_states() {
  static const CorrectableStateSet set = correctable_states();
  return set;
}

/// Sum over the 64 correctable states of <phi_i| rho (x) rho |phi_i>, each
/// term evaluated as a product of two six-qubit expectations.
inline double swap_success_prob(const DensityOperator& encoded) {
  if (encoded.num_qubits() != kPairQubits) {
    throw std::invalid_argument("swap success needs a six-qubit encoded pair");
  }
  double p = 0.0;
  for (const auto& s : shared_correctable_states().states) {
    p += overlap(encoded, s.left) * overlap(encoded, s.right);
  }
  return std::clamp(p, 0.0, 1.0);
}

inline double swap_success_prob(const EncodedPair& pair) { return swap_success_prob(pair.state); }

/// p_s^rounds, treating the connections as independent.
inline double chain_success_prob(double p_s, int rounds) {
  check_probability("p_s", p_s);
  if (rounds < 1) throw std::invalid_argument("chain needs at least one connection");
  return std::pow(p_s, rounds);
}

inline DensityOperator ideal_encoded_projector() {
  return DensityOperator::projector(PureState::ghz(kPairQubits));
}

/// P |phi~+><phi~+| + (1-P)/63 (1 - |phi~+><phi~+|).
inline DensityOperator swapped_state_ideal(double chain_prob) {
  check_probability("P_r", chain_prob);
  const Matrix phi = ideal_encoded_projector().matrix();
  return DensityOperator(chain_prob * phi +
                         (1.0 - chain_prob) / 63.0 * (Matrix::Identity(64, 64) - phi));
}

/// Weights of the swapped-state estimate after `rounds` noisy connections:
/// perfect pair, dephased pair, white remainder.
struct SwapWeights {
  double perfect = 1.0;
  double dephased = 0.0;
  double white = 0.0;
};

/// (1-beta)^(3r), 3^r beta^r (1-beta)^(2r) and the remainder, evaluated in log
/// space so that large r underflows to zero instead of overflowing.
inline SwapWeights swap_weights(double beta, int rounds) {
  check_probability("beta", beta);
  if (rounds < 1) throw std::invalid_argument("chain needs at least one connection");
  const double r = rounds;
  SwapWeights w;
  w.perfect = beta < 1.0 ? std::exp(3.0 * r * std::log1p(-beta)) : 0.0;
  w.dephased = (beta > 0.0 && beta < 1.0)
                   ? std::exp(r * std::log(3.0 * beta) + 2.0 * r * std::log1p(-beta))
                   : 0.0;
  w.white = 1.0 - w.perfect - w.dephased;
  if (w.white < -1e-12) throw std::logic_error("negative white-noise weight in swapped state");
  w.white = std::max(w.white, 0.0);
  return w;
}

/// Half-half mixture of |000000> and |111111>.
inline DensityOperator dephased_encoded_pair() {
  Matrix m = Matrix::Zero(64, 64);
  m(0, 0) = m(63, 63) = 0.5;
  return DensityOperator(std::move(m));
}

/// Connected state from correctable inputs after `rounds` noisy connections.
inline DensityOperator rho_s(double beta, int rounds) {
  const auto w = swap_weights(beta, rounds);
  return DensityOperator(w.perfect * ideal_encoded_projector().matrix() +
                         w.dephased * dephased_encoded_pair().matrix() +
                         w.white * Matrix::Identity(64, 64) / 64.0);
}

/// Inputs of every closed form downstream of the encoded connection.
struct SwapChain {
  EncodedPair encoded;
  double p_s = 1.0;
  int rounds = 1;
  double chain_prob = 1.0;

  double beta() const { return encoded.beta; }
  double f0() const { return encoded.f0; }
};

/// rounds = 0 describes an unconnected encoded pair.
inline SwapChain make_swap_chain(EncodedPair encoded, double p_s, int rounds) {
  if (rounds < 0) throw std::invalid_argument("number of connections must be nonnegative");
  SwapChain c{std::move(encoded), p_s, rounds, 1.0};
  if (rounds > 0) c.chain_prob = chain_success_prob(p_s, rounds);
  return c;
}

inline SwapChain make_swap_chain(double beta, double f0, int rounds) {
  EncodedPair enc = encoded_pair(beta, f0);
  const double p_s = swap_success_prob(enc);
  return make_swap_chain(std::move(enc), p_s, rounds);
}

/// P_r rho_s(r) + (1-P_r)/63 (1 - |phi~+><phi~+|).
inline DensityOperator swapped_state_nonideal(const SwapChain& chain) {
  if (chain.rounds < 1) throw std::invalid_argument("chain needs at least one connection");
  const Matrix phi = ideal_encoded_projector().matrix();
  const double p = chain.chain_prob;
  return DensityOperator(p * rho_s(chain.beta(), chain.rounds).matrix() +
                         (1.0 - p) / 63.0 * (Matrix::Identity(64, 64) - phi));
}

inline DensityOperator swapped_state_nonideal(double beta, double f0, int rounds) {
  return swapped_state_nonideal(make_swap_chain(beta, f0, rounds));
}

}  // namespace encrep
