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
#include <stdexcept>

#include "encrep/channels.hpp"
#include "encrep/encswap.hpp"
#include "encrep/qstate.hpp"

/// Decoding of a six-qubit encoded pair into a two-qubit pair.
///
/// Per side the first qubit of the code block is the data qubit: Alice holds
/// 0-2 and Bob 3-5. Both CNOTs of a side use the data qubit as control.
namespace encrep {

inline GateSequence decode_sequence() {
  return {GatePlacement::cnot(0, 2), GatePlacement::cnot(0, 1), GatePlacement::cnot(3, 5),
          GatePlacement::cnot(3, 4)};
}

/// Z readout of qubits 1, 2, 4, 5 with X on the data qubit of a side whose
/// syndrome reads "11"; outcomes are averaged and the two data qubits remain.
inline Matrix decode_readout(const Matrix& m) {
  if (m.rows() != 64 || m.cols() != 64) throw std::invalid_argument("decode readout needs 64x64");
  auto index = [](int a, int sa, int b, int sb) {
    // qubit 0 is the most significant bit
    return (a << 5) | (sa << 3) | (b << 2) | sb;
  };
  Matrix out = Matrix::Zero(4, 4);
  for (int sa = 0; sa < 4; ++sa) {
    const int fa = sa == 3 ? 1 : 0;
    for (int sb = 0; sb < 4; ++sb) {
      const int fb = sb == 3 ? 1 : 0;
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
          const int ra = (i >> 1) ^ fa, rb = (i & 1) ^ fb;
          const int ca = (j >> 1) ^ fa, cb = (j & 1) ^ fb;
          out(i, j) += m(index(ra, sa, rb, sb), index(ca, sa, cb, sb));
        }
      }
    }
  }
  return out;
}

namespace detail {

inline void check_encoded(const DensityOperator& rho) {
  if (rho.num_qubits() != kPairQubits) throw std::invalid_argument("decoding needs a six-qubit state");
}

}  // namespace detail

/// Errorfree decoding.
inline DensityOperator decode_circuit(const DensityOperator& rho) {
  detail::check_encoded(rho);
  return DensityOperator(decode_readout(run_sequence(rho.matrix(), kPairQubits, decode_sequence())));
}

/// Decoding averaged over the four single-fault runs.
inline DensityOperator decode_circuit_one_faulty(const DensityOperator& rho) {
  detail::check_encoded(rho);
  return DensityOperator(decode_readout(one_faulty_mix(rho, decode_sequence()).matrix()));
}

/// Decoding with every CNOT through the exact depolarizing map.
inline DensityOperator decode_circuit_exact(const DensityOperator& rho, double beta) {
  detail::check_encoded(rho);
  return DensityOperator(
      decode_readout(run_sequence_exact(rho.matrix(), kPairQubits, decode_sequence(), beta)));
}

namespace detail {

inline Matrix phi_plus_projector() { return DensityOperator::projector(PureState::ghz(2)).matrix(); }

inline Matrix diag4(double a, double b, double c, double d) {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = a;
  m(1, 1) = b;
  m(2, 2) = c;
  m(3, 3) = d;
  return m;
}

inline Matrix white4() { return Matrix::Identity(4, 4) / 4.0; }

inline void check_connected(const SwapChain& chain) {
  if (chain.rounds < 1) throw std::invalid_argument("closed forms need at least one connection");
}

}  // namespace detail

/// Closed form of the perfectly decoded connected state.
inline DensityOperator decode_perfect(const SwapChain& chain) {
  detail::check_connected(chain);
  const auto w = swap_weights(chain.beta(), chain.rounds);
  const double p = chain.chain_prob;
  const Matrix m = (p * w.perfect - (1.0 - p) / 63.0) * detail::phi_plus_projector() +
                   p * w.dephased * detail::diag4(0.5, 0.0, 0.0, 0.5) +
                   (p * w.white + (1.0 - p) * 64.0 / 63.0) * detail::white4();
  return DensityOperator(m);
}

inline DensityOperator decode_perfect(double beta, double f0, int rounds) {
  return decode_perfect(make_swap_chain(beta, f0, rounds));
}

/// Output of a single-fault decoding on the ideal encoded pair, which equals
/// the output on the dephased encoded pair.
inline DensityOperator rho_tilde_prime() {
  const Matrix m = 0.5 * (detail::diag4(0.375, 0.125, 0.125, 0.375) + detail::white4());
  return DensityOperator(m);
}

/// Closed form of the decoded connected state when one decoding CNOT fails.
inline DensityOperator decode_nonideal(const SwapChain& chain) {
  detail::check_connected(chain);
  const auto w = swap_weights(chain.beta(), chain.rounds);
  const double p = chain.chain_prob;
  const double good = w.perfect + w.dephased;
  const Matrix tp = rho_tilde_prime().matrix();
  const Matrix m = p * (good * tp + (1.0 - good) * detail::white4()) +
                   (1.0 - p) / 63.0 * (64.0 * detail::white4() - tp);
  return DensityOperator(m);
}

inline DensityOperator decode_nonideal(double beta, double f0, int rounds) {
  return decode_nonideal(make_swap_chain(beta, f0, rounds));
}

/// Two-qubit pair shared by the end stations.
struct FinalPair {
  DensityOperator state;
  double beta = 0.0;
  double f0 = 1.0;
  int rounds = 0;
  double p_s = 1.0;
  double chain_prob = 1.0;
  /// Smallest eigenvalue of the perfectly decoded part and of the final state.
  double min_eigenvalue = 0.0;
  /// False when a closed form left the state space; such points carry no key.
  bool physical = true;
};

inline constexpr double kPhysicalTol = 1e-9;

/// (1-beta)^4 rho_dec + 4 beta (1-beta)^3 rho_dec' + remainder 1/4. With no
/// connection the encoded pair itself is decoded through the circuits.
inline FinalPair final_state(const SwapChain& chain) {
  const double beta = chain.beta();
  const double perfect = std::pow(1.0 - beta, 4);
  const double single = 4.0 * beta * std::pow(1.0 - beta, 3);
  DensityOperator dec, dec_faulty;
  if (chain.rounds == 0) {
    dec = decode_circuit(chain.encoded.state);
    dec_faulty = decode_circuit_one_faulty(chain.encoded.state);
  } else {
    dec = decode_perfect(chain);
    dec_faulty = decode_nonideal(chain);
  }
  DensityOperator out(perfect * dec.matrix() + single * dec_faulty.matrix() +
                      (1.0 - perfect - single) * detail::white4());
  FinalPair f;
  f.beta = beta;
  f.f0 = chain.f0();
  f.rounds = chain.rounds;
  f.p_s = chain.p_s;
  f.chain_prob = chain.chain_prob;
  f.min_eigenvalue = std::min(dec.min_eigenvalue(), out.min_eigenvalue());
  f.physical = f.min_eigenvalue >= -kPhysicalTol;
  f.state = std::move(out);
  return f;
}

inline FinalPair final_state(double beta, double f0, int rounds) {
  return final_state(make_swap_chain(beta, f0, rounds));
}

/// Uhlmann fidelity between final_state() and the exact-noise decoding of the
/// same connected (or, with no connection, encoded) state.
inline double validate_first_order_vs_exact(const SwapChain& chain) {
  const DensityOperator input =
      chain.rounds == 0 ? chain.encoded.state : swapped_state_nonideal(chain);
  const DensityOperator exact = decode_circuit_exact(input, chain.beta());
  return uhlmann_fidelity(final_state(chain).state, exact);
}

inline double validate_first_order_vs_exact(double beta, double f0, int rounds) {
  return validate_first_order_vs_exact(make_swap_chain(beta, f0, rounds));
}

}  // namespace encrep
