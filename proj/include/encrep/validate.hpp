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
#include <string>
#include <vector>

#include "encrep/decode.hpp"
#include "encrep/encgen.hpp"
#include "encrep/encswap.hpp"
#include "encrep/rates.hpp"

/// Self-checks of the whole pipeline, runnable from the command line.
namespace encrep {

struct Check {
  std::string name;
  /// What `observed` is compared against: an upper bound unless `lower_bound`.
  double tolerance = 0.0;
  double observed = 0.0;
  bool lower_bound = false;
  bool passed = false;
};

struct ValidationOptions {
  std::uint64_t seed = 42;
  std::int64_t trials = 1000000;
};

namespace detail {

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline Check upper(std::string name, double tol, double observed) {
  return {std::move(name), tol, observed, false, observed <= tol};
}

inline Check lower(std::string name, double tol, double observed) {
  return {std::move(name), tol, observed, true, observed >= tol};
}

}  // namespace detail

inline std::vector<Check> run_validation(const ValidationOptions& opt = {}) {
  using detail::lower;
  using detail::max_abs;
  using detail::upper;
  std::vector<Check> out;

  const auto counts = enumerate_combos();
  const auto& states = shared_correctable_states().states;
  out.push_back(upper("combo counts 216/160/960 and 64 states", 0.0,
                      std::abs(counts.raw_count - 216) + std::abs(counts.admissible_count - 160) +
                          std::abs(counts.permutation_count - 960) +
                          std::abs(static_cast<int>(states.size()) - 64)));
  double worst_overlap = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (std::size_t j = i + 1; j < states.size(); ++j) {
      worst_overlap = std::max(worst_overlap, overlap_magnitude(states[i].left, states[j].left) *
                                                  overlap_magnitude(states[i].right, states[j].right));
    }
  }
  out.push_back(upper("correctable states mutually orthogonal", 1e-9, worst_overlap));

  const DensityOperator ideal = ideal_encoded_projector();
  const Matrix phi = DensityOperator::projector(PureState::ghz(2)).matrix();
  out.push_back(upper("decode: ideal encoded pair -> phi+", 1e-12,
                      max_abs(decode_circuit(ideal).matrix() - phi)));
  Matrix dephased2 = Matrix::Zero(4, 4);
  dephased2(0, 0) = dephased2(3, 3) = 0.5;
  out.push_back(upper("decode: dephased encoded pair -> dephased pair", 1e-12,
                      max_abs(decode_circuit(dephased_encoded_pair()).matrix() - dephased2)));
  out.push_back(upper("decode: white 64 -> white 4", 1e-12,
                      max_abs(decode_circuit(DensityOperator::maximally_mixed(6)).matrix() -
                              Matrix::Identity(4, 4) / 4.0)));
  out.push_back(upper("single-fault decode of ideal and dephased pairs", 1e-12,
                      std::max(max_abs(decode_circuit_one_faulty(ideal).matrix() -
                                       rho_tilde_prime().matrix()),
                               max_abs(decode_circuit_one_faulty(dephased_encoded_pair()).matrix() -
                                       rho_tilde_prime().matrix()))));

  double closed_vs_circuit = 0.0;
  for (double beta : {0.0, 0.005, 0.01}) {
    for (double f0 : {0.95, 0.99, 1.0}) {
      const LinkModel link = make_link(beta, f0);
      for (int r : {1, 3}) {
        const SwapChain chain = make_swap_chain(link.encoded, link.p_s, r);
        closed_vs_circuit =
            std::max(closed_vs_circuit, max_abs(decode_perfect(chain).matrix() -
                                                decode_circuit(swapped_state_nonideal(chain)).matrix()));
      }
    }
  }
  out.push_back(upper("perfect decode closed form vs circuit", 1e-10, closed_vs_circuit));

  double ghz = 0.0;
  for (double beta : {0.0, 0.001, 0.01, 0.05, 0.2}) {
    ghz = std::max(ghz, max_abs(ghz_prep(beta).matrix() - ghz_prep_circuit(beta).matrix()));
  }
  out.push_back(upper("GHZ preparation closed form vs circuit", 1e-12, ghz));

  for (auto [n, p0] : {std::pair{3, 0.37}, std::pair{6, 0.37}, std::pair{12, 0.2}}) {
    const auto mc = z_n_monte_carlo(n, p0, opt.trials, opt.seed);
    out.push_back(upper("Z_" + std::to_string(n) + "(" + std::to_string(p0).substr(0, 4) +
                            ") vs Monte Carlo [standard errors]",
                        3.0, std::abs(mc.mean - z_n(n, p0)) / mc.standard_error));
  }

  double worst_fidelity = 1.0;
  for (double beta : {1e-3, 5e-3, 1e-2}) {
    for (double f0 : {0.98, 0.99, 1.0}) {
      worst_fidelity = std::min(worst_fidelity, validate_first_order_vs_exact(beta, f0, 1));
    }
  }
  out.push_back(lower("first-order vs exact decode fidelity", 0.99, worst_fidelity));

  const LinkModel perfect = make_link(0.0, 1.0);
  double sanity = std::abs(perfect.p_s - 1.0);
  for (int n = 0; n <= 10; ++n) {
    RepeaterParams p;
    p.nesting = n;
    const auto rep = key_rate(p, perfect);
    sanity = std::max({sanity, std::abs(rep.r_inf - 1.0),
                       std::abs(rep.key_rate - rep.rate / kMemoriesPerHalfNode) / rep.rate});
  }
  out.push_back(upper("perfect inputs give p_s = 1, r_inf = 1, K = R/6", 1e-9, sanity));

  const auto fp = final_state(0.008, 0.98, 3);
  out.push_back(upper("final state Bell-diagonal", 1e-10, bell_diag_coeffs(fp.state).off_diagonal_norm));

  double lo = 0.05, hi = 0.2;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (secret_fraction_six_state(mid, mid, mid).value > 0.0 ? lo : hi) = mid;
  }
  out.push_back(upper("symmetric zero-key error rate near 0.1262", 5e-4, std::abs(lo - 0.1262)));
  return out;
}

}  // namespace encrep
