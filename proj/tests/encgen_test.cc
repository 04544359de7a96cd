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

#include "encrep/encgen.hpp"

#include <gtest/gtest.h>

#include "test_util.h"

using namespace encrep;
using test_util::max_abs;

namespace {

Matrix ghz6() { return DensityOperator::projector(PureState::ghz(6)).matrix(); }

// A source-pair error enters the encoded pair as X on the target code qubit
// (readout flip of a) and/or Z on the control code qubit (readout flip of b).
Matrix noiseless_gate_oracle(double f0) {
  Matrix rho = ghz6();
  for (int k = 0; k < 3; ++k) {
    const Matrix z = test_util::dense_single(6, k, test_util::pauli('Z'));
    const Matrix x = test_util::dense_single(6, 3 + k, test_util::pauli('X'));
    const Matrix zx = z * x;
    rho = f0 * rho + (1.0 - f0) / 3.0 * (z * rho * z + x * rho * x + zx * rho * zx.adjoint());
  }
  return rho;
}

}  // namespace

TEST(encgen, ghz_closed_form_matches_circuit) {
  for (double b : {0.0, 1e-3, 0.01, 0.1, 0.5, 1.0}) {
    EXPECT_LT(max_abs(ghz_prep(b).matrix() - ghz_prep_circuit(b).matrix()), 1e-12) << b;
  }
}

TEST(encgen, ghz_closed_form_matches_dense_oracle) {
  Matrix h(2, 2);
  h << 1, 1, 1, -1;
  h /= std::sqrt(2.0);
  const Matrix hd = test_util::dense_single(3, 0, h);
  for (double b : {0.0, 0.02, 0.3}) {
    Matrix rho = Matrix::Zero(8, 8);
    rho(0, 0) = 1.0;
    rho = hd * rho * hd.adjoint();
    rho = test_util::depolarize_oracle(rho, 3, 0, 1, b);
    rho = test_util::depolarize_oracle(rho, 3, 0, 2, b);
    EXPECT_LT(max_abs(ghz_prep(b).matrix() - rho), 1e-14);
  }
}

TEST(encgen, ghz_prep_is_a_state) {
  for (double b : {0.0, 0.01, 1.0}) EXPECT_NO_THROW(ghz_prep(b).check_valid());
  EXPECT_THROW(ghz_prep(-0.1), std::invalid_argument);
}

TEST(encgen, teleported_cnot_layout) {
  const auto c = teleported_cnot_sequence();
  ASSERT_EQ(c.gates.size(), 6u);
  ASSERT_EQ(c.measurements.size(), 6u);
  EXPECT_EQ(c.gates[0].first, 0);
  EXPECT_EQ(c.gates[0].second, 6);
  EXPECT_EQ(c.gates[1].first, 7);
  EXPECT_EQ(c.gates[1].second, 3);
  EXPECT_EQ(c.measurements[5].measured, 11);
  EXPECT_EQ(c.measurements[5].basis, Basis::kX);
}

TEST(encgen, perfect_inputs_give_ideal_encoded_pair) {
  const auto e = encoded_pair(0.0, 1.0);
  EXPECT_LT(max_abs(e.state.matrix() - ghz6()), 1e-12);
}

TEST(encgen, noisy_sources_match_pauli_frame_oracle) {
  for (double f0 : {0.9, 0.97, 1.0}) {
    EXPECT_LT(max_abs(encoded_pair(0.0, f0).state.matrix() - noiseless_gate_oracle(f0)), 1e-12) << f0;
  }
}

TEST(encgen, encoded_pair_is_a_state) {
  for (double b : {0.0, 0.005, 0.02}) {
    for (double f0 : {0.95, 1.0}) {
      const auto e = encoded_pair(b, f0);
      EXPECT_NO_THROW(e.state.check_valid());
      EXPECT_EQ(e.state.num_qubits(), 6);
    }
  }
  EXPECT_THROW(encoded_pair(0.1, 1.2), std::invalid_argument);
}

TEST(encgen, fidelity_falls_with_noise) {
  const PureState ideal = PureState::ghz(6);
  double last = 1.0;
  for (double b : {0.0, 0.002, 0.005, 0.01, 0.02}) {
    const double f = overlap(encoded_pair(b, 0.99).state, ideal);
    EXPECT_LE(f, last + 1e-15);
    last = f;
  }
}

TEST(encgen, readout_of_white_register_is_white) {
  const auto d = Eigen::Index{1} << 12;
  const Matrix m = measure_generation_register(Matrix::Identity(d, d) / static_cast<double>(d));
  EXPECT_LT(max_abs(m - Matrix::Identity(64, 64) / 64.0), 1e-15);
}

TEST(encgen, full_register_route_matches_interleaved) {
  const auto full = encoded_pair_full_register(0.01, 0.98);
  const auto fast = encoded_pair(0.01, 0.98);
  EXPECT_LT(max_abs(full.state.matrix() - fast.state.matrix()), 1e-12);
}
