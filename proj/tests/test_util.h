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

#include <cstdint>
#include <random>
#include <vector>

#include "encrep/qstate.hpp"

// Reference implementations written independently of the library: full
// 2^n x 2^n operators built entry by entry, no index tricks shared with it.
namespace test_util {

using encrep::cplx;
using encrep::Matrix;

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

inline int bit(std::size_t index, int q, int n) { return static_cast<int>((index >> (n - 1 - q)) & 1); }

// Dense CNOT on n qubits as a permutation matrix.
inline Matrix dense_cnot(int n, int control, int target) {
  const std::size_t d = std::size_t{1} << n;
  Matrix u = Matrix::Zero(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    std::size_t j = i;
    if (bit(i, control, n)) j ^= std::size_t{1} << (n - 1 - target);
    u(j, i) = 1.0;
  }
  return u;
}

// Dense single-qubit operator g on qubit q of n.
inline Matrix dense_single(int n, int q, const Matrix& g) {
  const std::size_t d = std::size_t{1} << n;
  Matrix u = Matrix::Zero(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      bool rest_equal = true;
      for (int k = 0; k < n; ++k) {
        if (k != q && bit(i, k, n) != bit(j, k, n)) rest_equal = false;
      }
      if (rest_equal) u(i, j) = g(bit(i, q, n), bit(j, q, n));
    }
  }
  return u;
}

inline Matrix pauli(char p) {
  Matrix m(2, 2);
  switch (p) {
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, cplx(0, -1), cplx(0, 1), 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: m << 1, 0, 0, 1; break;
  }
  return m;
}

// Pauli p on qubit q of an n-qubit state vector, by flipping and phasing entries.
inline encrep::Vector pauli_on_vector(const encrep::Vector& v, int n, int q, char p) {
  encrep::Vector out = encrep::Vector::Zero(v.size());
  const std::size_t mask = std::size_t{1} << (n - 1 - q);
  for (std::size_t i = 0; i < static_cast<std::size_t>(v.size()); ++i) {
    const int b = bit(i, q, n);
    switch (p) {
      case 'X': out(i ^ mask) += v(i); break;
      case 'Z': out(i) += b ? -v(i) : v(i); break;
      case 'Y': out(i ^ mask) += (b ? cplx(0, -1) : cplx(0, 1)) * v(i); break;
      default: out(i) += v(i); break;
    }
  }
  return out;
}

// Reduced operator on the kept qubits (ascending order), by explicit summation.
inline Matrix naive_partial_trace(const Matrix& m, int n, const std::vector<int>& keep) {
  const std::size_t d = std::size_t{1} << n;
  const int nk = static_cast<int>(keep.size());
  Matrix out = Matrix::Zero(std::size_t{1} << nk, std::size_t{1} << nk);
  auto kept_index = [&](std::size_t i) {
    std::size_t r = 0;
    for (int q : keep) r = (r << 1) | static_cast<std::size_t>(bit(i, q, n));
    return r;
  };
  auto traced_equal = [&](std::size_t i, std::size_t j) {
    for (int q = 0; q < n; ++q) {
      bool kept = false;
      for (int k : keep) kept = kept || k == q;
      if (!kept && bit(i, q, n) != bit(j, q, n)) return false;
    }
    return true;
  };
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      if (traced_equal(i, j)) out(kept_index(i), kept_index(j)) += m(i, j);
    }
  }
  return out;
}

// Random full-rank density operator, seeded.
inline Matrix random_density(int n, std::uint64_t seed) {
  const std::size_t d = std::size_t{1} << n;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Matrix a(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) a(i, j) = cplx(g(rng), g(rng));
  }
  Matrix rho = a * a.adjoint();
  return rho / rho.trace();
}

// (1-b) U rho U^dag + b/16 sum over two-qubit Paulis P rho P^dag on the CNOT
// pair; the uniform Pauli twirl of a pair equals Tr_pair(rho) (x) 1/4.
inline Matrix depolarize_oracle(const Matrix& rho, int n, int c, int t, double b) {
  const Matrix u = dense_cnot(n, c, t);
  Matrix out = (1.0 - b) * u * rho * u.adjoint();
  for (char p : {'I', 'X', 'Y', 'Z'}) {
    for (char q : {'I', 'X', 'Y', 'Z'}) {
      const Matrix k = dense_single(n, c, pauli(p)) * dense_single(n, t, pauli(q));
      out += b / 16.0 * k * rho * k.adjoint();
    }
  }
  return out;
}

inline Matrix phi_plus() {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = m(0, 3) = m(3, 0) = m(3, 3) = 0.5;
  return m;
}

}  // namespace test_util
