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
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

/// Dense multi-qubit density-operator numerics.
///
/// Register convention: qubits are indexed from 0, and qubit 0 is the most
/// significant bit of the computational-basis index. A circuit drawn top to
/// bottom maps onto ascending qubit indices.
namespace encrep {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Largest register the library will build (dimension 4096).
inline constexpr int kMaxQubits = 12;

/// Default tolerances for the validity checks.
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kPsdTol = 1e-9;

namespace detail {

inline int qubits_for_dim(std::size_t dim) {
  if (dim == 0 || (dim & (dim - 1)) != 0) {
    throw std::invalid_argument("dimension " + std::to_string(dim) + " is not a power of two");
  }
  int n = 0;
  while ((std::size_t{1} << n) < dim) ++n;
  if (n > kMaxQubits) {
    throw std::length_error("register of " + std::to_string(n) + " qubits exceeds the cap of " +
                            std::to_string(kMaxQubits));
  }
  return n;
}

inline void check_qubit(int q, int n) {
  if (q < 0 || q >= n) {
    throw std::out_of_range("qubit index " + std::to_string(q) + " outside register of " +
                            std::to_string(n) + " qubits");
  }
}

// Bit position (from the least significant end) of qubit q in an n-qubit index.
inline int bit_of(int q, int n) { return n - 1 - q; }

// Left-multiplies the columns of m by a k-qubit operator u (k = 1 or 2) acting on `qubits`.
inline void apply_left(Matrix& m, int n, const Matrix& u, std::span<const int> qubits) {
  const std::size_t dim = std::size_t{1} << n;
  const int k = static_cast<int>(qubits.size());
  const std::size_t sub = std::size_t{1} << k;
  std::vector<std::size_t> masks(k);
  std::size_t all = 0;
  for (int a = 0; a < k; ++a) {
    masks[a] = std::size_t{1} << bit_of(qubits[a], n);
    all |= masks[a];
  }
  std::vector<std::size_t> groups;
  groups.reserve(dim);
  for (std::size_t base = 0; base < dim; ++base) {
    if (base & all) continue;
    for (std::size_t s = 0; s < sub; ++s) {
      std::size_t i = base;
      for (int a = 0; a < k; ++a) {
        if (s & (std::size_t{1} << (k - 1 - a))) i |= masks[a];
      }
      groups.push_back(i);
    }
  }
  std::vector<cplx> in(sub);
  for (Eigen::Index col = 0; col < m.cols(); ++col) {
    cplx* c = m.col(col).data();
    for (std::size_t g = 0; g < groups.size(); g += sub) {
      const std::size_t* idx = groups.data() + g;
      for (std::size_t s = 0; s < sub; ++s) in[s] = c[idx[s]];
      for (std::size_t r = 0; r < sub; ++r) {
        cplx acc = 0.0;
        for (std::size_t s = 0; s < sub; ++s) acc += u(r, s) * in[s];
        c[idx[r]] = acc;
      }
    }
  }
}

// Computes u m u^dagger in place.
inline void conjugate(Matrix& m, int n, const Matrix& u, std::span<const int> qubits) {
  apply_left(m, n, u, qubits);
  m.adjointInPlace();
  apply_left(m, n, u, qubits);
  m.adjointInPlace();
}

// Reduced operator on `keep` (in the given order); the operator need not be normalized.
inline Matrix partial_trace(const Matrix& m, int n, std::span<const int> keep) {
  const int nk = static_cast<int>(keep.size());
  std::vector<int> traced;
  for (int q = 0; q < n; ++q) {
    if (std::find(keep.begin(), keep.end(), q) == keep.end()) traced.push_back(q);
  }
  const int nt = static_cast<int>(traced.size());
  const std::size_t dk = std::size_t{1} << nk;
  const std::size_t dt = std::size_t{1} << nt;
  auto compose = [&](std::size_t ki, std::size_t ti) {
    std::size_t full = 0;
    for (int a = 0; a < nk; ++a) {
      if (ki & (std::size_t{1} << (nk - 1 - a))) full |= std::size_t{1} << bit_of(keep[a], n);
    }
    for (int a = 0; a < nt; ++a) {
      if (ti & (std::size_t{1} << (nt - 1 - a))) full |= std::size_t{1} << bit_of(traced[a], n);
    }
    return full;
  };
  std::vector<std::size_t> kidx(dk), tidx(dt);
  for (std::size_t i = 0; i < dk; ++i) kidx[i] = compose(i, 0);
  for (std::size_t t = 0; t < dt; ++t) tidx[t] = compose(0, t);
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
  for (std::size_t i = 0; i < dk; ++i) {
    for (std::size_t j = 0; j < dk; ++j) {
      cplx acc = 0.0;
      for (std::size_t t = 0; t < dt; ++t) acc += m(kidx[i] | tidx[t], kidx[j] | tidx[t]);
      out(i, j) = acc;
    }
  }
  return out;
}

// Reorders the qubits of m so that new qubit a is old qubit order[a].
inline Matrix permute_qubits(const Matrix& m, int n, std::span<const int> order) {
  const std::size_t dim = std::size_t{1} << n;
  std::vector<std::size_t> map(dim);
  for (std::size_t newi = 0; newi < dim; ++newi) {
    std::size_t oldi = 0;
    for (int a = 0; a < n; ++a) {
      if (newi & (std::size_t{1} << bit_of(a, n))) oldi |= std::size_t{1} << bit_of(order[a], n);
    }
    map[newi] = oldi;
  }
  Matrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) out(i, j) = m(map[i], map[j]);
  }
  return out;
}

}  // namespace detail

/// Amplitude vector of a normalized pure state.
class PureState {
 public:
  PureState() : amps_(Vector::Ones(1)) {}

  explicit PureState(Vector amps) : amps_(std::move(amps)) {
    num_qubits_ = detail::qubits_for_dim(static_cast<std::size_t>(amps_.size()));
    if (std::abs(amps_.norm() - 1.0) > 1e-12) {
      throw std::invalid_argument("pure state is not normalized");
    }
  }

  /// Computational basis ket |index> on n qubits.
  static PureState basis(int n, std::uint64_t index) {
    Vector v = Vector::Zero(std::int64_t{1} << n);
    if (index >= static_cast<std::uint64_t>(v.size())) throw std::out_of_range("basis index exceeds register");
    v(static_cast<Eigen::Index>(index)) = 1.0;
    return PureState(std::move(v));
  }

  /// (|0...0> + |1...1>) / sqrt(2) on n qubits; n = 2 gives |phi+>.
  static PureState ghz(int n) {
    Vector v = Vector::Zero(std::int64_t{1} << n);
    v(0) = v(v.size() - 1) = 1.0 / std::sqrt(2.0);
    return PureState(std::move(v));
  }

  int num_qubits() const { return num_qubits_; }
  std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }
  const Vector& amplitudes() const { return amps_; }
  cplx operator[](std::size_t i) const { return amps_(static_cast<Eigen::Index>(i)); }

 private:
  Vector amps_;
  int num_qubits_ = 0;
};

inline PureState tensor(const PureState& a, const PureState& b) {
  const int n = a.num_qubits() + b.num_qubits();
  if (n > kMaxQubits) throw std::length_error("tensor product exceeds the register cap");
  Vector v(a.amplitudes().size() * b.amplitudes().size());
  for (Eigen::Index i = 0; i < a.amplitudes().size(); ++i) {
    v.segment(i * b.amplitudes().size(), b.amplitudes().size()) = a.amplitudes()(i) * b.amplitudes();
  }
  return PureState(std::move(v));
}

/// |<a|b>|.
inline double overlap_magnitude(const PureState& a, const PureState& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("overlap of states with different dimension");
  return std::abs(a.amplitudes().dot(b.amplitudes()));
}

/// Hermitian, unit-trace, positive semidefinite operator on a qubit register.
///
/// Construction checks the shape only; call check_valid() to test the
/// physical invariants.
class DensityOperator {
 public:
  DensityOperator() : m_(Matrix::Ones(1, 1)) {}

  explicit DensityOperator(Matrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) throw std::invalid_argument("density operator must be square");
    num_qubits_ = detail::qubits_for_dim(static_cast<std::size_t>(m_.rows()));
  }

  static DensityOperator maximally_mixed(int n) {
    const auto d = std::int64_t{1} << n;
    return DensityOperator(Matrix::Identity(d, d) / static_cast<double>(d));
  }

  static DensityOperator projector(const PureState& psi) {
    return DensityOperator(psi.amplitudes() * psi.amplitudes().adjoint());
  }

  static DensityOperator basis_projector(int n, std::uint64_t index) {
    return projector(PureState::basis(n, index));
  }

  int num_qubits() const { return num_qubits_; }
  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  cplx operator()(std::size_t i, std::size_t j) const {
    return m_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

  double trace() const { return m_.trace().real(); }

  double hermiticity_error() const { return (m_ - m_.adjoint()).cwiseAbs().maxCoeff(); }

  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }

  Eigen::VectorXd eigenvalues() const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m_, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
  }

  /// Throws std::domain_error naming the violated invariant.
  void check_valid(double tol = kTraceTol) const {
    if (hermiticity_error() > tol) throw std::domain_error("operator is not Hermitian");
    if (std::abs(m_.trace() - cplx(1.0)) > tol) throw std::domain_error("operator trace is not 1");
    if (min_eigenvalue() < -std::max(tol, kPsdTol)) {
      throw std::domain_error("operator has a negative eigenvalue");
    }
  }

 private:
  Matrix m_;
  int num_qubits_ = 0;
};

/// Kronecker product; qubits of a precede qubits of b.
inline DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
  if (a.num_qubits() + b.num_qubits() > kMaxQubits) {
    throw std::length_error("tensor product exceeds the register cap");
  }
  return DensityOperator(Eigen::kroneckerProduct(a.matrix(), b.matrix()).eval());
}

/// Reduced operator on `keep`, kept qubits in the order given.
///
/// An empty keep set yields the 1x1 operator [Tr rho]; callers detect this
/// degenerate result through num_qubits() == 0.
inline DensityOperator partial_trace(const DensityOperator& rho, std::span<const int> keep) {
  for (std::size_t a = 0; a < keep.size(); ++a) {
    detail::check_qubit(keep[a], rho.num_qubits());
    for (std::size_t b = 0; b < a; ++b) {
      if (keep[a] == keep[b]) throw std::invalid_argument("duplicate qubit in keep set");
    }
  }
  return DensityOperator(detail::partial_trace(rho.matrix(), rho.num_qubits(), keep));
}

inline DensityOperator partial_trace(const DensityOperator& rho, std::initializer_list<int> keep) {
  return partial_trace(rho, std::span<const int>(keep.begin(), keep.size()));
}

enum class GateKind { kCnot, kX, kY, kZ, kH };

/// A gate and the register qubits it acts on. For CNOT, first is the control.
struct GatePlacement {
  GateKind kind = GateKind::kX;
  int first = 0;
  int second = -1;

  static GatePlacement cnot(int control, int target) { return {GateKind::kCnot, control, target}; }
  static GatePlacement x(int q) { return {GateKind::kX, q, -1}; }
  static GatePlacement y(int q) { return {GateKind::kY, q, -1}; }
  static GatePlacement z(int q) { return {GateKind::kZ, q, -1}; }
  static GatePlacement h(int q) { return {GateKind::kH, q, -1}; }

  bool two_qubit() const { return kind == GateKind::kCnot; }

  void check(int n) const {
    detail::check_qubit(first, n);
    if (two_qubit()) {
      detail::check_qubit(second, n);
      if (first == second) throw std::invalid_argument("gate acts twice on the same qubit");
    }
  }

  std::vector<int> qubits() const {
    return two_qubit() ? std::vector<int>{first, second} : std::vector<int>{first};
  }

  Matrix unitary() const {
    const double s = 1.0 / std::sqrt(2.0);
    Matrix u;
    switch (kind) {
      case GateKind::kCnot:
        u = Matrix::Zero(4, 4);
        u(0, 0) = u(1, 1) = u(2, 3) = u(3, 2) = 1.0;
        break;
      case GateKind::kX:
        u = Matrix::Zero(2, 2);
        u(0, 1) = u(1, 0) = 1.0;
        break;
      case GateKind::kY:
        u = Matrix::Zero(2, 2);
        u(0, 1) = cplx(0, -1);
        u(1, 0) = cplx(0, 1);
        break;
      case GateKind::kZ:
        u = Matrix::Zero(2, 2);
        u(0, 0) = 1.0;
        u(1, 1) = -1.0;
        break;
      case GateKind::kH:
        u = Matrix(2, 2);
        u << s, s, s, -s;
        break;
    }
    return u;
  }
};

using GateSequence = std::vector<GatePlacement>;

/// Matrix-level gate application; used by the channels on unnormalized branches.
inline void apply_gate_inplace(Matrix& m, int n, const GatePlacement& g) {
  g.check(n);
  const auto q = g.qubits();
  detail::conjugate(m, n, g.unitary(), q);
}

inline DensityOperator apply_gate(const DensityOperator& rho, const GatePlacement& g) {
  Matrix m = rho.matrix();
  apply_gate_inplace(m, rho.num_qubits(), g);
  return DensityOperator(std::move(m));
}

inline PureState apply_gate(const PureState& psi, const GatePlacement& g) {
  g.check(psi.num_qubits());
  Matrix m = psi.amplitudes();
  const auto q = g.qubits();
  detail::apply_left(m, psi.num_qubits(), g.unitary(), q);
  return PureState(m.col(0));
}

enum class Basis { kX, kZ };

struct MeasurementBranch {
  double probability = 0.0;
  int outcome = 0;
  DensityOperator state;  // remaining qubits, original order, normalized
};

namespace detail {

// Unnormalized post-measurement operator on the remaining qubits for one outcome.
inline Matrix collapse(const Matrix& m, int n, int q, int outcome) {
  const std::size_t dim_out = std::size_t{1} << (n - 1);
  const int bit = bit_of(q, n);
  const std::size_t low = (std::size_t{1} << bit) - 1;
  auto expand = [&](std::size_t i) {
    return ((i & ~low) << 1) | (static_cast<std::size_t>(outcome) << bit) | (i & low);
  };
  std::vector<std::size_t> map(dim_out);
  for (std::size_t i = 0; i < dim_out; ++i) map[i] = expand(i);
  Matrix out(static_cast<Eigen::Index>(dim_out), static_cast<Eigen::Index>(dim_out));
  for (std::size_t i = 0; i < dim_out; ++i) {
    for (std::size_t j = 0; j < dim_out; ++j) out(i, j) = m(map[i], map[j]);
  }
  return out;
}

// Index of qubit q after qubit `removed` has been measured out.
inline int shifted(int q, int removed) { return q > removed ? q - 1 : q; }

}  // namespace detail

/// Projective single-qubit measurement. Branches with zero probability are omitted.
inline std::vector<MeasurementBranch> measure_branch(const DensityOperator& rho, int qubit,
                                                     Basis basis) {
  const int n = rho.num_qubits();
  detail::check_qubit(qubit, n);
  Matrix m = rho.matrix();
  if (basis == Basis::kX) apply_gate_inplace(m, n, GatePlacement::h(qubit));
  std::vector<MeasurementBranch> out;
  for (int o = 0; o < 2; ++o) {
    Matrix c = detail::collapse(m, n, qubit, o);
    const double p = c.trace().real();
    if (p <= 1e-15) continue;
    out.push_back({p, o, DensityOperator(c / p)});
  }
  return out;
}

/// Measures `qubit` in `basis`, applies `correction` when the outcome is 1, and
/// averages over outcomes. The measured qubit is removed; `correction` uses
/// indices of the register before removal.
inline Matrix measure_and_correct(const Matrix& m, int n, int qubit, Basis basis,
                                  const std::vector<GatePlacement>& correction) {
  detail::check_qubit(qubit, n);
  Matrix work = m;
  if (basis == Basis::kX) apply_gate_inplace(work, n, GatePlacement::h(qubit));
  Matrix out = detail::collapse(work, n, qubit, 0);
  Matrix one = detail::collapse(work, n, qubit, 1);
  for (auto g : correction) {
    if (g.first == qubit || (g.two_qubit() && g.second == qubit)) {
      throw std::invalid_argument("correction acts on the measured qubit");
    }
    g.first = detail::shifted(g.first, qubit);
    if (g.two_qubit()) g.second = detail::shifted(g.second, qubit);
    apply_gate_inplace(one, n - 1, g);
  }
  out += one;
  return out;
}

/// <psi|rho|psi>; zero amplitudes of psi are skipped.
inline double overlap(const DensityOperator& rho, const PureState& psi) {
  if (rho.dim() != psi.dim()) throw std::invalid_argument("overlap dimension mismatch");
  std::vector<Eigen::Index> nz;
  for (Eigen::Index i = 0; i < psi.amplitudes().size(); ++i) {
    if (psi.amplitudes()(i) != cplx(0.0)) nz.push_back(i);
  }
  cplx acc = 0.0;
  for (auto i : nz) {
    for (auto j : nz) acc += std::conj(psi.amplitudes()(i)) * rho.matrix()(i, j) * psi.amplitudes()(j);
  }
  return acc.real();
}

namespace detail {

inline Matrix psd_sqrt(const Matrix& m, double tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.eigenvalues().minCoeff() < -tol) {
    throw std::domain_error("operator is not positive semidefinite");
  }
  Eigen::VectorXd s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

/// (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
inline double uhlmann_fidelity(const DensityOperator& rho, const DensityOperator& sigma) {
  if (rho.dim() != sigma.dim()) throw std::invalid_argument("fidelity dimension mismatch");
  const Matrix sr = detail::psd_sqrt(rho.matrix(), kPsdTol);
  if (sigma.min_eigenvalue() < -kPsdTol) {
    throw std::domain_error("operator is not positive semidefinite");
  }
  Matrix inner = sr * sigma.matrix() * sr;
  inner = 0.5 * (inner + inner.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(inner, Eigen::EigenvaluesOnly);
  const double t = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return std::clamp(t * t, 0.0, 1.0);
}

/// Bell-basis populations of a two-qubit state.
struct BellDiagCoeffs {
  double phi_plus = 0.0;
  double phi_minus = 0.0;
  double psi_plus = 0.0;
  double psi_minus = 0.0;
  /// Frobenius norm of the part of rho not diagonal in the Bell basis.
  double off_diagonal_norm = 0.0;

  double sum() const { return phi_plus + phi_minus + psi_plus + psi_minus; }
};

/// The four Bell states in the order phi+, phi-, psi+, psi-.
inline std::vector<PureState> bell_basis() {
  const double s = 1.0 / std::sqrt(2.0);
  std::vector<PureState> out;
  for (auto [a, b, c, d] : {std::array<double, 4>{s, 0, 0, s}, std::array<double, 4>{s, 0, 0, -s},
                            std::array<double, 4>{0, s, s, 0}, std::array<double, 4>{0, s, -s, 0}}) {
    Vector v(4);
    v << a, b, c, d;
    out.emplace_back(std::move(v));
  }
  return out;
}

inline BellDiagCoeffs bell_diag_coeffs(const DensityOperator& rho) {
  if (rho.num_qubits() != 2) throw std::invalid_argument("Bell coefficients need a two-qubit state");
  const auto basis = bell_basis();
  Matrix b(4, 4);
  for (int k = 0; k < 4; ++k) b.col(k) = basis[k].amplitudes();
  Matrix in_bell = b.adjoint() * rho.matrix() * b;
  BellDiagCoeffs c;
  c.phi_plus = in_bell(0, 0).real();
  c.phi_minus = in_bell(1, 1).real();
  c.psi_plus = in_bell(2, 2).real();
  c.psi_minus = in_bell(3, 3).real();
  in_bell.diagonal().setZero();
  c.off_diagonal_norm = in_bell.norm();
  return c;
}

}  // namespace encrep
