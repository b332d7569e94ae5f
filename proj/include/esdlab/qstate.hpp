// Copyright 2026 The esdlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// States, Kraus channels and their Choi (dual) states.

#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "esdlab/error.hpp"
#include "esdlab/numkernel.hpp"

namespace esdlab {

inline constexpr double kNormTol = 1e-10;
inline constexpr double kStateTol = 1e-9;
inline constexpr double kTraceTol = 1e-8;
inline constexpr double kDriftRepairTol = 1e-12;

namespace detail {
inline void require_qubit_dims(std::size_t dim, const char* what) {
  if (dim != 2 && dim != 4) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + " dimension must be 2 or 4, got " + std::to_string(dim));
  }
}
}  // namespace detail

class PureState {
 public:
  explicit PureState(std::vector<Complex> amplitudes) : amps_(std::move(amplitudes)) {
    detail::require_qubit_dims(amps_.size(), "pure state");
    for (const auto& z : amps_) {
      if (!is_finite(z)) throw Error(ErrorCode::NonFinite, "amplitude is not finite");
    }
    const double n = norm();
    if (std::abs(n - 1.0) > kNormTol) {
      throw Error(ErrorCode::InvariantViolation, "amplitudes have norm " + std::to_string(n));
    }
  }

  /// Rescales to unit norm; a zero vector is rejected.
  static PureState normalized(std::vector<Complex> amplitudes) {
    double s = 0.0;
    for (const auto& z : amplitudes) s += std::norm(z);
    if (!(s > 0.0)) throw Error(ErrorCode::InvariantViolation, "zero state vector");
    const double inv = 1.0 / std::sqrt(s);
    for (auto& z : amplitudes) z *= inv;
    return PureState(std::move(amplitudes));
  }

  std::size_t dimension() const noexcept { return amps_.size(); }
  std::span<const Complex> amplitudes() const noexcept { return amps_; }
  const Complex& operator[](std::size_t i) const { return amps_[i]; }

  ComplexMatrix ket() const { return ComplexMatrix::column(amps_); }
  ComplexMatrix projector() const {
    const auto k = ket();
    return k * k.adjoint();
  }

  double norm() const {
    double s = 0.0;
    for (const auto& z : amps_) s += std::norm(z);
    return std::sqrt(s);
  }

 private:
  std::vector<Complex> amps_;
};

inline Complex inner_product(const PureState& bra, const PureState& ket) {
  if (bra.dimension() != ket.dimension()) {
    throw Error(ErrorCode::DimensionMismatch, "inner product of unequal dimensions");
  }
  Complex s = 0.0;
  for (std::size_t i = 0; i < bra.dimension(); ++i) s += std::conj(bra[i]) * ket[i];
  return s;
}

class DensityMatrix {
 public:
  /// Validates Hermiticity (1e-9 Frobenius), unit trace (1e-9) and
  /// min eigenvalue >= -1e-9. Stores the symmetrized matrix.
  explicit DensityMatrix(const ComplexMatrix& m) {
    if (!m.is_square()) throw Error(ErrorCode::DimensionMismatch, "density matrix " + m.shape());
    detail::require_qubit_dims(m.rows(), "density matrix");
    const double defect = hermiticity_defect(m);
    if (defect > kStateTol) {
      throw Error(ErrorCode::InvariantViolation,
                  "density matrix not Hermitian (defect " + std::to_string(defect) + ")");
    }
    m_ = (m + m.adjoint()) * 0.5;
    for (std::size_t i = 0; i < m_.rows(); ++i) m_(i, i) = m_(i, i).real();
    const double tr = m_.trace().real();
    if (std::abs(tr - 1.0) > kStateTol) {
      throw Error(ErrorCode::InvariantViolation, "density matrix trace " + std::to_string(tr));
    }
    const double lo = herm_eig(m_).values.back();
    if (lo < -kStateTol) {
      throw Error(ErrorCode::InvariantViolation,
                  "density matrix eigenvalue " + std::to_string(lo) + " is negative");
    }
  }

  explicit DensityMatrix(const PureState& psi) : DensityMatrix(psi.projector()) {}

  static DensityMatrix maximally_mixed(std::size_t dim) {
    return DensityMatrix(ComplexMatrix::identity(dim) * (1.0 / static_cast<double>(dim)));
  }

  std::size_t dimension() const noexcept { return m_.rows(); }
  const ComplexMatrix& matrix() const noexcept { return m_; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return m_(r, c); }

 private:
  ComplexMatrix m_;
};

class QubitChannel {
 public:
  QubitChannel(std::vector<ComplexMatrix> kraus, std::string label)
      : kraus_(std::move(kraus)), label_(std::move(label)) {
    if (kraus_.empty()) throw Error(ErrorCode::DimensionMismatch, "channel needs a Kraus operator");
    for (const auto& k : kraus_) {
      if (k.rows() != 2 || k.cols() != 2) {
        throw Error(ErrorCode::DimensionMismatch, "Kraus operator must be 2x2, got " + k.shape());
      }
    }
  }

  const std::vector<ComplexMatrix>& kraus() const noexcept { return kraus_; }
  const std::string& label() const noexcept { return label_; }

  /// || sum K^dagger K - I ||_F
  double completeness_defect() const {
    ComplexMatrix s(2, 2);
    for (const auto& k : kraus_) s += k.adjoint() * k;
    return frobenius_distance(s, ComplexMatrix::identity(2));
  }

 private:
  std::vector<ComplexMatrix> kraus_;
  std::string label_;
};

inline bool is_trace_preserving(const QubitChannel& channel, double tol = kTraceTol) {
  return channel.completeness_defect() <= tol;
}

namespace detail {
inline void require_trace_preserving(const QubitChannel& channel) {
  if (!is_trace_preserving(channel)) {
    throw Error(ErrorCode::NotTracePreserving,
                "channel '" + channel.label() + "' completeness defect " +
                    std::to_string(channel.completeness_defect()));
  }
}

// Small drift from long chains is repaired; anything past kStateTol is a bug
// upstream and surfaces as an error.
inline DensityMatrix settle(ComplexMatrix out) {
  const double defect = hermiticity_defect(out);
  const double tr = out.trace().real();
  if (defect > kStateTol || std::abs(tr - 1.0) > kStateTol) {
    throw Error(ErrorCode::InvariantViolation, "channel output drifted out of the state space");
  }
  if (defect > kDriftRepairTol || std::abs(tr - 1.0) > kDriftRepairTol) {
    out = (out + out.adjoint()) * (0.5 / tr);
  }
  return DensityMatrix(out);
}
}  // namespace detail

enum class BellKind { PhiPlus, PsiPlus };

inline PureState bell_state(BellKind kind) {
  const double h = std::numbers::sqrt2 / 2.0;
  if (kind == BellKind::PhiPlus) return PureState({h, 0.0, 0.0, h});
  return PureState({0.0, h, h, 0.0});
}

/// Computational basis product state |a b> (0 = H, 1 = V).
inline PureState basis_state(int a, int b) {
  std::vector<Complex> v(4, 0.0);
  v[static_cast<std::size_t>(2 * a + b)] = 1.0;
  return PureState(std::move(v));
}

enum class ChannelKind { AmplitudeDamping, PhaseDamping, BitFlip, Depolarizing, Identity };

inline std::string to_string(ChannelKind kind) {
  switch (kind) {
    case ChannelKind::AmplitudeDamping: return "adc";
    case ChannelKind::PhaseDamping: return "pdc";
    case ChannelKind::BitFlip: return "bitflip";
    case ChannelKind::Depolarizing: return "depolarizing";
    case ChannelKind::Identity: return "identity";
  }
  return "unknown";
}

inline QubitChannel standard_channel(ChannelKind kind, double strength = 0.0) {
  if (!(strength >= 0.0 && strength <= 1.0)) {
    throw Error(ErrorCode::StrengthOutOfRange, "strength " + std::to_string(strength));
  }
  const double s = strength;
  const std::string label = to_string(kind) + "(" + std::to_string(s) + ")";
  switch (kind) {
    case ChannelKind::AmplitudeDamping:
      return QubitChannel({ComplexMatrix::diagonal({1.0, std::sqrt(1.0 - s)}),
                           ComplexMatrix{{0.0, std::sqrt(s)}, {0.0, 0.0}}},
                          label);
    case ChannelKind::PhaseDamping:
      return QubitChannel({ComplexMatrix::diagonal({1.0, std::sqrt(1.0 - s)}),
                           ComplexMatrix::diagonal({0.0, std::sqrt(s)})},
                          label);
    case ChannelKind::BitFlip:
      return QubitChannel({pauli::I() * std::sqrt(1.0 - s), pauli::X() * std::sqrt(s)}, label);
    case ChannelKind::Depolarizing: {
      const double q = std::sqrt(s / 4.0);
      return QubitChannel({pauli::I() * std::sqrt(1.0 - 0.75 * s), pauli::X() * q,
                           pauli::Y() * q, pauli::Z() * q},
                          label);
    }
    case ChannelKind::Identity:
      return QubitChannel({pauli::I()}, "identity");
  }
  throw Error(ErrorCode::OutOfRange, "unknown channel kind");
}

/// Interferometer angle (degrees) to damping probability g = sin^2(2 phi).
inline double sagnac_strength(double phi_degrees) {
  const double s = std::sin(2.0 * phi_degrees * std::numbers::pi / 180.0);
  return s * s;
}

enum class Side { A, B };

/// Single-qubit use: sum_i K rho K^dagger on a 2x2 state.
inline DensityMatrix apply_channel(const DensityMatrix& rho, const QubitChannel& channel) {
  if (rho.dimension() != 2) {
    throw Error(ErrorCode::DimensionMismatch, "single-qubit application needs a 2x2 state");
  }
  detail::require_trace_preserving(channel);
  ComplexMatrix out(2, 2);
  for (const auto& k : channel.kraus()) out += k * rho.matrix() * k.adjoint();
  return detail::settle(std::move(out));
}

/// Applies the channel to one qubit of a two-qubit state.
inline DensityMatrix apply_channel(const DensityMatrix& rho, const QubitChannel& channel,
                                   Side side) {
  if (rho.dimension() != 4) {
    throw Error(ErrorCode::DimensionMismatch, "two-qubit application needs a 4x4 state");
  }
  detail::require_trace_preserving(channel);
  const auto id = ComplexMatrix::identity(2);
  ComplexMatrix out(4, 4);
  for (const auto& k : channel.kraus()) {
    const auto full = side == Side::A ? kron(k, id) : kron(id, k);
    out += full * rho.matrix() * full.adjoint();
  }
  return detail::settle(std::move(out));
}

/// (E_A (x) E_B) rho, evaluated as E_B on side B after E_A on side A.
inline DensityMatrix apply_channels(const DensityMatrix& rho, const QubitChannel& on_a,
                                    const QubitChannel& on_b) {
  return apply_channel(apply_channel(rho, on_a, Side::A), on_b, Side::B);
}

/// outer o inner, Kraus set {K_i L_j}.
inline QubitChannel compose_channels(const QubitChannel& outer, const QubitChannel& inner) {
  std::vector<ComplexMatrix> ops;
  ops.reserve(outer.kraus().size() * inner.kraus().size());
  for (const auto& k : outer.kraus())
    for (const auto& l : inner.kraus()) ops.push_back(k * l);
  return QubitChannel(std::move(ops), outer.label() + "*" + inner.label());
}

/// (I (x) E)|phi+><phi+| without state validation; the channel may be any
/// Kraus set.
inline ComplexMatrix choi_matrix(const QubitChannel& channel) {
  ComplexMatrix out(4, 4);
  for (const auto& k : channel.kraus()) {
    // (I (x) K)|phi+> = sum_a |a> (x) K|a> / sqrt 2
    ComplexMatrix v(4, 1);
    for (std::size_t a = 0; a < 2; ++a)
      for (std::size_t b = 0; b < 2; ++b) v(2 * a + b, 0) = k(b, a) * (std::numbers::sqrt2 / 2.0);
    out += v * v.adjoint();
  }
  return out;
}

class ChoiState {
 public:
  ChoiState(DensityMatrix state, std::string source)
      : state_(std::move(state)), source_(std::move(source)) {
    if (state_.dimension() != 4) throw Error(ErrorCode::DimensionMismatch, "Choi state must be 4x4");
    const auto reduced = partial_trace(state_.matrix(), Subsystem::Second);
    if (frobenius_distance(reduced, ComplexMatrix::identity(2) * 0.5) > kTraceTol) {
      throw Error(ErrorCode::NotTracePreserving, "Choi state reduced marginal is not I/2");
    }
  }

  const DensityMatrix& state() const noexcept { return state_; }
  const ComplexMatrix& matrix() const noexcept { return state_.matrix(); }
  const std::string& source_channel() const noexcept { return source_; }

 private:
  DensityMatrix state_;
  std::string source_;
};

inline ChoiState choi_state(const QubitChannel& channel) {
  detail::require_trace_preserving(channel);
  return ChoiState(DensityMatrix(choi_matrix(channel)), channel.label());
}

/// Channel equivalence is Choi equality; Kraus lists are only defined up to
/// a unitary remixing.
inline double choi_distance(const QubitChannel& a, const QubitChannel& b) {
  return frobenius_distance(choi_matrix(a), choi_matrix(b));
}

inline bool choi_equal(const QubitChannel& a, const QubitChannel& b, double tol = 1e-8) {
  return choi_distance(a, b) <= tol;
}

/// Kraus operators from the spectral decomposition of a normalized Choi
/// matrix: K_k = sqrt(2 mu_k) reshape(v_k), with K[b][a] = v[2a + b].
/// Eigenvalues below `drop_tol` are dropped; any below -cp_tol means the
/// matrix is not completely positive.
inline std::vector<ComplexMatrix> kraus_from_choi_matrix(const ComplexMatrix& choi,
                                                         double drop_tol = 1e-12,
                                                         double cp_tol = 1e-12) {
  const auto eig = herm_eig(choi, kHermitianTol);
  std::vector<ComplexMatrix> ops;
  for (std::size_t k = 0; k < 4; ++k) {
    const double mu = eig.values[k];
    if (mu < -cp_tol) {
      throw Error(ErrorCode::NotCompletelyPositive,
                  "Choi eigenvalue " + std::to_string(mu) + " is negative");
    }
    if (mu < drop_tol) continue;
    const double scale = std::sqrt(2.0 * mu);
    ComplexMatrix op(2, 2);
    for (std::size_t a = 0; a < 2; ++a)
      for (std::size_t b = 0; b < 2; ++b) op(b, a) = scale * eig.vectors(2 * a + b, k);
    ops.push_back(std::move(op));
  }
  if (ops.empty()) throw Error(ErrorCode::NotCompletelyPositive, "Choi matrix has no support");
  return ops;
}

}  // namespace esdlab
