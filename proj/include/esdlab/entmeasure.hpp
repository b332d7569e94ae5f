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

#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "esdlab/numkernel.hpp"
#include "esdlab/qstate.hpp"

namespace esdlab {

inline constexpr double kConcurrenceClamp = 1e-10;
inline constexpr double kPptTol = 1e-10;

namespace detail {
inline void require_two_qubit_state(const DensityMatrix& rho, const char* op) {
  if (rho.dimension() != 4) {
    throw Error(ErrorCode::DimensionMismatch, std::string(op) + " needs a two-qubit state");
  }
}
}  // namespace detail

/// (sigma_y (x) sigma_y) rho^* (sigma_y (x) sigma_y)
inline ComplexMatrix spin_flip(const DensityMatrix& rho) {
  detail::require_two_qubit_state(rho, "spin_flip");
  const auto yy = kron(pauli::Y(), pauli::Y());
  return yy * rho.matrix().conjugate() * yy;
}

struct ConcurrenceResult {
  double value = 0.0;
  std::array<double, 4> lambdas{};  // descending, non-negative
};

/// Wootters concurrence. The lambdas are square roots of the eigenvalues of
/// the Hermitian sqrt(rho) rho~ sqrt(rho), which share the spectrum of the
/// non-Hermitian rho rho~.
inline ConcurrenceResult concurrence(const DensityMatrix& rho) {
  detail::require_two_qubit_state(rho, "concurrence");
  const auto root = psd_sqrt(rho.matrix());
  const auto r2 = root * spin_flip(rho) * root;
  const auto eig = herm_eig(r2);
  ConcurrenceResult out;
  for (std::size_t i = 0; i < 4; ++i) {
    const double mu = eig.values[i];
    if (mu < -kConcurrenceClamp) {
      throw Error(ErrorCode::NotPSD, "spin-flipped product has eigenvalue " + std::to_string(mu));
    }
    // values at the round-off floor are zeros; their square roots would not be
    out.lambdas[i] = mu <= kSpectralFloor ? 0.0 : std::sqrt(mu);
  }
  std::sort(out.lambdas.begin(), out.lambdas.end(), std::greater<>());
  const auto& l = out.lambdas;
  out.value = std::clamp(l[0] - l[1] - l[2] - l[3], 0.0, 1.0);
  return out;
}

/// C = 2 |a00 a11 - a01 a10|
inline double concurrence_pure(const PureState& psi) {
  if (psi.dimension() != 4) {
    throw Error(ErrorCode::DimensionMismatch, "pure concurrence needs a two-qubit state");
  }
  return std::min(1.0, 2.0 * std::abs(psi[0] * psi[3] - psi[1] * psi[2]));
}

struct PptResult {
  double min_eigenvalue = 0.0;
  bool is_ppt = true;
};

/// Minimum eigenvalue of the partial transpose on qubit B. For two qubits
/// PPT is equivalent to separability.
inline PptResult negativity_ppt(const DensityMatrix& rho) {
  detail::require_two_qubit_state(rho, "negativity_ppt");
  const double lo = herm_eig(partial_transpose(rho.matrix(), Subsystem::Second)).values.back();
  return {lo, lo >= -kPptTol};
}

/// A qubit channel is entanglement breaking iff its Choi state is separable.
inline bool is_entanglement_breaking(const QubitChannel& channel) {
  return negativity_ppt(choi_state(channel).state()).is_ppt;
}

}  // namespace esdlab
