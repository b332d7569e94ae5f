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

// Entanglement dynamics under one-sided channels.
//
// A mixed two-qubit state is rewritten as a pure state with a channel on one
// side, rho = (I (x) Gamma) sigma. Evolving rho by E on that side is then a
// Bell state pushed through the single effective channel E o Gamma, scaled
// by C[sigma]. Sudden death of rho therefore coincides with E o Gamma
// becoming entanglement breaking, and the routines below compute both sides
// of that statement independently.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "esdlab/entmeasure.hpp"
#include "esdlab/numkernel.hpp"
#include "esdlab/qstate.hpp"

namespace esdlab {

inline constexpr double kRankTol = 1e-7;
inline constexpr double kReconstructionTol = 1e-8;
inline constexpr double kEsdZeroTol = 1e-12;
inline constexpr double kStrengthBisectionTol = 1e-6;
inline constexpr double kMixingBisectionTol = 1e-4;
inline constexpr double kGridZeroClamp = 1e-9;

namespace detail {
inline void require_unit_interval(double x, const char* name, bool open_low = false,
                                  bool open_high = false) {
  const bool ok = (open_low ? x > 0.0 : x >= 0.0) && (open_high ? x < 1.0 : x <= 1.0);
  if (!ok) throw Error(ErrorCode::OutOfRange, std::string(name) + " = " + std::to_string(x));
}
}  // namespace detail

/// alpha|HH> + sqrt(1 - alpha^2)|VV>
inline PureState spdc_state(double alpha) {
  detail::require_unit_interval(alpha, "alpha");
  return PureState({alpha, 0.0, 0.0, std::sqrt(std::max(0.0, 1.0 - alpha * alpha))});
}

/// (1 - p)|alpha><alpha| + p|HV><HV| with p = h(1 - omega) and
/// alpha^2 = omega / (1 - p). Equal to amplitude damping of strength h on
/// qubit A of sqrt(omega)|HH> + sqrt(1 - omega)|VV>.
inline DensityMatrix mixed_family(double h, double omega) {
  detail::require_unit_interval(h, "h");
  detail::require_unit_interval(omega, "omega", true, true);
  const double p = h * (1.0 - omega);
  // 1 - alpha^2 = (1 - omega)(1 - h) / (1 - p), written out to avoid cancellation near h = 1
  const PureState alpha({std::sqrt(omega / (1.0 - p)), 0.0, 0.0,
                         std::sqrt((1.0 - omega) * (1.0 - h) / (1.0 - p))});
  const auto a = alpha.projector();
  const auto hv = basis_state(0, 1).projector();
  return DensityMatrix(a * (1.0 - p) + hv * p);
}

/// h|phi+><phi+| + (1 - h)|psi+><psi+|
inline DensityMatrix x_state_family(double h) {
  detail::require_unit_interval(h, "h");
  return DensityMatrix(bell_state(BellKind::PhiPlus).projector() * h +
                       bell_state(BellKind::PsiPlus).projector() * (1.0 - h));
}

enum class FamilyKind { AdcMixed, XState };

struct FamilySpec {
  FamilyKind kind = FamilyKind::AdcMixed;
  double omega = 0.5;  // AdcMixed only
  std::string description;

  static FamilySpec adc_mixed(double omega) {
    detail::require_unit_interval(omega, "omega", true, true);
    return {FamilyKind::AdcMixed, omega, "adc-mixed(omega=" + std::to_string(omega) + ")"};
  }
  static FamilySpec x_state() { return {FamilyKind::XState, 0.0, "x-state"}; }
};

inline DensityMatrix family_state(const FamilySpec& family, double h) {
  return family.kind == FamilyKind::AdcMixed ? mixed_family(h, family.omega) : x_state_family(h);
}

struct WernerDecomposition {
  PureState sigma;
  QubitChannel gamma;
  Side side;
  double schmidt_weight;
};

/// rho = (I (x) Gamma) sigma for side B, (Gamma (x) I) sigma for side A.
///
/// The untouched qubit's reduced state is diagonalized, lambda_0 = w and
/// lambda_1 = 1 - w; sigma = sum_i sqrt(lambda_i) |e_i>|i> and
/// Gamma(|i><j|) = B_ij / sqrt(lambda_i lambda_j), B_ij being the blocks of
/// rho in the eigenbasis {e_i}. Slot i takes the eigenvector with the larger
/// overlap on |i>, so a diagonal reduced state keeps the computational order
/// whichever population is larger. Gamma's Kraus set comes from its Choi
/// spectrum.
inline WernerDecomposition werner_decompose(const DensityMatrix& rho, Side side) {
  detail::require_two_qubit_state(rho, "werner_decompose");
  const auto& m = rho.matrix();
  const auto reduced =
      partial_trace(m, side == Side::B ? Subsystem::Second : Subsystem::First);
  const auto eig = herm_eig(reduced);
  if (eig.values[1] < kRankTol) {
    throw Error(ErrorCode::RankDeficient,
                "reduced state eigenvalue " + std::to_string(eig.values[1]) + " below rank tolerance");
  }
  std::size_t first = 0;
  if (std::abs(eig.vectors(0, 1)) > std::abs(eig.vectors(0, 0)) + 1e-12) first = 1;
  const std::size_t slot[2] = {first, 1 - first};
  const double lambda[2] = {eig.values[slot[0]], eig.values[slot[1]]};
  auto e = [&](std::size_t i, std::size_t comp) { return eig.vectors(comp, slot[i]); };

  // u indexes the untouched qubit, x the channel qubit.
  auto index = [side](std::size_t u, std::size_t x) { return side == Side::B ? 2 * u + x : 2 * x + u; };

  std::vector<Complex> amps(4, 0.0);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t u = 0; u < 2; ++u) amps[index(u, i)] += std::sqrt(lambda[i]) * e(i, u);

  ComplexMatrix choi(4, 4);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      const double norm = 1.0 / std::sqrt(lambda[i] * lambda[j]);
      for (std::size_t x = 0; x < 2; ++x)
        for (std::size_t y = 0; y < 2; ++y) {
          Complex s = 0.0;
          for (std::size_t u = 0; u < 2; ++u)
            for (std::size_t w = 0; w < 2; ++w)
              s += std::conj(e(i, u)) * m(index(u, x), index(w, y)) * e(j, w);
          choi(2 * i + x, 2 * j + y) = 0.5 * norm * s;
        }
    }

  WernerDecomposition out{PureState::normalized(std::move(amps)),
                          QubitChannel(kraus_from_choi_matrix(choi, 1e-12, 1e-9), "gamma"),
                          side, lambda[0]};
  const auto rebuilt = apply_channel(DensityMatrix(out.sigma), out.gamma, side);
  const double residual = frobenius_distance(rebuilt.matrix(), m);
  if (residual > kReconstructionTol) {
    throw Error(ErrorCode::InvariantViolation,
                "decomposition reconstructs with residual " + std::to_string(residual));
  }
  return out;
}

/// C(sigma) = 2 sqrt((1 - h)(1 - omega)[omega + h(1 - omega)]) for the
/// adc-mixed family.
inline double family_concurrence_formula(double h, double omega) {
  detail::require_unit_interval(h, "h");
  detail::require_unit_interval(omega, "omega", true, true);
  return 2.0 * std::sqrt((1.0 - h) * (1.0 - omega) * (omega + h * (1.0 - omega)));
}

/// Closed-form Kraus set of amplitude damping g composed after the adc-mixed
/// family's Gamma(omega, h).
inline QubitChannel effective_adc_kraus(double omega, double h, double g) {
  detail::require_unit_interval(omega, "omega", true, true);
  detail::require_unit_interval(h, "h", true, true);
  detail::require_unit_interval(g, "g", true, true);
  const double mixed = omega + h * (1.0 - omega);
  const double damped = omega + g * h * (1.0 - omega);
  ComplexMatrix k1 = ComplexMatrix::diagonal(
      {std::sqrt(damped / mixed), std::sqrt(omega * (1.0 - g) / damped)});
  ComplexMatrix k2{{0.0, 0.0}, {std::sqrt(h * (1.0 - g) * (1.0 - omega) / mixed), 0.0}};
  ComplexMatrix k3{{0.0, std::sqrt(g)}, {0.0, 0.0}};
  ComplexMatrix k4{{0.0, 0.0}, {0.0, std::sqrt((1.0 - g) * h * g * (1.0 - omega) / damped)}};
  return QubitChannel({k1, k2, k3, k4}, "effective-adc");
}

/// | C[(I (x) E) chi] - C[(I (x) E) phi+] C[chi] | for a pure input.
inline double pure_factorization_residual(const PureState& chi, const QubitChannel& channel) {
  const double lhs = concurrence(apply_channel(DensityMatrix(chi), channel, Side::B)).value;
  const double rhs = concurrence(choi_state(channel).state()).value * concurrence_pure(chi);
  return std::abs(lhs - rhs);
}

/// | C[(I (x) E) rho] - C[(I (x) E Gamma) phi+] C[sigma] | with the side-B
/// decomposition of rho.
inline double factorization_residual(const DensityMatrix& rho, const QubitChannel& channel) {
  const auto wd = werner_decompose(rho, Side::B);
  const double lhs = concurrence(apply_channel(rho, channel, Side::B)).value;
  const double rhs = concurrence(choi_state(compose_channels(channel, wd.gamma)).state()).value *
                     concurrence_pure(wd.sigma);
  return std::abs(lhs - rhs);
}

struct BilateralReduction {
  QubitChannel lambda_channel;
  PureState sigma_prime;
};

/// (E1 (x) E2)|Phi><Phi| = (I (x) E2)(E1 (x) I)|Phi><Phi| = (I (x) Lambda) Sigma,
/// with (E1 (x) I)|Phi><Phi| = (I (x) Gamma') Sigma and Lambda = E2 o Gamma'.
inline BilateralReduction bilateral_reduction(const QubitChannel& e1, const QubitChannel& e2,
                                              const PureState& phi) {
  const auto intermediate = apply_channel(DensityMatrix(phi), e1, Side::A);
  auto wd = werner_decompose(intermediate, Side::B);
  return {compose_channels(e2, wd.gamma), std::move(wd.sigma)};
}

namespace detail {
template <class ZeroAt>
std::optional<double> first_zero_strength(ZeroAt&& zero_at) {
  const double top = 1.0 - kStrengthBisectionTol;
  if (!zero_at(top)) return std::nullopt;
  if (zero_at(0.0)) return 0.0;
  double lo = 0.0;
  double hi = top;
  while (hi - lo > kStrengthBisectionTol) {
    const double mid = 0.5 * (lo + hi);
    (zero_at(mid) ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}
}  // namespace detail

/// Smallest channel strength g in [0, 1) at which the family member's
/// concurrence vanishes after the channel acts on qubit B. Found by
/// bisection; nullopt when entanglement survives up to g = 1 - 1e-6.
inline std::optional<double> esd_threshold(const FamilySpec& family, double h, ChannelKind kind) {
  const auto rho = family_state(family, h);
  return detail::first_zero_strength([&](double g) {
    return concurrence(apply_channel(rho, standard_channel(kind, g), Side::B)).value <= kEsdZeroTol;
  });
}

/// Smallest g at which channel(g) o Gamma is entanglement breaking, Gamma
/// being the family member's side-B effective channel. Computed from
/// Choi separability only, with no reference to the evolved state.
inline std::optional<double> ebc_threshold(const FamilySpec& family, double h, ChannelKind kind) {
  const auto gamma = werner_decompose(family_state(family, h), Side::B).gamma;
  return detail::first_zero_strength([&](double g) {
    return is_entanglement_breaking(compose_channels(standard_channel(kind, g), gamma));
  });
}

struct BoundaryPoint {
  double param = 0.0;
  std::optional<double> critical;
};

/// Boundary between entanglement-breaking and non-breaking effective maps.
/// AdcMixed: for each omega, the minimal mixing h that admits sudden death
/// (bisection in h up to 1 - 1e-4). XState: for each h, the threshold g*.
inline std::vector<BoundaryPoint> ebc_boundary_curve(const FamilySpec& family,
                                                     std::span<const double> params,
                                                     ChannelKind kind) {
  std::vector<BoundaryPoint> out;
  out.reserve(params.size());
  for (double param : params) {
    if (family.kind == FamilyKind::XState) {
      out.push_back({param, esd_threshold(family, param, kind)});
      continue;
    }
    const auto spec = FamilySpec::adc_mixed(param);
    auto dies = [&](double h) { return esd_threshold(spec, h, kind).has_value(); };
    const double top = 1.0 - kMixingBisectionTol;
    BoundaryPoint point{param, std::nullopt};
    if (dies(0.0)) {
      point.critical = 0.0;
    } else if (dies(top)) {
      double lo = 0.0;
      double hi = top;
      while (hi - lo > kMixingBisectionTol) {
        const double mid = 0.5 * (lo + hi);
        (dies(mid) ? hi : lo) = mid;
      }
      point.critical = 0.5 * (lo + hi);
    }
    out.push_back(point);
  }
  return out;
}

/// Default parameter axis: omega = k/n for k = 1..n-1 (AdcMixed), or
/// h = k/n for k = 0..n (XState).
inline std::vector<double> boundary_axis(const FamilySpec& family, int resolution) {
  if (resolution < 2) throw Error(ErrorCode::OutOfRange, "resolution must be at least 2");
  std::vector<double> axis;
  const int lo = family.kind == FamilyKind::AdcMixed ? 1 : 0;
  const int hi = family.kind == FamilyKind::AdcMixed ? resolution - 1 : resolution;
  for (int k = lo; k <= hi; ++k) axis.push_back(static_cast<double>(k) / resolution);
  return axis;
}

inline std::vector<BoundaryPoint> ebc_boundary_curve(const FamilySpec& family, int resolution,
                                                     ChannelKind kind) {
  const auto axis = boundary_axis(family, resolution);
  return ebc_boundary_curve(family, axis, kind);
}

/// Inclusive linear axis start:stop:count.
struct GridAxis {
  double start = 0.0;
  double stop = 1.0;
  int count = 1;

  std::vector<double> values() const {
    if (count < 1) throw Error(ErrorCode::OutOfRange, "grid axis needs at least one point");
    std::vector<double> v(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
      v[static_cast<std::size_t>(i)] =
          count == 1 ? start : start + (stop - start) * static_cast<double>(i) / (count - 1);
    }
    if (count > 1) v.back() = stop;
    return v;
  }
};

struct SweepGrid {
  std::vector<double> h_axis;
  std::vector<double> g_axis;
  std::vector<double> values;  // row-major, h then g
  FamilySpec family;
  ChannelKind channel = ChannelKind::AmplitudeDamping;

  double at(std::size_t i, std::size_t j) const { return values[i * g_axis.size() + j]; }
  std::size_t zero_cells() const {
    return static_cast<std::size_t>(std::count(values.begin(), values.end(), 0.0));
  }
};

/// Concurrence of family(h_i) after channel(g_j) on qubit B, for every cell.
/// Cells are independent, so `threads` > 1 splits rows across workers with
/// output identical to the sequential pass. Values below 1e-9 are stored as 0.
inline SweepGrid sweep_grid(const FamilySpec& family, const GridAxis& h_axis,
                            const GridAxis& g_axis, ChannelKind kind, unsigned threads = 0) {
  SweepGrid grid{h_axis.values(), g_axis.values(), {}, family, kind};
  for (double x : grid.h_axis) detail::require_unit_interval(x, "h");
  for (double x : grid.g_axis) detail::require_unit_interval(x, "g");
  const std::size_t nh = grid.h_axis.size();
  const std::size_t ng = grid.g_axis.size();
  grid.values.assign(nh * ng, 0.0);

  std::vector<QubitChannel> channels;
  channels.reserve(ng);
  for (double g : grid.g_axis) channels.push_back(standard_channel(kind, g));

  auto fill_row = [&](std::size_t i) {
    const auto rho = family_state(family, grid.h_axis[i]);
    for (std::size_t j = 0; j < ng; ++j) {
      const double c = concurrence(apply_channel(rho, channels[j], Side::B)).value;
      grid.values[i * ng + j] = c < kGridZeroClamp ? 0.0 : c;
    }
  };

  if (threads <= 1 || nh == 1) {
    for (std::size_t i = 0; i < nh; ++i) fill_row(i);
    return grid;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> failures(threads);
  {
    std::vector<std::jthread> workers;
    for (unsigned t = 0; t < threads; ++t) {
      workers.emplace_back([&, t] {
        try {
          for (std::size_t i = next++; i < nh; i = next++) fill_row(i);
        } catch (...) {
          failures[t] = std::current_exception();
        }
      });
    }
  }
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);
  return grid;
}

}  // namespace esdlab
