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

// Simulated state and process tomography.
//
// Counts are binomial per projector setting with a fixed number of shots.
// Each setting draws from its own generator seeded from (seed, setting
// index), so records do not depend on evaluation order.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "esdlab/numkernel.hpp"
#include "esdlab/qstate.hpp"

namespace esdlab {

struct MeasurementSetting {
  PureState projector_a;
  PureState projector_b;
  std::string label;

  ComplexMatrix projector() const { return kron(projector_a.projector(), projector_b.projector()); }
};

/// Single-qubit polarization kets by letter: H V D A R L.
inline PureState polarization(char letter) {
  const double h = std::numbers::sqrt2 / 2.0;
  switch (letter) {
    case 'H': return PureState({1.0, 0.0});
    case 'V': return PureState({0.0, 1.0});
    case 'D': return PureState({h, h});
    case 'A': return PureState({h, -h});
    case 'R': return PureState({h, Complex(0.0, h)});
    case 'L': return PureState({h, Complex(0.0, -h)});
    default: break;
  }
  throw Error(ErrorCode::ParseError, std::string("unknown polarization '") + letter + "'");
}

inline MeasurementSetting setting_from_label(const std::string& label) {
  if (label.size() != 2) throw Error(ErrorCode::ParseError, "setting label '" + label + "'");
  return {polarization(label[0]), polarization(label[1]), label};
}

enum class SettingsKind { Pauli36, Minimal16 };

inline std::vector<MeasurementSetting> tomography_settings(SettingsKind kind) {
  std::vector<MeasurementSetting> out;
  if (kind == SettingsKind::Pauli36) {
    const std::string letters = "HVDARL";
    for (char a : letters)
      for (char b : letters) out.push_back(setting_from_label(std::string{a, b}));
    return out;
  }
  for (const char* label : {"HH", "HV", "VV", "VH", "RH", "RV", "DV", "DH", "DR", "DD", "RD", "HD",
                            "VD", "VL", "HL", "RL"}) {
    out.push_back(setting_from_label(label));
  }
  return out;
}

inline double setting_probability(const DensityMatrix& rho, const MeasurementSetting& s) {
  return std::clamp((s.projector() * rho.matrix()).trace().real(), 0.0, 1.0);
}

struct CountRecord {
  std::string setting;
  std::uint64_t counts = 0;
  std::uint64_t shots = 1;
  std::uint64_t seed = 0;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Generator for the draws of one setting.
inline std::mt19937_64 setting_stream(std::uint64_t seed, std::uint64_t index) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(index + 1)));
}

inline std::uint64_t draw_binomial(std::mt19937_64& rng, std::uint64_t shots, double p) {
  if (p <= 0.0) return 0;
  if (p >= 1.0) return shots;
  std::binomial_distribution<std::uint64_t> dist(shots, p);
  return dist(rng);
}

inline std::vector<CountRecord> simulate_counts(const DensityMatrix& rho,
                                                std::span<const MeasurementSetting> settings,
                                                std::uint64_t shots, std::uint64_t seed) {
  if (shots < 1) throw Error(ErrorCode::OutOfRange, "shots per setting must be positive");
  std::vector<CountRecord> out;
  out.reserve(settings.size());
  for (std::size_t k = 0; k < settings.size(); ++k) {
    auto rng = setting_stream(seed, k);
    out.push_back({settings[k].label, draw_binomial(rng, shots, setting_probability(rho, settings[k])),
                   shots, seed});
  }
  return out;
}

/// Noiseless records: counts = round(p * shots).
inline std::vector<CountRecord> expected_counts(const DensityMatrix& rho,
                                                std::span<const MeasurementSetting> settings,
                                                std::uint64_t shots) {
  if (shots < 1) throw Error(ErrorCode::OutOfRange, "shots per setting must be positive");
  std::vector<CountRecord> out;
  for (const auto& s : settings) {
    const double n = std::round(setting_probability(rho, s) * static_cast<double>(shots));
    out.push_back({s.label, static_cast<std::uint64_t>(n), shots, 0});
  }
  return out;
}

/// Symmetrize, clip negative eigenvalues, renormalize the trace.
inline DensityMatrix project_to_state(const ComplexMatrix& m) {
  const ComplexMatrix sym = (m + m.adjoint()) * 0.5;
  const auto eig = herm_eig(sym, std::numeric_limits<double>::infinity());
  double total = 0.0;
  for (double x : eig.values) total += std::max(0.0, x);
  if (!(total > 0.0)) throw Error(ErrorCode::InvariantViolation, "no positive weight to project");
  return DensityMatrix(spectral_map(eig, [&](double x) { return std::max(0.0, x) / total; }));
}

/// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
inline double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dimension() != sigma.dimension()) {
    throw Error(ErrorCode::DimensionMismatch, "fidelity of unequal dimensions");
  }
  const auto root = psd_sqrt(rho.matrix());
  const auto eig = herm_eig(root * sigma.matrix() * root);
  double s = 0.0;
  for (double x : eig.values) s += x <= kSpectralFloor ? 0.0 : std::sqrt(x);
  return std::clamp(s * s, 0.0, 1.0);
}

namespace detail {

struct Observation {
  ComplexMatrix projector;
  double counts;
  double shots;
};

inline std::vector<Observation> observations(std::span<const CountRecord> records,
                                             std::span<const MeasurementSetting> settings) {
  std::vector<Observation> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    const auto it = std::find_if(settings.begin(), settings.end(),
                                 [&](const MeasurementSetting& s) { return s.label == r.setting; });
    if (it == settings.end()) {
      throw Error(ErrorCode::ParseError, "record for unknown setting '" + r.setting + "'");
    }
    if (r.shots < 1 || r.counts > r.shots) {
      throw Error(ErrorCode::InvariantViolation, "record '" + r.setting + "' has counts > shots");
    }
    out.push_back({it->projector(), static_cast<double>(r.counts), static_cast<double>(r.shots)});
  }
  return out;
}

inline std::vector<ComplexMatrix> two_qubit_pauli_basis() {
  const ComplexMatrix p[4] = {pauli::I(), pauli::X(), pauli::Y(), pauli::Z()};
  std::vector<ComplexMatrix> basis;
  for (const auto& a : p)
    for (const auto& b : p) basis.push_back(kron(a, b));
  return basis;
}

/// Least squares over the Pauli expansion rho = sum r_ij (s_i (x) s_j) / 4.
inline ComplexMatrix least_squares_state(std::span<const Observation> obs) {
  const auto basis = two_qubit_pauli_basis();
  const std::size_t m = obs.size();
  std::vector<double> design(m * 16);
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t q = 0; q < 16; ++q)
      design[k * 16 + q] = (obs[k].projector * basis[q]).trace().real() / 4.0;
  std::vector<double> normal(16 * 16, 0.0);
  std::vector<double> rhs(16, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    const double f = obs[k].counts / obs[k].shots;
    for (std::size_t a = 0; a < 16; ++a) {
      rhs[a] += design[k * 16 + a] * f;
      for (std::size_t b = 0; b < 16; ++b) normal[a * 16 + b] += design[k * 16 + a] * design[k * 16 + b];
    }
  }
  const auto coeffs = solve_linear(std::move(normal), std::move(rhs), 1e-10);
  if (!coeffs) throw Error(ErrorCode::RankDeficientDesign, "settings do not span the operator space");
  ComplexMatrix rho(4, 4);
  for (std::size_t q = 0; q < 16; ++q) rho += basis[q] * ((*coeffs)[q] / 4.0);
  return rho;
}

// Binomial log-likelihood, 0 log 0 = 0.
inline double log_likelihood(std::span<const Observation> obs, const ComplexMatrix& rho) {
  double total = 0.0;
  for (const auto& o : obs) {
    const double p = std::clamp((o.projector * rho).trace().real(), 0.0, 1.0);
    const double miss = o.shots - o.counts;
    if (o.counts > 0) total += o.counts * std::log(p);
    if (miss > 0) total += miss * std::log1p(-p);
  }
  return total;
}

}  // namespace detail

/// Linear inversion followed by the physicality projection.
inline DensityMatrix linear_inversion(std::span<const CountRecord> records,
                                      std::span<const MeasurementSetting> settings) {
  const auto obs = detail::observations(records, settings);
  return project_to_state(detail::least_squares_state(obs));
}

inline constexpr int kMleMaxRelaxation = 64;

struct ReconstructionReport {
  DensityMatrix estimate;
  std::optional<double> fidelity_to_truth;
  int iterations = 0;
  double log_likelihood = 0.0;
  std::vector<double> likelihood_trace;  // one entry per accepted iterate, starting point first
};

/// Maximum-likelihood estimate by the R rho R fixed-point iteration.
///
/// Each setting is a two-outcome POVM {P, I - P}; with all settings pooled
/// and weighted by their shots this is a proper POVM, so
/// R = sum_k [n_k P_k / p_k + (N_k - n_k)(I - P_k) / (1 - p_k)] / sum N_k
/// equals I at the optimum. A full step that would lower the likelihood is
/// replaced by the diluted step (I + eps R) rho (I + eps R) with eps halved
/// until it does not, so the likelihood never decreases.
inline ReconstructionReport mle_reconstruct(std::span<const CountRecord> records,
                                            std::span<const MeasurementSetting> settings,
                                            int max_iter, double tol,
                                            const std::optional<DensityMatrix>& truth = std::nullopt) {
  if (max_iter < 1) throw Error(ErrorCode::OutOfRange, "max_iter must be at least 1");
  const auto obs = detail::observations(records, settings);
  const auto linear = project_to_state(detail::least_squares_state(obs));
  ComplexMatrix rho = linear.matrix() * 0.99 + ComplexMatrix::identity(4) * (0.01 / 4.0);
  double total_shots = 0.0;
  for (const auto& o : obs) total_shots += o.shots;

  const auto id = ComplexMatrix::identity(4);
  double ll = detail::log_likelihood(obs, rho);
  std::vector<double> trace{ll};
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    ComplexMatrix r(4, 4);
    for (const auto& o : obs) {
      const double p = (o.projector * rho).trace().real();
      const double miss = o.shots - o.counts;
      if (o.counts > 0) r += o.projector * (o.counts / p);
      if (miss > 0) r += (id - o.projector) * (miss / (1.0 - p));
    }
    r *= 1.0 / total_shots;

    auto step = [&](const ComplexMatrix& op) {
      ComplexMatrix next = op * rho * op.adjoint();
      next = (next + next.adjoint()) * (0.5 / next.trace().real());
      return next;
    };
    ComplexMatrix next = step(r);
    double next_ll = detail::log_likelihood(obs, next);
    if (next_ll >= ll) {
      // over-relaxed steps R^t rho R^t, t = 2, 4, ..., kept while they help
      ComplexMatrix power = r;
      for (int t = 2; t <= kMleMaxRelaxation; t *= 2) {
        power = power * power;
        ComplexMatrix trial = step(power);
        const double trial_ll = detail::log_likelihood(obs, trial);
        if (!(trial_ll > next_ll)) break;
        next = std::move(trial);
        next_ll = trial_ll;
      }
    }
    double eps = 1.0;
    while (!(next_ll >= ll) && eps > 1e-12) {
      next = step(id + r * eps);
      next_ll = detail::log_likelihood(obs, next);
      eps *= 0.5;
    }
    if (!(next_ll >= ll)) break;
    const double gain = next_ll - ll;
    rho = std::move(next);
    ll = next_ll;
    trace.push_back(ll);
    if (gain < tol) {
      ++iter;
      break;
    }
  }

  // the iterate is PSD up to round-off; the projection only removes that
  ReconstructionReport report{project_to_state(rho), std::nullopt, iter, 0.0, std::move(trace)};
  report.log_likelihood = detail::log_likelihood(obs, report.estimate.matrix());
  if (truth) report.fidelity_to_truth = fidelity(report.estimate, *truth);
  return report;
}

/// Kraus operators from a Choi state's spectrum. Eigenvalues below `tol`
/// are dropped; one below -tol means the state is not completely positive.
/// The resulting set must be trace preserving within 1e-6.
inline QubitChannel kraus_from_choi(const ChoiState& choi, double tol = 1e-10) {
  QubitChannel ch(kraus_from_choi_matrix(choi.matrix(), tol, tol), choi.source_channel());
  if (!is_trace_preserving(ch, 1e-6)) {
    throw Error(ErrorCode::NotTracePreserving, "extracted Kraus set is not trace preserving");
  }
  return ch;
}

inline constexpr int kCptpMaxRounds = 50;
inline constexpr double kCptpResidualTol = 1e-8;

/// Nearest-in-spirit CPTP Choi state: alternate an eigenvalue clip with a
/// congruence that restores Tr_B = I/2, until both residuals are below 1e-8.
inline ChoiState project_to_channel(const ComplexMatrix& choi, const std::string& label) {
  ComplexMatrix j = choi;
  const auto half = ComplexMatrix::identity(2) * 0.5;
  for (int round = 0; round < kCptpMaxRounds; ++round) {
    const auto eig = herm_eig((j + j.adjoint()) * 0.5, std::numeric_limits<double>::infinity());
    j = spectral_map(eig, [](double x) { return std::max(0.0, x); });

    const auto marginal = partial_trace(j, Subsystem::Second);
    const auto meig = herm_eig(marginal * 2.0, std::numeric_limits<double>::infinity());
    if (meig.values.back() > 1e-12) {
      const auto c = kron(spectral_map(meig, [](double x) { return 1.0 / std::sqrt(x); }),
                          ComplexMatrix::identity(2));
      j = c * j * c.adjoint();
    } else {
      j += kron(half - marginal, half);
    }

    const double psd_residual = std::max(0.0, -herm_eig(j, 1e-6).values.back());
    const double tp_residual = frobenius_distance(partial_trace(j, Subsystem::Second), half);
    if (psd_residual < kCptpResidualTol && tp_residual < kCptpResidualTol) break;
  }
  j = (j + j.adjoint()) * (0.5 / j.trace().real());
  return ChoiState(DensityMatrix(j), label);
}

/// Binomial draws, or noiseless frequencies round(p * shots) / shots.
enum class Sampling { Binomial, Expected };

namespace detail {
// Stokes estimate from the six single-qubit projectors, without clipping so
// the linear recombination of the four input states stays unbiased.
inline ComplexMatrix single_qubit_estimate(const DensityMatrix& rho, std::uint64_t shots,
                                           std::uint64_t seed, std::uint64_t base_index,
                                           Sampling sampling) {
  const char letters[6] = {'H', 'V', 'D', 'A', 'R', 'L'};
  double f[6];
  for (std::size_t j = 0; j < 6; ++j) {
    const auto ket = polarization(letters[j]);
    const double p = std::clamp((ket.projector() * rho.matrix()).trace().real(), 0.0, 1.0);
    const double n = static_cast<double>(shots);
    if (sampling == Sampling::Expected) {
      f[j] = std::round(p * n) / n;
    } else {
      auto rng = setting_stream(seed, base_index + j);
      f[j] = static_cast<double>(draw_binomial(rng, shots, p)) / n;
    }
  }
  const double z = f[0] - f[1];
  const double x = f[2] - f[3];
  const double y = f[4] - f[5];
  return (pauli::I() + pauli::X() * x + pauli::Y() * y + pauli::Z() * z) * 0.5;
}
}  // namespace detail

struct ProcessTomographyResult {
  QubitChannel channel;
  ChoiState choi;
};

/// Tomographs the channel output for inputs H, V, D, R, rebuilds the Choi
/// state by linearity, projects it to CPTP form and extracts Kraus operators.
inline ProcessTomographyResult process_tomography_full(const QubitChannel& true_channel,
                                                      std::uint64_t shots, std::uint64_t seed,
                                                      Sampling sampling = Sampling::Binomial) {
  if (shots < 1) throw Error(ErrorCode::OutOfRange, "shots per setting must be positive");
  if (!is_trace_preserving(true_channel)) {
    throw Error(ErrorCode::NotTracePreserving, "process tomography needs a trace-preserving channel");
  }
  const char inputs[4] = {'H', 'V', 'D', 'R'};
  ComplexMatrix out[4];
  for (std::size_t s = 0; s < 4; ++s) {
    const auto rho_in = DensityMatrix(polarization(inputs[s]));
    out[s] = detail::single_qubit_estimate(apply_channel(rho_in, true_channel), shots, seed, 6 * s,
                                           sampling);
  }
  const Complex i(0.0, 1.0);
  const ComplexMatrix e00 = out[0];
  const ComplexMatrix e11 = out[1];
  const ComplexMatrix e01 = out[2] + out[3] * i - (out[0] + out[1]) * ((1.0 + i) / 2.0);
  const ComplexMatrix e10 = e01.adjoint();
  const ComplexMatrix* blocks[2][2] = {{&e00, &e01}, {&e10, &e11}};
  ComplexMatrix choi(4, 4);
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t c = 0; c < 2; ++c)
      for (std::size_t b = 0; b < 2; ++b)
        for (std::size_t d = 0; d < 2; ++d) choi(2 * a + b, 2 * c + d) = (*blocks[a][c])(b, d) * 0.5;

  auto projected = project_to_channel(choi, "tomo(" + true_channel.label() + ")");
  auto channel = kraus_from_choi(projected);
  return {std::move(channel), std::move(projected)};
}

inline QubitChannel process_tomography(const QubitChannel& true_channel, std::uint64_t shots,
                                       std::uint64_t seed, Sampling sampling = Sampling::Binomial) {
  return process_tomography_full(true_channel, shots, seed, sampling).channel;
}

/// Remixes `candidate` by the unitary that brings it closest (Frobenius) to
/// `reference`; both sets are zero-padded to a common length. This is the
/// orthogonal Procrustes problem on the stacked, flattened operators.
inline std::vector<ComplexMatrix> align_kraus(const std::vector<ComplexMatrix>& reference,
                                              const std::vector<ComplexMatrix>& candidate) {
  const std::size_t n = std::max(reference.size(), candidate.size());
  ComplexMatrix k(n, 4);
  ComplexMatrix l(n, 4);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < 4; ++c) {
      if (r < reference.size()) k(r, c) = reference[r](c / 2, c % 2);
      if (r < candidate.size()) l(r, c) = candidate[r](c / 2, c % 2);
    }
  const ComplexMatrix m = k * l.adjoint();
  const auto eig = herm_eig(m.adjoint() * m, std::numeric_limits<double>::infinity());
  const double top = std::max(eig.values.front(), 0.0);

  // V = sum_k u_k w_k^dagger with u_k = M w_k / s_k, completed by Gram-Schmidt.
  std::vector<std::vector<Complex>> u;
  std::vector<std::size_t> pending;
  for (std::size_t q = 0; q < n; ++q) {
    const double s2 = eig.values[q];
    if (s2 > 1e-20 * std::max(1.0, top) && s2 > 0.0) {
      std::vector<Complex> col(n);
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) col[r] += m(r, c) * eig.vectors(c, q);
      const double s = std::sqrt(s2);
      for (auto& z : col) z /= s;
      u.push_back(std::move(col));
    } else {
      u.emplace_back();
      pending.push_back(q);
    }
  }
  for (std::size_t q : pending) {
    for (std::size_t e = 0; e < n; ++e) {
      std::vector<Complex> col(n, 0.0);
      col[e] = 1.0;
      for (const auto& prev : u) {
        if (prev.empty()) continue;
        Complex dot = 0.0;
        for (std::size_t r = 0; r < n; ++r) dot += std::conj(prev[r]) * col[r];
        for (std::size_t r = 0; r < n; ++r) col[r] -= dot * prev[r];
      }
      double nrm = 0.0;
      for (const auto& z : col) nrm += std::norm(z);
      if (nrm > 1e-6) {
        for (auto& z : col) z /= std::sqrt(nrm);
        u[q] = std::move(col);
        break;
      }
    }
  }
  ComplexMatrix v(n, n);
  for (std::size_t q = 0; q < n; ++q)
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) v(r, c) += u[q][r] * std::conj(eig.vectors(c, q));

  const ComplexMatrix aligned = v * l;
  std::vector<ComplexMatrix> out;
  for (std::size_t r = 0; r < n; ++r) {
    ComplexMatrix op(2, 2);
    for (std::size_t c = 0; c < 4; ++c) op(c / 2, c % 2) = aligned(r, c);
    out.push_back(std::move(op));
  }
  return out;
}

}  // namespace esdlab
