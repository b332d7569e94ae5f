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

// Random generators and independent oracles shared by the test suites.
// Oracles here deliberately avoid the library's own algorithms: they use
// index arithmetic and closed forms instead of eigensolvers where possible.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "esdlab/esdlab.hpp"

namespace esdlab::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }
  Complex complex_normal() { return {normal(), normal()}; }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double phase() { return uniform(0.0, 2.0 * std::numbers::pi); }

  ComplexMatrix ginibre(std::size_t rows, std::size_t cols) {
    ComplexMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) m(r, c) = complex_normal();
    return m;
  }

  ComplexMatrix hermitian(std::size_t n) {
    const auto g = ginibre(n, n);
    return (g + g.adjoint()) * 0.5;
  }

  /// Gram-Schmidt on a Ginibre matrix gives a Haar unitary.
  ComplexMatrix unitary(std::size_t n) {
    auto m = ginibre(n, n);
    for (std::size_t c = 0; c < n; ++c) {
      for (std::size_t p = 0; p < c; ++p) {
        Complex dot = 0.0;
        for (std::size_t r = 0; r < n; ++r) dot += std::conj(m(r, p)) * m(r, c);
        for (std::size_t r = 0; r < n; ++r) m(r, c) -= dot * m(r, p);
      }
      double nrm = 0.0;
      for (std::size_t r = 0; r < n; ++r) nrm += std::norm(m(r, c));
      nrm = std::sqrt(nrm);
      for (std::size_t r = 0; r < n; ++r) m(r, c) /= nrm;
    }
    return m;
  }

  PureState pure(std::size_t dim) {
    std::vector<Complex> v(dim);
    for (auto& z : v) z = complex_normal();
    return PureState::normalized(std::move(v));
  }

  /// Random density matrix of the given rank (Ginibre G G^dagger / Tr).
  DensityMatrix density(std::size_t dim, std::size_t rank = 0) {
    if (rank == 0) rank = dim;
    const auto g = ginibre(dim, rank);
    auto m = g * g.adjoint();
    m *= 1.0 / m.trace().real();
    return DensityMatrix(m);
  }

  /// Random X-state: random populations, coherences inside the positivity bound.
  DensityMatrix x_state() {
    std::array<double, 4> pop{};
    double total = 0.0;
    for (auto& p : pop) {
      p = -std::log(uniform(1e-12, 1.0));
      total += p;
    }
    for (auto& p : pop) p /= total;
    ComplexMatrix m(4, 4);
    for (std::size_t i = 0; i < 4; ++i) m(i, i) = pop[i];
    const Complex c14 = std::polar(uniform() * std::sqrt(pop[0] * pop[3]), phase());
    const Complex c23 = std::polar(uniform() * std::sqrt(pop[1] * pop[2]), phase());
    m(0, 3) = c14;
    m(3, 0) = std::conj(c14);
    m(1, 2) = c23;
    m(2, 1) = std::conj(c23);
    return DensityMatrix(m);
  }

  ChannelKind channel_kind() {
    static constexpr ChannelKind kinds[] = {ChannelKind::AmplitudeDamping, ChannelKind::PhaseDamping,
                                            ChannelKind::BitFlip, ChannelKind::Depolarizing,
                                            ChannelKind::Identity};
    return kinds[integer(0, 4)];
  }

  QubitChannel standard() { return standard_channel(channel_kind(), uniform()); }

  /// Random channel as a unitary dilation: K_k = <k| U |0> on a 2x4 environment.
  QubitChannel random_channel(std::size_t nkraus = 4) {
    const auto u = unitary(2 * nkraus);
    std::vector<ComplexMatrix> ops;
    for (std::size_t k = 0; k < nkraus; ++k) {
      ComplexMatrix op(2, 2);
      for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t c = 0; c < 2; ++c) op(r, c) = u(2 * k + r, c);
      ops.push_back(std::move(op));
    }
    return QubitChannel(std::move(ops), "random");
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline ComplexMatrix local_unitary(const ComplexMatrix& rho, const ComplexMatrix& ua,
                                   const ComplexMatrix& ub) {
  const auto u = kron(ua, ub);
  return u * rho * u.adjoint();
}

// Oracles

/// sigma_y (x) sigma_y is antidiag(-1, 1, 1, -1), so the spin flip is pure
/// index arithmetic: out(i, j) = s_i s_j conj(rho(3 - i, 3 - j)).
inline ComplexMatrix oracle_spin_flip(const ComplexMatrix& rho) {
  static constexpr double s[4] = {-1.0, 1.0, 1.0, -1.0};
  ComplexMatrix out(4, 4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) out(i, j) = s[i] * s[j] * std::conj(rho(3 - i, 3 - j));
  return out;
}

inline double oracle_x_concurrence(const ComplexMatrix& rho) {
  const double a = std::abs(rho(0, 3)) - std::sqrt(rho(1, 1).real() * rho(2, 2).real());
  const double b = std::abs(rho(1, 2)) - std::sqrt(rho(0, 0).real() * rho(3, 3).real());
  return 2.0 * std::max({0.0, a, b});
}

/// E applied to a 2x2 operator by the Kraus sum.
inline ComplexMatrix oracle_apply(const QubitChannel& ch, const ComplexMatrix& x) {
  ComplexMatrix out(2, 2);
  for (const auto& k : ch.kraus()) out += k * x * k.adjoint();
  return out;
}

inline ComplexMatrix unit(std::size_t a, std::size_t b) {
  ComplexMatrix e(2, 2);
  e(a, b) = 1.0;
  return e;
}

/// Choi matrix from the four basis images: (1/2) sum |a><b| (x) E(|a><b|).
template <class Map>
ComplexMatrix oracle_choi(Map&& map) {
  ComplexMatrix out(4, 4);
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b) out += kron(unit(a, b), map(unit(a, b))) * 0.5;
  return out;
}

inline ComplexMatrix oracle_choi(const QubitChannel& ch) {
  return oracle_choi([&](const ComplexMatrix& x) { return oracle_apply(ch, x); });
}

/// (I (x) E)(rho) by explicit block action: block (a, b) of rho maps to E(block).
inline ComplexMatrix oracle_apply_b(const QubitChannel& ch, const ComplexMatrix& rho) {
  ComplexMatrix out(4, 4);
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b) {
      ComplexMatrix block(2, 2);
      for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) block(i, j) = rho(2 * a + i, 2 * b + j);
      const auto img = oracle_apply(ch, block);
      for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) out(2 * a + i, 2 * b + j) = img(i, j);
    }
  return out;
}

inline double max_abs(const ComplexMatrix& m) {
  double out = 0.0;
  for (const auto& z : m.entries()) out = std::max(out, std::abs(z));
  return out;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  const char* env = std::getenv("ESDLAB_TEST_TMP");
  std::filesystem::path base = env ? env : std::filesystem::temp_directory_path() / "esdlab-tests";
  auto dir = base / name;
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace esdlab::testing
