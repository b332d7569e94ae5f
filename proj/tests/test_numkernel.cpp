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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "test_support.hpp"

namespace esdlab {
namespace {

using testing::Gen;

ComplexMatrix phi_plus_projector() { return bell_state(BellKind::PhiPlus).projector(); }

TEST(ComplexMatrix, RejectsNonFiniteAndBadShapes) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(ComplexMatrix(1, 1, {Complex(nan, 0.0)}), Error);
  EXPECT_THROW(ComplexMatrix(2, 2, {1.0, 2.0, 3.0}), Error);
  try {
    (void)(ComplexMatrix(2, 3) * ComplexMatrix(2, 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(Kron, IdentityAndProjector) {
  EXPECT_EQ(kron(ComplexMatrix::identity(2), ComplexMatrix::identity(2)), ComplexMatrix::identity(4));
  EXPECT_EQ(kron(ComplexMatrix::diagonal({1.0, 0.0}), ComplexMatrix::diagonal({1.0, 0.0})),
            ComplexMatrix::diagonal({1.0, 0.0, 0.0, 0.0}));
  const auto k = kron(ComplexMatrix(2, 3), ComplexMatrix(3, 1));
  EXPECT_EQ(k.rows(), 6u);
  EXPECT_EQ(k.cols(), 3u);
}

TEST(Kron, SpinFlipConjugationMatchesIndexOracle) {
  Gen gen(11);
  const auto yy = kron(pauli::Y(), pauli::Y());
  for (int t = 0; t < 50; ++t) {
    const auto m = gen.ginibre(4, 4);
    EXPECT_LT(frobenius_distance(yy * m.conjugate() * yy, testing::oracle_spin_flip(m)), 1e-14);
  }
}

TEST(Kron, AssociativeAndBilinear) {
  Gen gen(12);
  for (int t = 0; t < 100; ++t) {
    const auto a = gen.ginibre(2, 2);
    const auto b = gen.ginibre(2, 2);
    const auto c = gen.ginibre(2, 2);
    const Complex s = gen.complex_normal();
    EXPECT_LT(frobenius_distance(kron(kron(a, b), c), kron(a, kron(b, c))), 1e-12);
    EXPECT_LT(frobenius_distance(kron(a + c * s, b), kron(a, b) + kron(c, b) * s), 1e-12);
    EXPECT_LT(frobenius_distance(kron(a, b + c * s), kron(a, b) + kron(a, c) * s), 1e-12);
  }
}

TEST(PartialTrace, Examples) {
  EXPECT_LT(frobenius_distance(partial_trace(phi_plus_projector(), Subsystem::Second),
                               ComplexMatrix::identity(2) * 0.5),
            1e-15);
  EXPECT_LT(frobenius_distance(partial_trace(basis_state(0, 1).projector(), Subsystem::Second),
                               ComplexMatrix::diagonal({1.0, 0.0})),
            1e-15);
  const auto rho = mixed_family(0.5, 0.25).matrix();
  // explicit sum over the traced index
  ComplexMatrix explicit_sum(2, 2);
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t c = 0; c < 2; ++c)
      for (std::size_t b = 0; b < 2; ++b) explicit_sum(a, c) += rho(2 * a + b, 2 * c + b);
  const auto reduced = partial_trace(rho, Subsystem::Second);
  EXPECT_LT(frobenius_distance(reduced, explicit_sum), 1e-15);
  EXPECT_LT(frobenius_distance(reduced, ComplexMatrix::diagonal({0.625, 0.375})), 1e-12);
}

TEST(PartialTrace, ProductStates) {
  Gen gen(13);
  for (int t = 0; t < 100; ++t) {
    const auto a = gen.ginibre(2, 2);
    const auto b = gen.ginibre(2, 2);
    const auto ab = kron(a, b);
    EXPECT_LT(frobenius_distance(partial_trace(ab, Subsystem::First), b * a.trace()), 1e-12);
    EXPECT_LT(frobenius_distance(partial_trace(ab, Subsystem::Second), a * b.trace()), 1e-12);
  }
  EXPECT_THROW(partial_trace(ComplexMatrix::identity(2), Subsystem::First), Error);
}

TEST(PartialTranspose, InvolutionProductAndTrace) {
  Gen gen(14);
  for (int t = 0; t < 100; ++t) {
    const auto m = gen.ginibre(4, 4);
    for (auto s : {Subsystem::First, Subsystem::Second}) {
      EXPECT_EQ(partial_transpose(partial_transpose(m, s), s), m);
      EXPECT_LT(std::abs(partial_transpose(m, s).trace() - m.trace()), 1e-12);
    }
    const auto a = gen.density(2).matrix();
    const auto b = gen.density(2).matrix();
    EXPECT_EQ(partial_transpose(kron(a, b), Subsystem::Second), kron(a, b.transpose()));
    EXPECT_EQ(partial_transpose(kron(a, b), Subsystem::First), kron(a.transpose(), b));
  }
}

TEST(PartialTranspose, BellStateMinimumEigenvalue) {
  const auto pt = partial_transpose(phi_plus_projector(), Subsystem::Second);
  // the partial transpose of |phi+><phi+| is the swap operator over 2
  ComplexMatrix swap(4, 4);
  swap(0, 0) = swap(3, 3) = 0.5;
  swap(1, 2) = swap(2, 1) = 0.5;
  EXPECT_LT(frobenius_distance(pt, swap), 1e-15);
  EXPECT_NEAR(herm_eig(pt).values.back(), -0.5, 1e-12);
}

TEST(HermEig, DiagonalAndPauli) {
  const auto d = herm_eig(ComplexMatrix::diagonal({3.0, 1.0, 2.0, 0.0}));
  ASSERT_EQ(d.values.size(), 4u);
  EXPECT_DOUBLE_EQ(d.values[0], 3.0);
  EXPECT_DOUBLE_EQ(d.values[1], 2.0);
  EXPECT_DOUBLE_EQ(d.values[2], 1.0);
  EXPECT_DOUBLE_EQ(d.values[3], 0.0);

  const auto x = herm_eig(pauli::X());
  EXPECT_NEAR(x.values[0], 1.0, 1e-14);
  EXPECT_NEAR(x.values[1], -1.0, 1e-14);
  const double h = std::sqrt(0.5);
  // phase rule: the largest-magnitude entry (first on ties) is real positive
  EXPECT_NEAR(std::abs(x.vectors(0, 0) - h), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(x.vectors(1, 0) - h), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(x.vectors(0, 1) - h), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(x.vectors(1, 1) + h), 0.0, 1e-12);
}

TEST(HermEig, RecoversConstructedSpectrum) {
  Gen gen(15);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = t % 2 ? 4 : 2;
    const auto v = gen.unitary(n);
    std::vector<double> d(n);
    for (auto& x : d) x = gen.uniform(-3.0, 3.0);
    const auto m = v * ComplexMatrix::diagonal(d) * v.adjoint();
    const auto eig = herm_eig(m);
    std::sort(d.begin(), d.end(), std::greater<>());
    for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(eig.values[k], d[k], 1e-10);

    EXPECT_LT(frobenius_distance(eig.vectors.adjoint() * eig.vectors, ComplexMatrix::identity(n)),
              1e-10);
    EXPECT_LT(frobenius_distance(eig.vectors * ComplexMatrix::diagonal(eig.values) *
                                     eig.vectors.adjoint(),
                                 m),
              1e-10);
    double sum = 0.0;
    for (double x : eig.values) sum += x;
    EXPECT_NEAR(sum, m.trace().real(), 1e-10);
  }
}

TEST(HermEig, DegenerateAndDeterministic) {
  Gen gen(16);
  const auto v = gen.unitary(4);
  const auto m = v * ComplexMatrix::diagonal({1.0, 1.0, -2.0, -2.0}) * v.adjoint();
  const auto a = herm_eig(m);
  const auto b = herm_eig(m);
  EXPECT_EQ(a.vectors, b.vectors);
  EXPECT_LT(frobenius_distance(a.vectors * ComplexMatrix::diagonal(a.values) * a.vectors.adjoint(), m),
            1e-10);
  for (std::size_t k = 0; k < 4; ++k) {
    std::size_t big = 0;
    for (std::size_t r = 1; r < 4; ++r)
      if (std::abs(a.vectors(r, k)) > std::abs(a.vectors(big, k)) + 1e-12) big = r;
    EXPECT_NEAR(a.vectors(big, k).imag(), 0.0, 1e-12);
    EXPECT_GT(a.vectors(big, k).real(), 0.0);
  }
}

TEST(HermEig, Errors) {
  ComplexMatrix m = ComplexMatrix::identity(2);
  m(0, 1) = 1e-3;
  try {
    herm_eig(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotHermitian);
  }
  // within tolerance it is symmetrized instead
  m(0, 1) = 1e-10;
  EXPECT_NO_THROW(herm_eig(m));
  EXPECT_THROW(herm_eig(ComplexMatrix(2, 3)), Error);
}

TEST(PsdSqrt, Examples) {
  EXPECT_LT(frobenius_distance(psd_sqrt(ComplexMatrix::identity(4)), ComplexMatrix::identity(4)),
            1e-14);
  EXPECT_LT(frobenius_distance(psd_sqrt(ComplexMatrix::diagonal({4.0, 1.0, 0.0, 9.0})),
                               ComplexMatrix::diagonal({2.0, 1.0, 0.0, 3.0})),
            1e-14);
  try {
    psd_sqrt(ComplexMatrix::diagonal({1.0, -1e-3}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotPSD);
  }
  // tiny negative eigenvalues are clamped
  const auto s = psd_sqrt(ComplexMatrix::diagonal({1.0, -1e-12}));
  EXPECT_EQ(s(1, 1), Complex(0.0));
}

TEST(PsdSqrt, MultiplyBackAndCommute) {
  Gen gen(17);
  for (int t = 0; t < 100; ++t) {
    const auto rho = gen.density(t % 2 ? 4 : 2, 1 + t % 4).matrix();
    const auto s = psd_sqrt(rho);
    EXPECT_LT(frobenius_distance(s * s, rho), 1e-9);
    EXPECT_LT(hermiticity_defect(s), 1e-12);
    EXPECT_GE(herm_eig(s).values.back(), -1e-12);
    EXPECT_LT(frobenius_distance(s * rho, rho * s), 1e-9);
  }
}

TEST(FrobeniusDistance, Properties) {
  Gen gen(18);
  const auto m = gen.ginibre(3, 2);
  EXPECT_EQ(frobenius_distance(m, m), 0.0);
  EXPECT_NEAR(frobenius_distance(ComplexMatrix::identity(2), ComplexMatrix(2, 2)), std::sqrt(2.0),
              1e-15);
  for (int t = 0; t < 50; ++t) {
    const auto a = gen.ginibre(4, 4);
    const auto b = gen.ginibre(4, 4);
    EXPECT_EQ(frobenius_distance(a, b), frobenius_distance(b, a));
    EXPECT_GT(frobenius_distance(a, b), 0.0);
  }
  EXPECT_THROW(frobenius_distance(ComplexMatrix(2, 2), ComplexMatrix(4, 4)), Error);
}

TEST(SolveLinear, SolvesAndDetectsSingular) {
  const auto x = solve_linear({2.0, 1.0, 1.0, 3.0}, {3.0, 5.0});
  ASSERT_TRUE(x.has_value());
  EXPECT_NEAR((*x)[0], 0.8, 1e-14);
  EXPECT_NEAR((*x)[1], 1.4, 1e-14);
  EXPECT_FALSE(solve_linear({1.0, 2.0, 2.0, 4.0}, {1.0, 2.0}).has_value());
}

}  // namespace
}  // namespace esdlab
