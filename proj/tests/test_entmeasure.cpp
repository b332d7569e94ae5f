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

#include "test_support.hpp"

namespace esdlab {
namespace {

using testing::Gen;

DensityMatrix phi_plus() { return DensityMatrix(bell_state(BellKind::PhiPlus)); }

TEST(SpinFlip, Examples) {
  EXPECT_LT(frobenius_distance(spin_flip(phi_plus()), phi_plus().matrix()), 1e-15);
  EXPECT_LT(frobenius_distance(spin_flip(DensityMatrix(basis_state(0, 0))),
                               basis_state(1, 1).projector()),
            1e-15);
  Gen gen(31);
  for (int t = 0; t < 100; ++t) {
    const auto rho = gen.density(4);
    const auto flipped = spin_flip(rho);
    EXPECT_LT(frobenius_distance(flipped, testing::oracle_spin_flip(rho.matrix())), 1e-14);
    EXPECT_LT(frobenius_distance(spin_flip(DensityMatrix(flipped)), rho.matrix()), 1e-14);
  }
}

TEST(Concurrence, Examples) {
  EXPECT_NEAR(concurrence(phi_plus()).value, 1.0, 1e-12);
  EXPECT_EQ(concurrence(DensityMatrix::maximally_mixed(4)).value, 0.0);
  const auto damped =
      apply_channel(phi_plus(), standard_channel(ChannelKind::AmplitudeDamping, 0.64), Side::B);
  EXPECT_NEAR(concurrence(damped).value, 0.6, 1e-10);
}

TEST(Concurrence, ResultInvariants) {
  Gen gen(32);
  for (int t = 0; t < 500; ++t) {
    const auto rho = gen.density(4, 1 + t % 4);
    const auto r = concurrence(rho);
    EXPECT_GE(r.value, 0.0);
    EXPECT_LE(r.value, 1.0);
    for (std::size_t i = 0; i < 4; ++i) {
      EXPECT_GE(r.lambdas[i], 0.0);
      if (i > 0) {
        EXPECT_GE(r.lambdas[i - 1], r.lambdas[i]);
      }
    }
    const auto& l = r.lambdas;
    EXPECT_NEAR(r.value, std::max(0.0, l[0] - l[1] - l[2] - l[3]), 1e-10);
  }
}

TEST(Concurrence, MatchesXStateClosedForm) {
  Gen gen(33);
  for (int t = 0; t < 1000; ++t) {
    const auto rho = gen.x_state();
    EXPECT_NEAR(concurrence(rho).value, testing::oracle_x_concurrence(rho.matrix()), 1e-10);
  }
}

TEST(Concurrence, SchmidtFormAndPureAgreement) {
  for (int k = 0; k <= 40; ++k) {
    const double w = k / 40.0;
    const PureState psi({std::sqrt(w), 0.0, 0.0, std::sqrt(1.0 - w)});
    const double expect = 2.0 * std::sqrt(w * (1.0 - w));
    EXPECT_NEAR(concurrence(DensityMatrix(psi)).value, expect, 1e-10);
    EXPECT_NEAR(concurrence_pure(psi), expect, 1e-14);
  }
  Gen gen(34);
  for (int t = 0; t < 500; ++t) {
    const auto psi = gen.pure(4);
    EXPECT_NEAR(concurrence(DensityMatrix(psi)).value, concurrence_pure(psi), 1e-9);
  }
}

TEST(ConcurrencePure, Examples) {
  EXPECT_NEAR(concurrence_pure(bell_state(BellKind::PhiPlus)), 1.0, 1e-15);
  EXPECT_EQ(concurrence_pure(basis_state(0, 0)), 0.0);
  const PureState psi({std::sqrt(0.625), 0.0, 0.0, std::sqrt(0.375)});
  EXPECT_NEAR(concurrence_pure(psi), 0.96825, 1e-5);
  EXPECT_THROW(concurrence_pure(PureState({1.0, 0.0})), Error);
}

TEST(Concurrence, LocalUnitaryInvariance) {
  Gen gen(35);
  for (int t = 0; t < 300; ++t) {
    const auto rho = gen.density(4, 1 + t % 4);
    const auto moved = DensityMatrix(testing::local_unitary(rho.matrix(), gen.unitary(2), gen.unitary(2)));
    EXPECT_NEAR(concurrence(moved).value, concurrence(rho).value, 1e-9);
  }
}

TEST(Concurrence, MonotoneUnderLocalChannels) {
  Gen gen(36);
  for (int t = 0; t < 300; ++t) {
    const auto rho = gen.density(4, 1 + t % 4);
    const auto ch = t % 2 ? gen.standard() : gen.random_channel(2);
    EXPECT_LE(concurrence(apply_channel(rho, ch, Side::B)).value, concurrence(rho).value + 1e-9);
  }
}

TEST(NegativityPpt, Examples) {
  const auto bell = negativity_ppt(phi_plus());
  EXPECT_NEAR(bell.min_eigenvalue, -0.5, 1e-12);
  EXPECT_FALSE(bell.is_ppt);
  const auto mixed = negativity_ppt(DensityMatrix::maximally_mixed(4));
  EXPECT_NEAR(mixed.min_eigenvalue, 0.25, 1e-15);
  EXPECT_TRUE(mixed.is_ppt);
}

TEST(NegativityPpt, AgreesWithConcurrence) {
  Gen gen(37);
  int separable = 0;
  for (int t = 0; t < 1000; ++t) {
    // mixing toward I/4 puts a fair share of samples on each side
    const auto base = gen.density(4, 1 + t % 4).matrix();
    const double lam = gen.uniform();
    const auto rho = DensityMatrix(base * lam + ComplexMatrix::identity(4) * ((1.0 - lam) / 4.0));
    const double c = concurrence(rho).value;
    const auto ppt = negativity_ppt(rho);
    // skip the measure-zero band where both tests sit at round-off
    if (std::abs(ppt.min_eigenvalue) < 1e-9) continue;
    EXPECT_EQ(ppt.is_ppt, c <= kConcurrenceClamp) << "sample " << t << " C=" << c;
    separable += ppt.is_ppt;
  }
  EXPECT_GT(separable, 100);
  EXPECT_LT(separable, 900);
}

TEST(EntanglementBreaking, Depolarizing) {
  EXPECT_TRUE(is_entanglement_breaking(standard_channel(ChannelKind::Depolarizing, 2.0 / 3.0 + 1e-6)));
  EXPECT_FALSE(is_entanglement_breaking(standard_channel(ChannelKind::Depolarizing, 2.0 / 3.0 - 1e-3)));
  // Choi state (1-p)|phi+><phi+| + p I/4; its partial transpose has spectrum
  // 1/2 - p/4 (three times) and 3p/4 - 1/2
  for (int k = 0; k <= 20; ++k) {
    const double p = k / 20.0;
    const auto choi = choi_state(standard_channel(ChannelKind::Depolarizing, p));
    EXPECT_NEAR(negativity_ppt(choi.state()).min_eigenvalue, 0.75 * p - 0.5, 1e-12);
  }
}

TEST(EntanglementBreaking, DampingOnlyAtFullStrength) {
  for (int k = 1; k <= 9; ++k) {
    EXPECT_FALSE(is_entanglement_breaking(standard_channel(ChannelKind::AmplitudeDamping, k / 10.0)));
    EXPECT_FALSE(is_entanglement_breaking(standard_channel(ChannelKind::PhaseDamping, k / 10.0)));
  }
  EXPECT_TRUE(is_entanglement_breaking(standard_channel(ChannelKind::AmplitudeDamping, 1.0)));
  EXPECT_TRUE(is_entanglement_breaking(standard_channel(ChannelKind::PhaseDamping, 1.0)));
  EXPECT_FALSE(is_entanglement_breaking(standard_channel(ChannelKind::Identity)));
  EXPECT_THROW(is_entanglement_breaking(QubitChannel({ComplexMatrix::identity(2) * 0.5}, "half")),
               Error);
}

TEST(EntanglementBreaking, MatchesChoiConcurrence) {
  Gen gen(38);
  for (int t = 0; t < 300; ++t) {
    const auto ch = t % 2 ? gen.standard() : gen.random_channel(1 + t % 4);
    const auto choi = choi_state(ch);
    const auto ppt = negativity_ppt(choi.state());
    if (std::abs(ppt.min_eigenvalue) < 1e-9) continue;
    EXPECT_EQ(is_entanglement_breaking(ch), concurrence(choi.state()).value <= kConcurrenceClamp);
  }
}

}  // namespace
}  // namespace esdlab
