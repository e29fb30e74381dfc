// Copyright 2026 The seqfisher Authors
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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "seqfisher/channels.hpp"
#include "seqfisher/models.hpp"
#include "seqfisher/qcore.hpp"
#include "util.hpp"

using namespace seqfisher;
using namespace seqfisher::channels;
using qcore::DensityMatrix;
using testutil::max_abs_diff;

namespace {

Povm coarse_povm(int levels) {
  CMatrix e0 = CMatrix::Zero(levels, levels);
  e0(0, 0) = 1.0;
  CMatrix e1 = CMatrix::Identity(levels, levels) - e0;
  return Povm({e0, e1});
}

CMatrix swap_gate() {
  CMatrix u = CMatrix::Zero(4, 4);
  u(0, 0) = 1.0;
  u(1, 2) = 1.0;
  u(2, 1) = 1.0;
  u(3, 3) = 1.0;
  return u;
}

}  // namespace

TEST_CASE("projective basis validation and constructions") {
  CHECK_NOTHROW(ProjectiveBasis::computational(5));
  const auto sy = ProjectiveBasis::bloch(std::numbers::pi / 2.0,
                                         std::numbers::pi / 2.0);
  CHECK(std::abs(sy.vector(0)[1] - Complex(0.0, 1.0 / std::sqrt(2.0))) <
        1e-15);

  CVector v0(2), v1(2);
  v0 << 1.0, 0.0;
  v1 << 0.1, 1.0;  // not orthogonal
  CHECK_THROWS_AS(ProjectiveBasis({v0, v1}), NumericError);
}

TEST_CASE("povm validation") {
  CHECK_NOTHROW(coarse_povm(4));
  CMatrix half = 0.5 * CMatrix::Identity(2, 2);
  CHECK_THROWS_AS(Povm({half, 0.4 * CMatrix::Identity(2, 2)}), NumericError);
  CMatrix neg(2, 2);
  neg << 1.5, 0, 0, -0.5;
  CHECK_THROWS_AS(Povm({neg, CMatrix::Identity(2, 2) - neg}), NumericError);
}

TEST_CASE("outcome probabilities") {
  const auto basis = ProjectiveBasis::computational(2);
  SUBCASE("pure basis state is deterministic") {
    const auto p = outcome_probabilities(
        DensityMatrix::pure(CVector::Unit(2, 0)), basis);
    CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(p[1] == doctest::Approx(0.0).epsilon(1e-14));
  }
  SUBCASE("maximally mixed state is isotropic") {
    for (double theta : {0.0, 0.7, 2.1}) {
      const auto p = outcome_probabilities(DensityMatrix::maximally_mixed(2),
                                           ProjectiveBasis::bloch(theta, 0.3));
      CHECK(std::abs(p[0] - 0.5) < 1e-14);
      CHECK(std::abs(p[1] - 0.5) < 1e-14);
    }
  }
  SUBCASE("thermal probe in the energy basis") {
    const auto thermal =
        DensityMatrix::diagonal(models::thermal_distribution(4, 1.0));
    const auto p =
        outcome_probabilities(thermal, ProjectiveBasis::computational(4));
    CHECK(p[0] == doctest::Approx(0.4).epsilon(1e-14));
    for (int i = 1; i < 4; ++i)
      CHECK(p[i] == doctest::Approx(0.2).epsilon(1e-14));
  }
  SUBCASE("dimension mismatch rejected") {
    CHECK_THROWS_AS(outcome_probabilities(DensityMatrix::maximally_mixed(3),
                                          Measurement(basis)),
                    DimensionError);
  }
  SUBCASE("roundoff-negative value clamped, then renormalized") {
    CMatrix e0(2, 2);
    e0 << 1.0, 0.0, 0.0, -5e-13;  // PSD within tolerance
    const Povm povm({e0, CMatrix::Identity(2, 2) - e0});
    const auto p = outcome_probabilities(
        DensityMatrix::pure(CVector::Unit(2, 1)), povm);
    CHECK(p[0] == 0.0);
    CHECK(p[1] == 1.0);
  }
}

TEST_CASE("collapse") {
  Rng rng(5);
  SUBCASE("projective collapse gives the exact basis projector") {
    const auto basis = ProjectiveBasis::computational(3);
    const DensityMatrix rho(random_density(rng, 3));
    for (int k = 0; k < 3; ++k) {
      const auto out = collapse(rho, basis, k);
      CHECK(max_abs_diff(out.matrix(), basis.projector(k)) == 0.0);
    }
  }
  SUBCASE("coarse effect renormalizes the excited block") {
    const auto thermal =
        DensityMatrix::diagonal(models::thermal_distribution(4, 1.0));
    const auto out = collapse(thermal, coarse_povm(4), 1);
    RVector expected(4);
    expected << 0.0, 1.0 / 3, 1.0 / 3, 1.0 / 3;
    CHECK(max_abs_diff(out.populations(), expected) < 1e-14);
  }
  SUBCASE("zero-probability outcome raises") {
    const auto basis = ProjectiveBasis::computational(2);
    CHECK_THROWS_AS(
        collapse(DensityMatrix::pure(CVector::Unit(2, 0)), basis, 1),
        ZeroProbabilityError);
  }
}

TEST_CASE("measure-evolve step") {
  const models::ThermometryModel m(2, 1.0);
  SUBCASE("projective step erases the input state") {
    const auto s = models::thermo_step(m);
    Rng rng(17);
    const DensityMatrix rho1(random_density(rng, 2));
    const DensityMatrix rho2(random_density(rng, 2));
    for (int omega = 0; omega < 2; ++omega)
      CHECK(max_abs_diff(step(rho1, s, omega).matrix(),
                         step(rho2, s, omega).matrix()) < 1e-12);
  }
  SUBCASE("zero waiting time returns the projector") {
    const models::ThermometryModel m0(
        2, 1.0, models::ThermoMeasurement::full_energy_basis, 0.0, 0.0);
    const auto s = models::thermo_step(m0);
    const auto out = step(DensityMatrix::maximally_mixed(2), s, 1);
    CHECK(std::abs(out.matrix()(1, 1).real() - 1.0) < 1e-12);
  }
  SUBCASE("thermometry step reproduces the closed-form column") {
    // After outcome 0 the populations are (P(0|0), P(1|0)) with
    // P(0|0) = 1 − (1/3)(1−e^{−3}) for D=2, nbar=1, gtau=1.
    const auto s = models::thermo_step(m);
    const auto out = step(DensityMatrix::maximally_mixed(2), s, 0);
    const double p00 = 1.0 - (1.0 / 3.0) * (1.0 - std::exp(-3.0));
    CHECK(std::abs(out.matrix()(0, 0).real() - p00) < 1e-12);
    CHECK(std::abs(out.matrix()(1, 1).real() - (1.0 - p00)) < 1e-12);
    CHECK(p00 == doctest::Approx(0.68326).epsilon(1e-5));
  }
  SUBCASE("step validation") {
    const auto gen = models::thermo_liouvillian(2, 1.0);
    const auto prop = qcore::propagate(gen, 1.0);
    CHECK_THROWS_AS(
        MeasureEvolveStep(ProjectiveBasis::computational(2), {prop}, {1.0}),
        DimensionError);
    CHECK_THROWS_AS(MeasureEvolveStep(ProjectiveBasis::computational(2),
                                      {prop, prop}, {1.0, -1.0}),
                    DimensionError);
  }
}

TEST_CASE("collision POVM") {
  const auto aux = ProjectiveBasis::computational(2);
  Rng rng(23);
  SUBCASE("swap measures the system directly") {
    const auto povm = collision_povm(swap_gate(),
                                     DensityMatrix(random_density(rng, 2)),
                                     aux);
    for (int i = 0; i < 2; ++i) {
      CMatrix expected = CMatrix::Zero(2, 2);
      expected(i, i) = 1.0;
      CHECK(max_abs_diff(povm.effect(i), expected) < 1e-13);
    }
  }
  SUBCASE("identity collision learns nothing about the system") {
    const DensityMatrix rho_c(random_density(rng, 2));
    const auto povm = collision_povm(CMatrix::Identity(4, 4), rho_c, aux);
    for (int i = 0; i < 2; ++i) {
      const double w = rho_c.matrix()(i, i).real();
      CHECK(max_abs_diff(povm.effect(i), w * CMatrix::Identity(2, 2)) <
            1e-13);
    }
  }
  SUBCASE("random collisions: completeness and probability match") {
    for (int t = 0; t < 100; ++t) {
      Rng r(split_seed(101, t));
      const CMatrix u = random_unitary(r, 4);
      const DensityMatrix rho_c(random_density(r, 2));
      const DensityMatrix rho_s(random_density(r, 2));
      const auto povm = collision_povm(u, rho_c, aux);

      CMatrix sum = CMatrix::Zero(2, 2);
      for (int i = 0; i < povm.n_outcomes(); ++i) sum += povm.effect(i);
      CHECK(max_abs_diff(sum, CMatrix::Identity(2, 2)) < 1e-12);

      const CMatrix joint =
          u * qcore::kron(rho_s.matrix(), rho_c.matrix()) * u.adjoint();
      for (int i = 0; i < 2; ++i) {
        const double p_sys =
            std::real((rho_s.matrix() * povm.effect(i)).trace());
        const double p_joint = std::real(
            (joint * qcore::kron(CMatrix::Identity(2, 2), aux.projector(i)))
                .trace());
        CHECK(std::abs(p_sys - p_joint) < 1e-12);
      }
    }
  }
  SUBCASE("non-unitary rejected") {
    CHECK_THROWS_AS(collision_povm(0.5 * CMatrix::Identity(4, 4),
                                   DensityMatrix::maximally_mixed(2), aux),
                    NumericError);
  }
}

TEST_CASE("collapse then remeasure is one-hot") {
  Rng rng(31);
  const auto basis = ProjectiveBasis::bloch(1.1, 0.4);
  const DensityMatrix rho(random_density(rng, 2));
  for (int k = 0; k < 2; ++k) {
    const auto p = outcome_probabilities(collapse(rho, basis, k), basis);
    CHECK(std::abs(p[k] - 1.0) < 1e-12);
  }
}
