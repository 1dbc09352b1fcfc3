// Copyright 2026 The recoilsim Authors
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

#include <cmath>
#include <memory>
#include <random>

#include "doctest.h"
#include "recoilsim/errors.hpp"
#include "recoilsim/evolution.hpp"

using namespace recoilsim;

namespace {

std::shared_ptr<const AtomArray> shared_array(int nx, int ny, double d) {
  return std::make_shared<const AtomArray>(build_planar_array(nx, ny, d));
}

CoefficientState excited_atom(int n, int which) {
  CoefficientState s = CoefficientState::ground(n);
  s.rho_gg = cdouble{0.0, 0.0};
  s.rho_ee(which, which) = cdouble{1.0, 0.0};
  return s;
}

std::vector<Vec3> random_offsets(int n, double scale, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<Vec3> out(static_cast<size_t>(n));
  for (auto& v : out) {
    v = Vec3{u(rng), u(rng), u(rng)};
  }
  return out;
}

}  // namespace

TEST_CASE("single-atom right-hand side") {
  auto array = shared_array(1, 1, 0.5);
  const auto config = ShiftedConfiguration::coincident(array);
  const CoupledMatrices mats = build_coupled(config);
  const CoefficientState s = excited_atom(1, 0);
  CoefficientState d;
  coefficient_rhs(s, 0.0, DriveSpec::none(), mats, d);
  CHECK(std::abs(d.rho_ee(0, 0) + kGamma) < 1e-14);  // -Gamma rho_ee
  CHECK(std::abs(d.rho_gg - kGamma) < 1e-14);        // +Gamma rho_ee
}

TEST_CASE("trace conservation at coincidence for any drive") {
  auto array = shared_array(3, 2, 0.66);
  const CoupledMatrices mats =
      build_coupled(ShiftedConfiguration::coincident(array));
  const DriveSpec drive = DriveSpec::cw(0.04, 0.7);

  CoefficientState s = CoefficientState::ground(6);
  // populate with a physically shaped state: short drive burst
  s.rho_gg = cdouble{0.9, 0.0};
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  for (int i = 0; i < 6; ++i) {
    s.rho_eg(i) = cdouble{u(rng), u(rng)};
    s.rho_ge(i) = std::conj(s.rho_eg(i));
    for (int j = 0; j < 6; ++j) {
      s.rho_ee(i, j) = cdouble{u(rng), u(rng)};
    }
  }
  s.rho_ee = 0.5 * (s.rho_ee + s.rho_ee.adjoint()).eval();

  CoefficientState d;
  coefficient_rhs(s, 0.3, drive, mats, d);
  const cdouble trace_rate = d.rho_gg + d.rho_ee.trace();
  CHECK(std::abs(trace_rate) < 1e-12);
}

TEST_CASE("single-atom decay curve") {
  auto array = shared_array(1, 1, 0.5);
  const auto config = ShiftedConfiguration::coincident(array);
  const PropagationResult run =
      propagate(excited_atom(1, 0), DriveSpec::none(), config, Stepper{1e-3},
                StopCondition::decay(1e-8), 50);
  CHECK(std::abs(run.final_state.rho_gg - 1.0) < 1e-7);
  for (size_t k = 0; k < run.trajectory.times.size(); ++k) {
    const double expected = std::exp(-kGamma * run.trajectory.times[k]);
    const double pop = run.trajectory.populations[k](0).real();
    CHECK(std::abs(pop - expected) < 1e-6);
  }
}

TEST_CASE("two-atom symmetric excitation decays at the collective rate") {
  auto array = shared_array(2, 1, 0.8);
  const cdouble g01 = greens_scalar(array->positions[0], array->positions[1],
                                    array->dipoles[0], array->dipoles[1]);
  const double gamma_sym = kGamma + 2.0 * g01.real();

  CoefficientState s = CoefficientState::ground(2);
  s.rho_gg = cdouble{0.0, 0.0};
  s.rho_ee.setConstant(cdouble{0.5, 0.0});

  const auto config = ShiftedConfiguration::coincident(array);
  const PropagationResult run =
      propagate(s, DriveSpec::none(), config, Stepper{1e-3},
                StopCondition::horizon_at(2.0), 0);
  const double pop = run.final_state.excited_population().real();
  CHECK(pop == doctest::Approx(std::exp(-gamma_sym * 2.0)).epsilon(1e-5));
}

TEST_CASE("hermiticity preserved at coincidence") {
  auto array = shared_array(2, 2, 0.7);
  const auto config = ShiftedConfiguration::coincident(array);
  CoefficientState s = excited_atom(4, 1);
  const DriveSpec drive = DriveSpec::cw(0.03, -0.4);
  const PropagationResult run = propagate(
      s, drive, config, Stepper{1e-3}, StopCondition::horizon_at(3.0), 0);
  const auto& rho = run.final_state.rho_ee;
  CHECK((rho - rho.adjoint()).norm() < 1e-10);
  CHECK(std::abs(run.final_state.rho_gg.imag()) < 1e-10);
  CHECK((run.final_state.rho_ge - run.final_state.rho_eg.conjugate()).norm() <
        1e-10);
}

TEST_CASE("init_eigenstate") {
  auto array = shared_array(2, 1, 0.8);
  const EigenmodeSet modes =
      decompose(assemble_greens(array->positions, array->positions,
                                array->dipoles, GreensFlavor::unprimed));

  SUBCASE("trace is exactly one excitation") {
    for (int b = 0; b < modes.size(); ++b) {
      const CoefficientState s = init_eigenstate(modes, b);
      CHECK(std::abs(s.excited_population() - cdouble{1.0, 0.0}) < 1e-12);
      CHECK(std::abs(s.rho_gg) == 0.0);
    }
  }

  SUBCASE("two-atom antisymmetric block") {
    // pick out the antisymmetric mode
    int anti = 0;
    for (int b = 0; b < 2; ++b) {
      if ((modes.vectors(0, b) * std::conj(modes.vectors(1, b))).real() <
          0.0) {
        anti = b;
      }
    }
    const CoefficientState s = init_eigenstate(modes, anti);
    CHECK(std::abs(s.rho_ee(0, 0) - cdouble{0.5, 0.0}) < 1e-12);
    CHECK(std::abs(s.rho_ee(1, 1) - cdouble{0.5, 0.0}) < 1e-12);
    CHECK(std::abs(s.rho_ee(0, 1) + cdouble{0.5, 0.0}) < 1e-12);
  }

  SUBCASE("single atom block") {
    auto one = shared_array(1, 1, 0.5);
    const EigenmodeSet m1 =
        decompose(assemble_greens(one->positions, one->positions,
                                  one->dipoles, GreensFlavor::unprimed));
    const CoefficientState s = init_eigenstate(m1, 0);
    CHECK(std::abs(s.rho_ee(0, 0) - cdouble{1.0, 0.0}) < 1e-14);
  }
}

TEST_CASE("midpoint RK2 is second order") {
  auto array = shared_array(2, 2, 0.62);
  const auto config = ShiftedConfiguration::coincident(array);
  const CoefficientState s0 = excited_atom(4, 0);
  const StopCondition stop = StopCondition::horizon_at(1.5);

  auto final_rho_gg = [&](double dt) {
    return propagate(s0, DriveSpec::none(), config, Stepper{dt}, stop, 0)
        .final_state.rho_gg.real();
  };
  const double coarse = final_rho_gg(4e-3);
  const double medium = final_rho_gg(2e-3);
  const double fine = final_rho_gg(1e-3);
  const double ratio = (coarse - medium) / (medium - fine);
  CHECK(ratio > 3.5);
  CHECK(ratio < 4.5);
}

TEST_CASE("conjugation symmetry under role exchange") {
  const AtomArray base = build_planar_array(2, 2, 0.71);
  const std::vector<Vec3> offsets = random_offsets(4, 5e-3, 11);
  std::vector<Vec3> shifted = base.positions;
  for (size_t i = 0; i < shifted.size(); ++i) {
    shifted[i] += offsets[i];
  }

  CoefficientState s0 = CoefficientState::ground(4);
  s0.rho_gg = cdouble{0.0, 0.0};
  Eigen::VectorXcd v(4);
  v << cdouble{0.6, 0.1}, cdouble{-0.3, 0.2}, cdouble{0.5, -0.4},
      cdouble{0.1, 0.3};
  v /= std::sqrt(v.squaredNorm());
  s0.rho_ee = v * v.adjoint();

  const CoupledMatrices forward =
      build_coupled(base.positions, shifted, base.dipoles);
  const CoupledMatrices swapped =
      build_coupled(shifted, base.positions, base.dipoles);
  const StopCondition stop = StopCondition::decay(1e-10);
  const PropagationResult a =
      propagate_with(s0, DriveSpec::none(), forward, Stepper{1e-3}, stop, 0);
  const PropagationResult b =
      propagate_with(s0, DriveSpec::none(), swapped, Stepper{1e-3}, stop, 0);
  CHECK(std::abs(a.final_state.rho_gg - std::conj(b.final_state.rho_gg)) <
        1e-10);
}

TEST_CASE("instability is reported with time and step") {
  auto array = shared_array(2, 1, 0.55);
  const auto config = ShiftedConfiguration::coincident(array);
  CHECK_THROWS_AS(propagate(excited_atom(2, 0), DriveSpec::none(), config,
                            Stepper{5.0}, StopCondition::horizon_at(5000.0),
                            0),
                  InstabilityError);
}

TEST_CASE("analytic tail matches stepping out the decay") {
  auto array = shared_array(2, 2, 0.68);
  const auto config = ShiftedConfiguration::single_shift(array, 1, 2, 2e-3);
  const CoefficientState s0 = excited_atom(4, 2);

  StopCondition plain = StopCondition::decay(1e-12);
  const PropagationResult stepped =
      propagate(s0, DriveSpec::none(), config, Stepper{5e-4}, plain, 0);

  StopCondition tailed = StopCondition::decay(1e-12);
  tailed.analytic_tail = true;
  const PropagationResult closed =
      propagate(s0, DriveSpec::none(), config, Stepper{5e-4}, tailed, 0);
  CHECK(closed.tail_used);
  CHECK(std::abs(closed.final_state.rho_gg - stepped.final_state.rho_gg) <
        1e-6);
}

TEST_CASE("fast path") {
  SUBCASE("zero drive from an eigenstate matches the full propagation") {
    auto array = shared_array(3, 1, 0.77);
    const EigenmodeSet modes =
        decompose(assemble_greens(array->positions, array->positions,
                                  array->dipoles, GreensFlavor::unprimed));
    const CoefficientState s0 = init_eigenstate(modes, 1);
    const auto config = ShiftedConfiguration::single_shift(array, 0, 0, 1e-3);
    const StopCondition stop = StopCondition::horizon_at(4.0);
    const PropagationResult full =
        propagate(s0, DriveSpec::none(), config, Stepper{1e-3}, stop, 0);
    const PropagationResult fast = pure_state_fast_path(
        s0, DriveSpec::none(), config, Stepper{1e-3}, stop, 0);
    CHECK(std::abs(full.final_state.rho_gg - fast.final_state.rho_gg) <
          1e-10);
    CHECK((full.final_state.rho_ee - fast.final_state.rho_ee).norm() < 1e-10);
  }

  SUBCASE("weak cw drive from ground tracks the full propagation") {
    auto array = shared_array(2, 2, 0.64);
    const auto config = ShiftedConfiguration::single_shift(array, 2, 2, 2e-3);
    const DriveSpec drive = DriveSpec::cw(0.02, 0.1);
    const StopCondition stop = StopCondition::horizon_at(40.0);
    const CoefficientState s0 = CoefficientState::ground(4);
    const PropagationResult full =
        propagate(s0, drive, config, Stepper{1e-3}, stop, 0);
    const PropagationResult fast =
        pure_state_fast_path(s0, drive, config, Stepper{1e-3}, stop, 0);
    // agreement to O(rabi^2) corrections on the accumulated ground change
    const cdouble dfull = full.final_state.rho_gg - 1.0;
    const cdouble dfast = fast.final_state.rho_gg - 1.0;
    CHECK(std::abs(dfull - dfast) < 1e-3 * std::abs(dfull));
  }

  SUBCASE("mixed initial state is rejected") {
    auto array = shared_array(2, 1, 0.8);
    CoefficientState s0 = CoefficientState::ground(2);
    s0.rho_gg = cdouble{0.0, 0.0};
    s0.rho_ee(0, 0) = cdouble{0.5, 0.0};
    s0.rho_ee(1, 1) = cdouble{0.5, 0.0};  // maximally mixed, rank 2
    const auto config = ShiftedConfiguration::coincident(array);
    CHECK_THROWS_AS(pure_state_fast_path(s0, DriveSpec::none(), config,
                                         Stepper{1e-3},
                                         StopCondition::decay(1e-8), 0),
                    UnsupportedStateError);
  }

  SUBCASE("strong drive is rejected") {
    auto array = shared_array(2, 1, 0.8);
    const auto config = ShiftedConfiguration::coincident(array);
    CHECK_THROWS_AS(
        pure_state_fast_path(CoefficientState::ground(2),
                             DriveSpec::cw(0.2, 0.0), config, Stepper{1e-3},
                             StopCondition::horizon_at(1.0), 0),
        InvalidArgumentError);
  }
}

TEST_CASE("offsets outside the finite-difference regime are rejected") {
  auto array = shared_array(2, 1, 0.8);
  CHECK_THROWS_AS(ShiftedConfiguration::single_shift(array, 0, 2, 0.2),
                  InvalidArgumentError);
  CHECK_THROWS_AS(ShiftedConfiguration::single_shift(array, 5, 0, 1e-3),
                  InvalidArgumentError);
}
