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
#include "recoilsim/analytic.hpp"
#include "recoilsim/errors.hpp"

using namespace recoilsim;

namespace {

std::shared_ptr<const AtomArray> shared_array(int nx, int ny, double d) {
  return std::make_shared<const AtomArray>(build_planar_array(nx, ny, d));
}

Eigen::MatrixXcd random_pure_block(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) {
    v(i) = cdouble{u(rng), u(rng)};
  }
  v /= std::sqrt(v.squaredNorm());
  return v * v.adjoint();
}

ShiftedConfiguration random_shift_config(std::shared_ptr<const AtomArray> a,
                                         double scale, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  ShiftedConfiguration config = ShiftedConfiguration::coincident(std::move(a));
  config.primed_offsets.assign(static_cast<size_t>(config.size()),
                               Vec3::Zero());
  for (auto& v : config.primed_offsets) {
    v = Vec3{u(rng), u(rng), u(rng)};
  }
  config.validate();
  return config;
}

CoefficientState state_from_block(const Eigen::MatrixXcd& rho0) {
  CoefficientState s = CoefficientState::ground(static_cast<int>(rho0.rows()));
  s.rho_gg = cdouble{0.0, 0.0};
  s.rho_ee = rho0;
  return s;
}

}  // namespace

TEST_CASE("closed-form decay at zero shift returns all population") {
  auto array = shared_array(3, 2, 0.66);
  const auto config = ShiftedConfiguration::coincident(array);
  const Eigen::MatrixXcd rho0 = random_pure_block(6, 5);
  const cdouble value = eigen_decay_rho_gg_inf(config, rho0);
  CHECK(std::abs(value - cdouble{1.0, 0.0}) < 1e-10);
}

TEST_CASE("single-atom closed-form decay against the scalar function") {
  auto array = shared_array(1, 1, 0.5);
  const double dz = 1.5e-3;
  const auto config = ShiftedConfiguration::single_shift(array, 0, 2, dz);
  Eigen::MatrixXcd rho0(1, 1);
  rho0(0, 0) = cdouble{1.0, 0.0};
  const cdouble value = eigen_decay_rho_gg_inf(config, rho0);
  const cdouble expected =
      2.0 *
      greens_scalar(Vec3::Zero(), Vec3{0.0, 0.0, dz}, polarization_plus(),
                    polarization_plus())
          .real() /
      kGamma;
  CHECK(std::abs(value - expected) < 1e-12);
}

TEST_CASE("closed-form decay equals propagation on shifted configurations") {
  auto array = shared_array(2, 2, 0.68);
  const Eigen::MatrixXcd rho0 = random_pure_block(4, 17);
  for (unsigned seed : {21u, 22u, 23u}) {
    const ShiftedConfiguration config =
        random_shift_config(array, 5e-3, seed);
    const cdouble closed = eigen_decay_rho_gg_inf(config, rho0);
    const PropagationResult run =
        propagate(state_from_block(rho0), DriveSpec::none(), config,
                  Stepper{5e-4}, StopCondition::decay(1e-11), 0);
    CHECK(std::abs(closed - run.final_state.rho_gg) <
          1e-4 * std::abs(closed));
  }
}

TEST_CASE("dominant-term restriction for a separated mode") {
  auto array = shared_array(3, 3, 0.68);
  const CoupledMatrices coincident =
      build_coupled(ShiftedConfiguration::coincident(array));
  const SpectralPair base_pair(coincident);
  const int beta = most_subradiant(base_pair.left());

  // initial eigenstate block
  const Eigen::VectorXcd v = base_pair.left().vectors.col(beta);
  const Eigen::MatrixXcd rho0 = (v * v.adjoint()) / v.squaredNorm();

  const double dz = 1e-3;
  auto rho_inf = [&](double shift, bool restrict_to_beta) {
    const auto config =
        shift == 0.0
            ? ShiftedConfiguration::coincident(array)
            : ShiftedConfiguration::single_shift(array, 4, 2, shift);
    SpectralPair pair(build_coupled(config));
    Eigen::MatrixXcd c = pair.project(rho0);
    if (restrict_to_beta) {
      for (int a = 0; a < c.rows(); ++a) {
        for (int b = 0; b < c.cols(); ++b) {
          if (a != beta || b != beta) {
            c(a, b) = cdouble{0.0, 0.0};
          }
        }
      }
    }
    return pair.decay_integral(c, false).rho_gg_gain;
  };

  auto kick = [&](bool restricted) {
    const cdouble up = rho_inf(dz, restricted);
    const cdouble mid = rho_inf(0.0, restricted);
    const cdouble dn = rho_inf(-dz, restricted);
    return (-(up - 2.0 * mid + dn) / (dz * dz)).real() /
           (kWavenumber * kWavenumber);
  };

  const double full = kick(false);
  const double dominant = kick(true);
  CHECK(std::abs(full - dominant) < 0.01 * std::abs(full));
}

TEST_CASE("out-of-plane energy law") {
  CHECK(kz_closed_form(kGamma) == doctest::Approx(0.4));
  CHECK(kz_closed_form(1e-4 * kGamma) == doctest::Approx(4000.0));
  CHECK_THROWS_AS(kz_closed_form(0.0), InvalidArgumentError);
  CHECK_THROWS_AS(kz_closed_form(-0.3), InvalidArgumentError);
}

TEST_CASE("steady state of a single atom") {
  auto array = shared_array(1, 1, 0.5);
  const auto config = ShiftedConfiguration::coincident(array);
  const double rabi = 0.01;
  const DriveSpec drive = DriveSpec::cw(rabi, 0.0);
  const SteadySolution sol = steady_coefficients(config, drive);

  // rho_eg = -i rabi / Gamma at resonance, excited population (rabi/Gamma)^2
  CHECK(std::abs(sol.rho_eg(0) - cdouble{0.0, -rabi / kGamma}) < 1e-12);
  CHECK(sol.excited_population ==
        doctest::Approx(rabi * rabi / (kGamma * kGamma)).epsilon(1e-10));
  // total scattering rate Gamma |rabi/Gamma|^2
  CHECK(sol.scattering_rate ==
        doctest::Approx(rabi * rabi / kGamma).epsilon(1e-10));
  // the full rate expression balances exactly at coincidence
  CHECK(std::abs(sol.rho_gg_dot) < 1e-14);
}

TEST_CASE("steady solutions are stationary points of the dynamics") {
  auto array = shared_array(3, 3, 0.62);
  const DriveSpec drive = DriveSpec::cw(0.02, 0.35);
  for (unsigned seed : {31u, 32u}) {
    const ShiftedConfiguration config =
        seed == 31u ? ShiftedConfiguration::coincident(array)
                    : random_shift_config(array, 3e-3, seed);
    const CoupledMatrices mats = build_coupled(config);
    const SteadySolution sol = steady_coefficients(mats, drive);

    CoefficientState s = CoefficientState::ground(9);
    s.rho_gg = cdouble{1.0, 0.0};
    s.rho_eg = sol.rho_eg;
    s.rho_ge = sol.rho_ge;
    s.rho_ee = sol.rho_ee;
    CoefficientState d;
    coefficient_rhs(s, 0.0, drive, mats, d);
    CHECK(d.rho_eg.norm() < 1e-8 * std::max(1e-12, s.rho_eg.norm()));
    CHECK(d.rho_ge.norm() < 1e-8 * std::max(1e-12, s.rho_ge.norm()));
    CHECK(d.rho_ee.norm() < 1e-8 * std::max(1e-12, s.rho_ee.norm()));
    // and the rate expression agrees with the dynamical one
    CHECK(std::abs(d.rho_gg - sol.rho_gg_dot) < 1e-12);
  }
}

TEST_CASE("eigen route and direct solve agree") {
  auto array = shared_array(3, 2, 0.74);
  const DriveSpec drive = DriveSpec::cw(0.015, -0.6);
  for (unsigned seed : {41u, 42u}) {
    const ShiftedConfiguration config =
        seed == 41u ? ShiftedConfiguration::coincident(array)
                    : random_shift_config(array, 4e-3, seed);
    const SteadySolution a =
        steady_coefficients(config, drive, SteadyMethod::eigen_route);
    const SteadySolution b =
        steady_coefficients(config, drive, SteadyMethod::direct_solve);
    CHECK((a.rho_eg - b.rho_eg).norm() < 1e-8);
    CHECK((a.rho_ge - b.rho_ge).norm() < 1e-8);
    CHECK(std::abs(a.rho_gg_dot - b.rho_gg_dot) < 1e-8);
  }
}

TEST_CASE("steady rate at zero shift is real and non-negative") {
  auto array = shared_array(2, 2, 0.58);
  const auto config = ShiftedConfiguration::coincident(array);
  const SteadySolution sol =
      steady_coefficients(config, DriveSpec::cw(0.02, 0.2));
  CHECK(std::abs(sol.rho_gg_dot.imag()) < 1e-10);
  CHECK(sol.rho_gg_dot.real() > -1e-10);
}

TEST_CASE("gaussian autocorrelation transform") {
  // against a brute-force double time integral of a single decaying mode
  const double t_w = 3.0;
  for (const cdouble c : {cdouble{-0.5, 0.0}, cdouble{-0.21, 1.3},
                          cdouble{-1.4, -2.2}, cdouble{-5e-3, 0.4}}) {
    const cdouble closed = detail::gaussian_autocorr_integral(c, t_w);
    // J = Integral_0^inf e^{c s} R(s) ds with R the envelope autocorrelation
    cdouble brute{0.0, 0.0};
    const double ds = 2e-3;
    for (double s = 0.5 * ds; s < 40.0; s += ds) {
      const double r = std::sqrt(kPi / 2.0) * t_w *
                       std::exp(-s * s / (2.0 * t_w * t_w));
      brute += std::exp(c * s) * r * ds;
    }
    CHECK(std::abs(closed - brute) < 1e-5 * std::abs(closed) + 1e-10);
  }
  CHECK_THROWS_AS(detail::gaussian_autocorr_integral(cdouble{0.2, 0.0}, 1.0),
                  InvalidArgumentError);
}

TEST_CASE("pulse linear response equals pulsed propagation") {
  auto array = shared_array(2, 2, 0.68);
  const DriveSpec pulse = DriveSpec::gaussian_pulse(0.02, 0.15, 3.0);

  for (unsigned seed : {51u, 52u}) {
    const ShiftedConfiguration config =
        seed == 51u ? ShiftedConfiguration::coincident(array)
                    : random_shift_config(array, 3e-3, seed);
    const PulseResponse closed = pulse_linear_response(config, pulse, true);

    CoefficientState s0 = CoefficientState::ground(4);
    s0.t = -5.0 * pulse.pulse_width;
    StopCondition stop = StopCondition::decay(1e-12);
    stop.analytic_tail = true;
    const PropagationResult run =
        pure_state_fast_path(s0, pulse, config, Stepper{5e-4}, stop, 20);
    const cdouble propagated = run.final_state.rho_gg - 1.0;
    CHECK(std::abs(closed.rho_gg_change - propagated) <
          2e-3 * std::abs(propagated));

    if (config.is_coincident()) {
      // the pulse returns every bit of population to the ground state
      CHECK(std::abs(closed.rho_gg_change) < 1e-10);
      // excitation integrals match the sampled trajectory
      const Eigen::VectorXd sampled = [&] {
        Eigen::VectorXd integral = Eigen::VectorXd::Zero(4);
        const auto& traj = run.trajectory;
        for (size_t k = 1; k < traj.times.size(); ++k) {
          integral += 0.5 * (traj.times[k] - traj.times[k - 1]) *
                      (traj.populations[k].real() +
                       traj.populations[k - 1].real());
        }
        integral += run.tail_excitation.real();
        return integral;
      }();
      for (int i = 0; i < 4; ++i) {
        CHECK(closed.excitation_integral(i).real() ==
              doctest::Approx(sampled(i)).epsilon(5e-3));
        CHECK(std::abs(closed.excitation_integral(i).imag()) < 1e-12);
      }
    }
  }
}
