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

#ifndef RECOILSIM_OBSERVABLES_HPP
#define RECOILSIM_OBSERVABLES_HPP

#include <Eigen/Dense>

#include "recoilsim/analytic.hpp"
#include "recoilsim/evolution.hpp"
#include "recoilsim/recoil.hpp"

namespace recoilsim {

// Photons incident per lattice site per single-atom lifetime for a plane
// wave of the given Rabi frequency: (2 pi / 3) d^2 (rabi/Gamma)^2.
double photon_flux(double spacing, double rabi);

// Photons per lattice site over an entire pulse: the time integral of the
// instantaneous flux; for a gaussian envelope that is
// flux(rabi_peak) * t_w * sqrt(pi/2).
double pulse_photon_count(double spacing, const DriveSpec& drive);

struct ReflectanceReport {
  Eigen::VectorXd per_atom;       // p_z rate / (2 flux), per atom
  double average = 0.0;
  double edge_excluded = 0.0;     // outermost lattice ring removed
  int interior_atoms = 0;
};

// A reflected photon transfers two photon momenta, so the average forward
// momentum-transfer rate per incident photon, halved, measures reflectance.
ReflectanceReport reflectance(const RecoilResult& rates,
                              const AtomArray& array, double flux);

struct FinesseSweep {
  double detuning = 0.0;
  Eigen::VectorXd separations;
  Eigen::VectorXd intensity;      // steady total excited population per L
  double peak_separation = 0.0;
  double fwhm = 0.0;
  double finesse = 0.0;           // (lambda/2) / fwhm
};

// Scans mirror separation at fixed drive detuning; the cavity response
// proxy is the steady-state total excited population under a weak uniform
// axial drive.  The grid must bracket a resonance away from its edges.
FinesseSweep finesse(const CavitySpec& nominal, double detuning,
                     const Eigen::VectorXd& separations,
                     double probe_rabi = 0.01,
                     SteadyMethod method = SteadyMethod::direct_solve);

// Self-refining wrapper: zooms onto the resonance until the FWHM is
// resolved by a minimum number of grid points.
FinesseSweep finesse_auto(const CavitySpec& nominal, double detuning,
                          double half_window, int coarse_points = 81,
                          int max_zoom = 6, double probe_rabi = 0.01,
                          SteadyMethod method = SteadyMethod::direct_solve);

// Trapezoidal per-atom integral of the excitation probability over a
// sampled trajectory, plus the exact tail remainder when one was recorded.
Eigen::VectorXd excitation_integral(const Trajectory& trajectory,
                                    const Eigen::VectorXcd* tail = nullptr);

// Physical-units bridge for trap heating estimates.
struct SpeciesData {
  double mass_amu = 0.0;
  double wavelength_nm = 0.0;
  double recoil_frequency_hz() const;  // E_r / h
  static SpeciesData rubidium87();     // 780 nm line
};

// Expected vibrational quantum number after depositing dk recoil energies
// in a harmonic trap of the given frequency.
double vibrational_quantum(double dk_recoil_units, double trap_frequency_hz,
                           const SpeciesData& species);

double pearson_correlation(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

}  // namespace recoilsim

#endif  // RECOILSIM_OBSERVABLES_HPP
