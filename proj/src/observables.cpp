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

#include "recoilsim/observables.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "recoilsim/errors.hpp"

namespace recoilsim {

double photon_flux(double spacing, double rabi) {
  if (spacing <= 0.0) {
    throw InvalidArgumentError("photon_flux: spacing must be > 0");
  }
  if (rabi < 0.0) {
    throw InvalidArgumentError("photon_flux: rabi must be >= 0");
  }
  return (2.0 * kPi / 3.0) * spacing * spacing * rabi * rabi;
}

double pulse_photon_count(double spacing, const DriveSpec& drive) {
  if (drive.profile != DriveSpec::Profile::gaussian) {
    throw InvalidArgumentError("pulse_photon_count: drive must be gaussian");
  }
  // integral of exp(-2 (t/t_w)^2) dt = t_w sqrt(pi/2)
  return photon_flux(spacing, drive.rabi) * drive.pulse_width *
         std::sqrt(kPi / 2.0);
}

ReflectanceReport reflectance(const RecoilResult& rates,
                              const AtomArray& array, double flux) {
  if (rates.mode != RecoilMode::rate) {
    throw InvalidArgumentError("reflectance: rates must be in rate mode");
  }
  if (flux <= 0.0) {
    throw InvalidArgumentError("reflectance: flux must be > 0");
  }
  if (rates.momentum.rows() != array.size()) {
    throw InvalidArgumentError("reflectance: atom count mismatch");
  }
  ReflectanceReport report;
  report.per_atom = rates.momentum.col(2) / (2.0 * flux);
  report.average = report.per_atom.mean();
  double interior_sum = 0.0;
  int interior = 0;
  for (int i = 0; i < array.size(); ++i) {
    if (!array.on_edge(i)) {
      interior_sum += report.per_atom(i);
      ++interior;
    }
  }
  report.interior_atoms = interior;
  report.edge_excluded = interior > 0 ? interior_sum / interior : 0.0;
  return report;
}

namespace {

double cavity_intensity_proxy(const CavitySpec& spec, double separation,
                              double detuning, double probe_rabi,
                              SteadyMethod method) {
  CavitySpec at = spec;
  at.separation = separation;
  auto array = std::make_shared<const AtomArray>(build_cavity(at));
  const DriveSpec probe = DriveSpec::cw(probe_rabi, detuning);
  const SteadySolution sol = steady_coefficients(
      ShiftedConfiguration::coincident(array), probe, method);
  return sol.excited_population;
}

// Half-maximum crossing by linear interpolation between bracketing points.
double crossing(const Eigen::VectorXd& x, const Eigen::VectorXd& y, int lo,
                int hi, double level) {
  const double t = (level - y(lo)) / (y(hi) - y(lo));
  return x(lo) + t * (x(hi) - x(lo));
}

}  // namespace

FinesseSweep finesse(const CavitySpec& nominal, double detuning,
                     const Eigen::VectorXd& separations, double probe_rabi,
                     SteadyMethod method) {
  const int n = static_cast<int>(separations.size());
  if (n < 5) {
    throw InvalidArgumentError("finesse: need at least 5 grid points");
  }
  for (int i = 1; i < n; ++i) {
    if (separations(i) <= separations(i - 1)) {
      throw InvalidArgumentError("finesse: grid must be strictly increasing");
    }
  }

  FinesseSweep sweep;
  sweep.detuning = detuning;
  sweep.separations = separations;
  sweep.intensity.resize(n);
  std::exception_ptr failure = nullptr;
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    try {
      sweep.intensity(i) = cavity_intensity_proxy(
          nominal, separations(i), detuning, probe_rabi, method);
    } catch (...) {
#pragma omp critical
      {
        if (!failure) {
          failure = std::current_exception();
        }
      }
    }
  }
  if (failure) {
    std::rethrow_exception(failure);
  }

  int peak = 0;
  sweep.intensity.maxCoeff(&peak);
  if (peak == 0 || peak == n - 1) {
    throw NumericalError("finesse: response peak sits at the grid edge");
  }
  sweep.peak_separation = separations(peak);
  const double half = 0.5 * sweep.intensity(peak);

  int lo = peak;
  while (lo > 0 && sweep.intensity(lo) > half) {
    --lo;
  }
  int hi = peak;
  while (hi < n - 1 && sweep.intensity(hi) > half) {
    ++hi;
  }
  if (sweep.intensity(lo) > half || sweep.intensity(hi) > half) {
    throw NumericalError(
        "finesse: half-maximum crossings not bracketed by the grid");
  }
  const double left =
      crossing(separations, sweep.intensity, lo, lo + 1, half);
  const double right =
      crossing(separations, sweep.intensity, hi, hi - 1, half);
  sweep.fwhm = right - left;
  if (sweep.fwhm <= 0.0) {
    throw NumericalError("finesse: degenerate FWHM");
  }
  sweep.finesse = 0.5 / sweep.fwhm;
  return sweep;
}

FinesseSweep finesse_auto(const CavitySpec& nominal, double detuning,
                          double half_window, int coarse_points, int max_zoom,
                          double probe_rabi, SteadyMethod method) {
  if (half_window <= 0.0) {
    throw InvalidArgumentError("finesse_auto: window must be > 0");
  }
  double center = nominal.separation;
  double window = half_window;
  FinesseSweep last;
  for (int zoom = 0; zoom < max_zoom; ++zoom) {
    const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(
        coarse_points, center - window, center + window);
    try {
      last = finesse(nominal, detuning, grid, probe_rabi, method);
    } catch (const NumericalError&) {
      // Peak not resolved at this zoom; tighten around the best point seen.
      int best = 0;
      double best_val = -1.0;
      for (int i = 0; i < coarse_points; ++i) {
        const double v = cavity_intensity_proxy(nominal, grid(i), detuning,
                                                probe_rabi, method);
        if (v > best_val) {
          best_val = v;
          best = i;
        }
      }
      center = grid(best);
      window /= 8.0;
      continue;
    }
    // Enough points inside the FWHM?
    const double step = 2.0 * window / (coarse_points - 1);
    if (last.fwhm >= 8.0 * step) {
      return last;
    }
    center = last.peak_separation;
    window = std::max(2.0 * last.fwhm, window / 8.0);
  }
  if (last.separations.size() == 0) {
    throw NumericalError("finesse_auto: resonance not resolved");
  }
  return last;
}

Eigen::VectorXd excitation_integral(const Trajectory& trajectory,
                                    const Eigen::VectorXcd* tail) {
  if (trajectory.empty()) {
    throw InvalidArgumentError("excitation_integral: trajectory not sampled");
  }
  const int n = static_cast<int>(trajectory.populations.front().size());
  Eigen::VectorXd integral = Eigen::VectorXd::Zero(n);
  for (size_t s = 1; s < trajectory.times.size(); ++s) {
    const double dt = trajectory.times[s] - trajectory.times[s - 1];
    integral += 0.5 * dt *
                (trajectory.populations[s].real() +
                 trajectory.populations[s - 1].real());
  }
  if (tail != nullptr && tail->size() == n) {
    integral += tail->real();
  }
  return integral;
}

double SpeciesData::recoil_frequency_hz() const {
  constexpr double kPlanck = 6.62607015e-34;
  constexpr double kAmu = 1.66053906660e-27;
  const double mass = mass_amu * kAmu;
  const double lambda = wavelength_nm * 1e-9;
  return kPlanck / (2.0 * mass * lambda * lambda);
}

SpeciesData SpeciesData::rubidium87() {
  SpeciesData s;
  s.mass_amu = 86.909180527;
  s.wavelength_nm = 780.241;
  return s;
}

double vibrational_quantum(double dk_recoil_units, double trap_frequency_hz,
                           const SpeciesData& species) {
  if (trap_frequency_hz <= 0.0) {
    throw InvalidArgumentError("vibrational_quantum: trap frequency must be > 0");
  }
  if (species.mass_amu <= 0.0 || species.wavelength_nm <= 0.0) {
    throw InvalidArgumentError("vibrational_quantum: species data missing");
  }
  return dk_recoil_units * species.recoil_frequency_hz() / trap_frequency_hz;
}

double pearson_correlation(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw InvalidArgumentError("pearson_correlation: need matched samples");
  }
  const double mx = x.mean();
  const double my = y.mean();
  const Eigen::VectorXd dx = x.array() - mx;
  const Eigen::VectorXd dy = y.array() - my;
  const double denom = dx.norm() * dy.norm();
  if (denom == 0.0) {
    throw InvalidArgumentError("pearson_correlation: zero variance");
  }
  return dx.dot(dy) / denom;
}

}  // namespace recoilsim
