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

#ifndef RECOILSIM_EVOLUTION_HPP
#define RECOILSIM_EVOLUTION_HPP

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <vector>

#include "recoilsim/eigenmodes.hpp"
#include "recoilsim/geometry.hpp"
#include "recoilsim/greens.hpp"
#include "recoilsim/units.hpp"

namespace recoilsim {

// Time propagation of the single-excitation density-matrix coefficient
// blocks
//   rho_gg  (scalar), rho_eg (N), rho_ge (N), rho_ee (NxN)
// for arbitrary primed/unprimed coordinate configurations.  The right-hand
// side couples rho_eg through the unprimed matrix, rho_ge through the
// conjugated primed matrix, rho_ee through both, and feeds rho_gg through
// the mixed-coordinate matrix:
//
//   d rho_eg_j = -i/2 W(r_j)  rho_gg + i d rho_eg_j - sum_k G_jk    rho_eg_k
//   d rho_ge_j = +i/2 W*(r'_j) rho_gg - i d rho_ge_j - sum_k G''*_jk rho_ge_k
//   d rho_ee_ij = -i/2 W(r_i) rho_ge_j + i/2 W*(r'_j) rho_eg_i
//                 - [G rho_ee]_ij - [rho_ee G''*]_ij
//   d rho_gg = sum_ij 2Re{G'_ij} rho_ee_ij
//              - i/2 sum_j W*(r_j) rho_eg_j + i/2 sum_j W(r'_j) rho_ge_j
//
// with W the drive amplitude and d the detuning.

struct DriveSpec {
  enum class Profile { off, cw, gaussian };

  double rabi = 0.0;        // peak Rabi frequency, decay-rate units
  double detuning = 0.0;    // decay-rate units
  Profile profile = Profile::off;
  double pulse_width = 0.0; // gaussian 1/e half-width, 1/Gamma units
  // Transverse spatial envelope s(r), |s| <= 1; empty means uniform 1.
  std::function<double(const Vec3&)> transverse;

  void validate() const;
  bool active() const { return profile != Profile::off && rabi > 0.0; }
  // exp(-(t/t_w)^2) for gaussian, 1 for cw, 0 for off.
  double temporal_envelope(double t) const;
  // rabi * s(r) * exp(i k z); the incident wavevector is k z-hat.
  cdouble spatial_amplitude(const Vec3& r) const;
  // True once a gaussian pulse has decayed below ~1e-7 of its peak (always
  // true when off, never for cw).
  bool negligible_after(double t) const;

  static DriveSpec none();
  static DriveSpec cw(double rabi, double detuning);
  static DriveSpec gaussian_pulse(double rabi, double detuning,
                                  double pulse_width);
};

// A base array plus per-atom offsets applied to the primed coordinate set.
// Offsets are bounded to the finite-difference regime.
struct ShiftedConfiguration {
  std::shared_ptr<const AtomArray> base;
  std::vector<Vec3> primed_offsets;  // empty = coincident

  static constexpr double kMaxOffset = 0.05;

  static ShiftedConfiguration coincident(
      std::shared_ptr<const AtomArray> array);
  static ShiftedConfiguration single_shift(
      std::shared_ptr<const AtomArray> array, int atom, int axis,
      double delta);

  void validate() const;
  bool is_coincident() const;
  int size() const { return base ? base->size() : 0; }
  std::vector<Vec3> primed_positions() const;
};

// The three coupling matrices for one configuration, plus the drive phase
// vectors evaluated on both coordinate sets.
struct CoupledMatrices {
  Eigen::MatrixXcd g;          // unprimed set, complex-symmetric
  Eigen::MatrixXcd gpp_conj;   // conjugate of the primed-set matrix
  Eigen::MatrixXd mixed_2re;   // 2 Re g(r_i - r'_j)
  std::vector<Vec3> unprimed;
  std::vector<Vec3> primed;
  bool coincident = true;
  int size() const { return static_cast<int>(g.rows()); }
};

CoupledMatrices build_coupled(const ShiftedConfiguration& config);
// General form with independent coordinate sets (role swaps in tests).
CoupledMatrices build_coupled(const std::vector<Vec3>& unprimed,
                              const std::vector<Vec3>& primed,
                              const std::vector<CVec3>& dipoles);

struct CoefficientState {
  cdouble rho_gg{0.0, 0.0};
  Eigen::VectorXcd rho_eg;  // |e_j><g| coefficients
  Eigen::VectorXcd rho_ge;  // |g><e_j| coefficients
  Eigen::MatrixXcd rho_ee;  // |e_i><e_j| coefficients
  double t = 0.0;

  static CoefficientState ground(int n, double t0 = 0.0);
  int size() const { return static_cast<int>(rho_eg.size()); }
  cdouble excited_population() const { return rho_ee.trace(); }
};

// rho_ee = N_b V_b V_b^dag with N_b = 1 / sum_i |V_ib|^2, so the trace is
// exactly one excitation.
CoefficientState init_eigenstate(const EigenmodeSet& modes, int mode_index);

// Full right-hand side of the coefficient equations at time t.
void coefficient_rhs(const CoefficientState& state, double t,
                     const DriveSpec& drive, const CoupledMatrices& mats,
                     CoefficientState& derivative);

struct Stepper {
  double dt = 1e-3;  // fixed-step midpoint RK2
};

struct StopCondition {
  enum class Kind { population_below, stationary, horizon };
  Kind kind = Kind::population_below;
  double eps_decay = 1e-8;      // |tr rho_ee| threshold
  double stationary_tol = 1e-7; // RHS-norm threshold, relative
  double t_max = 1e6;           // safety horizon for every kind
  int check_stride = 100;
  // Close drive-free evolution with the exact spectral tail instead of
  // stepping out the slow decay (opt-in).
  bool analytic_tail = false;

  static StopCondition decay(double eps = 1e-8);
  static StopCondition steady(double tol = 1e-7);
  static StopCondition horizon_at(double t_end);
};

struct Trajectory {
  std::vector<double> times;
  std::vector<cdouble> rho_gg;
  std::vector<Eigen::VectorXcd> populations;  // per-atom rho_ee diagonal
  bool empty() const { return times.empty(); }
};

struct PropagationResult {
  CoefficientState final_state;
  Trajectory trajectory;
  bool tail_used = false;
  // Exact remainder of the per-atom excitation-probability time integral
  // from the tail, when used.
  Eigen::VectorXcd tail_excitation;
  bool hit_horizon = false;
};

// Fixed-step midpoint RK2 over the full coefficient blocks.  sample_stride
// of n records every n-th step into the trajectory (0 = no sampling).
PropagationResult propagate(const CoefficientState& initial,
                            const DriveSpec& drive,
                            const ShiftedConfiguration& config,
                            const Stepper& stepper, const StopCondition& stop,
                            int sample_stride = 0);
// Same integrator on pre-built matrices (lets tests swap coordinate roles).
PropagationResult propagate_with(const CoefficientState& initial,
                                 const DriveSpec& drive,
                                 const CoupledMatrices& mats,
                                 const Stepper& stepper,
                                 const StopCondition& stop,
                                 int sample_stride = 0);

// O(N^2)-per-step path for a ground or pure single-excitation start under
// weak drive: rho_ee is carried as a homogeneous rank-1 factor pair plus
// the drive-built product rho_eg rho_ge^T / rho_gg, exact to O(rabi^2)
// corrections (exact for zero drive).
PropagationResult pure_state_fast_path(const CoefficientState& initial,
                                       const DriveSpec& drive,
                                       const ShiftedConfiguration& config,
                                       const Stepper& stepper,
                                       const StopCondition& stop,
                                       int sample_stride = 0);

inline constexpr double kFastPathMaxRabi = 0.05;

}  // namespace recoilsim

#endif  // RECOILSIM_EVOLUTION_HPP
