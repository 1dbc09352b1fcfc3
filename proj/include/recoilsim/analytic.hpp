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

#ifndef RECOILSIM_ANALYTIC_HPP
#define RECOILSIM_ANALYTIC_HPP

#include <Eigen/Dense>
#include <memory>

#include "recoilsim/evolution.hpp"

namespace recoilsim {

// Closed-form evaluators built from the two eigendecompositions (unprimed
// and primed coupling matrices).  Expanding the excited block in the mixed
// V (x) U* basis turns drive-free evolution into decoupled exponentials
// which integrate in closed form, and turns the stationary coefficient
// equations into diagonal solves.

struct TailResult {
  cdouble rho_gg_gain{0.0, 0.0};       // ground-coefficient gain to t = inf
  Eigen::VectorXcd excitation;         // per-atom integral of rho_ee_ii dt
};

// The spectral data shared by the closed forms for one configuration:
// modes (V, gv) of the unprimed matrix, (U, gu) of the primed matrix, the
// mixed weight matrix V^T (2 Re G') U*, and the decay denominators
// gv_a + conj(gu_b).
class SpectralPair {
 public:
  // left_modes, when supplied, skips re-decomposing the unprimed matrix
  // (it is shared across shifted configurations).
  explicit SpectralPair(const CoupledMatrices& mats,
                        std::shared_ptr<const EigenmodeSet> left_modes = {});

  const EigenmodeSet& left() const { return *left_; }
  const EigenmodeSet& right() const { return *right_; }
  int size() const { return left_->size(); }

  // Mixed-basis coefficients of an excited block: C = V^T rho_ee U*.
  Eigen::MatrixXcd project(const Eigen::MatrixXcd& rho_ee) const;
  // Same for a rank-1 block a b^T.
  Eigen::MatrixXcd project_rank1(const Eigen::VectorXcd& a,
                                 const Eigen::VectorXcd& b) const;

  // Integrated drive-free decay of the excited block with mixed-basis
  // coefficients C: the ground-coefficient gain and (optionally) the
  // per-atom excitation-probability time integrals.
  TailResult decay_integral(const Eigen::MatrixXcd& c,
                            bool want_excitation) const;

  const Eigen::MatrixXcd& mixed_weights() const { return mixed_; }
  const Eigen::MatrixXcd& denominators() const { return denom_; }
  const Eigen::MatrixXcd& right_conj() const { return u_conj_; }

 private:
  std::shared_ptr<const EigenmodeSet> left_;
  std::shared_ptr<const EigenmodeSet> right_;
  Eigen::MatrixXcd u_conj_;  // U*
  Eigen::MatrixXcd mixed_;   // V^T (2 Re G') U*
  Eigen::MatrixXcd denom_;   // gv_a + conj(gu_b)
};

// Ground-state coefficient at infinite time for a drive-free decay from
// rho_ee(0) (the initial block is shift-independent; the evolution is not).
cdouble eigen_decay_rho_gg_inf(const ShiftedConfiguration& config,
                               const Eigen::MatrixXcd& rho_ee0);

// Out-of-plane kinetic-energy law for an eigenstate of decay rate gamma:
// (2/5) Gamma / gamma, recoil-energy units.
double kz_closed_form(double decay_rate);

enum class SteadyMethod { eigen_route, direct_solve };

struct SteadySolution {
  Eigen::VectorXcd rho_eg;
  Eigen::VectorXcd rho_ge;
  Eigen::MatrixXcd rho_ee;        // product form rho_eg rho_ge^T
  cdouble rho_gg_dot{0.0, 0.0};   // full rate expression
  double scattering_rate = 0.0;   // emission term alone, coincident weights
  double excited_population = 0.0;
};

// Stationary coefficients under a cw drive in the low-intensity limit
// (the ground coefficient is taken as 1 on the right-hand sides).  The
// eigen-decomposition route is the reference; the direct linear solve is
// an equivalent optimization and the two agree to solver roundoff.
SteadySolution steady_coefficients(
    const ShiftedConfiguration& config, const DriveSpec& drive,
    SteadyMethod method = SteadyMethod::eigen_route);
SteadySolution steady_coefficients(
    const CoupledMatrices& mats, const DriveSpec& drive,
    SteadyMethod method = SteadyMethod::eigen_route,
    std::shared_ptr<const EigenmodeSet> left_modes = {});

// Rate expression evaluated on a stationary solution (already stored on
// SteadySolution; exposed for plugging alternative solutions in).
cdouble steady_rho_gg_dot(const SteadySolution& solution,
                          const CoupledMatrices& mats,
                          const DriveSpec& drive);

// Linear-response solution for an entire gaussian pulse: the net ground
// gain after the array has re-decayed, and the per-atom excitation
// integrals.  Exact up to O(rabi^2) relative corrections.
struct PulseResponse {
  cdouble rho_gg_change{0.0, 0.0};  // rho_gg(inf) - rho_gg(-inf)
  Eigen::VectorXcd excitation_integral;
};
PulseResponse pulse_linear_response(const ShiftedConfiguration& config,
                                    const DriveSpec& drive,
                                    bool want_excitation);
PulseResponse pulse_linear_response(
    const CoupledMatrices& mats, const DriveSpec& drive, bool want_excitation,
    std::shared_ptr<const EigenmodeSet> left_modes = {});

namespace detail {
// J(c) = sqrt(pi/2) t_w  Integral_0^inf exp(c s - s^2/(2 t_w^2)) ds,
// the gaussian-envelope autocorrelation transform; Re(c) < 0.
cdouble gaussian_autocorr_integral(cdouble c, double t_w);
}  // namespace detail

}  // namespace recoilsim

#endif  // RECOILSIM_ANALYTIC_HPP
