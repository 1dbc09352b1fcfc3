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

#ifndef RECOILSIM_RECOIL_HPP
#define RECOILSIM_RECOIL_HPP

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "recoilsim/analytic.hpp"
#include "recoilsim/evolution.hpp"

namespace recoilsim {

// Per-atom recoil momentum and kinetic energy from finite differences of
// the ground-state coefficient over shifted primed coordinates.  With a
// final-state evaluator the results are total kicks; with a steady-state
// evaluator they are rates per unit time.
//
// Sign convention: only the primed coordinates are shifted, and a photon
// absorbed from a beam travelling along +z yields positive momentum along
// z.  With the primed-side derivative D that reads  dp = Re{i D} / k.

// Deterministic map from a shifted configuration to the ground-state
// coefficient (or its steady rate).  Batched evaluators return one value
// per stored initial condition for every configuration.
class RhoGGEvaluator {
 public:
  virtual ~RhoGGEvaluator() = default;
  virtual bool rate_mode() const = 0;
  virtual int batch_size() const { return 1; }
  virtual Eigen::VectorXcd evaluate(const ShiftedConfiguration& config) const
      = 0;
};

inline constexpr double kMinStencil = 1e-4;
inline constexpr double kMaxStencil = 1e-2;
inline constexpr double kDefaultStencil = 1e-3;

enum class RecoilMode { total, rate };

struct RecoilResult {
  Eigen::MatrixXd momentum;  // N x 3, photon-kick units (/time in rate mode)
  Eigen::MatrixXd energy;    // N x 3, recoil-energy units (/time in rate mode)
  double stencil = kDefaultStencil;
  RecoilMode mode = RecoilMode::total;
  Eigen::VectorXd total_energy() const { return energy.rowwise().sum(); }
};

// Single-atom single-axis kicks (first batch entry).
double momentum_kick(const RhoGGEvaluator& eval,
                     std::shared_ptr<const AtomArray> array, int atom,
                     int axis, double dr);
double kinetic_kick(const RhoGGEvaluator& eval,
                    std::shared_ptr<const AtomArray> array, int atom, int axis,
                    double dr);

// All atoms x 3 axes; 6N + 1 evaluator calls (momentum and energy stencils
// share the +-dr evaluations and the unshifted baseline).  One result per
// batch entry.  Shift jobs run in parallel; each job owns its output slot,
// so the map is reproducible under any schedule.
std::vector<RecoilResult> recoil_map(const RhoGGEvaluator& eval,
                                     std::shared_ptr<const AtomArray> array,
                                     double dr, RecoilMode mode);

struct RichardsonReport {
  double coarse = 0.0;        // energy kick at dr
  double fine = 0.0;          // energy kick at dr/2
  double extrapolated = 0.0;
  double rel_difference = 0.0;
  bool flagged = false;
};

// Richardson consistency check of the energy stencil at dr and dr/2.
RichardsonReport richardson_check(const RhoGGEvaluator& eval,
                                  std::shared_ptr<const AtomArray> array,
                                  int atom, int axis, double dr);

// ---------------------------------------------------------------------------
// Evaluators

// Final rho_gg from time propagation (full matrix or factorized fast path).
class PropagationEvaluator : public RhoGGEvaluator {
 public:
  PropagationEvaluator(CoefficientState initial, DriveSpec drive,
                       Stepper stepper, StopCondition stop,
                       bool fast_path = false);
  bool rate_mode() const override { return false; }
  Eigen::VectorXcd evaluate(const ShiftedConfiguration& config) const override;

 private:
  CoefficientState initial_;
  DriveSpec drive_;
  Stepper stepper_;
  StopCondition stop_;
  bool fast_path_;
};

// Steady rate from propagation: run to stationarity, then take the slope of
// the ground coefficient over a trailing window.
class PropagationSlopeEvaluator : public RhoGGEvaluator {
 public:
  PropagationSlopeEvaluator(DriveSpec drive, Stepper stepper,
                            StopCondition stationary_stop,
                            double slope_window, bool fast_path = true);
  bool rate_mode() const override { return true; }
  Eigen::VectorXcd evaluate(const ShiftedConfiguration& config) const override;

 private:
  DriveSpec drive_;
  Stepper stepper_;
  StopCondition stop_;
  double window_;
  bool fast_path_;
};

// Closed-form decay of drive-free initial excitations (batched over rank-1
// excited blocks, e.g. all eigenstates of an array).
class AnalyticDecayEvaluator : public RhoGGEvaluator {
 public:
  // rho_ee(0) = a b^T per entry.
  AnalyticDecayEvaluator(std::shared_ptr<const AtomArray> base,
                         std::vector<Eigen::VectorXcd> left_factors,
                         std::vector<Eigen::VectorXcd> right_factors);
  // Every eigenstate of the array's coupling matrix, trace-normalized.
  static AnalyticDecayEvaluator all_eigenstates(
      std::shared_ptr<const AtomArray> base);
  // Single arbitrary excited block (factorized if rank-1, else kept dense).
  static AnalyticDecayEvaluator from_block(
      std::shared_ptr<const AtomArray> base, const Eigen::MatrixXcd& rho_ee0);

  bool rate_mode() const override { return false; }
  int batch_size() const override;
  Eigen::VectorXcd evaluate(const ShiftedConfiguration& config) const override;

  const EigenmodeSet& base_modes() const { return *left_modes_; }

 private:
  std::shared_ptr<const AtomArray> base_;
  std::shared_ptr<const EigenmodeSet> left_modes_;
  std::vector<Eigen::VectorXcd> left_;
  std::vector<Eigen::VectorXcd> right_;
  Eigen::MatrixXcd dense_block_;  // used when factors are empty
};

// Steady-state rate of the ground coefficient under a cw drive.
class AnalyticSteadyEvaluator : public RhoGGEvaluator {
 public:
  AnalyticSteadyEvaluator(std::shared_ptr<const AtomArray> base,
                          DriveSpec drive,
                          SteadyMethod method = SteadyMethod::eigen_route);
  bool rate_mode() const override { return true; }
  Eigen::VectorXcd evaluate(const ShiftedConfiguration& config) const override;

 private:
  std::shared_ptr<const AtomArray> base_;
  DriveSpec drive_;
  SteadyMethod method_;
  std::shared_ptr<const EigenmodeSet> left_modes_;  // eigen route cache
};

// Ground gain over a whole gaussian pulse in linear response.
class AnalyticPulseEvaluator : public RhoGGEvaluator {
 public:
  AnalyticPulseEvaluator(std::shared_ptr<const AtomArray> base,
                         DriveSpec drive);
  bool rate_mode() const override { return false; }
  Eigen::VectorXcd evaluate(const ShiftedConfiguration& config) const override;

 private:
  std::shared_ptr<const AtomArray> base_;
  DriveSpec drive_;
  std::shared_ptr<const EigenmodeSet> left_modes_;
};

}  // namespace recoilsim

#endif  // RECOILSIM_RECOIL_HPP
