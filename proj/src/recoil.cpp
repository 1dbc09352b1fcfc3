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

#include "recoilsim/recoil.hpp"

#include <atomic>
#include <cmath>
#include <sstream>

#include "recoilsim/errors.hpp"

namespace recoilsim {

namespace {

void check_stencil(double dr) {
  if (!(dr >= kMinStencil && dr <= kMaxStencil)) {
    std::ostringstream msg;
    msg << "stencil " << dr << " outside [" << kMinStencil << ", "
        << kMaxStencil << "]";
    throw InvalidArgumentError(msg.str());
  }
}

void check_baseline_real(const Eigen::VectorXcd& f0) {
  for (Eigen::Index k = 0; k < f0.size(); ++k) {
    if (std::abs(f0(k).imag()) >
        1e-10 * std::max(1.0, std::abs(f0(k).real()))) {
      std::ostringstream msg;
      msg << "zero-shift evaluation not real: " << f0(k);
      throw NumericalError(msg.str());
    }
  }
}

double checked_real(cdouble value, cdouble discarded, const char* what) {
  const double val = value.real();
  if (std::abs(discarded) > 1e-6 * std::abs(val) + 1e-9) {
    std::ostringstream msg;
    msg << what << ": discarded imaginary part " << std::abs(discarded)
        << " too large next to " << val;
    throw NumericalError(msg.str());
  }
  return val;
}

// dp . axis = Re{ i (F+ - F-) / (2 dr) } / k   (primed-side shift)
double momentum_from(cdouble fp, cdouble fm, double dr) {
  const cdouble d = (fp - fm) / (2.0 * dr);
  const cdouble p = kImag * d / kWavenumber;
  return checked_real(p, cdouble{p.imag(), 0.0}, "momentum kick");
}

// dK . axis = Re{ -(F+ - 2 F0 + F-) } / (k dr)^2
double energy_from(cdouble fp, cdouble f0, cdouble fm, double dr) {
  const cdouble s = (fp - 2.0 * f0 + fm) / (dr * dr);
  const cdouble k = -s / (kWavenumber * kWavenumber);
  return checked_real(k, cdouble{k.imag(), 0.0}, "kinetic kick");
}

}  // namespace

double momentum_kick(const RhoGGEvaluator& eval,
                     std::shared_ptr<const AtomArray> array, int atom,
                     int axis, double dr) {
  check_stencil(dr);
  const Eigen::VectorXcd fp =
      eval.evaluate(ShiftedConfiguration::single_shift(array, atom, axis, dr));
  const Eigen::VectorXcd fm = eval.evaluate(
      ShiftedConfiguration::single_shift(array, atom, axis, -dr));
  return momentum_from(fp(0), fm(0), dr);
}

double kinetic_kick(const RhoGGEvaluator& eval,
                    std::shared_ptr<const AtomArray> array, int atom, int axis,
                    double dr) {
  check_stencil(dr);
  const Eigen::VectorXcd f0 =
      eval.evaluate(ShiftedConfiguration::coincident(array));
  const Eigen::VectorXcd fp =
      eval.evaluate(ShiftedConfiguration::single_shift(array, atom, axis, dr));
  const Eigen::VectorXcd fm = eval.evaluate(
      ShiftedConfiguration::single_shift(array, atom, axis, -dr));
  return energy_from(fp(0), f0(0), fm(0), dr);
}

std::vector<RecoilResult> recoil_map(const RhoGGEvaluator& eval,
                                     std::shared_ptr<const AtomArray> array,
                                     double dr, RecoilMode mode) {
  check_stencil(dr);
  if ((mode == RecoilMode::rate) != eval.rate_mode()) {
    throw InvalidArgumentError(
        "recoil_map: evaluator kind does not match the requested mode");
  }
  const int n = array->size();
  const int batch = eval.batch_size();

  const Eigen::VectorXcd f0 =
      eval.evaluate(ShiftedConfiguration::coincident(array));
  if (f0.size() != batch) {
    throw NumericalError("recoil_map: evaluator batch size inconsistent");
  }
  check_baseline_real(f0);

  // 6N shift jobs; each owns its slot, so any schedule reproduces the map.
  const int njobs = 6 * n;
  std::vector<Eigen::VectorXcd> shifted(static_cast<size_t>(njobs));
  std::exception_ptr failure = nullptr;
  std::atomic<bool> failed{false};
#pragma omp parallel for schedule(dynamic)
  for (int job = 0; job < njobs; ++job) {
    if (failed.load()) {
      continue;
    }
    try {
      const int atom = job / 6;
      const int axis = (job % 6) / 2;
      const double delta = (job % 2 == 0) ? dr : -dr;
      shifted[static_cast<size_t>(job)] = eval.evaluate(
          ShiftedConfiguration::single_shift(array, atom, axis, delta));
    } catch (...) {
#pragma omp critical
      {
        if (!failed.exchange(true)) {
          failure = std::current_exception();
        }
      }
    }
  }
  if (failure) {
    std::rethrow_exception(failure);
  }

  std::vector<RecoilResult> out(static_cast<size_t>(batch));
  for (auto& r : out) {
    r.momentum.resize(n, 3);
    r.energy.resize(n, 3);
    r.stencil = dr;
    r.mode = mode;
  }
  for (int atom = 0; atom < n; ++atom) {
    for (int axis = 0; axis < 3; ++axis) {
      const auto& fp = shifted[static_cast<size_t>(atom * 6 + axis * 2)];
      const auto& fm = shifted[static_cast<size_t>(atom * 6 + axis * 2 + 1)];
      for (int k = 0; k < batch; ++k) {
        out[static_cast<size_t>(k)].momentum(atom, axis) =
            momentum_from(fp(k), fm(k), dr);
        out[static_cast<size_t>(k)].energy(atom, axis) =
            energy_from(fp(k), f0(k), fm(k), dr);
      }
    }
  }
  return out;
}

RichardsonReport richardson_check(const RhoGGEvaluator& eval,
                                  std::shared_ptr<const AtomArray> array,
                                  int atom, int axis, double dr) {
  check_stencil(dr);
  const Eigen::VectorXcd f0 =
      eval.evaluate(ShiftedConfiguration::coincident(array));
  const auto value_at = [&](double h) {
    const Eigen::VectorXcd fp = eval.evaluate(
        ShiftedConfiguration::single_shift(array, atom, axis, h));
    const Eigen::VectorXcd fm = eval.evaluate(
        ShiftedConfiguration::single_shift(array, atom, axis, -h));
    return energy_from(fp(0), f0(0), fm(0), h);
  };
  RichardsonReport report;
  report.coarse = value_at(dr);
  report.fine = value_at(0.5 * dr);
  report.extrapolated = (4.0 * report.fine - report.coarse) / 3.0;
  report.rel_difference = std::abs(report.extrapolated - report.fine) /
                          std::max(std::abs(report.extrapolated), 1e-12);
  report.flagged = report.rel_difference > 1e-3;
  return report;
}

// ---------------------------------------------------------------------------
// Evaluators

PropagationEvaluator::PropagationEvaluator(CoefficientState initial,
                                           DriveSpec drive, Stepper stepper,
                                           StopCondition stop, bool fast_path)
    : initial_(std::move(initial)),
      drive_(drive),
      stepper_(stepper),
      stop_(stop),
      fast_path_(fast_path) {}

Eigen::VectorXcd PropagationEvaluator::evaluate(
    const ShiftedConfiguration& config) const {
  const PropagationResult run =
      fast_path_
          ? pure_state_fast_path(initial_, drive_, config, stepper_, stop_)
          : propagate(initial_, drive_, config, stepper_, stop_);
  Eigen::VectorXcd out(1);
  out(0) = run.final_state.rho_gg;
  return out;
}

PropagationSlopeEvaluator::PropagationSlopeEvaluator(
    DriveSpec drive, Stepper stepper, StopCondition stationary_stop,
    double slope_window, bool fast_path)
    : drive_(drive),
      stepper_(stepper),
      stop_(stationary_stop),
      window_(slope_window),
      fast_path_(fast_path) {
  if (window_ <= 0.0) {
    throw InvalidArgumentError("slope evaluator: window must be > 0");
  }
}

Eigen::VectorXcd PropagationSlopeEvaluator::evaluate(
    const ShiftedConfiguration& config) const {
  const CoefficientState start = CoefficientState::ground(config.size());
  const PropagationResult settle =
      fast_path_
          ? pure_state_fast_path(start, drive_, config, stepper_, stop_)
          : propagate(start, drive_, config, stepper_, stop_);
  const CoefficientState& mid = settle.final_state;
  const StopCondition tail = StopCondition::horizon_at(mid.t + window_);
  const PropagationResult late =
      fast_path_
          ? pure_state_fast_path(mid, drive_, config, stepper_, tail)
          : propagate(mid, drive_, config, stepper_, tail);
  Eigen::VectorXcd out(1);
  out(0) = (late.final_state.rho_gg - mid.rho_gg) / window_;
  return out;
}

AnalyticDecayEvaluator::AnalyticDecayEvaluator(
    std::shared_ptr<const AtomArray> base,
    std::vector<Eigen::VectorXcd> left_factors,
    std::vector<Eigen::VectorXcd> right_factors)
    : base_(std::move(base)),
      left_(std::move(left_factors)),
      right_(std::move(right_factors)) {
  if (left_.size() != right_.size()) {
    throw InvalidArgumentError("decay evaluator: factor list size mismatch");
  }
  GreensMatrix g;
  g.entries = assemble_greens(base_->positions, base_->positions,
                              base_->dipoles, GreensFlavor::unprimed)
                  .entries;
  g.flavor = GreensFlavor::unprimed;
  left_modes_ = std::make_shared<EigenmodeSet>(decompose(g));
}

AnalyticDecayEvaluator AnalyticDecayEvaluator::all_eigenstates(
    std::shared_ptr<const AtomArray> base) {
  AnalyticDecayEvaluator eval(std::move(base), {}, {});
  const EigenmodeSet& modes = *eval.left_modes_;
  for (int b = 0; b < modes.size(); ++b) {
    const Eigen::VectorXcd v = modes.vectors.col(b);
    eval.left_.push_back(v / v.squaredNorm());
    eval.right_.push_back(v.conjugate());
  }
  return eval;
}

AnalyticDecayEvaluator AnalyticDecayEvaluator::from_block(
    std::shared_ptr<const AtomArray> base, const Eigen::MatrixXcd& rho_ee0) {
  AnalyticDecayEvaluator eval(std::move(base), {}, {});
  if (rho_ee0.rows() != eval.base_->size() ||
      rho_ee0.cols() != eval.base_->size()) {
    throw InvalidArgumentError("decay evaluator: block size mismatch");
  }
  eval.dense_block_ = rho_ee0;
  return eval;
}

int AnalyticDecayEvaluator::batch_size() const {
  return left_.empty() ? 1 : static_cast<int>(left_.size());
}

Eigen::VectorXcd AnalyticDecayEvaluator::evaluate(
    const ShiftedConfiguration& config) const {
  if (config.base.get() != base_.get() && config.base->size() != base_->size()) {
    throw InvalidArgumentError("decay evaluator: configuration size mismatch");
  }
  const CoupledMatrices mats = build_coupled(config);
  SpectralPair pair(mats, left_modes_);
  Eigen::VectorXcd out(batch_size());
  if (left_.empty()) {
    out(0) = pair.decay_integral(pair.project(dense_block_), false)
                 .rho_gg_gain;
    return out;
  }
  for (size_t k = 0; k < left_.size(); ++k) {
    out(static_cast<Eigen::Index>(k)) =
        pair.decay_integral(pair.project_rank1(left_[k], right_[k]), false)
            .rho_gg_gain;
  }
  return out;
}

AnalyticSteadyEvaluator::AnalyticSteadyEvaluator(
    std::shared_ptr<const AtomArray> base, DriveSpec drive,
    SteadyMethod method)
    : base_(std::move(base)), drive_(drive), method_(method) {
  drive_.validate();
  if (method_ == SteadyMethod::eigen_route) {
    GreensMatrix g;
    g.entries = assemble_greens(base_->positions, base_->positions,
                                base_->dipoles, GreensFlavor::unprimed)
                    .entries;
    g.flavor = GreensFlavor::unprimed;
    left_modes_ = std::make_shared<EigenmodeSet>(decompose(g));
  }
}

Eigen::VectorXcd AnalyticSteadyEvaluator::evaluate(
    const ShiftedConfiguration& config) const {
  const CoupledMatrices mats = build_coupled(config);
  const SteadySolution sol =
      steady_coefficients(mats, drive_, method_, left_modes_);
  Eigen::VectorXcd out(1);
  out(0) = sol.rho_gg_dot;
  return out;
}

AnalyticPulseEvaluator::AnalyticPulseEvaluator(
    std::shared_ptr<const AtomArray> base, DriveSpec drive)
    : base_(std::move(base)), drive_(drive) {
  drive_.validate();
  if (drive_.profile != DriveSpec::Profile::gaussian) {
    throw InvalidArgumentError("pulse evaluator: drive must be gaussian");
  }
  GreensMatrix g;
  g.entries = assemble_greens(base_->positions, base_->positions,
                              base_->dipoles, GreensFlavor::unprimed)
                  .entries;
  g.flavor = GreensFlavor::unprimed;
  left_modes_ = std::make_shared<EigenmodeSet>(decompose(g));
}

Eigen::VectorXcd AnalyticPulseEvaluator::evaluate(
    const ShiftedConfiguration& config) const {
  const PulseResponse response =
      pulse_linear_response(build_coupled(config), drive_, false, left_modes_);
  Eigen::VectorXcd out(1);
  out(0) = 1.0 + response.rho_gg_change;
  return out;
}

}  // namespace recoilsim
