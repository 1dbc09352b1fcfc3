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

#include "recoilsim/evolution.hpp"

#include <cmath>
#include <sstream>

#include "recoilsim/analytic.hpp"
#include "recoilsim/errors.hpp"
#include "recoilsim/kernels.hpp"

namespace recoilsim {

// ---------------------------------------------------------------------------
// DriveSpec

void DriveSpec::validate() const {
  if (rabi < 0.0) {
    throw InvalidArgumentError("drive: rabi must be >= 0");
  }
  if (profile == Profile::gaussian && pulse_width <= 0.0) {
    throw InvalidArgumentError("drive: gaussian profile needs pulse_width > 0");
  }
}

double DriveSpec::temporal_envelope(double t) const {
  switch (profile) {
    case Profile::off:
      return 0.0;
    case Profile::cw:
      return 1.0;
    case Profile::gaussian: {
      const double u = t / pulse_width;
      return std::exp(-u * u);
    }
  }
  return 0.0;
}

cdouble DriveSpec::spatial_amplitude(const Vec3& r) const {
  const double s = transverse ? transverse(r) : 1.0;
  return rabi * s * std::polar(1.0, kWavenumber * r.z());
}

bool DriveSpec::negligible_after(double t) const {
  switch (profile) {
    case Profile::off:
      return true;
    case Profile::cw:
      return rabi == 0.0;
    case Profile::gaussian:
      // envelope below ~1e-7 of peak
      return t > pulse_width * 4.02;
  }
  return true;
}

DriveSpec DriveSpec::none() { return DriveSpec{}; }

DriveSpec DriveSpec::cw(double rabi, double detuning) {
  DriveSpec d;
  d.rabi = rabi;
  d.detuning = detuning;
  d.profile = Profile::cw;
  d.validate();
  return d;
}

DriveSpec DriveSpec::gaussian_pulse(double rabi, double detuning,
                                    double pulse_width) {
  DriveSpec d;
  d.rabi = rabi;
  d.detuning = detuning;
  d.profile = Profile::gaussian;
  d.pulse_width = pulse_width;
  d.validate();
  return d;
}

// ---------------------------------------------------------------------------
// ShiftedConfiguration

ShiftedConfiguration ShiftedConfiguration::coincident(
    std::shared_ptr<const AtomArray> array) {
  ShiftedConfiguration c;
  c.base = std::move(array);
  return c;
}

ShiftedConfiguration ShiftedConfiguration::single_shift(
    std::shared_ptr<const AtomArray> array, int atom, int axis, double delta) {
  ShiftedConfiguration c;
  c.base = std::move(array);
  if (atom < 0 || atom >= c.size()) {
    throw InvalidArgumentError("shift: atom index out of range");
  }
  if (axis < 0 || axis > 2) {
    throw InvalidArgumentError("shift: axis must be 0, 1 or 2");
  }
  c.primed_offsets.assign(static_cast<size_t>(c.size()), Vec3::Zero());
  c.primed_offsets[static_cast<size_t>(atom)](axis) = delta;
  c.validate();
  return c;
}

void ShiftedConfiguration::validate() const {
  if (!base) {
    throw InvalidArgumentError("configuration has no atom array");
  }
  if (!primed_offsets.empty() &&
      primed_offsets.size() != base->positions.size()) {
    throw InvalidArgumentError("offset list length mismatch");
  }
  for (const auto& d : primed_offsets) {
    if (!d.allFinite()) {
      throw InvalidArgumentError("non-finite primed offset");
    }
    if (d.norm() > kMaxOffset) {
      throw InvalidArgumentError(
          "primed offset exceeds the finite-difference regime");
    }
  }
}

bool ShiftedConfiguration::is_coincident() const {
  for (const auto& d : primed_offsets) {
    if (d.squaredNorm() != 0.0) {
      return false;
    }
  }
  return true;
}

std::vector<Vec3> ShiftedConfiguration::primed_positions() const {
  std::vector<Vec3> out = base->positions;
  for (size_t i = 0; i < primed_offsets.size(); ++i) {
    out[i] += primed_offsets[i];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Coupled matrices

CoupledMatrices build_coupled(const ShiftedConfiguration& config) {
  config.validate();
  if (config.is_coincident()) {
    CoupledMatrices m;
    m.unprimed = config.base->positions;
    m.primed = config.base->positions;
    m.g = assemble_greens(m.unprimed, m.unprimed, config.base->dipoles,
                          GreensFlavor::unprimed)
              .entries;
    m.gpp_conj = m.g.conjugate();
    m.mixed_2re = 2.0 * m.g.real();
    m.coincident = true;
    return m;
  }
  return build_coupled(config.base->positions, config.primed_positions(),
                       config.base->dipoles);
}

CoupledMatrices build_coupled(const std::vector<Vec3>& unprimed,
                              const std::vector<Vec3>& primed,
                              const std::vector<CVec3>& dipoles) {
  CoupledMatrices m;
  m.unprimed = unprimed;
  m.primed = primed;
  m.g = assemble_greens(unprimed, unprimed, dipoles, GreensFlavor::unprimed)
            .entries;
  m.gpp_conj =
      assemble_greens(primed, primed, dipoles, GreensFlavor::primed)
          .entries.conjugate();
  m.mixed_2re =
      2.0 *
      assemble_greens(unprimed, primed, dipoles, GreensFlavor::mixed)
          .entries.real();
  m.coincident = false;
  return m;
}

// ---------------------------------------------------------------------------
// States

CoefficientState CoefficientState::ground(int n, double t0) {
  CoefficientState s;
  s.rho_gg = cdouble{1.0, 0.0};
  s.rho_eg = Eigen::VectorXcd::Zero(n);
  s.rho_ge = Eigen::VectorXcd::Zero(n);
  s.rho_ee = Eigen::MatrixXcd::Zero(n, n);
  s.t = t0;
  return s;
}

CoefficientState init_eigenstate(const EigenmodeSet& modes, int mode_index) {
  if (!modes.normalized) {
    throw InvalidArgumentError("init_eigenstate: modes must be normalized");
  }
  if (mode_index < 0 || mode_index >= modes.size()) {
    throw InvalidArgumentError("init_eigenstate: mode index out of range");
  }
  const Eigen::VectorXcd v = modes.vectors.col(mode_index);
  const double weight = v.squaredNorm();  // magnitude, not bilinear
  CoefficientState s = CoefficientState::ground(modes.size());
  s.rho_gg = cdouble{0.0, 0.0};
  s.rho_ee = (v * v.adjoint()) / weight;
  return s;
}

// ---------------------------------------------------------------------------
// Right-hand side

namespace {

struct DrivePhases {
  Eigen::VectorXcd unprimed;  // spatial amplitude at r_j
  Eigen::VectorXcd primed;    // spatial amplitude at r'_j
  bool active = false;
};

DrivePhases make_phases(const DriveSpec& drive, const CoupledMatrices& mats) {
  DrivePhases p;
  p.active = drive.active();
  const int n = mats.size();
  p.unprimed.resize(n);
  p.primed.resize(n);
  for (int i = 0; i < n; ++i) {
    p.unprimed(i) =
        drive.spatial_amplitude(mats.unprimed[static_cast<size_t>(i)]);
    p.primed(i) = drive.spatial_amplitude(mats.primed[static_cast<size_t>(i)]);
  }
  return p;
}

// d/dt of the four blocks; scratch holds the two matrix products.
void rhs_full(const CoefficientState& s, double t, const DriveSpec& drive,
              const DrivePhases& phases, const CoupledMatrices& mats,
              Eigen::MatrixXcd& scratch, CoefficientState& d) {
  const double detuning = drive.detuning;
  const cdouble idelta{0.0, detuning};

  kernels::matvec_t(mats.g, s.rho_eg, d.rho_eg);  // G rho_eg (symmetric)
  d.rho_eg = idelta * s.rho_eg - d.rho_eg;
  kernels::matvec_t(mats.gpp_conj, s.rho_ge, d.rho_ge);
  d.rho_ge = -idelta * s.rho_ge - d.rho_ge;

  kernels::matmul_t(mats.g, s.rho_ee, d.rho_ee);  // G rho_ee
  kernels::matmul(s.rho_ee, mats.gpp_conj, scratch);
  d.rho_ee = -d.rho_ee - scratch;

  d.rho_gg = kernels::overlap_sum(mats.mixed_2re, s.rho_ee);

  if (phases.active) {
    const double env = drive.temporal_envelope(t);
    if (env != 0.0) {
      const cdouble half_i{0.0, 0.5 * env};
      // -i/2 W(r) rho_gg ; +i/2 W*(r') rho_gg
      d.rho_eg -= half_i * s.rho_gg * phases.unprimed;
      d.rho_ge += half_i * s.rho_gg * phases.primed.conjugate();
      // -i/2 W(r_i) rho_ge_j + i/2 W*(r'_j) rho_eg_i
      d.rho_ee.noalias() -= (half_i * phases.unprimed) * s.rho_ge.transpose();
      d.rho_ee.noalias() +=
          s.rho_eg * (half_i * phases.primed.conjugate()).transpose();
      // drive part of d rho_gg
      cdouble acc{0.0, 0.0};
      for (int j = 0; j < s.size(); ++j) {
        acc -= std::conj(phases.unprimed(j)) * s.rho_eg(j);
        acc += phases.primed(j) * s.rho_ge(j);
      }
      d.rho_gg += half_i * acc;
    }
  }
  d.t = 1.0;
}

void axpy_state(const CoefficientState& y, const CoefficientState& d,
                double a, CoefficientState& out) {
  out.rho_gg = y.rho_gg + a * d.rho_gg;
  out.rho_eg = y.rho_eg + a * d.rho_eg;
  out.rho_ge = y.rho_ge + a * d.rho_ge;
  out.rho_ee = y.rho_ee + a * d.rho_ee;
  out.t = y.t + a;
}

bool state_finite(const CoefficientState& s) {
  return std::isfinite(s.rho_gg.real()) && std::isfinite(s.rho_gg.imag()) &&
         s.rho_eg.allFinite() && s.rho_ge.allFinite() && s.rho_ee.allFinite();
}

}  // namespace

void coefficient_rhs(const CoefficientState& state, double t,
                     const DriveSpec& drive, const CoupledMatrices& mats,
                     CoefficientState& derivative) {
  if (state.size() != mats.size() || state.rho_ee.rows() != mats.size()) {
    throw InvalidArgumentError("coefficient_rhs: dimension mismatch");
  }
  drive.validate();
  const DrivePhases phases = make_phases(drive, mats);
  Eigen::MatrixXcd scratch;
  derivative = CoefficientState::ground(state.size());
  rhs_full(state, t, drive, phases, mats, scratch, derivative);
}

// ---------------------------------------------------------------------------
// Stop conditions

StopCondition StopCondition::decay(double eps) {
  StopCondition s;
  s.kind = Kind::population_below;
  s.eps_decay = eps;
  return s;
}

StopCondition StopCondition::steady(double tol) {
  StopCondition s;
  s.kind = Kind::stationary;
  s.stationary_tol = tol;
  return s;
}

StopCondition StopCondition::horizon_at(double t_end) {
  StopCondition s;
  s.kind = Kind::horizon;
  s.t_max = t_end;
  return s;
}

// ---------------------------------------------------------------------------
// Full-matrix propagation

namespace {

void sample_full(const CoefficientState& s, Trajectory& traj) {
  traj.times.push_back(s.t);
  traj.rho_gg.push_back(s.rho_gg);
  traj.populations.push_back(s.rho_ee.diagonal());
}

// Exact drive-free remainder from the current excited block.
void apply_tail_full(const CoupledMatrices& mats, CoefficientState& s,
                     PropagationResult& result) {
  SpectralPair pair(mats);
  const TailResult tail = pair.decay_integral(pair.project(s.rho_ee), true);
  s.rho_gg += tail.rho_gg_gain;
  s.rho_eg.setZero();
  s.rho_ge.setZero();
  s.rho_ee.setZero();
  result.tail_used = true;
  result.tail_excitation = tail.excitation;
}

}  // namespace

PropagationResult propagate(const CoefficientState& initial,
                            const DriveSpec& drive,
                            const ShiftedConfiguration& config,
                            const Stepper& stepper, const StopCondition& stop,
                            int sample_stride) {
  const CoupledMatrices mats = build_coupled(config);
  return propagate_with(initial, drive, mats, stepper, stop, sample_stride);
}

PropagationResult propagate_with(const CoefficientState& initial,
                                 const DriveSpec& drive,
                                 const CoupledMatrices& mats,
                                 const Stepper& stepper,
                                 const StopCondition& stop,
                                 int sample_stride) {
  if (stepper.dt <= 0.0) {
    throw InvalidArgumentError("propagate: dt must be > 0");
  }
  drive.validate();
  if (initial.size() != mats.size()) {
    throw InvalidArgumentError("propagate: state/matrix size mismatch");
  }

  PropagationResult result;
  CoefficientState y = initial;
  const DrivePhases phases = make_phases(drive, mats);
  const int n = y.size();
  CoefficientState k{}, mid{};
  k.rho_eg.resize(n);
  k.rho_ge.resize(n);
  k.rho_ee.resize(n, n);
  mid = k;
  Eigen::MatrixXcd scratch(n, n);

  const double dt = stepper.dt;
  long step = 0;
  while (true) {
    const bool tail_ready = stop.analytic_tail &&
                            stop.kind != StopCondition::Kind::horizon &&
                            drive.negligible_after(y.t);
    if (tail_ready) {
      apply_tail_full(mats, y, result);
      break;
    }
    if (stop.kind == StopCondition::Kind::population_below &&
        std::abs(y.excited_population()) < stop.eps_decay &&
        drive.negligible_after(y.t)) {
      break;
    }
    if (y.t >= stop.t_max - 1e-12) {
      result.hit_horizon = stop.kind != StopCondition::Kind::horizon;
      break;
    }

    if (sample_stride > 0 && step % sample_stride == 0) {
      sample_full(y, result.trajectory);
    }

    // midpoint RK2; trim the final step to land on the horizon exactly
    double h = dt;
    if (stop.kind == StopCondition::Kind::horizon && y.t + h > stop.t_max) {
      h = stop.t_max - y.t;
    }
    rhs_full(y, y.t, drive, phases, mats, scratch, k);
    axpy_state(y, k, 0.5 * h, mid);
    rhs_full(mid, mid.t, drive, phases, mats, scratch, k);
    axpy_state(y, k, h, y);
    ++step;

    if (step % 256 == 0 && !state_finite(y)) {
      throw InstabilityError("propagation produced non-finite values", y.t,
                             dt);
    }
    if (stop.kind == StopCondition::Kind::stationary &&
        step % stop.check_stride == 0) {
      const double wn = std::max(y.rho_eg.norm(), 1e-300);
      const double wtn = std::max(y.rho_ge.norm(), 1e-300);
      const double rn = std::max(y.rho_ee.norm(), 1e-300);
      if (k.rho_eg.norm() < stop.stationary_tol * wn &&
          k.rho_ge.norm() < stop.stationary_tol * wtn &&
          k.rho_ee.norm() < stop.stationary_tol * rn) {
        break;
      }
    }
  }
  if (!state_finite(y)) {
    throw InstabilityError("propagation produced non-finite values", y.t, dt);
  }
  if (sample_stride > 0) {
    sample_full(y, result.trajectory);
  }
  result.final_state = std::move(y);
  return result;
}

// ---------------------------------------------------------------------------
// Factorized fast path

namespace {

struct FastState {
  cdouble rho_gg{0.0, 0.0};
  Eigen::VectorXcd w;   // drive-built rho_eg
  Eigen::VectorXcd wt;  // drive-built rho_ge
  Eigen::VectorXcd a;   // homogeneous rank-1 factors of rho_ee
  Eigen::VectorXcd b;
  double t = 0.0;
};

constexpr double kTinyGround = 1e-12;

cdouble fast_population(const FastState& s, bool has_h) {
  cdouble pop{0.0, 0.0};
  if (has_h) {
    pop += (s.a.array() * s.b.array()).sum();
  }
  if (std::abs(s.rho_gg) > kTinyGround) {
    pop += (s.w.array() * s.wt.array()).sum() / s.rho_gg;
  }
  return pop;
}

void rhs_fast(const FastState& s, double t, const DriveSpec& drive,
              const DrivePhases& phases, const CoupledMatrices& mats,
              bool has_h, FastState& d) {
  const cdouble idelta{0.0, drive.detuning};
  kernels::matvec_t(mats.g, s.w, d.w);
  d.w = idelta * s.w - d.w;
  kernels::matvec_t(mats.gpp_conj, s.wt, d.wt);
  d.wt = -idelta * s.wt - d.wt;
  if (has_h) {
    kernels::matvec_t(mats.g, s.a, d.a);
    d.a = -d.a;
    kernels::matvec_t(mats.gpp_conj, s.b, d.b);
    d.b = -d.b;
  }

  d.rho_gg = cdouble{0.0, 0.0};
  if (has_h) {
    d.rho_gg += kernels::weighted_pair_sum(mats.mixed_2re, s.a, s.b);
  }
  if (std::abs(s.rho_gg) > kTinyGround) {
    d.rho_gg +=
        kernels::weighted_pair_sum(mats.mixed_2re, s.w, s.wt) / s.rho_gg;
  }
  if (phases.active) {
    const double env = drive.temporal_envelope(t);
    if (env != 0.0) {
      const cdouble half_i{0.0, 0.5 * env};
      d.w -= half_i * s.rho_gg * phases.unprimed;
      d.wt += half_i * s.rho_gg * phases.primed.conjugate();
      cdouble acc{0.0, 0.0};
      for (int j = 0; j < s.w.size(); ++j) {
        acc -= std::conj(phases.unprimed(j)) * s.w(j);
        acc += phases.primed(j) * s.wt(j);
      }
      d.rho_gg += half_i * acc;
    }
  }
  d.t = 1.0;
}

void axpy_fast(const FastState& y, const FastState& d, double h, bool has_h,
               FastState& out) {
  out.rho_gg = y.rho_gg + h * d.rho_gg;
  out.w = y.w + h * d.w;
  out.wt = y.wt + h * d.wt;
  if (has_h) {
    out.a = y.a + h * d.a;
    out.b = y.b + h * d.b;
  }
  out.t = y.t + h;
}

}  // namespace

PropagationResult pure_state_fast_path(const CoefficientState& initial,
                                       const DriveSpec& drive,
                                       const ShiftedConfiguration& config,
                                       const Stepper& stepper,
                                       const StopCondition& stop,
                                       int sample_stride) {
  if (stepper.dt <= 0.0) {
    throw InvalidArgumentError("fast path: dt must be > 0");
  }
  drive.validate();
  if (drive.active() && drive.rabi > kFastPathMaxRabi) {
    throw InvalidArgumentError(
        "fast path: drive exceeds the weak-drive regime");
  }
  const int n = initial.size();

  FastState y;
  y.t = initial.t;
  y.rho_gg = initial.rho_gg;
  y.w = initial.rho_eg;
  y.wt = initial.rho_ge;
  // Split the excited block into the drive-built product part and a
  // homogeneous remainder, which must be rank-1 (pure) or absent.
  Eigen::MatrixXcd homog = initial.rho_ee;
  if (std::abs(y.rho_gg) > kTinyGround) {
    homog.noalias() -= y.w * y.wt.transpose() / y.rho_gg;
  }
  bool has_h = false;
  const double block_norm = homog.norm();
  if (block_norm > 1e-12 + 1e-9 * initial.rho_ee.norm()) {
    Eigen::Index imax = 0, jmax = 0;
    homog.cwiseAbs().maxCoeff(&imax, &jmax);
    const cdouble pivot = homog(imax, jmax);
    y.a = homog.col(jmax);
    y.b = homog.row(imax).transpose() / pivot;
    const double resid = (homog - y.a * y.b.transpose()).norm();
    if (resid > 1e-8 * block_norm) {
      throw UnsupportedStateError(
          "fast path: initial excited block is not a pure (rank-1) state");
    }
    has_h = true;
  } else {
    y.a = Eigen::VectorXcd::Zero(n);
    y.b = Eigen::VectorXcd::Zero(n);
  }

  const CoupledMatrices mats = build_coupled(config);
  const DrivePhases phases = make_phases(drive, mats);

  PropagationResult result;
  auto sample = [&](const FastState& s) {
    result.trajectory.times.push_back(s.t);
    result.trajectory.rho_gg.push_back(s.rho_gg);
    Eigen::VectorXcd pops = Eigen::VectorXcd::Zero(n);
    if (has_h) {
      pops.array() += s.a.array() * s.b.array();
    }
    if (std::abs(s.rho_gg) > kTinyGround) {
      pops.array() += s.w.array() * s.wt.array() / s.rho_gg;
    }
    result.trajectory.populations.push_back(std::move(pops));
  };

  FastState k, mid;
  const double dt = stepper.dt;
  long step = 0;
  bool tail_applied = false;
  while (true) {
    if (stop.analytic_tail && stop.kind != StopCondition::Kind::horizon &&
        drive.negligible_after(y.t)) {
      SpectralPair pair(mats);
      Eigen::MatrixXcd c =
          Eigen::MatrixXcd::Zero(n, n);
      if (has_h) {
        c += pair.project_rank1(y.a, y.b);
      }
      if (std::abs(y.rho_gg) > kTinyGround) {
        c += pair.project_rank1(y.w, y.wt) / y.rho_gg;
      }
      const TailResult tail = pair.decay_integral(c, true);
      y.rho_gg += tail.rho_gg_gain;
      y.w.setZero();
      y.wt.setZero();
      y.a.setZero();
      y.b.setZero();
      result.tail_used = true;
      result.tail_excitation = tail.excitation;
      tail_applied = true;
      break;
    }
    if (stop.kind == StopCondition::Kind::population_below &&
        std::abs(fast_population(y, has_h)) < stop.eps_decay &&
        drive.negligible_after(y.t)) {
      break;
    }
    if (y.t >= stop.t_max - 1e-12) {
      result.hit_horizon = stop.kind != StopCondition::Kind::horizon;
      break;
    }
    if (sample_stride > 0 && step % sample_stride == 0) {
      sample(y);
    }

    double h = dt;
    if (stop.kind == StopCondition::Kind::horizon && y.t + h > stop.t_max) {
      h = stop.t_max - y.t;
    }
    rhs_fast(y, y.t, drive, phases, mats, has_h, k);
    axpy_fast(y, k, 0.5 * h, has_h, mid);
    rhs_fast(mid, mid.t, drive, phases, mats, has_h, k);
    axpy_fast(y, k, h, has_h, y);
    ++step;

    if (step % 256 == 0 &&
        !(std::isfinite(y.rho_gg.real()) && y.w.allFinite() &&
          y.wt.allFinite() && (!has_h || y.a.allFinite()))) {
      throw InstabilityError("fast path produced non-finite values", y.t, dt);
    }
    if (stop.kind == StopCondition::Kind::stationary &&
        step % stop.check_stride == 0) {
      const double wn = std::max(y.w.norm(), 1e-300);
      const double wtn = std::max(y.wt.norm(), 1e-300);
      bool settled = k.w.norm() < stop.stationary_tol * wn &&
                     k.wt.norm() < stop.stationary_tol * wtn;
      if (has_h) {
        const double an = std::max(y.a.norm(), 1e-300);
        const double bn = std::max(y.b.norm(), 1e-300);
        settled = settled && k.a.norm() < stop.stationary_tol * an &&
                  k.b.norm() < stop.stationary_tol * bn;
      }
      if (settled) {
        break;
      }
    }
  }
  if (sample_stride > 0) {
    sample(y);
  }

  CoefficientState final_state = CoefficientState::ground(n, y.t);
  final_state.rho_gg = y.rho_gg;
  final_state.rho_eg = y.w;
  final_state.rho_ge = y.wt;
  if (!tail_applied) {
    if (has_h) {
      final_state.rho_ee = y.a * y.b.transpose();
    }
    if (std::abs(y.rho_gg) > kTinyGround) {
      final_state.rho_ee.noalias() += y.w * y.wt.transpose() / y.rho_gg;
    }
  }
  result.final_state = std::move(final_state);
  return result;
}

}  // namespace recoilsim
