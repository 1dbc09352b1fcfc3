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

#include "recoilsim/analytic.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "recoilsim/errors.hpp"

namespace recoilsim {

namespace {

Eigen::VectorXcd drive_vector(const DriveSpec& drive,
                              const std::vector<Vec3>& positions) {
  Eigen::VectorXcd out(static_cast<Eigen::Index>(positions.size()));
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    out(i) = drive.spatial_amplitude(positions[static_cast<size_t>(i)]);
  }
  return out;
}

}  // namespace

SpectralPair::SpectralPair(const CoupledMatrices& mats,
                           std::shared_ptr<const EigenmodeSet> left_modes) {
  if (left_modes) {
    left_ = std::move(left_modes);
  } else {
    GreensMatrix g;
    g.entries = mats.g;
    g.flavor = GreensFlavor::unprimed;
    left_ = std::make_shared<EigenmodeSet>(decompose(g));
  }
  if (mats.coincident) {
    right_ = left_;
  } else {
    GreensMatrix gpp;
    gpp.entries = mats.gpp_conj.conjugate();
    gpp.flavor = GreensFlavor::primed;
    right_ = std::make_shared<EigenmodeSet>(decompose(gpp));
  }

  u_conj_ = right_->vectors.conjugate();
  mixed_ = left_->vectors.transpose() *
           (mats.mixed_2re.cast<cdouble>() * u_conj_);

  const int n = left_->size();
  denom_.resize(n, n);
  for (int b = 0; b < n; ++b) {
    const cdouble gub = std::conj(right_->eigenvalues(b));
    for (int a = 0; a < n; ++a) {
      const cdouble d = left_->eigenvalues(a) + gub;
      if (d.real() <= 0.0) {
        std::ostringstream msg;
        msg << "non-positive decay denominator for mode pair (" << a << ", "
            << b << "): Re = " << d.real();
        throw NumericalError(msg.str());
      }
      denom_(a, b) = d;
    }
  }
}

Eigen::MatrixXcd SpectralPair::project(const Eigen::MatrixXcd& rho_ee) const {
  return left_->vectors.transpose() * (rho_ee * u_conj_);
}

Eigen::MatrixXcd SpectralPair::project_rank1(const Eigen::VectorXcd& a,
                                             const Eigen::VectorXcd& b) const {
  const Eigen::VectorXcd p = left_->vectors.transpose() * a;
  const Eigen::VectorXcd q = u_conj_.transpose() * b;
  return p * q.transpose();
}

TailResult SpectralPair::decay_integral(const Eigen::MatrixXcd& c,
                                        bool want_excitation) const {
  TailResult out;
  const Eigen::MatrixXcd d = c.cwiseQuotient(denom_);
  out.rho_gg_gain = (mixed_.array() * d.array()).sum();
  if (want_excitation) {
    const Eigen::MatrixXcd vd = left_->vectors * d;
    out.excitation = (vd.array() * u_conj_.array()).rowwise().sum();
  }
  return out;
}

cdouble eigen_decay_rho_gg_inf(const ShiftedConfiguration& config,
                               const Eigen::MatrixXcd& rho_ee0) {
  const CoupledMatrices mats = build_coupled(config);
  if (rho_ee0.rows() != mats.size() || rho_ee0.cols() != mats.size()) {
    throw InvalidArgumentError("eigen_decay_rho_gg_inf: block size mismatch");
  }
  SpectralPair pair(mats);
  return pair.decay_integral(pair.project(rho_ee0), false).rho_gg_gain;
}

double kz_closed_form(double decay_rate) {
  if (decay_rate <= 0.0) {
    throw InvalidArgumentError("kz_closed_form: decay rate must be > 0");
  }
  return 0.4 * kGamma / decay_rate;
}

SteadySolution steady_coefficients(const ShiftedConfiguration& config,
                                   const DriveSpec& drive,
                                   SteadyMethod method) {
  return steady_coefficients(build_coupled(config), drive, method, nullptr);
}

SteadySolution steady_coefficients(
    const CoupledMatrices& mats, const DriveSpec& drive, SteadyMethod method,
    std::shared_ptr<const EigenmodeSet> left_modes) {
  drive.validate();
  if (drive.profile != DriveSpec::Profile::cw) {
    throw InvalidArgumentError("steady_coefficients: drive must be cw");
  }
  const int n = mats.size();
  const Eigen::VectorXcd amp_u = drive_vector(drive, mats.unprimed);
  const Eigen::VectorXcd amp_p = drive_vector(drive, mats.primed);
  const cdouble half_i{0.0, 0.5};
  const cdouble idelta{0.0, drive.detuning};

  SteadySolution sol;
  if (method == SteadyMethod::eigen_route) {
    SpectralPair pair(mats, std::move(left_modes));
    const EigenmodeSet& vm = pair.left();
    const EigenmodeSet& um = pair.right();
    Eigen::VectorXcd wprime = vm.vectors.transpose() * amp_u;
    Eigen::VectorXcd wtprime =
        (um.vectors.transpose() * amp_p).conjugate();
    for (int a = 0; a < n; ++a) {
      const cdouble dv = vm.eigenvalues(a) - idelta;
      const cdouble du = std::conj(um.eigenvalues(a)) + idelta;
      if (std::abs(dv) < 1e-12 || std::abs(du) < 1e-12) {
        throw SingularityError(
            "steady_coefficients: detuning hits an eigenvalue pole");
      }
      wprime(a) *= -half_i / dv;
      wtprime(a) *= half_i / du;
    }
    sol.rho_eg = vm.vectors * wprime;
    sol.rho_ge = um.vectors.conjugate() * wtprime;
  } else {
    Eigen::MatrixXcd lhs = mats.g;
    lhs.diagonal().array() -= idelta;
    const Eigen::VectorXcd rhs_w = -half_i * amp_u;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(lhs);
    sol.rho_eg = lu.solve(rhs_w);
    if ((lhs * sol.rho_eg - rhs_w).norm() > 1e-8 * rhs_w.norm()) {
      throw SingularityError("steady_coefficients: singular unprimed solve");
    }
    Eigen::MatrixXcd lhs2 = mats.gpp_conj;
    lhs2.diagonal().array() += idelta;
    const Eigen::VectorXcd rhs_wt = half_i * amp_p.conjugate();
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu2(lhs2);
    sol.rho_ge = lu2.solve(rhs_wt);
    if ((lhs2 * sol.rho_ge - rhs_wt).norm() > 1e-8 * rhs_wt.norm()) {
      throw SingularityError("steady_coefficients: singular primed solve");
    }
  }

  sol.rho_ee = sol.rho_eg * sol.rho_ge.transpose();
  sol.rho_gg_dot = steady_rho_gg_dot(sol, mats, drive);
  sol.scattering_rate =
      (2.0 * mats.g.real().cast<cdouble>().array() * sol.rho_ee.array())
          .sum()
          .real();
  sol.excited_population = sol.rho_ee.trace().real();
  return sol;
}

cdouble steady_rho_gg_dot(const SteadySolution& solution,
                          const CoupledMatrices& mats,
                          const DriveSpec& drive) {
  const Eigen::VectorXcd amp_u = drive_vector(drive, mats.unprimed);
  const Eigen::VectorXcd amp_p = drive_vector(drive, mats.primed);
  cdouble rate =
      (mats.mixed_2re.cast<cdouble>().array() * solution.rho_ee.array()).sum();
  cdouble acc{0.0, 0.0};
  for (Eigen::Index j = 0; j < amp_u.size(); ++j) {
    acc -= std::conj(amp_u(j)) * solution.rho_eg(j);
    acc += amp_p(j) * solution.rho_ge(j);
  }
  rate += cdouble{0.0, 0.5} * acc;
  return rate;
}

namespace detail {

cdouble gaussian_autocorr_integral(cdouble c, double t_w) {
  if (t_w <= 0.0) {
    throw InvalidArgumentError("gaussian_autocorr_integral: t_w must be > 0");
  }
  if (c.real() > 0.0) {
    throw InvalidArgumentError(
        "gaussian_autocorr_integral: Re(c) must be <= 0");
  }
  // J = sqrt(pi/2) t_w^2 Integral_0^X exp(z x - x^2/2) dx, z = c t_w; the
  // gaussian factor kills the integrand by X = 12 regardless of z.
  constexpr int kIntervals = 16384;
  constexpr double kUpper = 12.0;
  static const std::vector<double> gauss = [] {
    std::vector<double> g(kIntervals + 1);
    const double h = kUpper / kIntervals;
    for (int i = 0; i <= kIntervals; ++i) {
      const double x = i * h;
      g[static_cast<size_t>(i)] = std::exp(-0.5 * x * x);
    }
    return g;
  }();

  const cdouble z = c * t_w;
  const double h = kUpper / kIntervals;
  const cdouble step = std::exp(z * h);
  cdouble ez{1.0, 0.0};
  cdouble acc{0.0, 0.0};
  for (int i = 0; i <= kIntervals; ++i) {
    const double w = (i == 0 || i == kIntervals) ? 1.0
                     : (i % 2 == 1)              ? 4.0
                                                 : 2.0;
    acc += w * gauss[static_cast<size_t>(i)] * ez;
    ez *= step;
  }
  acc *= h / 3.0;
  return std::sqrt(kPi / 2.0) * t_w * t_w * acc;
}

}  // namespace detail

PulseResponse pulse_linear_response(const ShiftedConfiguration& config,
                                    const DriveSpec& drive,
                                    bool want_excitation) {
  return pulse_linear_response(build_coupled(config), drive, want_excitation);
}

PulseResponse pulse_linear_response(
    const CoupledMatrices& mats, const DriveSpec& drive, bool want_excitation,
    std::shared_ptr<const EigenmodeSet> left_modes) {
  drive.validate();
  if (drive.profile != DriveSpec::Profile::gaussian) {
    throw InvalidArgumentError("pulse_linear_response: drive must be gaussian");
  }
  if (drive.rabi > kFastPathMaxRabi) {
    throw InvalidArgumentError(
        "pulse_linear_response: drive exceeds the weak-drive regime");
  }
  SpectralPair pair(mats, std::move(left_modes));
  const EigenmodeSet& vm = pair.left();
  const EigenmodeSet& um = pair.right();
  const int n = mats.size();

  const Eigen::VectorXcd amp_u = drive_vector(drive, mats.unprimed);
  const Eigen::VectorXcd amp_p = drive_vector(drive, mats.primed);
  const Eigen::VectorXcd p = vm.vectors.transpose() * amp_u;
  const Eigen::VectorXcd r = vm.vectors.transpose() * amp_u.conjugate();
  const Eigen::VectorXcd q = (um.vectors.transpose() * amp_p).conjugate();
  const Eigen::VectorXcd s = um.vectors.adjoint() * amp_p;

  const cdouble idelta{0.0, drive.detuning};
  Eigen::VectorXcd ja(n), jb(n);
  for (int a = 0; a < n; ++a) {
    ja(a) = detail::gaussian_autocorr_integral(idelta - vm.eigenvalues(a),
                                               drive.pulse_width);
    jb(a) = detail::gaussian_autocorr_integral(
        -idelta - std::conj(um.eigenvalues(a)), drive.pulse_width);
  }

  // T(a,b) = Integral u_a v_b dt = (J(c_a) + J(c_b)) / (gv_a + conj(gu_b))
  Eigen::MatrixXcd t_ab(n, n);
  for (int b = 0; b < n; ++b) {
    for (int a = 0; a < n; ++a) {
      t_ab(a, b) = (ja(a) + jb(b)) / pair.denominators()(a, b);
    }
  }

  PulseResponse out;
  cdouble term1{0.0, 0.0};
  for (int b = 0; b < n; ++b) {
    for (int a = 0; a < n; ++a) {
      term1 += pair.mixed_weights()(a, b) * p(a) * q(b) * t_ab(a, b);
    }
  }
  term1 *= 0.25;
  const cdouble term2 = -0.25 * (r.array() * p.array() * ja.array()).sum();
  const cdouble term3 = -0.25 * (s.array() * q.array() * jb.array()).sum();
  out.rho_gg_change = term1 + term2 + term3;

  if (want_excitation) {
    Eigen::MatrixXcd d(n, n);
    for (int b = 0; b < n; ++b) {
      for (int a = 0; a < n; ++a) {
        d(a, b) = 0.25 * p(a) * q(b) * t_ab(a, b);
      }
    }
    const Eigen::MatrixXcd vd = vm.vectors * d;
    out.excitation_integral =
        (vd.array() * pair.right_conj().array()).rowwise().sum();
  }
  return out;
}

}  // namespace recoilsim
