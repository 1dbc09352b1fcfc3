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

#ifndef RECOILSIM_UNITS_HPP
#define RECOILSIM_UNITS_HPP

#include <complex>

namespace recoilsim {

// Internal unit system, used everywhere downstream:
//   lengths   : resonant wavelength  (so the wavenumber is exactly 2*pi)
//   rates     : single-atom decay rate Gamma (= 1)
//   time      : 1/Gamma
//   momentum  : single-photon kick, hbar*k
//   energy    : single-photon recoil energy, E_r = (hbar*k)^2 / (2m)
// No raw hbar, m or c appears outside this header and the physical-units
// bridge in observables.
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kWavenumber = 2.0 * kPi;
inline constexpr double kGamma = 1.0;

using cdouble = std::complex<double>;
inline constexpr cdouble kImag{0.0, 1.0};

}  // namespace recoilsim

#endif  // RECOILSIM_UNITS_HPP
