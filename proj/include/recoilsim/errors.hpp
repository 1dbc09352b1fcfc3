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

#ifndef RECOILSIM_ERRORS_HPP
#define RECOILSIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace recoilsim {

// Base class for everything the library throws on purpose.
class SimError : public std::runtime_error {
 public:
  explicit SimError(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad caller input (dimensions, ranges, unknown sites, ...).
class InvalidArgumentError : public SimError {
 public:
  explicit InvalidArgumentError(const std::string& msg) : SimError(msg) {}
};

// Geometry that cannot be built (sagitta domain, overlapping mirrors).
class GeometryError : public SimError {
 public:
  explicit GeometryError(const std::string& msg) : SimError(msg) {}
};

// Numerical failures: solver non-convergence, singular systems, blow-ups.
class NumericalError : public SimError {
 public:
  explicit NumericalError(const std::string& msg) : SimError(msg) {}
};

// A (nearly) self-orthogonal eigenvector under the bilinear form; the
// spectral expansions are invalid there, so callers must know.
class DefectiveModeError : public NumericalError {
 public:
  explicit DefectiveModeError(const std::string& msg) : NumericalError(msg) {}
};

// Pole hit in a steady-state denominator.
class SingularityError : public NumericalError {
 public:
  explicit SingularityError(const std::string& msg) : NumericalError(msg) {}
};

// Non-finite values during time propagation.
class InstabilityError : public NumericalError {
 public:
  InstabilityError(const std::string& msg, double t, double dt)
      : NumericalError(msg + " (t=" + std::to_string(t) +
                       ", dt=" + std::to_string(dt) + ")"),
        time(t),
        step(dt) {}
  double time;
  double step;
};

// Initial state outside what the factorized fast path supports.
class UnsupportedStateError : public SimError {
 public:
  explicit UnsupportedStateError(const std::string& msg) : SimError(msg) {}
};

}  // namespace recoilsim

#endif  // RECOILSIM_ERRORS_HPP
