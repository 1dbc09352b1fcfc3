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

#ifndef RECOILSIM_EIGENMODES_HPP
#define RECOILSIM_EIGENMODES_HPP

#include <Eigen/Dense>
#include <vector>

#include "recoilsim/greens.hpp"
#include "recoilsim/units.hpp"

namespace recoilsim {

// Eigendecomposition of a (complex-symmetric, non-Hermitian) coupling
// matrix.  Eigenvalues are gamma/2 + i*shift: the real part is half the
// collective decay rate, the imaginary part the collective level shift.
// Eigenvectors obey the unconjugated bilinear orthonormality
// sum_i V(i,a) V(i,b) = delta_ab; degenerate clusters are orthogonalized
// under that form.
struct EigenmodeSet {
  Eigen::VectorXcd eigenvalues;  // sorted ascending by decay rate
  Eigen::MatrixXcd vectors;      // columns, bilinear-normalized
  GreensFlavor source = GreensFlavor::unprimed;
  bool normalized = false;

  int size() const { return static_cast<int>(eigenvalues.size()); }
  double decay_rate(int a) const { return 2.0 * eigenvalues(a).real(); }
  double shift(int a) const { return eigenvalues(a).imag(); }
};

// Relative scale for clustering nearly equal eigenvalues before the
// bilinear orthogonalization; well below physical splittings at the
// supported sizes.
inline constexpr double kDegeneracyTol = 1e-8;

// Full dense decomposition; throws NumericalError (with the matrix flavor)
// on solver failure. Normalization is applied before returning.
EigenmodeSet decompose(const GreensMatrix& g);

// Rescales each vector to V.V = 1 under the unconjugated product and
// orthogonalizes degenerate clusters; throws DefectiveModeError (with the
// cluster indices) when a combination is self-orthogonal.  Idempotent.
void normalize_bilinear(EigenmodeSet& modes);

// Index of the smallest decay rate; ties broken by smaller |shift|.
int most_subradiant(const EigenmodeSet& modes);

struct ModeWeight {
  int mode = 0;
  double weight = 0.0;      // |sum_i drive_i V(i,a)|^2 / |eig_a - i delta|^2
  double decay_rate = 0.0;
  double shift = 0.0;
};

// Steady-state amplitude-squared of each mode under the given per-atom
// drive amplitudes at a detuning.
std::vector<ModeWeight> mode_contribution(const EigenmodeSet& modes,
                                          const Eigen::VectorXcd& drive,
                                          double detuning);

}  // namespace recoilsim

#endif  // RECOILSIM_EIGENMODES_HPP
