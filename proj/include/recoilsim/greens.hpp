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

#ifndef RECOILSIM_GREENS_HPP
#define RECOILSIM_GREENS_HPP

#include <Eigen/Dense>
#include <vector>

#include "recoilsim/geometry.hpp"
#include "recoilsim/units.hpp"

namespace recoilsim {

// Free-space dyadic Green's function projected on two dipole orientations,
// in decay-rate units:
//
//   g(r) = (Gamma/2) [ (3 (rh.qa)(rh.qb*) - qa.qb*)/2 * h2(kr)
//                      + (qa.qb*) * h0(kr) ]
//
// with h0, h2 the outgoing spherical Hankel functions.  The real part is
// half the pairwise decay-rate matrix, the imaginary part the coherent
// dipole-dipole shift.  At coincidence only the real part survives,
// g = Gamma/2.

// Below this separation two evaluation points count as coincident; well
// under the smallest finite-difference shift (1e-4) so shifted evaluations
// never trip the diagonal rule.
inline constexpr double kCoincidenceTol = 1e-9;

// Outgoing spherical Hankel function h_l^(1)(x), closed form, l in {0, 2}.
cdouble spherical_hankel_out(int order, double x);

cdouble greens_scalar(const Vec3& ra, const Vec3& rb, const CVec3& qa,
                      const CVec3& qb);

// Which coordinate sets a coupling matrix was built from.
enum class GreensFlavor { unprimed, primed, mixed };

struct GreensMatrix {
  Eigen::MatrixXcd entries;  // decay-rate units
  GreensFlavor flavor = GreensFlavor::unprimed;
  int size() const { return static_cast<int>(entries.rows()); }
};

// entries(i, j) = g(left_i - right_j) over all pairs; row-set and column-set
// may be the same (unprimed/primed flavors) or differ (mixed).
GreensMatrix assemble_greens(const std::vector<Vec3>& coords_left,
                             const std::vector<Vec3>& coords_right,
                             const std::vector<CVec3>& orientations,
                             GreensFlavor flavor);

}  // namespace recoilsim

#endif  // RECOILSIM_GREENS_HPP
