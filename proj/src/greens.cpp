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

#include "recoilsim/greens.hpp"

#include <cmath>

#include "recoilsim/errors.hpp"

namespace recoilsim {

cdouble spherical_hankel_out(int order, double x) {
  if (x <= 0.0) {
    throw InvalidArgumentError(
        "spherical_hankel_out: argument must be positive");
  }
  const cdouble eix = std::polar(1.0, x);
  switch (order) {
    case 0:
      // h0(x) = -i e^{ix} / x
      return -kImag * eix / x;
    case 2: {
      // h2(x) = e^{ix} (i/x - 3/x^2 - 3i/x^3).  The real part (j2 ~ x^2/15)
      // cancels catastrophically against the 1/x^3 terms at small x, so it
      // switches to the Taylor polynomial there; the imaginary part (y2)
      // is dominated by its leading term and stays well conditioned.
      const double y2 = -(3.0 / (x * x * x) - 1.0 / x) * std::cos(x) -
                        3.0 * std::sin(x) / (x * x);
      if (x < 0.5) {
        const double x2 = x * x;
        const double j2 =
            x2 * (1.0 / 15.0 +
                  x2 * (-1.0 / 210.0 +
                        x2 * (1.0 / 7560.0 +
                              x2 * (-1.0 / 498960.0 +
                                    x2 * (1.0 / 51891840.0)))));
        return cdouble{j2, y2};
      }
      const double j2 =
          (eix * (kImag / x - 3.0 / (x * x) - 3.0 * kImag / (x * x * x)))
              .real();
      return cdouble{j2, y2};
    }
    default:
      throw InvalidArgumentError("spherical_hankel_out: unsupported order");
  }
}

cdouble greens_scalar(const Vec3& ra, const Vec3& rb, const CVec3& qa,
                      const CVec3& qb) {
  const Vec3 rvec = ra - rb;
  const double r = rvec.norm();
  if (r < kCoincidenceTol) {
    return cdouble{0.5 * kGamma, 0.0};
  }
  const double x = kWavenumber * r;
  const Vec3 rhat = rvec / r;

  cdouble qq{0.0, 0.0};   // qa . qb*
  cdouble rqa{0.0, 0.0};  // rh . qa
  cdouble rqb{0.0, 0.0};  // rh . qb*
  for (int m = 0; m < 3; ++m) {
    qq += qa(m) * std::conj(qb(m));
    rqa += rhat(m) * qa(m);
    rqb += rhat(m) * std::conj(qb(m));
  }
  const cdouble angular = 0.5 * (3.0 * rqa * rqb - qq);
  return 0.5 * kGamma *
         (angular * spherical_hankel_out(2, x) +
          qq * spherical_hankel_out(0, x));
}

GreensMatrix assemble_greens(const std::vector<Vec3>& coords_left,
                             const std::vector<Vec3>& coords_right,
                             const std::vector<CVec3>& orientations,
                             GreensFlavor flavor) {
  const int n = static_cast<int>(coords_left.size());
  if (coords_right.size() != coords_left.size() ||
      orientations.size() != coords_left.size()) {
    throw InvalidArgumentError("assemble_greens: coordinate-set size mismatch");
  }
  GreensMatrix out;
  out.flavor = flavor;
  out.entries.resize(n, n);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      out.entries(i, j) =
          greens_scalar(coords_left[static_cast<size_t>(i)],
                        coords_right[static_cast<size_t>(j)],
                        orientations[static_cast<size_t>(i)],
                        orientations[static_cast<size_t>(j)]);
    }
  }
  return out;
}

}  // namespace recoilsim
