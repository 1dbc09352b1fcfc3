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

#include "recoilsim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "recoilsim/errors.hpp"

namespace recoilsim {

namespace {

void check_unit_dipole(const CVec3& q) {
  const double norm2 = (q.array() * q.conjugate().array()).sum().real();
  if (std::abs(norm2 - 1.0) > 1e-12) {
    throw InvalidArgumentError("dipole orientation is not a unit vector");
  }
}

}  // namespace

CVec3 polarization_plus() {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  return CVec3(cdouble(-inv_sqrt2, 0.0), cdouble(0.0, -inv_sqrt2),
               cdouble(0.0, 0.0));
}

CurvatureProfile CurvatureProfile::flat() { return CurvatureProfile{}; }

CurvatureProfile CurvatureProfile::spherical(double radius) {
  if (radius <= 0.0) {
    throw InvalidArgumentError("spherical curvature requires radius > 0");
  }
  CurvatureProfile p;
  p.kind = Kind::spherical;
  p.radius = radius;
  return p;
}

CurvatureProfile CurvatureProfile::parabolic(double focus) {
  if (focus <= 0.0) {
    throw InvalidArgumentError("parabolic curvature requires focus > 0");
  }
  CurvatureProfile p;
  p.kind = Kind::parabolic;
  p.focus = focus;
  return p;
}

double CurvatureProfile::sagitta(double x, double y) const {
  const double rho2 = x * x + y * y;
  switch (kind) {
    case Kind::flat:
      return 0.0;
    case Kind::spherical: {
      if (rho2 >= radius * radius) {
        std::ostringstream msg;
        msg << "atom at in-plane radius " << std::sqrt(rho2)
            << " lies outside spherical profile of radius " << radius;
        throw GeometryError(msg.str());
      }
      return orientation * (radius - std::sqrt(radius * radius - rho2));
    }
    case Kind::parabolic:
      return orientation * rho2 / (4.0 * focus);
  }
  return 0.0;
}

int AtomArray::find_site(int row, int col, int mirror) const {
  for (int i = 0; i < size(); ++i) {
    if (sites[i].row == row && sites[i].col == col &&
        sites[i].mirror == mirror) {
      return i;
    }
  }
  return -1;
}

bool AtomArray::on_edge(int atom) const {
  const LatticeSite& s = sites.at(static_cast<size_t>(atom));
  return s.row == 0 || s.row == ny - 1 || s.col == 0 || s.col == nx - 1;
}

AtomArray build_planar_array(int nx, int ny, double spacing,
                             const CVec3& polarization) {
  if (nx < 1 || ny < 1) {
    throw InvalidArgumentError("array dimensions must be >= 1");
  }
  if (spacing <= 0.0) {
    throw InvalidArgumentError("lattice spacing must be > 0");
  }
  check_unit_dipole(polarization);

  AtomArray array;
  array.spacing = spacing;
  array.nx = nx;
  array.ny = ny;
  array.positions.reserve(static_cast<size_t>(nx) * ny);
  array.dipoles.reserve(static_cast<size_t>(nx) * ny);
  array.sites.reserve(static_cast<size_t>(nx) * ny);

  const double x0 = 0.5 * (nx - 1);
  const double y0 = 0.5 * (ny - 1);
  for (int row = 0; row < ny; ++row) {
    for (int col = 0; col < nx; ++col) {
      array.positions.emplace_back((col - x0) * spacing, (row - y0) * spacing,
                                   0.0);
      array.dipoles.push_back(polarization);
      array.sites.push_back(LatticeSite{row, col, 0});
    }
  }
  std::ostringstream desc;
  desc << "planar " << nx << "x" << ny << " d=" << spacing;
  array.descriptor = desc.str();
  return array;
}

AtomArray apply_curvature(const AtomArray& array,
                          const CurvatureProfile& profile) {
  AtomArray out = array;
  for (auto& r : out.positions) {
    r.z() += profile.sagitta(r.x(), r.y());
  }
  if (profile.kind != CurvatureProfile::Kind::flat) {
    out.descriptor += (profile.kind == CurvatureProfile::Kind::spherical)
                          ? " spherical"
                          : " parabolic";
  }
  return out;
}

AtomArray build_cavity(const CavitySpec& spec) {
  if (spec.separation <= 0.0) {
    throw InvalidArgumentError("cavity separation must be > 0");
  }
  AtomArray mirror = build_planar_array(spec.nx, spec.ny, spec.spacing,
                                        spec.polarization);

  CurvatureProfile bow_up = spec.curvature;
  bow_up.orientation = 1.0;
  double max_sagitta = 0.0;
  for (const auto& r : mirror.positions) {
    max_sagitta = std::max(max_sagitta, bow_up.sagitta(r.x(), r.y()));
  }
  if (max_sagitta >= 0.5 * spec.separation) {
    throw GeometryError("cavity mirrors overlap: max sagitta exceeds L/2");
  }

  AtomArray out;
  out.spacing = spec.spacing;
  out.nx = spec.nx;
  out.ny = spec.ny;
  const int n = mirror.size();
  out.positions.reserve(2 * static_cast<size_t>(n));
  out.dipoles.reserve(2 * static_cast<size_t>(n));
  out.sites.reserve(2 * static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const Vec3& r = mirror.positions[static_cast<size_t>(i)];
    out.positions.emplace_back(r.x(), r.y(), bow_up.sagitta(r.x(), r.y()));
    out.dipoles.push_back(spec.polarization);
    LatticeSite s = mirror.sites[static_cast<size_t>(i)];
    s.mirror = 0;
    out.sites.push_back(s);
  }
  for (int i = 0; i < n; ++i) {
    const Vec3& r = mirror.positions[static_cast<size_t>(i)];
    out.positions.emplace_back(r.x(), r.y(),
                               spec.separation - bow_up.sagitta(r.x(), r.y()));
    out.dipoles.push_back(spec.polarization);
    LatticeSite s = mirror.sites[static_cast<size_t>(i)];
    s.mirror = 1;
    out.sites.push_back(s);
  }
  std::ostringstream desc;
  desc << "cavity 2x(" << spec.nx << "x" << spec.ny << ") d=" << spec.spacing
       << " L=" << spec.separation;
  out.descriptor = desc.str();
  return out;
}

AtomArray remove_atoms(const AtomArray& array,
                       const std::vector<LatticeSite>& defects) {
  std::set<std::tuple<int, int, int>> seen;
  std::vector<int> doomed;
  doomed.reserve(defects.size());
  for (const auto& s : defects) {
    if (!seen.insert({s.row, s.col, s.mirror}).second) {
      throw InvalidArgumentError("duplicate defect site in removal list");
    }
    const int idx = array.find_site(s.row, s.col, s.mirror);
    if (idx < 0) {
      std::ostringstream msg;
      msg << "no atom at lattice site (" << s.row << "," << s.col
          << ") mirror " << s.mirror;
      throw InvalidArgumentError(msg.str());
    }
    doomed.push_back(idx);
  }
  if (doomed.size() == array.positions.size()) {
    throw InvalidArgumentError("removal would leave an empty array");
  }

  AtomArray out;
  out.spacing = array.spacing;
  out.nx = array.nx;
  out.ny = array.ny;
  out.removed = array.removed;
  out.descriptor = array.descriptor;
  const std::set<int> doomed_set(doomed.begin(), doomed.end());
  for (int i = 0; i < array.size(); ++i) {
    if (doomed_set.count(i)) {
      out.removed.push_back(array.sites[static_cast<size_t>(i)]);
      continue;
    }
    out.positions.push_back(array.positions[static_cast<size_t>(i)]);
    out.dipoles.push_back(array.dipoles[static_cast<size_t>(i)]);
    out.sites.push_back(array.sites[static_cast<size_t>(i)]);
  }
  if (!defects.empty()) {
    std::ostringstream desc;
    desc << out.descriptor << " -" << defects.size() << "atoms";
    out.descriptor = desc.str();
  }
  return out;
}

AtomArray remove_atoms(const AtomArray& array,
                       const std::vector<std::pair<int, int>>& defects) {
  std::vector<LatticeSite> sites;
  sites.reserve(defects.size());
  for (const auto& [row, col] : defects) {
    sites.push_back(LatticeSite{row, col, 0});
  }
  return remove_atoms(array, sites);
}

}  // namespace recoilsim
