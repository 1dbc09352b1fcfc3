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

#ifndef RECOILSIM_GEOMETRY_HPP
#define RECOILSIM_GEOMETRY_HPP

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "recoilsim/units.hpp"

namespace recoilsim {

using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;

// Circular polarization unit vector  -(x + i y)/sqrt(2); the default dipole
// orientation for every builder.  Chosen so square arrays produce four-fold
// symmetric excitation and recoil patterns.
CVec3 polarization_plus();

// Lattice bookkeeping for one atom: (row, col) with (0,0) at one corner of
// its mirror, rows along y, columns along x.  mirror is 0 for planar arrays
// and 0/1 for the two arrays of a cavity.
struct LatticeSite {
  int row = 0;
  int col = 0;
  int mirror = 0;
  friend bool operator==(const LatticeSite& a, const LatticeSite& b) {
    return a.row == b.row && a.col == b.col && a.mirror == b.mirror;
  }
};

// Mirror curvature. Sagitta conventions (paraxial, z-displacement only):
//   flat       z = 0
//   spherical  z = R - sqrt(R^2 - x^2 - y^2)
//   parabolic  z = (x^2 + y^2) / (4 f)
struct CurvatureProfile {
  enum class Kind { flat, spherical, parabolic };
  Kind kind = Kind::flat;
  double radius = 0.0;  // spherical R, wavelength units
  double focus = 0.0;   // parabolic f, wavelength units
  // +1 bows toward +z, -1 toward -z.
  double orientation = 1.0;

  static CurvatureProfile flat();
  static CurvatureProfile spherical(double radius);
  static CurvatureProfile parabolic(double focus);

  // Throws GeometryError when (x, y) is outside the profile's domain.
  double sagitta(double x, double y) const;
};

struct AtomArray {
  std::vector<Vec3> positions;        // wavelength units
  std::vector<CVec3> dipoles;         // complex unit vectors
  double spacing = 0.0;               // lattice constant, wavelength units
  int nx = 0;                         // columns per mirror
  int ny = 0;                         // rows per mirror
  std::vector<LatticeSite> sites;     // lattice coordinate of each atom
  std::vector<LatticeSite> removed;   // defect record
  std::string descriptor;             // human-readable provenance

  int size() const { return static_cast<int>(positions.size()); }
  // Index of the atom at a lattice site, or -1 when absent/removed.
  int find_site(int row, int col, int mirror = 0) const;
  // True when the site sits on the outermost ring of its mirror.
  bool on_edge(int atom) const;
};

// nx*ny atoms at z = 0 on a square lattice centered on the origin.
AtomArray build_planar_array(int nx, int ny, double spacing,
                             const CVec3& polarization = polarization_plus());

// Displaces z by the profile's sagitta; x and y are left untouched.
AtomArray apply_curvature(const AtomArray& array,
                          const CurvatureProfile& profile);

struct CavitySpec {
  int nx = 0;
  int ny = 0;
  double spacing = 0.0;
  CurvatureProfile curvature;  // orientation handled internally
  double separation = 0.0;     // vertex-to-vertex along z, wavelength units
  CVec3 polarization = polarization_plus();
};

// Two mirrors of nx*ny atoms each: mirror 0 vertex at z = 0 bowing toward
// +z, mirror 1 vertex at z = separation bowing toward -z.
AtomArray build_cavity(const CavitySpec& spec);

// Deletes the listed lattice sites (mirror 0 unless specified); indices are
// re-packed and the defects recorded.
AtomArray remove_atoms(const AtomArray& array,
                       const std::vector<LatticeSite>& defects);
AtomArray remove_atoms(const AtomArray& array,
                       const std::vector<std::pair<int, int>>& defects);

}  // namespace recoilsim

#endif  // RECOILSIM_GEOMETRY_HPP
