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

#include <cmath>
#include <random>

#include "doctest.h"
#include "recoilsim/eigenmodes.hpp"
#include "recoilsim/errors.hpp"
#include "recoilsim/geometry.hpp"

using namespace recoilsim;

namespace {

GreensMatrix array_greens(const AtomArray& a) {
  return assemble_greens(a.positions, a.positions, a.dipoles,
                         GreensFlavor::unprimed);
}

Eigen::MatrixXcd bilinear_gram(const Eigen::MatrixXcd& v) {
  return v.transpose() * v;
}

}  // namespace

TEST_CASE("single atom mode") {
  const AtomArray a = build_planar_array(1, 1, 0.5);
  const EigenmodeSet modes = decompose(array_greens(a));
  REQUIRE(modes.size() == 1);
  CHECK(std::abs(modes.eigenvalues(0) - cdouble{0.5, 0.0}) < 1e-14);
  CHECK(modes.decay_rate(0) == doctest::Approx(kGamma));
  CHECK(modes.shift(0) == doctest::Approx(0.0));
  CHECK(most_subradiant(modes) == 0);
}

TEST_CASE("two-atom modes from the scalar oracle") {
  const AtomArray a = build_planar_array(2, 1, 0.8);
  const cdouble g01 = greens_scalar(a.positions[0], a.positions[1],
                                    a.dipoles[0], a.dipoles[1]);
  const EigenmodeSet modes = decompose(array_greens(a));
  REQUIRE(modes.size() == 2);

  // eigenvalues Gamma/2 +- g(d); decay rates Gamma +- 2 Re g
  const double lo = kGamma + 2.0 * g01.real() < kGamma - 2.0 * g01.real()
                        ? kGamma + 2.0 * g01.real()
                        : kGamma - 2.0 * g01.real();
  CHECK(modes.decay_rate(0) == doctest::Approx(lo).epsilon(1e-10));
  CHECK(modes.decay_rate(0) + modes.decay_rate(1) ==
        doctest::Approx(2.0 * kGamma).epsilon(1e-12));

  // between lambda/2 and lambda the in-phase combination is subradiant
  const int sub = most_subradiant(modes);
  const cdouble prod = modes.vectors(0, sub) * modes.vectors(1, sub);
  CHECK(prod.real() > 0.0);
  CHECK(g01.real() < 0.0);
}

TEST_CASE("trace identities on an 8x8 array") {
  const AtomArray a = build_planar_array(8, 8, 0.68);
  const EigenmodeSet modes = decompose(array_greens(a));
  double total_decay = 0.0;
  double total_shift = 0.0;
  for (int m = 0; m < modes.size(); ++m) {
    CHECK(modes.decay_rate(m) > 0.0);
    total_decay += modes.decay_rate(m);
    total_shift += modes.shift(m);
  }
  CHECK(std::abs(total_decay - 64.0 * kGamma) < 1e-6);
  CHECK(std::abs(total_shift) < 1e-8 * 64);
}

TEST_CASE("bilinear orthonormality with degeneracies") {
  // four-fold symmetric array: the spectrum carries degenerate pairs
  const AtomArray a = build_planar_array(3, 3, 0.6);
  const EigenmodeSet modes = decompose(array_greens(a));
  const Eigen::MatrixXcd gram = bilinear_gram(modes.vectors);
  CHECK((gram - Eigen::MatrixXcd::Identity(9, 9)).cwiseAbs().maxCoeff() <
        1e-8);

  // spectral reconstruction under the unconjugated form
  const Eigen::MatrixXcd rebuilt = modes.vectors *
                                   modes.eigenvalues.asDiagonal() *
                                   modes.vectors.transpose();
  CHECK((rebuilt - array_greens(a).entries).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("bilinear normalization on random complex-symmetric matrices") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::MatrixXcd m(5, 5);
    for (int j = 0; j < 5; ++j) {
      for (int i = 0; i < 5; ++i) {
        m(i, j) = cdouble{u(rng), u(rng)};
      }
    }
    Eigen::MatrixXcd sym = 0.5 * (m + m.transpose());
    // keep decay rates positive so the invariant checks stay meaningful
    sym.diagonal().array() += 4.0;
    GreensMatrix g;
    g.entries = sym;
    const EigenmodeSet modes = decompose(g);
    const Eigen::MatrixXcd gram = bilinear_gram(modes.vectors);
    CHECK((gram - Eigen::MatrixXcd::Identity(5, 5)).cwiseAbs().maxCoeff() <
          1e-8);
  }
}

TEST_CASE("normalization is idempotent") {
  const AtomArray a = build_planar_array(3, 3, 0.72);
  EigenmodeSet modes = decompose(array_greens(a));
  const Eigen::MatrixXcd before = modes.vectors;
  normalize_bilinear(modes);
  CHECK((modes.vectors - before).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("eigenvalues invariant under rigid translation") {
  const AtomArray a = build_planar_array(4, 4, 0.66);
  AtomArray moved = a;
  for (auto& r : moved.positions) {
    r += Vec3{0.4, -1.1, 2.2};
  }
  const EigenmodeSet m0 = decompose(array_greens(a));
  const EigenmodeSet m1 = decompose(array_greens(moved));
  CHECK((m0.eigenvalues - m1.eigenvalues).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("most_subradiant invariant under time-unit rescaling") {
  const AtomArray a = build_planar_array(4, 4, 0.8);
  GreensMatrix g = array_greens(a);
  const int pick = most_subradiant(decompose(g));
  g.entries *= 3.7;
  CHECK(most_subradiant(decompose(g)) == pick);
}

TEST_CASE("mode contributions") {
  SUBCASE("single atom Lorentzian center") {
    const AtomArray a = build_planar_array(1, 1, 0.5);
    const EigenmodeSet modes = decompose(array_greens(a));
    Eigen::VectorXcd drive(1);
    drive(0) = cdouble{0.02, 0.0};
    const auto weights = mode_contribution(modes, drive, 0.0);
    REQUIRE(weights.size() == 1);
    CHECK(weights[0].weight ==
          doctest::Approx(std::norm(cdouble{0.02, 0.0}) / 0.25));
  }

  SUBCASE("bilinear-orthogonal drive gives zero weight") {
    const AtomArray a = build_planar_array(2, 1, 0.8);
    const EigenmodeSet modes = decompose(array_greens(a));
    // drive along one mode is bilinear-orthogonal to the other
    const Eigen::VectorXcd drive = modes.vectors.col(0);
    const auto weights = mode_contribution(modes, drive, 0.0);
    CHECK(weights[1].weight < 1e-20);
    CHECK(weights[0].weight > 0.0);
  }

  SUBCASE("weights peak when the detuning matches the shift") {
    const AtomArray a = build_planar_array(5, 5, 0.4);
    const EigenmodeSet modes = decompose(array_greens(a));
    const Eigen::VectorXcd drive = Eigen::VectorXcd::Constant(25, 1.0);
    // scan detunings; every significantly coupled mode must peak at its
    // own shift to within the grid spacing
    const int npts = 1601;
    const double lo = -8.0, hi = 8.0;
    Eigen::MatrixXd weight_vs_delta(npts, 25);
    for (int p = 0; p < npts; ++p) {
      const double delta = lo + (hi - lo) * p / (npts - 1);
      const auto w = mode_contribution(modes, drive, delta);
      for (int m = 0; m < 25; ++m) {
        weight_vs_delta(p, m) = w[m].weight;
      }
    }
    int tested = 0;
    for (int m = 0; m < 25; ++m) {
      if (weight_vs_delta.col(m).maxCoeff() < 1e-4) {
        continue;  // negligibly coupled
      }
      if (modes.shift(m) < lo + 0.5 || modes.shift(m) > hi - 0.5) {
        continue;
      }
      int argmax = 0;
      weight_vs_delta.col(m).maxCoeff(&argmax);
      const double peak_delta = lo + (hi - lo) * argmax / (npts - 1);
      CHECK(std::abs(peak_delta - modes.shift(m)) < 0.05);
      ++tested;
    }
    CHECK(tested >= 3);
  }
}
