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

#include "recoilsim/eigenmodes.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>
#include <vector>

#include "recoilsim/errors.hpp"

namespace recoilsim {

namespace {

const char* flavor_name(GreensFlavor f) {
  switch (f) {
    case GreensFlavor::unprimed:
      return "unprimed";
    case GreensFlavor::primed:
      return "primed";
    case GreensFlavor::mixed:
      return "mixed";
  }
  return "?";
}

// Groups nearly equal eigenvalues (complex distance below tol) with a
// union-find over all pairs; N stays small enough for the quadratic scan.
std::vector<std::vector<int>> degenerate_clusters(
    const Eigen::VectorXcd& eigenvalues, double tol) {
  const int n = static_cast<int>(eigenvalues.size());
  std::vector<int> parent(static_cast<size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int a) {
    while (parent[static_cast<size_t>(a)] != a) {
      parent[static_cast<size_t>(a)] =
          parent[static_cast<size_t>(parent[static_cast<size_t>(a)])];
      a = parent[static_cast<size_t>(a)];
    }
    return a;
  };
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (std::abs(eigenvalues(i) - eigenvalues(j)) < tol) {
        parent[static_cast<size_t>(find(i))] = find(j);
      }
    }
  }
  std::vector<std::vector<int>> clusters(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    clusters[static_cast<size_t>(find(i))].push_back(i);
  }
  clusters.erase(std::remove_if(clusters.begin(), clusters.end(),
                                [](const auto& c) { return c.empty(); }),
                 clusters.end());
  return clusters;
}

cdouble bilinear(const Eigen::MatrixXcd& v, int a, int b) {
  cdouble s{0.0, 0.0};
  for (int i = 0; i < v.rows(); ++i) {
    s += v(i, a) * v(i, b);
  }
  return s;
}

}  // namespace

EigenmodeSet decompose(const GreensMatrix& g) {
  if (g.entries.rows() != g.entries.cols()) {
    throw InvalidArgumentError("decompose: matrix must be square");
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(g.entries, true);
  if (solver.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "eigensolver failed on " << flavor_name(g.flavor)
        << " coupling matrix, N=" << g.entries.rows();
    throw NumericalError(msg.str());
  }

  const int n = static_cast<int>(g.entries.rows());
  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  const Eigen::VectorXcd& raw = solver.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (raw(a).real() != raw(b).real()) {
      return raw(a).real() < raw(b).real();
    }
    return std::abs(raw(a).imag()) < std::abs(raw(b).imag());
  });

  EigenmodeSet modes;
  modes.source = g.flavor;
  modes.eigenvalues.resize(n);
  modes.vectors.resize(n, n);
  for (int a = 0; a < n; ++a) {
    modes.eigenvalues(a) = raw(order[static_cast<size_t>(a)]);
    modes.vectors.col(a) = solver.eigenvectors().col(
        order[static_cast<size_t>(a)]);
  }

  // Residual check; a QR-based decomposition that converged sits far below
  // this bound, so a hit means trouble upstream.
  const double scale = g.entries.norm();
  const Eigen::MatrixXcd residual =
      g.entries * modes.vectors - modes.vectors * modes.eigenvalues.asDiagonal();
  if (residual.norm() > 1e-8 * std::max(scale, 1e-300)) {
    std::ostringstream msg;
    msg << "eigendecomposition residual " << residual.norm() / scale
        << " exceeds tolerance on " << flavor_name(g.flavor)
        << " matrix, N=" << n;
    throw NumericalError(msg.str());
  }

  normalize_bilinear(modes);
  return modes;
}

void normalize_bilinear(EigenmodeSet& modes) {
  const int n = modes.size();
  if (n == 0) {
    throw InvalidArgumentError("normalize_bilinear: empty mode set");
  }
  const double scale = modes.eigenvalues.cwiseAbs().maxCoeff();
  const double tol = kDegeneracyTol * std::max(scale, 1e-300);
  const auto clusters = degenerate_clusters(modes.eigenvalues, tol);

  for (const auto& cluster : clusters) {
    // Modified Gram-Schmidt under the unconjugated product.
    for (size_t idx = 0; idx < cluster.size(); ++idx) {
      const int a = cluster[idx];
      for (size_t jdx = 0; jdx < idx; ++jdx) {
        const int b = cluster[jdx];
        const cdouble proj = bilinear(modes.vectors, b, a);
        modes.vectors.col(a) -= proj * modes.vectors.col(b);
      }
      const cdouble self = bilinear(modes.vectors, a, a);
      const double hnorm2 = modes.vectors.col(a).squaredNorm();
      if (std::abs(self) < 1e-10 * hnorm2) {
        std::ostringstream msg;
        msg << "self-orthogonal eigenvector (quasi-defective) in cluster {";
        for (int m : cluster) {
          msg << " " << m;
        }
        msg << " }; |V.V|/|V|^2 = " << std::abs(self) / hnorm2;
        throw DefectiveModeError(msg.str());
      }
      modes.vectors.col(a) /= std::sqrt(self);
    }
  }
  modes.normalized = true;
}

int most_subradiant(const EigenmodeSet& modes) {
  if (modes.size() == 0) {
    throw InvalidArgumentError("most_subradiant: empty mode set");
  }
  int best = 0;
  for (int a = 1; a < modes.size(); ++a) {
    const double ga = modes.decay_rate(a);
    const double gb = modes.decay_rate(best);
    if (ga < gb ||
        (ga == gb && std::abs(modes.shift(a)) < std::abs(modes.shift(best)))) {
      best = a;
    }
  }
  return best;
}

std::vector<ModeWeight> mode_contribution(const EigenmodeSet& modes,
                                          const Eigen::VectorXcd& drive,
                                          double detuning) {
  if (!modes.normalized) {
    throw InvalidArgumentError("mode_contribution: modes must be normalized");
  }
  if (drive.size() != modes.vectors.rows()) {
    throw InvalidArgumentError("mode_contribution: drive length mismatch");
  }
  std::vector<ModeWeight> out;
  out.reserve(static_cast<size_t>(modes.size()));
  for (int a = 0; a < modes.size(); ++a) {
    cdouble overlap{0.0, 0.0};
    for (int i = 0; i < drive.size(); ++i) {
      overlap += drive(i) * modes.vectors(i, a);
    }
    const cdouble denom = modes.eigenvalues(a) - kImag * detuning;
    ModeWeight w;
    w.mode = a;
    w.weight = std::norm(overlap / denom);
    w.decay_rate = modes.decay_rate(a);
    w.shift = modes.shift(a);
    out.push_back(w);
  }
  return out;
}

}  // namespace recoilsim
