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

#include "recoilsim/kernels.hpp"

#include <omp.h>

#include <atomic>
#include <vector>

#include "recoilsim/errors.hpp"

namespace recoilsim::kernels {

namespace {
std::atomic<int> g_threads{0};

int effective_threads() {
  const int n = g_threads.load();
  return n > 0 ? n : omp_get_max_threads();
}
}  // namespace

void set_threads(int n) {
  g_threads.store(n);
  if (n > 0) {
    omp_set_num_threads(n);
  }
  omp_set_max_active_levels(1);
}

int threads() { return effective_threads(); }

void matvec_t(const MatrixXcd& a, const VectorXcd& x, VectorXcd& y) {
  const int n = static_cast<int>(a.cols());
  if (a.rows() != x.size()) {
    throw InvalidArgumentError("matvec_t: dimension mismatch");
  }
  y.resize(n);
  const int rows = static_cast<int>(a.rows());
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    cdouble acc{0.0, 0.0};
    const cdouble* col = a.col(i).data();
    for (int k = 0; k < rows; ++k) {
      acc += col[k] * x(k);
    }
    y(i) = acc;
  }
}

void matmul_t(const MatrixXcd& a, const MatrixXcd& b, MatrixXcd& c) {
  if (a.rows() != b.rows()) {
    throw InvalidArgumentError("matmul_t: dimension mismatch");
  }
  const int m = static_cast<int>(a.cols());
  const int n = static_cast<int>(b.cols());
  const int inner = static_cast<int>(a.rows());
  c.resize(m, n);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < n; ++j) {
    const cdouble* bj = b.col(j).data();
    for (int i = 0; i < m; ++i) {
      const cdouble* ai = a.col(i).data();
      cdouble acc{0.0, 0.0};
      for (int k = 0; k < inner; ++k) {
        acc += ai[k] * bj[k];
      }
      c(i, j) = acc;
    }
  }
}

void matmul(const MatrixXcd& a, const MatrixXcd& b, MatrixXcd& c) {
  if (a.cols() != b.rows()) {
    throw InvalidArgumentError("matmul: dimension mismatch");
  }
  const int m = static_cast<int>(a.rows());
  const int n = static_cast<int>(b.cols());
  const int inner = static_cast<int>(a.cols());
  c.resize(m, n);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < n; ++j) {
    cdouble* cj = c.col(j).data();
    for (int i = 0; i < m; ++i) {
      cj[i] = cdouble{0.0, 0.0};
    }
    for (int k = 0; k < inner; ++k) {
      const cdouble bkj = b(k, j);
      const cdouble* ak = a.col(k).data();
      for (int i = 0; i < m; ++i) {
        cj[i] += ak[i] * bkj;
      }
    }
  }
}

cdouble weighted_pair_sum(const MatrixXd& w, const VectorXcd& u,
                          const VectorXcd& v) {
  if (w.rows() != u.size() || w.cols() != v.size()) {
    throw InvalidArgumentError("weighted_pair_sum: dimension mismatch");
  }
  const int n = static_cast<int>(w.cols());
  const int rows = static_cast<int>(w.rows());
  const int nchunk = std::min(effective_threads(), std::max(n, 1));
  std::vector<cdouble> partial(static_cast<size_t>(nchunk), cdouble{0.0, 0.0});
#pragma omp parallel for schedule(static)
  for (int c = 0; c < nchunk; ++c) {
    const int j0 = static_cast<int>(static_cast<long>(c) * n / nchunk);
    const int j1 = static_cast<int>(static_cast<long>(c + 1) * n / nchunk);
    cdouble acc{0.0, 0.0};
    for (int j = j0; j < j1; ++j) {
      const double* wj = w.col(j).data();
      cdouble inner{0.0, 0.0};
      for (int i = 0; i < rows; ++i) {
        inner += wj[i] * u(i);
      }
      acc += inner * v(j);
    }
    partial[static_cast<size_t>(c)] = acc;
  }
  cdouble total{0.0, 0.0};
  for (const auto& p : partial) {
    total += p;
  }
  return total;
}

cdouble overlap_sum(const MatrixXd& w, const MatrixXcd& r) {
  if (w.rows() != r.rows() || w.cols() != r.cols()) {
    throw InvalidArgumentError("overlap_sum: dimension mismatch");
  }
  const int n = static_cast<int>(w.cols());
  const int rows = static_cast<int>(w.rows());
  const int nchunk = std::min(effective_threads(), std::max(n, 1));
  std::vector<cdouble> partial(static_cast<size_t>(nchunk), cdouble{0.0, 0.0});
#pragma omp parallel for schedule(static)
  for (int c = 0; c < nchunk; ++c) {
    const int j0 = static_cast<int>(static_cast<long>(c) * n / nchunk);
    const int j1 = static_cast<int>(static_cast<long>(c + 1) * n / nchunk);
    cdouble acc{0.0, 0.0};
    for (int j = j0; j < j1; ++j) {
      const double* wj = w.col(j).data();
      const cdouble* rj = r.col(j).data();
      for (int i = 0; i < rows; ++i) {
        acc += wj[i] * rj[i];
      }
    }
    partial[static_cast<size_t>(c)] = acc;
  }
  cdouble total{0.0, 0.0};
  for (const auto& p : partial) {
    total += p;
  }
  return total;
}

namespace serial {

void matvec_t(const MatrixXcd& a, const VectorXcd& x, VectorXcd& y) {
  const int n = static_cast<int>(a.cols());
  const int rows = static_cast<int>(a.rows());
  y.resize(n);
  for (int i = 0; i < n; ++i) {
    cdouble acc{0.0, 0.0};
    for (int k = 0; k < rows; ++k) {
      acc += a(k, i) * x(k);
    }
    y(i) = acc;
  }
}

void matmul_t(const MatrixXcd& a, const MatrixXcd& b, MatrixXcd& c) {
  const int m = static_cast<int>(a.cols());
  const int n = static_cast<int>(b.cols());
  const int inner = static_cast<int>(a.rows());
  c.resize(m, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < m; ++i) {
      cdouble acc{0.0, 0.0};
      for (int k = 0; k < inner; ++k) {
        acc += a(k, i) * b(k, j);
      }
      c(i, j) = acc;
    }
  }
}

void matmul(const MatrixXcd& a, const MatrixXcd& b, MatrixXcd& c) {
  const int m = static_cast<int>(a.rows());
  const int n = static_cast<int>(b.cols());
  const int inner = static_cast<int>(a.cols());
  c.resize(m, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < m; ++i) {
      c(i, j) = cdouble{0.0, 0.0};
    }
    for (int k = 0; k < inner; ++k) {
      const cdouble bkj = b(k, j);
      for (int i = 0; i < m; ++i) {
        c(i, j) += a(i, k) * bkj;
      }
    }
  }
}

cdouble weighted_pair_sum(const MatrixXd& w, const VectorXcd& u,
                          const VectorXcd& v) {
  cdouble total{0.0, 0.0};
  for (int j = 0; j < w.cols(); ++j) {
    cdouble inner{0.0, 0.0};
    for (int i = 0; i < w.rows(); ++i) {
      inner += w(i, j) * u(i);
    }
    total += inner * v(j);
  }
  return total;
}

cdouble overlap_sum(const MatrixXd& w, const MatrixXcd& r) {
  cdouble total{0.0, 0.0};
  for (int j = 0; j < w.cols(); ++j) {
    for (int i = 0; i < w.rows(); ++i) {
      total += w(i, j) * r(i, j);
    }
  }
  return total;
}

}  // namespace serial

}  // namespace recoilsim::kernels
