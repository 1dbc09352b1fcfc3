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

#ifndef RECOILSIM_KERNELS_HPP
#define RECOILSIM_KERNELS_HPP

#include <Eigen/Dense>

#include "recoilsim/units.hpp"

// Dense complex linear-algebra kernels used in the hot loops.  Every kernel
// has an OpenMP implementation here and a single-threaded reference twin in
// kernels::serial with identical summation order per output element, so the
// two are compared bit-for-bit in tests.  Reductions are chunked by the
// configured thread count in a fixed order; for a fixed thread count the
// results are bit-reproducible run to run.
namespace recoilsim::kernels {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;

// Thread count used by all kernels (and the reduction chunking).
// 0 restores the OpenMP default.
void set_threads(int n);
int threads();

// y = A^T x.  Pass symmetric matrices directly (A^T = A); the transposed
// contract keeps the inner loops contiguous for column-major storage.
void matvec_t(const MatrixXcd& a, const VectorXcd& x, VectorXcd& y);

// c = A^T B.
void matmul_t(const MatrixXcd& a, const MatrixXcd& b, MatrixXcd& c);

// c = A B, accumulated column-combination style.
void matmul(const MatrixXcd& a, const MatrixXcd& b, MatrixXcd& c);

// sum_ij W(i,j) u(i) v(j) with a real weight matrix.
cdouble weighted_pair_sum(const MatrixXd& w, const VectorXcd& u,
                          const VectorXcd& v);

// sum_ij W(i,j) R(i,j).
cdouble overlap_sum(const MatrixXd& w, const MatrixXcd& r);

namespace serial {
void matvec_t(const MatrixXcd& a, const VectorXcd& x, VectorXcd& y);
void matmul_t(const MatrixXcd& a, const MatrixXcd& b, MatrixXcd& c);
void matmul(const MatrixXcd& a, const MatrixXcd& b, MatrixXcd& c);
cdouble weighted_pair_sum(const MatrixXd& w, const VectorXcd& u,
                          const VectorXcd& v);
cdouble overlap_sum(const MatrixXd& w, const MatrixXcd& r);
}  // namespace serial

}  // namespace recoilsim::kernels

#endif  // RECOILSIM_KERNELS_HPP
