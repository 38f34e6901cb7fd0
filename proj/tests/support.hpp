// Copyright 2026 The RegNet Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "regnet/linop.hpp"

namespace regnet::testing {

inline Vector random_vector(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0.0, 1.0);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = d(rng);
  return v;
}

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = d(rng);
  }
  return m;
}

inline Matrix random_orthonormal(Eigen::Index n, std::uint64_t seed) {
  Eigen::HouseholderQR<Matrix> qr(random_matrix(n, n, seed));
  return qr.householderQ() * Matrix::Identity(n, n);
}

// A = V diag(sigma) U^T with random orthonormal factors; sigma may contain
// zeros to create a kernel. rows x cols with sigma.size() <= min(rows, cols).
inline Matrix matrix_with_spectrum(Eigen::Index rows, Eigen::Index cols, const Vector& sigma,
                                   std::uint64_t seed) {
  const Matrix v = random_orthonormal(rows, seed);
  const Matrix u = random_orthonormal(cols, seed + 1);
  Matrix a = Matrix::Zero(rows, cols);
  for (Eigen::Index n = 0; n < sigma.size(); ++n) a += sigma(n) * v.col(n) * u.col(n).transpose();
  return a;
}

inline std::shared_ptr<const SvdOperator> make_operator(const Matrix& a) {
  return std::make_shared<const SvdOperator>(SvdOperator::decompose(a));
}

inline double rel_err(const Vector& a, const Vector& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace regnet::testing
