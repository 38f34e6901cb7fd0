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

#include <Eigen/Core>

#include <cstddef>

namespace regnet {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kDefaultRankTol = 1e-10;

// Dense forward operator A : X -> Y together with its thin singular system.
//
// Convention used throughout the library:
//   A x = sum_n sigma_n <u_n, x> v_n,
// with u_n in the coefficient (image) space X = R^cols and v_n in the data
// space Y = R^rows. Only the first min(rows, cols) triplets are stored; the
// numerical kernel is the orthogonal complement of {u_n : sigma_n > tol}
// where tol = rank_tol * sigma_1.
//
// Instances are immutable after construction.
class SvdOperator {
 public:
  // Computes the SVD of `matrix`. Throws UsageError for empty or non-finite
  // input and NumericError if the decomposition fails.
  static SvdOperator decompose(const Matrix& matrix, double rank_tol = kDefaultRankTol);

  // Rebuilds an operator from a stored singular system (no recomputation).
  // Validates shapes and ordering of the singular values.
  static SvdOperator from_parts(Matrix matrix, Vector singular_values,
                                Matrix image_vectors, Matrix data_vectors,
                                double rank_tol = kDefaultRankTol);

  std::size_t rows() const { return static_cast<std::size_t>(matrix_.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(matrix_.cols()); }

  const Matrix& matrix() const { return matrix_; }
  const Vector& singular_values() const { return sigma_; }
  // u_n as columns, cols x min(rows, cols).
  const Matrix& image_vectors() const { return u_; }
  // v_n as columns, rows x min(rows, cols).
  const Matrix& data_vectors() const { return v_; }

  double rank_tol() const { return rank_tol_; }
  double sigma_max() const { return sigma_.size() > 0 ? sigma_(0) : 0.0; }
  // sigma_1 * rank_tol: singular values at or below this count as zero.
  double kernel_threshold() const { return rank_tol_ * sigma_max(); }
  // Number of singular values strictly above the kernel threshold.
  std::size_t rank() const { return rank_; }
  // Number of non-kernel singular values with sigma_n^2 >= alpha.
  std::size_t retained_count(double alpha) const;

  Vector apply_forward(const Vector& x) const;
  Vector apply_adjoint(const Vector& y) const;
  // Minimal-norm least-squares solution restricted to the numerical range.
  Vector pseudo_inverse_apply(const Vector& y) const;
  // Orthogonal projection onto the numerical kernel of A.
  Vector kernel_project(const Vector& x) const;
  // (A^T A)^mu x; kernel components are annihilated. Requires mu > 0.
  Vector power_apply(const Vector& x, double mu) const;

  // Coefficients <u_n, x> for n < rank().
  Vector image_coefficients(const Vector& x) const;
  // Projection onto span{u_n : n < count}; count <= rank().
  Vector leading_project(const Vector& x, std::size_t count) const;
  // x minus its projection onto span{u_n : n < count}. Applied twice so the
  // result is orthogonal to the leading vectors to working precision.
  Vector trailing_project(const Vector& x, std::size_t count) const;

 private:
  SvdOperator() = default;
  void finish_construction();
  void check_image_dim(const Vector& x, const char* what) const;
  void check_data_dim(const Vector& y, const char* what) const;

  Matrix matrix_;
  Vector sigma_;
  Matrix u_;
  Matrix v_;
  double rank_tol_ = kDefaultRankTol;
  std::size_t rank_ = 0;
};

}  // namespace regnet
