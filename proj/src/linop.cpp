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

#include "regnet/linop.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <string>

#include "regnet/error.hpp"

namespace regnet {

SvdOperator SvdOperator::decompose(const Matrix& matrix, double rank_tol) {
  if (matrix.rows() < 1 || matrix.cols() < 1) {
    throw UsageError("svd_decompose: matrix must have at least one row and column");
  }
  if (!(rank_tol > 0.0 && rank_tol < 1.0)) {
    throw UsageError("svd_decompose: rank_tol must lie in (0, 1)");
  }
  if (!matrix.allFinite()) {
    throw UsageError("svd_decompose: matrix contains non-finite entries");
  }

  Eigen::BDCSVD<Matrix> svd(matrix, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) {
    throw NumericError("svd_decompose: SVD did not converge");
  }

  SvdOperator op;
  op.matrix_ = matrix;
  op.sigma_ = svd.singularValues();
  op.u_ = svd.matrixV();
  op.v_ = svd.matrixU();
  op.rank_tol_ = rank_tol;
  op.finish_construction();
  return op;
}

SvdOperator SvdOperator::from_parts(Matrix matrix, Vector singular_values,
                                    Matrix image_vectors, Matrix data_vectors,
                                    double rank_tol) {
  const Eigen::Index r = std::min(matrix.rows(), matrix.cols());
  if (matrix.rows() < 1 || matrix.cols() < 1) {
    throw UsageError("operator: empty matrix");
  }
  if (singular_values.size() != r || image_vectors.rows() != matrix.cols() ||
      image_vectors.cols() != r || data_vectors.rows() != matrix.rows() ||
      data_vectors.cols() != r) {
    throw UsageError("operator: singular system shape does not match matrix");
  }
  if (!(rank_tol > 0.0 && rank_tol < 1.0)) {
    throw UsageError("operator: rank_tol must lie in (0, 1)");
  }
  for (Eigen::Index n = 0; n < r; ++n) {
    if (!(singular_values(n) >= 0.0) ||
        (n > 0 && singular_values(n) > singular_values(n - 1))) {
      throw UsageError("operator: singular values must be non-negative and descending");
    }
  }
  SvdOperator op;
  op.matrix_ = std::move(matrix);
  op.sigma_ = std::move(singular_values);
  op.u_ = std::move(image_vectors);
  op.v_ = std::move(data_vectors);
  op.rank_tol_ = rank_tol;
  op.finish_construction();
  return op;
}

void SvdOperator::finish_construction() {
  const double tol = kernel_threshold();
  rank_ = 0;
  while (rank_ < static_cast<std::size_t>(sigma_.size()) &&
         sigma_(static_cast<Eigen::Index>(rank_)) > tol) {
    ++rank_;
  }
}

std::size_t SvdOperator::retained_count(double alpha) const {
  std::size_t k = 0;
  while (k < rank_ && sigma_(static_cast<Eigen::Index>(k)) *
                              sigma_(static_cast<Eigen::Index>(k)) >= alpha) {
    ++k;
  }
  return k;
}

void SvdOperator::check_image_dim(const Vector& x, const char* what) const {
  if (static_cast<std::size_t>(x.size()) != cols()) {
    throw UsageError(std::string(what) + ": expected vector of length " +
                     std::to_string(cols()) + ", got " + std::to_string(x.size()));
  }
}

void SvdOperator::check_data_dim(const Vector& y, const char* what) const {
  if (static_cast<std::size_t>(y.size()) != rows()) {
    throw UsageError(std::string(what) + ": expected vector of length " +
                     std::to_string(rows()) + ", got " + std::to_string(y.size()));
  }
}

Vector SvdOperator::apply_forward(const Vector& x) const {
  check_image_dim(x, "apply_forward");
  return matrix_ * x;
}

Vector SvdOperator::apply_adjoint(const Vector& y) const {
  check_data_dim(y, "apply_adjoint");
  return matrix_.transpose() * y;
}

Vector SvdOperator::pseudo_inverse_apply(const Vector& y) const {
  check_data_dim(y, "pseudo_inverse_apply");
  const auto r = static_cast<Eigen::Index>(rank_);
  Vector coeff = v_.leftCols(r).transpose() * y;
  coeff.array() /= sigma_.head(r).array();
  return u_.leftCols(r) * coeff;
}

Vector SvdOperator::image_coefficients(const Vector& x) const {
  check_image_dim(x, "image_coefficients");
  return u_.leftCols(static_cast<Eigen::Index>(rank_)).transpose() * x;
}

Vector SvdOperator::leading_project(const Vector& x, std::size_t count) const {
  check_image_dim(x, "leading_project");
  if (count > rank_) throw UsageError("leading_project: count exceeds rank");
  const auto k = static_cast<Eigen::Index>(count);
  if (k == 0) return Vector::Zero(x.size());
  return u_.leftCols(k) * (u_.leftCols(k).transpose() * x);
}

Vector SvdOperator::trailing_project(const Vector& x, std::size_t count) const {
  check_image_dim(x, "trailing_project");
  if (count > rank_) throw UsageError("trailing_project: count exceeds rank");
  const auto k = static_cast<Eigen::Index>(count);
  if (k == 0) return x;
  const auto lead = u_.leftCols(k);
  Vector r = x - lead * (lead.transpose() * x);
  r -= lead * (lead.transpose() * r);
  return r;
}

Vector SvdOperator::kernel_project(const Vector& x) const {
  check_image_dim(x, "kernel_project");
  return trailing_project(x, rank_);
}

Vector SvdOperator::power_apply(const Vector& x, double mu) const {
  check_image_dim(x, "power_apply");
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw UsageError("power_apply: mu must be finite and positive");
  }
  const auto r = static_cast<Eigen::Index>(rank_);
  Vector coeff = u_.leftCols(r).transpose() * x;
  for (Eigen::Index n = 0; n < r; ++n) coeff(n) *= std::pow(sigma_(n), 2.0 * mu);
  return u_.leftCols(r) * coeff;
}

}  // namespace regnet
