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

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "regnet/linop.hpp"

namespace regnet {

enum class FilterKind { kTikhonov, kTruncatedSvd, kLandweber };

// Spectral filter g_alpha(lambda) approximating 1/lambda on [0, ||A^T A||].
//
//   Tikhonov:      1 / (lambda + alpha)                      qualification 1
//   TruncatedSvd:  0 if lambda < alpha, else 1 / lambda      qualification inf
//   Landweber:     sum_{j<k} beta (1 - beta lambda)^j,       qualification inf
//                  k = ceil(1 / alpha), beta in (0, 1/||A^T A||]
class RegularizingFilter {
 public:
  static RegularizingFilter tikhonov();
  static RegularizingFilter truncated_svd();
  static RegularizingFilter landweber(double step);
  // Accepts "tikhonov", "tsvd" and "landweber". Landweber needs the step.
  static RegularizingFilter parse(std::string_view name, double landweber_step = 1.0);

  FilterKind kind() const { return kind_; }
  double landweber_step() const { return step_; }
  std::string name() const;

  // Largest mu for which the qualification inequality holds (may be +inf).
  double qualification() const;
  // Constant C with sup_lambda lambda^mu |1 - lambda g_alpha(lambda)| <= C alpha^mu.
  // Requires 0 < mu <= qualification().
  double constant(double mu) const;

  // g_alpha(lambda). Throws UsageError for alpha <= 0 or lambda < 0.
  double value(double alpha, double lambda) const;

  static std::uint64_t landweber_iterations(double alpha);

 private:
  RegularizingFilter(FilterKind kind, double step) : kind_(kind), step_(step) {}
  FilterKind kind_;
  double step_;
};

// B_alpha = g_alpha(A^T A) A^T evaluated in the singular basis.
class FilterRegularizer {
 public:
  FilterRegularizer(std::shared_ptr<const SvdOperator> op, RegularizingFilter filter,
                    double alpha);

  const SvdOperator& op() const { return *op_; }
  const std::shared_ptr<const SvdOperator>& op_ptr() const { return op_; }
  const RegularizingFilter& filter() const { return filter_; }
  double alpha() const { return alpha_; }

  // sum_n g(sigma_n^2) sigma_n <v_n, y> u_n
  Vector apply(const Vector& y) const;
  // B_alpha A x = sum_n g(sigma_n^2) sigma_n^2 <u_n, x> u_n, composed spectrally.
  Vector apply_normal(const Vector& x) const;
  // Exact operator norm on the stored spectrum: max_n |g(sigma_n^2)| sigma_n.
  double norm() const;
  // g(sigma_n^2) sigma_n for n < rank.
  const Vector& spectral_weights() const { return weights_; }

 private:
  std::shared_ptr<const SvdOperator> op_;
  RegularizingFilter filter_;
  double alpha_;
  Vector weights_;
  Eigen::Index active_ = 0;  // weights beyond this index are zero
};

// max over a uniform lambda grid on [0, lambda_max] (refined around alpha) of
// lambda^mu |1 - lambda g_alpha(lambda)|.
double qualification_sup(const RegularizingFilter& filter, double alpha, double mu,
                         double lambda_max, std::size_t grid_size);

using FilterFunction = std::function<double(double alpha, double lambda)>;

struct FilterAxiomReport {
  // Boundedness of |lambda g_alpha(lambda)|.
  std::vector<double> bound_per_alpha;
  double bound_sup = 0.0;
  bool bounded = false;
  // Pointwise convergence g_alpha(lambda) -> 1/lambda: one row per probe,
  // one entry |g_alpha(lambda) - 1/lambda| per alpha.
  std::vector<double> probe_lambdas;
  std::vector<std::vector<double>> convergence_residuals;
  bool convergent = false;

  bool ok() const { return bounded && convergent; }
};

// `alphas` must be positive and strictly descending.
FilterAxiomReport verify_filter_axioms(const FilterFunction& filter, double lambda_max,
                                       const std::vector<double>& alphas);
FilterAxiomReport verify_filter_axioms(const RegularizingFilter& filter, double lambda_max,
                                       const std::vector<double>& alphas);

}  // namespace regnet
