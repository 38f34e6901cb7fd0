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

#include "regnet/filters.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "regnet/error.hpp"

namespace regnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// |lambda g| may grow by this factor over the unit level before the
// boundedness axiom is reported as violated.
constexpr double kGrowthFactor = 10.0;
// Relative residual lambda |g - 1/lambda| a convergent filter must reach.
constexpr double kConvergedRelResidual = 1e-2;

}  // namespace

RegularizingFilter RegularizingFilter::tikhonov() {
  return RegularizingFilter(FilterKind::kTikhonov, 0.0);
}

RegularizingFilter RegularizingFilter::truncated_svd() {
  return RegularizingFilter(FilterKind::kTruncatedSvd, 0.0);
}

RegularizingFilter RegularizingFilter::landweber(double step) {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw UsageError("landweber: step size must be positive");
  }
  return RegularizingFilter(FilterKind::kLandweber, step);
}

RegularizingFilter RegularizingFilter::parse(std::string_view name, double landweber_step) {
  if (name == "tikhonov") return tikhonov();
  if (name == "tsvd") return truncated_svd();
  if (name == "landweber") return landweber(landweber_step);
  throw UsageError("unknown filter '" + std::string(name) +
                   "' (expected tikhonov, tsvd or landweber)");
}

std::string RegularizingFilter::name() const {
  switch (kind_) {
    case FilterKind::kTikhonov: return "tikhonov";
    case FilterKind::kTruncatedSvd: return "tsvd";
    case FilterKind::kLandweber: return "landweber";
  }
  return "unknown";
}

double RegularizingFilter::qualification() const {
  return kind_ == FilterKind::kTikhonov ? 1.0 : kInf;
}

double RegularizingFilter::constant(double mu) const {
  if (!(mu > 0.0) || mu > qualification()) {
    throw UsageError("filter constant: mu must lie in (0, qualification]");
  }
  switch (kind_) {
    case FilterKind::kTikhonov:
      // max_lambda lambda^mu alpha / (lambda + alpha) = mu^mu (1-mu)^(1-mu) alpha^mu
      return mu < 1.0 ? std::pow(mu, mu) * std::pow(1.0 - mu, 1.0 - mu) : 1.0;
    case FilterKind::kTruncatedSvd:
      return 1.0;
    case FilterKind::kLandweber:
      // lambda^mu (1 - beta lambda)^k <= (mu / (beta k e))^mu and 1/k <= alpha
      return std::pow(mu / (step_ * std::exp(1.0)), mu);
  }
  return 1.0;
}

std::uint64_t RegularizingFilter::landweber_iterations(double alpha) {
  if (!(alpha > 0.0)) throw UsageError("landweber: alpha must be positive");
  const double k = std::ceil(1.0 / alpha);
  if (k > 9.0e15) throw UsageError("landweber: alpha too small");
  return static_cast<std::uint64_t>(k);
}

double RegularizingFilter::value(double alpha, double lambda) const {
  if (!(alpha > 0.0)) throw UsageError("filter: alpha must be positive");
  if (!(lambda >= 0.0)) throw UsageError("filter: lambda must be non-negative");
  switch (kind_) {
    case FilterKind::kTikhonov:
      return 1.0 / (lambda + alpha);
    case FilterKind::kTruncatedSvd:
      return lambda < alpha ? 0.0 : 1.0 / lambda;
    case FilterKind::kLandweber: {
      const double k = static_cast<double>(landweber_iterations(alpha));
      if (lambda == 0.0) return k * step_;
      const double q = step_ * lambda;
      if (q >= 1.0) {
        // Only reachable for lambda at or beyond 1/beta.
        return (1.0 - std::pow(1.0 - q, k)) / lambda;
      }
      // 1 - (1 - q)^k without cancellation for small q
      return -std::expm1(k * std::log1p(-q)) / lambda;
    }
  }
  return 0.0;
}

FilterRegularizer::FilterRegularizer(std::shared_ptr<const SvdOperator> op,
                                     RegularizingFilter filter, double alpha)
    : op_(std::move(op)), filter_(filter), alpha_(alpha) {
  if (!op_) throw UsageError("regularizer: null operator");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw UsageError("regularizer: alpha must be finite and positive");
  }
  const auto r = static_cast<Eigen::Index>(op_->rank());
  const Vector& sigma = op_->singular_values();
  weights_.resize(r);
  active_ = 0;
  for (Eigen::Index n = 0; n < r; ++n) {
    const double s = sigma(n);
    weights_(n) = filter_.value(alpha_, s * s) * s;
    if (weights_(n) != 0.0) active_ = n + 1;
  }
}

Vector FilterRegularizer::apply(const Vector& y) const {
  if (static_cast<std::size_t>(y.size()) != op_->rows()) {
    throw UsageError("apply_regularizer: data vector has wrong length");
  }
  if (active_ == 0) return Vector::Zero(static_cast<Eigen::Index>(op_->cols()));
  const auto v = op_->data_vectors().leftCols(active_);
  const auto u = op_->image_vectors().leftCols(active_);
  Vector coeff = v.transpose() * y;
  coeff.array() *= weights_.head(active_).array();
  return u * coeff;
}

Vector FilterRegularizer::apply_normal(const Vector& x) const {
  if (static_cast<std::size_t>(x.size()) != op_->cols()) {
    throw UsageError("apply_normal: coefficient vector has wrong length");
  }
  if (active_ == 0) return Vector::Zero(x.size());
  const auto u = op_->image_vectors().leftCols(active_);
  Vector coeff = u.transpose() * x;
  coeff.array() *= weights_.head(active_).array() *
                   op_->singular_values().head(active_).array();
  return u * coeff;
}

double FilterRegularizer::norm() const {
  return weights_.size() == 0 ? 0.0 : weights_.cwiseAbs().maxCoeff();
}

double qualification_sup(const RegularizingFilter& filter, double alpha, double mu,
                         double lambda_max, std::size_t grid_size) {
  if (!(mu > 0.0)) throw UsageError("qualification_sup: mu must be positive");
  if (!(alpha > 0.0)) throw UsageError("qualification_sup: alpha must be positive");
  if (!(lambda_max > 0.0)) throw UsageError("qualification_sup: lambda_max must be positive");
  if (grid_size < 1000) throw UsageError("qualification_sup: grid_size must be >= 1000");

  auto term = [&](double lambda) {
    return std::pow(lambda, mu) * std::abs(1.0 - lambda * filter.value(alpha, lambda));
  };

  double sup = 0.0;
  const double h = lambda_max / static_cast<double>(grid_size - 1);
  for (std::size_t i = 0; i < grid_size; ++i) {
    sup = std::max(sup, term(std::min(lambda_max, h * static_cast<double>(i))));
  }
  // The supremum sits at lambda ~ alpha for all three filters; a uniform grid
  // coarser than alpha misses it, so add a geometric sweep around alpha.
  constexpr int kLocal = 400;
  for (int i = 0; i <= kLocal; ++i) {
    const double lambda = alpha * std::pow(10.0, -2.0 + 4.0 * i / kLocal);
    if (lambda <= lambda_max) sup = std::max(sup, term(lambda));
  }
  // Truncated SVD jumps at lambda = alpha; approach the cut from below.
  const double below = std::nextafter(alpha, 0.0);
  if (below <= lambda_max) sup = std::max(sup, term(below));
  return sup;
}

FilterAxiomReport verify_filter_axioms(const FilterFunction& filter, double lambda_max,
                                       const std::vector<double>& alphas) {
  if (!(lambda_max > 0.0)) throw UsageError("verify_filter_axioms: lambda_max must be positive");
  if (alphas.empty()) throw UsageError("verify_filter_axioms: empty alpha list");
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (!(alphas[i] > 0.0) || (i > 0 && !(alphas[i] < alphas[i - 1]))) {
      throw UsageError("verify_filter_axioms: alphas must be positive and strictly descending");
    }
  }

  FilterAxiomReport report;
  constexpr std::size_t kGrid = 2001;
  bool finite = true;
  for (double alpha : alphas) {
    double sup = 0.0;
    auto visit = [&](double lambda) {
      const double v = std::abs(lambda * filter(alpha, lambda));
      if (!std::isfinite(v)) finite = false;
      sup = std::max(sup, v);
    };
    for (std::size_t i = 0; i < kGrid; ++i) {
      visit(lambda_max * static_cast<double>(i) / static_cast<double>(kGrid - 1));
    }
    for (int i = 0; i <= 100; ++i) {
      const double lambda = alpha * std::pow(10.0, -2.0 + 4.0 * i / 100.0);
      if (lambda <= lambda_max) visit(lambda);
    }
    report.bound_per_alpha.push_back(sup);
    report.bound_sup = std::max(report.bound_sup, sup);
  }
  const double reference = std::max(1.0, report.bound_per_alpha.front());
  report.bounded = finite && report.bound_sup <= kGrowthFactor * reference;

  report.probe_lambdas = {lambda_max,        0.5 * lambda_max,   0.1 * lambda_max,
                          0.05 * lambda_max, 0.01 * lambda_max,  0.005 * lambda_max,
                          0.001 * lambda_max};
  report.convergent = true;
  for (double lambda : report.probe_lambdas) {
    std::vector<double> row;
    row.reserve(alphas.size());
    for (double alpha : alphas) row.push_back(std::abs(filter(alpha, lambda) - 1.0 / lambda));
    bool monotone = true;
    for (std::size_t i = 1; i < row.size(); ++i) {
      if (!std::isfinite(row[i]) || row[i] > row[i - 1] * (1.0 + 1e-12) + 1e-300) {
        monotone = false;
      }
    }
    const bool small = lambda * row.back() <= kConvergedRelResidual;
    if (!monotone || !small) report.convergent = false;
    report.convergence_residuals.push_back(std::move(row));
  }
  return report;
}

FilterAxiomReport verify_filter_axioms(const RegularizingFilter& filter, double lambda_max,
                                       const std::vector<double>& alphas) {
  return verify_filter_axioms(
      [&filter](double alpha, double lambda) { return filter.value(alpha, lambda); },
      lambda_max, alphas);
}

}  // namespace regnet
