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

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "regnet/filters.hpp"
#include "regnet/linop.hpp"
#include "regnet/network.hpp"

namespace regnet {

enum class Variant {
  // R_alpha = B_alpha (no network).
  kClassicalFilter,
  // R_alpha = (Id + P_ker N) B_alpha. Reconstructions lie in the admissible
  // set M = (Id + F)(ran A^+), F = P_ker N.
  kNullSpaceRegNet,
  // R_alpha = B_alpha + sum_{sigma_n^2 < alpha} <N(B_alpha y), u_n> u_n, the
  // sum including the numerical kernel.
  kContinuedSvdRegNet,
};

std::string variant_name(Variant variant);
// "classical" | "nullspace" | "continued"
Variant parse_variant(std::string_view name);

// F(z) = P_ker(A) N(z)
Vector nullspace_residual(const SvdOperator& op, const NetworkParams& params, const Vector& z);

// Projection of N(z) onto span{u_n : sigma_n^2 < alpha} plus the numerical kernel.
Vector continued_svd_residual(const SvdOperator& op, double alpha, const NetworkParams& params,
                              const Vector& z);

// The orthogonal projector applied to the network output by `variant`
// (identity-free: classical methods have no projector).
OutputHead output_head_for(Variant variant, std::shared_ptr<const SvdOperator> op, double alpha);

class ReconstructionMethod {
 public:
  ReconstructionMethod(Variant variant, std::shared_ptr<const SvdOperator> op,
                       RegularizingFilter filter, double alpha,
                       std::optional<NetworkParams> params = std::nullopt);

  Variant variant() const { return variant_; }
  const SvdOperator& op() const { return regularizer_.op(); }
  const FilterRegularizer& regularizer() const { return regularizer_; }
  double alpha() const { return regularizer_.alpha(); }
  const std::optional<NetworkParams>& params() const { return params_; }

  // B_alpha y
  Vector regularize(const Vector& y) const;
  // N_theta(alpha)(z): the projected network residual (zero for classical).
  Vector residual(const Vector& z) const;
  // R_alpha(y) = B_alpha y + residual(B_alpha y)
  Vector reconstruct(const Vector& y) const;

 private:
  Variant variant_;
  FilterRegularizer regularizer_;
  std::optional<NetworkParams> params_;
};

// ||B_alpha A N(B_alpha A x)||, composed in the singular basis.
double a3_residual(const ReconstructionMethod& method, const Vector& x);

// One network per regularization parameter, sharing operator, filter and variant.
struct RegNetFamily {
  std::shared_ptr<const SvdOperator> op;
  RegularizingFilter filter = RegularizingFilter::truncated_svd();
  Variant variant = Variant::kContinuedSvdRegNet;
  // Descending alpha.
  std::vector<std::pair<double, NetworkParams>> members;
  double lipschitz_cap = 0.0;

  void validate() const;
  ReconstructionMethod method(std::size_t index) const;
  // Largest lipschitz_upper_bound over the members.
  double max_lipschitz() const;
  bool within_lipschitz_cap() const { return max_lipschitz() <= lipschitz_cap; }
};

struct AdaptednessReport {
  std::vector<double> alphas;
  // distances[p][a] = || N_a(B_a A z_p) - N_min(B_min A z_p) || for probe p and
  // alpha index a; the smallest alpha has distance 0.
  std::vector<std::vector<double>> distances;
  // Per probe: whether distances are non-increasing as alpha decreases.
  std::vector<bool> monotone_tail;
};

// Evidence for lim_{alpha -> 0} N_alpha(B_alpha A z) = F(z) on the given probes.
// Probes must be orthogonal to the numerical kernel.
AdaptednessReport adaptedness_probe(const RegNetFamily& family, const std::vector<Vector>& probes);

struct ManifestEntry {
  double alpha = 0.0;
  std::string model_path;
};

// Text lines "alpha=<decimal> model=<path>"; '#' starts a comment line.
std::vector<ManifestEntry> parse_manifest(std::string_view text);
std::string format_manifest(const std::vector<ManifestEntry>& entries);

}  // namespace regnet
