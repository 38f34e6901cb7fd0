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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "regnet/filters.hpp"
#include "regnet/linop.hpp"
#include "regnet/regnet.hpp"

namespace regnet {

// x = (A^T A)^mu w with ||w|| <= rho.
struct SourceCondition {
  double mu = 0.5;
  double rho = 1.0;

  void validate() const;
};

// min over ||w|| <= rho of ||r - (A^T A)^mu w||, solved in the singular basis.
// Throws NumericError when the spectrum is too degenerate to bracket the
// Lagrange multiplier.
double source_distance(const SvdOperator& op, const Vector& r, const SourceCondition& sc);

// source_distance of r = x - N(B_alpha A x) for the given method.
double distance_function(const ReconstructionMethod& method, const Vector& x,
                         const SourceCondition& sc);

struct BoundTerms {
  double noise_term = 0.0;   // delta (1 + L) ||B_alpha||
  double approx_term = 0.0;  // C rho alpha^mu
  double dist_term = 0.0;    // distance_function
  double a3_term = 0.0;      // ||B_alpha A N(B_alpha A x)||
  double lhs = 0.0;          // ||R_alpha(y_delta) - x||

  double total() const { return noise_term + approx_term + dist_term + a3_term; }
  bool holds(double slack = 1e-9) const { return lhs <= total() + slack; }
};

// Requires ||A x - y_delta|| <= delta (1 + 1e-9) and a filter whose
// qualification is at least sc.mu. `lipschitz` bounds the residual map and
// `constant` is the qualification constant C.
BoundTerms error_bound_terms(const ReconstructionMethod& method, const Vector& x,
                             const Vector& y_delta, double delta, const SourceCondition& sc,
                             double lipschitz, double constant);

// alpha = scale * delta^(2 / (2 mu + 1))
double param_choice(double delta, const SourceCondition& sc, double scale = 1.0);

struct AlphaRow {
  double alpha = 0.0;
  std::size_t kept = 0;
  double mse = 0.0;
  double mae = 0.0;
};

struct RateRow {
  double delta = 0.0;
  double alpha = 0.0;
  double error = 0.0;
};

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // root of the summed squared residuals
  std::size_t points = 0;
};

// Least-squares line through (log x, log y). Needs at least three points with
// positive coordinates.
SlopeFit fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys);

struct ExperimentReport {
  std::vector<AlphaRow> alpha_rows;      // ascending alpha
  std::vector<RateRow> rate_rows;        // ascending delta, delta > 0
  std::vector<RateRow> noiseless_rows;   // delta == 0, kept out of the fit
  std::optional<SlopeFit> slope;
  std::optional<double> best_alpha;      // minimal MSE
  // Convergence experiment: the error at the smallest delta exceeds the
  // error at the largest.
  bool flagged = false;
};

// CSV with a leading "# <comment>" line when the comment is non-empty.
std::string format_alpha_csv(const ExperimentReport& report, const std::string& comment = {});
std::string format_rate_csv(const ExperimentReport& report, const std::string& comment = {});
// key=value lines: slope, intercept, residual, points (plus any `extra` lines).
std::string format_slope_summary(const ExperimentReport& report, const std::string& extra = {});

using MethodFactory = std::function<ReconstructionMethod(double alpha)>;

// (A^T A)^mu w with w a seeded Gaussian vector scaled to norm rho.
Vector source_element(const SvdOperator& op, const SourceCondition& sc, std::uint64_t seed);

enum class RateNoise {
  // z = delta v_k with k maximising g_alpha(sigma_k^2) sigma_k, so that
  // ||B_alpha z|| = delta ||B_alpha||.
  kWorstCase,
  // One seeded random direction shared by all deltas.
  kRandomDirection,
};

// For each delta: y_delta = A x + z with ||z|| = delta, alpha =
// param_choice(delta), error ||R_alpha(y_delta) - x||. delta = 0 entries are
// evaluated at the alpha of the smallest positive delta. Positive deltas must
// number at least three and span at least three decades.
ExperimentReport rate_experiment(const SvdOperator& op, const MethodFactory& make_method,
                                 const Vector& x, const SourceCondition& sc,
                                 const std::vector<double>& deltas, double scale,
                                 std::uint64_t seed, RateNoise noise = RateNoise::kWorstCase);

// x = source_element(op, sc, seed).
ExperimentReport classical_rate_experiment(std::shared_ptr<const SvdOperator> op,
                                           const RegularizingFilter& filter,
                                           const SourceCondition& sc,
                                           const std::vector<double>& deltas, double scale,
                                           std::uint64_t seed,
                                           RateNoise noise = RateNoise::kWorstCase);

// x = z + F(z) with F the residual map of `limit` (the family's smallest alpha).
Vector admissible_element(const ReconstructionMethod& limit, const Vector& z);

// For each delta the family member whose alpha is closest (in log scale) to
// alpha_rule(delta) reconstructs y_delta = A x + z, ||z|| = delta.
ExperimentReport convergence_experiment(const RegNetFamily& family, const Vector& x,
                                        const std::vector<double>& deltas,
                                        const std::function<double(double)>& alpha_rule,
                                        std::uint64_t seed);

struct TestItem {
  Vector truth;     // coefficient image
  Vector sinogram;  // noise-free data A truth
};

struct EvalCandidate {
  double alpha = 0.0;
  std::size_t kept = 0;
  std::function<Vector(const Vector&)> reconstruct;
};

EvalCandidate make_candidate(const ReconstructionMethod& method);

// Affine map of the entries onto [0, 1]; constant images map to zero.
Vector rescale_unit(const Vector& image);

// Item k receives relative Gaussian noise with seed `seed + k`. Errors are
// computed after rescaling both reconstruction and truth to [0, 1]; MSE and
// MAE are per-pixel means averaged over the items.
ExperimentReport evaluate_testset(const std::vector<EvalCandidate>& candidates,
                                  const std::vector<TestItem>& testset, double delta,
                                  std::uint64_t seed);

}  // namespace regnet
