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

#include "regnet/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <random>

#include "regnet/error.hpp"
#include "regnet/radon.hpp"

namespace regnet {

void SourceCondition::validate() const {
  if (!(std::isfinite(mu) && mu > 0.0)) throw UsageError("source condition: mu must be positive");
  if (!(std::isfinite(rho) && rho > 0.0)) throw UsageError("source condition: rho must be positive");
}

double source_distance(const SvdOperator& op, const Vector& r, const SourceCondition& sc) {
  sc.validate();
  const Vector c = op.image_coefficients(r);
  const double kernel_norm = op.kernel_project(r).norm();
  const Vector& sigma = op.singular_values();
  const Eigen::Index n = c.size();

  Vector s(n);
  for (Eigen::Index i = 0; i < n; ++i) s(i) = std::pow(sigma(i), 2.0 * sc.mu);
  if (n > 0 && !(s.minCoeff() > 0.0) ) {
    throw NumericError("source_distance: source weights underflow; cannot bracket multiplier");
  }
  const double free_norm = c.cwiseQuotient(s).norm();
  if (!std::isfinite(free_norm)) {
    throw NumericError("source_distance: unconstrained representer is not finite");
  }
  if (free_norm <= sc.rho) return kernel_norm;

  // phi(nu) = ||s c / (s^2 + nu)|| is decreasing; find phi(nu) = rho.
  const auto phi = [&](double nu) {
    return (s.cwiseProduct(c).array() / (s.array().square() + nu)).matrix().norm();
  };
  double lo = 0.0;
  double hi = s.cwiseProduct(c).norm() / sc.rho;
  int grow = 0;
  while (phi(hi) > sc.rho) {
    hi *= 2.0;
    if (++grow > 200 || !std::isfinite(hi)) {
      throw NumericError("source_distance: failed to bracket the multiplier");
    }
  }
  if (!(hi > 0.0)) throw NumericError("source_distance: degenerate spectrum");
  for (int it = 0; it < 2000 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (phi(mid) > sc.rho) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double nu = hi;
  const Vector resid = (nu * c.array() / (s.array().square() + nu)).matrix();
  return std::sqrt(resid.squaredNorm() + kernel_norm * kernel_norm);
}

double distance_function(const ReconstructionMethod& method, const Vector& x,
                         const SourceCondition& sc) {
  const Vector z = method.regularizer().apply_normal(x);
  const Vector r = x - method.residual(z);
  return source_distance(method.op(), r, sc);
}

BoundTerms error_bound_terms(const ReconstructionMethod& method, const Vector& x,
                             const Vector& y_delta, double delta, const SourceCondition& sc,
                             double lipschitz, double constant) {
  sc.validate();
  if (!(delta >= 0.0)) throw UsageError("error_bound_terms: delta must be non-negative");
  if (!(lipschitz >= 0.0) || !(constant >= 0.0)) {
    throw UsageError("error_bound_terms: Lipschitz constant and C must be non-negative");
  }
  if (method.regularizer().filter().qualification() < sc.mu) {
    throw UsageError("error_bound_terms: filter qualification is below mu");
  }
  const SvdOperator& op = method.op();
  const double noise = (op.apply_forward(x) - y_delta).norm();
  if (noise > delta * (1.0 + 1e-9)) {
    throw UsageError("error_bound_terms: ||A x - y_delta|| exceeds delta");
  }
  BoundTerms t;
  t.noise_term = delta * (1.0 + lipschitz) * method.regularizer().norm();
  t.approx_term = constant * sc.rho * std::pow(method.alpha(), sc.mu);
  t.dist_term = distance_function(method, x, sc);
  t.a3_term = a3_residual(method, x);
  t.lhs = (method.reconstruct(y_delta) - x).norm();
  return t;
}

double param_choice(double delta, const SourceCondition& sc, double scale) {
  sc.validate();
  if (!(delta > 0.0)) throw UsageError("param_choice: delta must be positive");
  if (!(scale > 0.0)) throw UsageError("param_choice: scale must be positive");
  return scale * std::pow(delta, 2.0 / (2.0 * sc.mu + 1.0));
}

SlopeFit fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw UsageError("fit_loglog: length mismatch");
  if (xs.size() < 3) throw UsageError("fit_loglog: degenerate fit (fewer than 3 points)");
  const std::size_t n = xs.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0) || !std::isfinite(xs[i]) || !std::isfinite(ys[i])) {
      throw NumericError("fit_loglog: coordinates must be positive and finite");
    }
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
  }
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw UsageError("fit_loglog: degenerate fit (all abscissae equal)");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ss += e * e;
  }
  fit.residual = std::sqrt(ss);
  fit.points = n;
  return fit;
}

namespace {

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string comment_line(const std::string& comment) {
  if (comment.empty()) return {};
  return "# " + comment + "\n";
}

}  // namespace

std::string format_alpha_csv(const ExperimentReport& report, const std::string& comment) {
  std::string out = comment_line(comment) + "alpha,kept,mse,mae\n";
  for (const AlphaRow& r : report.alpha_rows) {
    out += shortest(r.alpha) + "," + std::to_string(r.kept) + "," + shortest(r.mse) + "," +
           shortest(r.mae) + "\n";
  }
  return out;
}

std::string format_rate_csv(const ExperimentReport& report, const std::string& comment) {
  std::string out = comment_line(comment) + "delta,alpha,error\n";
  for (const auto* rows : {&report.noiseless_rows, &report.rate_rows}) {
    for (const RateRow& r : *rows) {
      out += shortest(r.delta) + "," + shortest(r.alpha) + "," + shortest(r.error) + "\n";
    }
  }
  return out;
}

std::string format_slope_summary(const ExperimentReport& report, const std::string& extra) {
  if (!report.slope) throw UsageError("format_slope_summary: report has no fitted slope");
  std::string out = extra;
  if (!out.empty() && out.back() != '\n') out += "\n";
  out += "slope=" + shortest(report.slope->slope) + "\n";
  out += "intercept=" + shortest(report.slope->intercept) + "\n";
  out += "residual=" + shortest(report.slope->residual) + "\n";
  out += "points=" + std::to_string(report.slope->points) + "\n";
  return out;
}

Vector source_element(const SvdOperator& op, const SourceCondition& sc, std::uint64_t seed) {
  sc.validate();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  Vector w(static_cast<Eigen::Index>(op.cols()));
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = dist(rng);
  w *= sc.rho / w.norm();
  return op.power_apply(w, sc.mu);
}

ExperimentReport rate_experiment(const SvdOperator& op, const MethodFactory& make_method,
                                 const Vector& x, const SourceCondition& sc,
                                 const std::vector<double>& deltas, double scale,
                                 std::uint64_t seed, RateNoise noise) {
  sc.validate();
  std::vector<double> positive;
  std::size_t noiseless = 0;
  for (double d : deltas) {
    if (!(d >= 0.0) || !std::isfinite(d)) throw UsageError("rate_experiment: invalid delta");
    if (d > 0.0) {
      positive.push_back(d);
    } else {
      ++noiseless;
    }
  }
  if (positive.size() < 3) throw UsageError("rate_experiment: degenerate fit (fewer than 3 points)");
  std::sort(positive.begin(), positive.end());
  if (positive.back() < 1e3 * positive.front() * (1.0 - 1e-12)) {
    throw UsageError("rate_experiment: deltas must span at least three decades");
  }

  const Vector y = op.apply_forward(x);
  const Vector random_unit = add_noise_exact(Vector::Zero(y.size()), 1.0, seed);

  ExperimentReport report;
  std::vector<double> ds, es;
  for (double d : positive) {
    const double alpha = param_choice(d, sc, scale);
    const ReconstructionMethod method = make_method(alpha);
    Vector unit = random_unit;
    if (noise == RateNoise::kWorstCase) {
      const Vector& w = method.regularizer().spectral_weights();
      Eigen::Index k = 0;
      if (w.size() > 0) w.cwiseAbs().maxCoeff(&k);
      unit = op.data_vectors().col(k);
    }
    const double err = (method.reconstruct(y + d * unit) - x).norm();
    report.rate_rows.push_back({d, alpha, err});
    ds.push_back(d);
    es.push_back(err);
  }
  if (noiseless > 0) {
    const double alpha = report.rate_rows.front().alpha;
    const double err = (make_method(alpha).reconstruct(y) - x).norm();
    for (std::size_t k = 0; k < noiseless; ++k) report.noiseless_rows.push_back({0.0, alpha, err});
  }
  report.slope = fit_loglog(ds, es);
  return report;
}

ExperimentReport classical_rate_experiment(std::shared_ptr<const SvdOperator> op,
                                           const RegularizingFilter& filter,
                                           const SourceCondition& sc,
                                           const std::vector<double>& deltas, double scale,
                                           std::uint64_t seed, RateNoise noise) {
  if (!op) throw UsageError("classical_rate_experiment: null operator");
  const Vector x = source_element(*op, sc, seed);
  const MethodFactory make = [&](double alpha) {
    return ReconstructionMethod(Variant::kClassicalFilter, op, filter, alpha);
  };
  return rate_experiment(*op, make, x, sc, deltas, scale, seed + 1, noise);
}

Vector admissible_element(const ReconstructionMethod& limit, const Vector& z) {
  return z + limit.residual(z);
}

ExperimentReport convergence_experiment(const RegNetFamily& family, const Vector& x,
                                        const std::vector<double>& deltas,
                                        const std::function<double(double)>& alpha_rule,
                                        std::uint64_t seed) {
  family.validate();
  if (deltas.empty()) throw UsageError("convergence_experiment: empty delta list");
  std::vector<ReconstructionMethod> methods;
  for (std::size_t k = 0; k < family.members.size(); ++k) methods.push_back(family.method(k));

  const Vector y = family.op->apply_forward(x);
  const Vector unit = add_noise_exact(Vector::Zero(y.size()), 1.0, seed);
  ExperimentReport report;
  for (double d : deltas) {
    if (!(d >= 0.0)) throw UsageError("convergence_experiment: invalid delta");
    const double target = alpha_rule(d);
    if (!(target > 0.0)) throw UsageError("convergence_experiment: alpha rule must be positive");
    std::size_t best = 0;
    for (std::size_t k = 1; k < methods.size(); ++k) {
      if (std::abs(std::log(methods[k].alpha() / target)) <
          std::abs(std::log(methods[best].alpha() / target))) {
        best = k;
      }
    }
    const double err = (methods[best].reconstruct(y + d * unit) - x).norm();
    RateRow row{d, methods[best].alpha(), err};
    if (d == 0.0) {
      report.noiseless_rows.push_back(row);
    } else {
      report.rate_rows.push_back(row);
    }
  }
  std::sort(report.rate_rows.begin(), report.rate_rows.end(),
            [](const RateRow& a, const RateRow& b) { return a.delta < b.delta; });
  if (report.rate_rows.size() >= 2) {
    report.flagged = report.rate_rows.front().error > report.rate_rows.back().error;
  }
  return report;
}

EvalCandidate make_candidate(const ReconstructionMethod& method) {
  EvalCandidate c;
  c.alpha = method.alpha();
  c.kept = method.op().retained_count(method.alpha());
  c.reconstruct = [method](const Vector& y) { return method.reconstruct(y); };
  return c;
}

Vector rescale_unit(const Vector& image) {
  if (image.size() == 0) return image;
  const double lo = image.minCoeff();
  const double hi = image.maxCoeff();
  if (!(hi > lo)) return Vector::Zero(image.size());
  return (image.array() - lo) / (hi - lo);
}

ExperimentReport evaluate_testset(const std::vector<EvalCandidate>& candidates,
                                  const std::vector<TestItem>& testset, double delta,
                                  std::uint64_t seed) {
  if (testset.empty()) throw UsageError("evaluate_testset: empty test set");
  if (candidates.empty()) throw UsageError("evaluate_testset: no candidate methods");
  std::vector<Vector> noisy;
  std::vector<Vector> truths;
  for (std::size_t k = 0; k < testset.size(); ++k) {
    noisy.push_back(add_noise(testset[k].sinogram, delta, seed + k));
    truths.push_back(rescale_unit(testset[k].truth));
  }
  ExperimentReport report;
  for (const EvalCandidate& c : candidates) {
    AlphaRow row{c.alpha, c.kept, 0.0, 0.0};
    for (std::size_t k = 0; k < testset.size(); ++k) {
      const Vector diff = rescale_unit(c.reconstruct(noisy[k])) - truths[k];
      if (diff.size() == 0) throw UsageError("evaluate_testset: empty image");
      const double px = static_cast<double>(diff.size());
      row.mse += diff.squaredNorm() / px;
      row.mae += diff.cwiseAbs().sum() / px;
    }
    row.mse /= static_cast<double>(testset.size());
    row.mae /= static_cast<double>(testset.size());
    if (!std::isfinite(row.mse) || !std::isfinite(row.mae)) {
      throw NumericError("evaluate_testset: non-finite error");
    }
    report.alpha_rows.push_back(row);
  }
  std::stable_sort(report.alpha_rows.begin(), report.alpha_rows.end(),
                   [](const AlphaRow& a, const AlphaRow& b) { return a.alpha < b.alpha; });
  const auto best = std::min_element(
      report.alpha_rows.begin(), report.alpha_rows.end(),
      [](const AlphaRow& a, const AlphaRow& b) { return a.mse < b.mse; });
  report.best_alpha = best->alpha;
  return report;
}

}  // namespace regnet
