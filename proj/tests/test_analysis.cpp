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

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <sstream>
#include <vector>

#include "oracles.hpp"
#include "regnet/analysis.hpp"
#include "regnet/error.hpp"
#include "regnet/radon.hpp"
#include "support.hpp"

using namespace regnet;
using namespace regnet::testing;

namespace {

constexpr std::size_t kSide = 5;

// 15 x 25 with a 10-dimensional kernel.
std::shared_ptr<const SvdOperator> small_operator(std::uint64_t seed, double sigma_min = 0.3) {
  Vector sigma(15);
  for (Eigen::Index n = 0; n < 15; ++n) sigma(n) = 1.5 * std::pow(sigma_min / 1.5, n / 14.0);
  return make_operator(matrix_with_spectrum(15, 25, sigma, seed));
}

NetworkParams net(std::uint64_t seed, double scale = 0.3) {
  NetworkParams p = init_network(NetworkArch::small_cnn(kSide, 3), seed);
  for (double& v : p.values()) v *= scale;
  for (double& b : p.biases(0)) b = 0.05;
  return p;
}

}  // namespace

TEST_CASE("source distance agrees with a projected-gradient oracle") {
  for (std::uint64_t k = 0; k < 12; ++k) {
    const auto op = small_operator(200 + k);
    const Vector r = random_vector(25, 300 + k);
    const SourceCondition sc{k % 2 == 0 ? 0.5 : 1.0, 0.2 + 0.3 * static_cast<double>(k % 4)};
    const double got = source_distance(*op, r, sc);
    const double oracle = source_distance_pgd(op->matrix(), r, sc.mu, sc.rho);
    CHECK_MESSAGE(rel_err(got, oracle) < 1e-6, "instance " << k);
  }
}

TEST_CASE("source distance on representable inputs and monotonicity in rho") {
  const auto op = small_operator(7);
  const SourceCondition sc{0.5, 1.0};
  Vector w = random_vector(25, 8);
  w *= 0.9 / w.norm();
  CHECK(source_distance(*op, op->power_apply(w, 0.5), sc) <= 1e-12);
  // Unconstrained regime: only the kernel part remains.
  const Vector x = op->power_apply(w, 0.5) + op->kernel_project(random_vector(25, 9));
  CHECK(rel_err(source_distance(*op, x, sc), op->kernel_project(x).norm()) < 1e-10);
  const Vector r = random_vector(25, 10);
  double previous = source_distance(*op, r, {0.5, 0.01});
  for (double rho : {0.1, 0.5, 1.0, 5.0, 50.0}) {
    const double d = source_distance(*op, r, {0.5, rho});
    CHECK(d <= previous * (1 + 1e-12));
    previous = d;
  }
  CHECK_THROWS_AS(source_distance(*op, r, {0.0, 1.0}), UsageError);
  CHECK_THROWS_AS(source_distance(*op, r, {0.5, -1.0}), UsageError);
}

TEST_CASE("distance function uses the method residual") {
  const auto op = small_operator(11);
  const auto tsvd = RegularizingFilter::truncated_svd();
  const SourceCondition sc{0.5, 0.7};
  const Vector x = random_vector(25, 12);
  const ReconstructionMethod classical(Variant::kClassicalFilter, op, tsvd, 0.2);
  CHECK(distance_function(classical, x, sc) == source_distance(*op, x, sc));
  const ReconstructionMethod nsn(Variant::kNullSpaceRegNet, op, tsvd, 0.2, net(3));
  const Vector r = x - nsn.residual(nsn.regularizer().apply_normal(x));
  CHECK(distance_function(nsn, x, sc) == source_distance(*op, r, sc));
}

TEST_CASE("error bound holds on random admissible instances") {
  const auto tsvd = RegularizingFilter::truncated_svd();
  const SourceCondition sc{0.5, 1.0};
  std::size_t evaluated = 0;
  for (std::uint64_t k = 0; k < 30; ++k) {
    const auto op = small_operator(400 + k, 0.05);
    const NetworkParams p = net(500 + k);
    const double lip = lipschitz_upper_bound(p);
    const double alpha = 0.01 + 0.1 * static_cast<double>(k % 5);
    for (Variant v : {Variant::kClassicalFilter, Variant::kNullSpaceRegNet, Variant::kContinuedSvdRegNet}) {
      const ReconstructionMethod m(v, op, tsvd, alpha, p);
      const ReconstructionMethod limit(v, op, tsvd, 1e-6, p);
      const Vector x = admissible_element(limit, source_element(*op, sc, 600 + k));
      const double delta = 1e-3 * static_cast<double>(1 + k % 7);
      const Vector y = add_noise_exact(op->apply_forward(x), delta, 700 + k);
      const BoundTerms t = error_bound_terms(m, x, y, delta, sc, v == Variant::kClassicalFilter ? 0.0 : lip,
                                             tsvd.constant(sc.mu));
      CHECK(t.holds());
      CHECK(t.noise_term >= 0.0);
      CHECK(t.dist_term >= 0.0);
      if (v != Variant::kNullSpaceRegNet) CHECK(t.a3_term <= 1e-10);
      ++evaluated;
    }
  }
  CHECK(evaluated == 90);
}

TEST_CASE("error bound preconditions") {
  const auto op = small_operator(13);
  const SourceCondition sc{2.0, 1.0};
  const ReconstructionMethod tik(Variant::kClassicalFilter, op, RegularizingFilter::tikhonov(), 0.1);
  const Vector x = random_vector(25, 14);
  const Vector y = op->apply_forward(x);
  CHECK_THROWS_AS(error_bound_terms(tik, x, y, 0.0, sc, 0.0, 1.0), UsageError);
  const SourceCondition ok{0.5, 1.0};
  CHECK_THROWS_AS(error_bound_terms(tik, x, add_noise_exact(y, 0.1, 1), 0.05, ok, 0.0, 0.5),
                  UsageError);
  CHECK_NOTHROW(error_bound_terms(tik, x, add_noise_exact(y, 0.1, 1), 0.1, ok, 0.0, 0.5));
}

TEST_CASE("parameter choice rule") {
  CHECK(param_choice(1e-4, {0.5, 1.0}) == doctest::Approx(1e-4));
  CHECK(param_choice(1e-3, {0.25, 1.0}) == doctest::Approx(1e-4));
  CHECK(param_choice(1e-3, {1.0, 1.0}, 2.0) == doctest::Approx(2e-2));
  CHECK_THROWS_AS(param_choice(0.0, {0.5, 1.0}), UsageError);
  CHECK_THROWS_AS(param_choice(0.1, {0.5, 1.0}, 0.0), UsageError);
}

TEST_CASE("log-log fit") {
  std::vector<double> xs, ys;
  for (double x : {1e-4, 1e-3, 1e-2, 1e-1}) {
    xs.push_back(x);
    ys.push_back(3.0 * std::pow(x, 0.4));
  }
  const SlopeFit f = fit_loglog(xs, ys);
  CHECK(f.slope == doctest::Approx(0.4));
  CHECK(f.intercept == doctest::Approx(std::log(3.0)));
  CHECK(f.residual <= 1e-12);
  CHECK(f.points == 4);
  CHECK_THROWS_AS(fit_loglog({1.0, 2.0}, {1.0, 2.0}), UsageError);
  CHECK_THROWS_AS(fit_loglog({1.0, 2.0, 3.0}, {1.0, 0.0, 2.0}), NumericError);
  CHECK_THROWS_AS(fit_loglog({1.0, 1.0, 1.0}, {1.0, 2.0, 3.0}), UsageError);
}

TEST_CASE("classical rates on a diagonal model problem") {
  // sigma_n = n^-1, 400 values: a mildly ill-posed problem with a dense spectrum.
  Vector sigma(400);
  for (Eigen::Index n = 0; n < 400; ++n) sigma(n) = 1.0 / static_cast<double>(n + 1);
  const auto op = make_operator(matrix_with_spectrum(400, 400, sigma, 15));
  for (double mu : {0.25, 0.5, 1.0}) {
    // Deltas whose chosen alpha stays inside the spectrum, [8e-6, 1e-1].
    std::vector<double> deltas;
    for (int k = 0; k <= 12; ++k) {
      const double alpha = 8e-6 * std::pow(1e-1 / 8e-6, k / 12.0);
      deltas.push_back(std::pow(alpha, (2 * mu + 1) / 2));
    }
    deltas.push_back(0.0);
    const ExperimentReport r = classical_rate_experiment(op, RegularizingFilter::truncated_svd(),
                                                         {mu, 1.0}, deltas, 1.0, 5);
    REQUIRE(r.slope);
    CHECK_MESSAGE(std::abs(r.slope->slope - 2 * mu / (2 * mu + 1)) <= 0.15, "mu = " << mu);
    CHECK(r.rate_rows.size() == 13);
    CHECK(r.noiseless_rows.size() == 1);
    CHECK(r.noiseless_rows[0].alpha == r.rate_rows.front().alpha);
    for (std::size_t k = 1; k < r.rate_rows.size(); ++k) {
      CHECK(r.rate_rows[k].delta > r.rate_rows[k - 1].delta);
    }
  }
  CHECK_THROWS_AS(classical_rate_experiment(op, RegularizingFilter::truncated_svd(), {0.5, 1.0},
                                            {1e-3, 1e-2, 1e-1}, 1.0, 1),
                  UsageError);
  CHECK_THROWS_AS(classical_rate_experiment(op, RegularizingFilter::truncated_svd(), {0.5, 1.0},
                                            {1e-5, 1e-1}, 1.0, 1),
                  UsageError);
}

TEST_CASE("worst-case noise realises the regularizer norm") {
  const auto op = small_operator(16, 0.01);
  const Vector x = source_element(*op, {0.5, 1.0}, 17);
  const std::vector<double> deltas = {1e-4, 1e-3, 1e-2, 1e-1};
  const ExperimentReport r = rate_experiment(
      *op,
      [&](double alpha) {
        return ReconstructionMethod(Variant::kClassicalFilter, op, RegularizingFilter::tikhonov(), alpha);
      },
      x, {0.5, 1.0}, deltas, 1.0, 18);
  for (const RateRow& row : r.rate_rows) {
    const FilterRegularizer reg(op, RegularizingFilter::tikhonov(), row.alpha);
    // Triangle inequality: error <= approximation error + delta ||B_alpha||,
    // and the noise contribution alone reaches delta ||B_alpha||.
    const double approx = (reg.apply(op->apply_forward(x)) - x).norm();
    CHECK(row.error <= approx + row.delta * reg.norm() * (1 + 1e-9));
    CHECK(row.error >= row.delta * reg.norm() - approx - 1e-12);
  }
}

TEST_CASE("convergence experiment on an admissible element") {
  const auto op = small_operator(19, 0.05);
  RegNetFamily fam;
  fam.op = op;
  fam.variant = Variant::kNullSpaceRegNet;
  fam.lipschitz_cap = 1e6;
  const NetworkParams p = net(20);
  for (double a : {1.0, 0.1, 0.01, 1e-3, 1e-4}) fam.members.push_back({a, p});
  const Vector x = admissible_element(fam.method(4), source_element(*op, {0.5, 1.0}, 21));
  const ExperimentReport r = convergence_experiment(
      fam, x, {0.1, 0.0, 1e-2, 1e-3, 1e-4}, [](double d) { return std::max(d, 1e-5); }, 22);
  REQUIRE(r.rate_rows.size() == 4);
  REQUIRE(r.noiseless_rows.size() == 1);
  CHECK_FALSE(r.flagged);
  CHECK(r.rate_rows.front().error < r.rate_rows.back().error);
  CHECK(r.rate_rows.front().alpha == 1e-4);
  CHECK(r.rate_rows.back().alpha == 0.1);
  // Exact data with the smallest member reproduces x (all sigma^2 >= 1e-4).
  CHECK(r.noiseless_rows[0].error <= 1e-8 * x.norm());
  CHECK_THROWS_AS(convergence_experiment(fam, x, {}, [](double d) { return d; }, 1), UsageError);
}

TEST_CASE("test-set evaluation") {
  const auto op = small_operator(23);
  std::vector<TestItem> items;
  for (std::uint64_t k = 0; k < 4; ++k) {
    const Vector truth = gen_phantom(800 + k, kSide).coefficients;
    items.push_back({truth, op->apply_forward(truth)});
  }
  const auto tsvd = RegularizingFilter::truncated_svd();
  std::vector<EvalCandidate> candidates;
  for (double a : {0.5, 0.05, 0.2}) {
    candidates.push_back(make_candidate(ReconstructionMethod(Variant::kClassicalFilter, op, tsvd, a)));
  }
  const ExperimentReport r = evaluate_testset(candidates, items, 0.02, 30);
  REQUIRE(r.alpha_rows.size() == 3);
  CHECK(r.alpha_rows[0].alpha == 0.05);
  CHECK(r.alpha_rows[2].alpha == 0.5);
  CHECK(r.alpha_rows[0].kept == op->retained_count(0.05));
  REQUIRE(r.best_alpha);
  double best_mse = 1e300, best = 0.0;
  for (const AlphaRow& row : r.alpha_rows) {
    if (row.mse < best_mse) {
      best_mse = row.mse;
      best = row.alpha;
    }
  }
  CHECK(*r.best_alpha == best);

  // Direct computation of one row.
  double mse = 0.0, mae = 0.0;
  for (std::size_t k = 0; k < items.size(); ++k) {
    const Vector rec = candidates[1].reconstruct(add_noise(items[k].sinogram, 0.02, 30 + k));
    const Vector d = rescale_unit(rec) - rescale_unit(items[k].truth);
    mse += d.squaredNorm() / static_cast<double>(d.size());
    mae += d.cwiseAbs().sum() / static_cast<double>(d.size());
  }
  CHECK(r.alpha_rows[0].mse == doctest::Approx(mse / 4).epsilon(1e-12));
  CHECK(r.alpha_rows[0].mae == doctest::Approx(mae / 4).epsilon(1e-12));

  // Invariance under affine rescaling of the raw reconstructions.
  std::vector<EvalCandidate> scaled = candidates;
  for (EvalCandidate& c : scaled) {
    auto inner = c.reconstruct;
    c.reconstruct = [inner](const Vector& y) { return Vector((3.0 * inner(y)).array() - 1.5); };
  }
  const ExperimentReport rs = evaluate_testset(scaled, items, 0.02, 30);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(rs.alpha_rows[k].mse == doctest::Approx(r.alpha_rows[k].mse).epsilon(1e-10));
    CHECK(rs.alpha_rows[k].mae == doctest::Approx(r.alpha_rows[k].mae).epsilon(1e-10));
  }
  CHECK_THROWS_AS(evaluate_testset(candidates, {}, 0.02, 1), UsageError);
  CHECK_THROWS_AS(evaluate_testset({}, items, 0.02, 1), UsageError);
}

TEST_CASE("rescale_unit") {
  Vector v(3);
  v << 2.0, 4.0, 3.0;
  const Vector u = rescale_unit(v);
  CHECK(u(0) == 0.0);
  CHECK(u(1) == 1.0);
  CHECK(u(2) == doctest::Approx(0.5));
  CHECK(rescale_unit(Vector::Constant(4, 2.5)).norm() == 0.0);
}

TEST_CASE("report formatting") {
  ExperimentReport r;
  r.alpha_rows = {{0.1, 5, 0.25, 0.5}, {0.3, 2, 0.125, 0.375}};
  r.rate_rows = {{1e-3, 0.01, 0.2}, {1e-2, 0.1, 0.5}};
  r.slope = SlopeFit{0.5, -1.0, 0.01, 3};
  CHECK(format_alpha_csv(r) == "alpha,kept,mse,mae\n0.1,5,0.25,0.5\n0.3,2,0.125,0.375\n");
  CHECK(format_alpha_csv(r, "seed=1").rfind("# seed=1\nalpha,kept", 0) == 0);
  CHECK(format_rate_csv(r) == "delta,alpha,error\n0.001,0.01,0.2\n0.01,0.1,0.5\n");
  const std::string summary = format_slope_summary(r, "theory=0.5\n");
  CHECK(summary.find("slope=0.5\n") != std::string::npos);
  CHECK(summary.find("points=3\n") != std::string::npos);
  CHECK(summary.find("theory=0.5") != std::string::npos);
  CHECK_THROWS_AS(format_slope_summary(ExperimentReport{}), UsageError);
}
