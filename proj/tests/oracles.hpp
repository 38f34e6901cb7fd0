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

// Independent reference computations shared by the unit and acceptance tests.

#include <Eigen/Dense>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>

#include "regnet/linop.hpp"
#include "regnet/radon.hpp"

namespace regnet::testing {

// Integral of the blob profile along a line at distance s from its centre,
// by numerical quadrature of the radial function over the chord.
inline double kb_line_quadrature(double s, double support, double shape) {
  if (std::abs(s) >= support) return 0.0;
  const double half = std::sqrt(support * support - s * s);
  boost::math::quadrature::tanh_sinh<double> integrator;
  const double i0_shape = std::cyl_bessel_i(0.0, shape);
  auto profile = [&](double t) {
    const double r2 = (s * s + t * t) / (support * support);
    if (r2 >= 1.0) return 0.0;
    return std::cyl_bessel_i(0.0, shape * std::sqrt(1.0 - r2)) / i0_shape;
  };
  return integrator.integrate(profile, -half, half, 1e-14);
}

// Line integral of the blob expansion sum_k c_k phi(x - x_k) over the line
// {p : <p, (cos theta, sin theta)> = s}, integrating each blob's chord.
inline double continuous_radon(const RadonGeometry& geom, const Vector& c, double s, double theta) {
  const double ct = std::cos(theta), st = std::sin(theta);
  double total = 0.0;
  for (std::size_t row = 0; row < geom.grid_side; ++row) {
    for (std::size_t col = 0; col < geom.grid_side; ++col) {
      const double cx = geom.grid_coordinate(col), cy = geom.grid_coordinate(row);
      // Point on the line closest to the centre, and the direction along it.
      const double d = s - (cx * ct + cy * st);
      if (std::abs(d) >= geom.kb_support) continue;
      const double half = std::sqrt(geom.kb_support * geom.kb_support - d * d);
      const double i0_shape = std::cyl_bessel_i(0.0, geom.kb_shape);
      auto along = [&](double t) {
        const double px = s * ct - t * st, py = s * st + t * ct;
        const double r2 = ((px - cx) * (px - cx) + (py - cy) * (py - cy)) /
                          (geom.kb_support * geom.kb_support);
        if (r2 >= 1.0) return 0.0;
        return std::cyl_bessel_i(0.0, geom.kb_shape * std::sqrt(1.0 - r2)) / i0_shape;
      };
      const double t0 = -(cx * st) + cy * ct;  // foot of the perpendicular along the line
      boost::math::quadrature::tanh_sinh<double> integrator;
      total += c(static_cast<Eigen::Index>(row * geom.grid_side + col)) *
               integrator.integrate(along, t0 - half, t0 + half, 1e-14);
    }
  }
  return total;
}

// min_{||w|| <= rho} ||r - (A^T A)^mu w|| by accelerated projected gradient on
// the dense matrix power from a symmetric eigendecomposition.
inline double source_distance_pgd(const Matrix& a, const Vector& r, double mu, double rho,
                                  int iterations = 200000) {
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(a.transpose() * a);
  Vector lam = eig.eigenvalues();
  const double cutoff = 1e-12 * lam.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < lam.size(); ++i) lam(i) = lam(i) > cutoff ? std::pow(lam(i), mu) : 0.0;
  const Matrix m = eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().transpose();
  const double lipschitz = lam.maxCoeff() * lam.maxCoeff();
  auto project = [rho](Vector w) {
    const double n = w.norm();
    if (n > rho) w *= rho / n;
    return w;
  };
  auto objective = [&](const Vector& w) { return (r - m * w).norm(); };
  Vector w = Vector::Zero(r.size()), z = w;
  double t = 1.0, best = objective(w);
  for (int it = 0; it < iterations; ++it) {
    const Vector next = project(z - (m * (m * z - r)) / lipschitz);
    const double value = objective(next);
    if (value > best) {
      // Adaptive restart.
      z = w;
      t = 1.0;
      continue;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    z = next + ((t - 1.0) / t_next) * (next - w);
    const double gain = best - value;
    w = next;
    t = t_next;
    best = value;
    if (gain <= 1e-17 * best && it > 100) break;
  }
  return best;
}

}  // namespace regnet::testing
