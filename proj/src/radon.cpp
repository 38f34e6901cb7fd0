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

#include "regnet/radon.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "regnet/error.hpp"

namespace regnet {

double bessel_i0(double x) {
  const double ax = std::abs(x);
  if (ax <= 30.0) {
    // sum_k (x^2/4)^k / (k!)^2, all terms positive.
    const double q = 0.25 * ax * ax;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 500; ++k) {
      term *= q / (static_cast<double>(k) * static_cast<double>(k));
      sum += term;
      if (term < 1e-17 * sum) break;
    }
    return sum;
  }
  // e^x / sqrt(2 pi x) * sum_k ((2k-1)!!)^2 / (k! (8x)^k)
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    const double next = term * (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k * ax);
    if (next >= term) break;  // asymptotic series starts diverging
    term = next;
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return std::exp(ax) / std::sqrt(2.0 * std::numbers::pi * ax) * sum;
}

double kb_value(double r, double support, double shape) {
  if (!(support > 0.0) || !(shape > 0.0)) {
    throw UsageError("kb_value: support and shape must be positive");
  }
  const double t = std::abs(r) / support;
  if (t > 1.0) return 0.0;
  return bessel_i0(shape * std::sqrt(1.0 - t * t)) / bessel_i0(shape);
}

double kb_line_integral(double s, double support, double shape) {
  if (!(support > 0.0) || !(shape > 0.0)) {
    throw UsageError("kb_line_integral: support and shape must be positive");
  }
  const double t = std::abs(s) / support;
  if (t >= 1.0) return 0.0;
  const double w = std::sqrt(1.0 - t * t);
  return 2.0 * support * std::sinh(shape * w) / (shape * bessel_i0(shape));
}

RadonGeometry RadonGeometry::paper_scale() {
  RadonGeometry g;
  g.grid_side = 128;
  g.angles = 30;
  g.detectors = 200;
  return g;
}

void RadonGeometry::validate() const {
  if (grid_side < 1 || angles < 1 || detectors < 1) {
    throw UsageError("geometry: grid side, angle count and detector count must be >= 1");
  }
  if (!(kb_support > 0.0) || !(kb_shape > 0.0)) {
    throw UsageError("geometry: blob support and shape must be positive");
  }
  if (!(detector_max >= detector_min)) throw UsageError("geometry: empty detector interval");
}

double RadonGeometry::angle(std::size_t j) const {
  return std::numbers::pi * static_cast<double>(j) / static_cast<double>(angles);
}

double RadonGeometry::offset(std::size_t n) const {
  if (detectors == 1) return 0.5 * (detector_min + detector_max);
  // Written as centre + half-width * t with t antisymmetric in n, so a
  // symmetric interval yields exactly symmetric offsets.
  const double centre = 0.5 * (detector_min + detector_max);
  const double half = 0.5 * (detector_max - detector_min);
  const double t = (2.0 * static_cast<double>(n) - static_cast<double>(detectors - 1)) /
                   static_cast<double>(detectors - 1);
  return centre + half * t;
}

double RadonGeometry::grid_coordinate(std::size_t k) const {
  return (2.0 * static_cast<double>(k) + 1.0 - static_cast<double>(grid_side)) /
         static_cast<double>(grid_side);
}

Matrix assemble_matrix(const RadonGeometry& geom) {
  geom.validate();
  const std::size_t n = geom.grid_side;
  Matrix a = Matrix::Zero(static_cast<Eigen::Index>(geom.rows()),
                          static_cast<Eigen::Index>(geom.cols()));
  std::vector<double> offsets(geom.detectors);
  for (std::size_t d = 0; d < geom.detectors; ++d) offsets[d] = geom.offset(d);

  for (std::size_t j = 0; j < geom.angles; ++j) {
    const double c = std::cos(geom.angle(j));
    const double s = std::sin(geom.angle(j));
    for (std::size_t row = 0; row < n; ++row) {
      const double y = geom.grid_coordinate(row);
      for (std::size_t col = 0; col < n; ++col) {
        const double x = geom.grid_coordinate(col);
        const double proj = x * c + y * s;
        const auto column = static_cast<Eigen::Index>(row * n + col);
        for (std::size_t d = 0; d < geom.detectors; ++d) {
          const double dist = offsets[d] - proj;
          if (std::abs(dist) >= geom.kb_support) continue;
          a(static_cast<Eigen::Index>(j * geom.detectors + d), column) =
              kb_line_integral(dist, geom.kb_support, geom.kb_shape);
        }
      }
    }
  }
  return a;
}

void PhantomSpec::validate() const {
  if (min_ellipses > max_ellipses) throw UsageError("phantom spec: empty ellipse count range");
  if (!(min_semi_axis > 0.0) || min_semi_axis > max_semi_axis) {
    throw UsageError("phantom spec: invalid semi-axis range");
  }
  if (min_intensity > max_intensity) throw UsageError("phantom spec: empty intensity range");
  if (!(center_extent >= 0.0)) throw UsageError("phantom spec: negative centre extent");
}

Vector rasterize_ellipses(const std::vector<Ellipse>& ellipses, std::size_t grid_side) {
  RadonGeometry grid;
  grid.grid_side = grid_side;
  Vector image = Vector::Zero(static_cast<Eigen::Index>(grid_side * grid_side));
  for (const Ellipse& e : ellipses) {
    const double c = std::cos(e.tilt);
    const double s = std::sin(e.tilt);
    for (std::size_t row = 0; row < grid_side; ++row) {
      const double dy = grid.grid_coordinate(row) - e.cy;
      for (std::size_t col = 0; col < grid_side; ++col) {
        const double dx = grid.grid_coordinate(col) - e.cx;
        const double u = (dx * c + dy * s) / e.semi_x;
        const double v = (-dx * s + dy * c) / e.semi_y;
        if (u * u + v * v <= 1.0) image(static_cast<Eigen::Index>(row * grid_side + col)) += e.intensity;
      }
    }
  }
  return image.cwiseMax(0.0).cwiseMin(1.0);
}

Phantom gen_phantom(std::uint64_t seed, std::size_t grid_side, const PhantomSpec& spec) {
  spec.validate();
  if (grid_side < 1) throw UsageError("gen_phantom: grid side must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> count(spec.min_ellipses, spec.max_ellipses);
  std::uniform_real_distribution<double> centre(-spec.center_extent, spec.center_extent);
  std::uniform_real_distribution<double> axis(spec.min_semi_axis, spec.max_semi_axis);
  std::uniform_real_distribution<double> tilt(0.0, std::numbers::pi);
  std::uniform_real_distribution<double> intensity(spec.min_intensity, spec.max_intensity);

  Phantom p;
  p.seed = seed;
  const std::size_t k = count(rng);
  for (std::size_t i = 0; i < k; ++i) {
    Ellipse e;
    e.cx = centre(rng);
    e.cy = centre(rng);
    e.semi_x = axis(rng);
    e.semi_y = axis(rng);
    e.tilt = tilt(rng);
    e.intensity = intensity(rng);
    p.ellipses.push_back(e);
  }
  p.coefficients = rasterize_ellipses(p.ellipses, grid_side);
  return p;
}

namespace {

Vector gaussian(Eigen::Index size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  Vector g(size);
  for (Eigen::Index k = 0; k < size; ++k) g(k) = dist(rng);
  return g;
}

}  // namespace

Vector add_noise(const Vector& y, double delta, std::uint64_t seed) {
  if (!(delta >= 0.0)) throw UsageError("add_noise: delta must be non-negative");
  if (delta == 0.0 || y.size() == 0) return y;
  const double scale = delta * y.cwiseAbs().maxCoeff();
  return y + scale * gaussian(y.size(), seed);
}

Vector add_noise_exact(const Vector& y, double delta, std::uint64_t seed) {
  if (!(delta >= 0.0)) throw UsageError("add_noise_exact: delta must be non-negative");
  if (delta == 0.0 || y.size() == 0) return y;
  const Vector g = gaussian(y.size(), seed);
  return y + (delta / g.norm()) * g;
}

}  // namespace regnet
