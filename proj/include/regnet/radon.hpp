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
#include <vector>

#include "regnet/linop.hpp"

namespace regnet {

// Modified Bessel function of the first kind, order zero. Power series for
// |x| <= 30, asymptotic expansion beyond.
double bessel_i0(double x);

// Kaiser-Bessel blob I0(rho sqrt(1 - (r/a)^2)) / I0(rho) for r <= a, 0 beyond.
double kb_value(double r, double support, double shape);

// Integral of the blob along a line at signed distance s from its centre:
//   2a sinh(rho w) / (rho I0(rho)),  w = sqrt(1 - (s/a)^2),  0 for |s| >= a.
double kb_line_integral(double s, double support, double shape);

// Parallel-beam geometry. Row index of the system matrix is
// detectors * angle_index + detector_index; column index is
// grid_side * row + col of the coefficient image.
struct RadonGeometry {
  std::size_t grid_side = 64;
  std::size_t angles = 15;
  std::size_t detectors = 64;
  double detector_min = -1.5;
  double detector_max = 1.5;
  double kb_support = 0.055;
  double kb_shape = 7.0;

  static RadonGeometry desk_scale() { return {}; }
  // 128 x 128 blobs, 30 angles, 200 detector offsets.
  static RadonGeometry paper_scale();

  void validate() const;
  std::size_t rows() const { return angles * detectors; }
  std::size_t cols() const { return grid_side * grid_side; }
  // theta_j = j pi / angles, j = 0 .. angles-1
  double angle(std::size_t j) const;
  // Equidistant offsets in [detector_min, detector_max], endpoints included.
  double offset(std::size_t n) const;
  // Cell-centred grid over [-1, 1]; coordinate of column/row index k.
  double grid_coordinate(std::size_t k) const;
};

Matrix assemble_matrix(const RadonGeometry& geom);

struct Ellipse {
  double cx = 0.0;
  double cy = 0.0;
  double semi_x = 0.0;
  double semi_y = 0.0;
  double tilt = 0.0;
  double intensity = 0.0;
};

// Distribution of random "Shepp-Logan type" phantoms.
struct PhantomSpec {
  std::size_t min_ellipses = 5;
  std::size_t max_ellipses = 10;
  double center_extent = 0.7;  // centres uniform in [-extent, extent]^2
  double min_semi_axis = 0.05;
  double max_semi_axis = 0.6;
  double min_intensity = -0.5;
  double max_intensity = 1.0;

  void validate() const;
};

struct Phantom {
  Vector coefficients;  // grid_side x grid_side image, row-major
  std::uint64_t seed = 0;
  std::vector<Ellipse> ellipses;
};

// Rasterises the sum of the ellipse indicators at the grid centres and clips
// to [0, 1].
Vector rasterize_ellipses(const std::vector<Ellipse>& ellipses, std::size_t grid_side);

Phantom gen_phantom(std::uint64_t seed, std::size_t grid_side, const PhantomSpec& spec = {});

// y + delta * ||y||_inf * g with g i.i.d. standard normal.
Vector add_noise(const Vector& y, double delta, std::uint64_t seed);

// y + z with z a seeded random direction scaled to ||z|| = delta exactly.
Vector add_noise_exact(const Vector& y, double delta, std::uint64_t seed);

}  // namespace regnet
