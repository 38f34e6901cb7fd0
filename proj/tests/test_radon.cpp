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

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "regnet/error.hpp"
#include "regnet/radon.hpp"
#include "support.hpp"

using namespace regnet;
using namespace regnet::testing;

TEST_CASE("bessel_i0 matches the standard library") {
  for (double x : {0.0, 1e-8, 0.5, 1.0, 7.0, 15.0, 29.9, 30.0, 30.1, 45.0, 100.0, 500.0}) {
    CHECK_MESSAGE(rel_err(bessel_i0(x), std::cyl_bessel_i(0.0, x)) < 1e-13, "x = " << x);
    CHECK(bessel_i0(-x) == bessel_i0(x));
  }
}

TEST_CASE("Kaiser-Bessel profile") {
  CHECK(kb_value(0.0, 0.055, 7.0) == doctest::Approx(1.0));
  CHECK(kb_value(0.055, 0.055, 7.0) == doctest::Approx(1.0 / std::cyl_bessel_i(0.0, 7.0)));
  CHECK(kb_value(0.06, 0.055, 7.0) == 0.0);
  CHECK(kb_line_integral(0.055, 0.055, 7.0) == 0.0);
  CHECK(kb_line_integral(-0.02, 0.055, 7.0) == kb_line_integral(0.02, 0.055, 7.0));
  CHECK_THROWS_AS(kb_value(0.0, 0.0, 7.0), UsageError);
  CHECK_THROWS_AS(kb_line_integral(0.0, 0.1, -1.0), UsageError);
}

TEST_CASE("blob line integrals agree with quadrature of the profile") {
  std::mt19937_64 rng(3);
  for (const auto& [a, shape] : {std::pair{0.055, 7.0}, std::pair{1.0, 2.0}, std::pair{0.3, 10.4}}) {
    std::uniform_real_distribution<double> u(-a, a);
    for (int k = 0; k < 200; ++k) {
      const double s = u(rng);
      CHECK(rel_err(kb_line_integral(s, a, shape), kb_line_quadrature(s, a, shape)) < 1e-9);
    }
  }
}

TEST_CASE("geometry layout") {
  const RadonGeometry g = RadonGeometry::desk_scale();
  CHECK(g.rows() == 960);
  CHECK(g.cols() == 4096);
  CHECK(g.angle(0) == 0.0);
  CHECK(g.angle(5) == doctest::Approx(std::numbers::pi / 3));
  CHECK(g.offset(0) == -1.5);
  CHECK(g.offset(63) == 1.5);
  for (std::size_t n = 0; n < 64; ++n) CHECK(g.offset(n) == -g.offset(63 - n));
  CHECK(g.grid_coordinate(0) == doctest::Approx(-63.0 / 64));
  CHECK(g.grid_coordinate(63) == doctest::Approx(63.0 / 64));
  const RadonGeometry p = RadonGeometry::paper_scale();
  CHECK(p.rows() == 6000);
  CHECK(p.cols() == 16384);
  RadonGeometry bad;
  bad.angles = 0;
  CHECK_THROWS_AS(bad.validate(), UsageError);
  bad = {};
  bad.detector_min = 2.0;
  CHECK_THROWS_AS(assemble_matrix(bad), UsageError);
}

TEST_CASE("system matrix agrees with the continuous Radon transform") {
  RadonGeometry g;
  g.grid_side = 8;
  g.kb_support = 0.3;  // overlapping blobs
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> offset(-1.2, 1.2);
  std::uniform_int_distribution<std::size_t> count(1, 40);
  const Vector c = random_vector(64, 12);
  for (int trial = 0; trial < 5; ++trial) {
    // One-detector geometry at a random offset and a random angle j pi / n.
    RadonGeometry line = g;
    line.detectors = 1;
    line.detector_min = line.detector_max = offset(rng);
    line.angles = count(rng);
    const std::size_t j = std::uniform_int_distribution<std::size_t>(0, line.angles - 1)(rng);
    const Matrix a = assemble_matrix(line);
    const double expected = continuous_radon(line, c, line.offset(0), line.angle(j));
    const double got = a.row(static_cast<Eigen::Index>(j)).dot(c);
    CHECK(std::abs(got - expected) <= 1e-9 * std::max(1.0, std::abs(expected)));
  }
}

TEST_CASE("system matrix point symmetry") {
  RadonGeometry g;
  g.grid_side = 12;
  g.angles = 7;
  g.detectors = 31;
  g.kb_support = 0.2;
  const Matrix a = assemble_matrix(g);
  CHECK(a.cwiseAbs().maxCoeff() > 0.0);
  double worst = 0.0;
  const std::size_t n = g.grid_side;
  for (std::size_t j = 0; j < g.angles; ++j) {
    for (std::size_t d = 0; d < g.detectors; ++d) {
      for (std::size_t k = 0; k < n * n; ++k) {
        const std::size_t mirror = (n - 1 - k / n) * n + (n - 1 - k % n);
        const auto r1 = static_cast<Eigen::Index>(j * g.detectors + d);
        const auto r2 = static_cast<Eigen::Index>(j * g.detectors + g.detectors - 1 - d);
        worst = std::max(worst, std::abs(a(r1, static_cast<Eigen::Index>(k)) -
                                         a(r2, static_cast<Eigen::Index>(mirror))));
      }
    }
  }
  CHECK(worst <= 1e-12);
  CHECK(assemble_matrix(g) == a);
}

TEST_CASE("phantoms are seeded, clipped and ellipse based") {
  const Phantom p = gen_phantom(17, 32);
  const Phantom q = gen_phantom(17, 32);
  CHECK(p.coefficients == q.coefficients);
  CHECK(p.coefficients != gen_phantom(18, 32).coefficients);
  CHECK(p.ellipses.size() >= 5);
  CHECK(p.ellipses.size() <= 10);
  CHECK(p.coefficients.minCoeff() >= 0.0);
  CHECK(p.coefficients.maxCoeff() <= 1.0);
  CHECK(p.coefficients.allFinite());
  CHECK(p.seed == 17);

  // A single disc: the grid points inside it and nothing else.
  const Ellipse disc{0.25, -0.25, 0.5, 0.5, 0.3, 0.7};
  const Vector img = rasterize_ellipses({disc}, 16);
  RadonGeometry grid;
  grid.grid_side = 16;
  for (std::size_t row = 0; row < 16; ++row) {
    for (std::size_t col = 0; col < 16; ++col) {
      const double dx = grid.grid_coordinate(col) - 0.25, dy = grid.grid_coordinate(row) + 0.25;
      const double expected = dx * dx + dy * dy <= 0.25 ? 0.7 : 0.0;
      CHECK(img(static_cast<Eigen::Index>(row * 16 + col)) == doctest::Approx(expected));
    }
  }
  // Overlaps add and are clipped.
  const Vector sum = rasterize_ellipses({disc, disc}, 16);
  CHECK(sum.maxCoeff() == 1.0);
  PhantomSpec bad;
  bad.min_ellipses = 4;
  bad.max_ellipses = 2;
  CHECK_THROWS_AS(gen_phantom(1, 8, bad), UsageError);
}

TEST_CASE("noise models") {
  const Vector y = random_vector(5000, 30);
  const Vector noisy = add_noise(y, 0.05, 31);
  CHECK(noisy == add_noise(y, 0.05, 31));
  const Vector z = noisy - y;
  const double scale = 0.05 * y.cwiseAbs().maxCoeff();
  const double sample_std = std::sqrt(z.squaredNorm() / 5000.0);
  CHECK(sample_std == doctest::Approx(scale).epsilon(0.05));
  CHECK(add_noise(y, 0.0, 1) == y);
  const Vector exact = add_noise_exact(y, 0.3, 32);
  CHECK((exact - y).norm() == doctest::Approx(0.3).epsilon(1e-12));
  CHECK_THROWS_AS(add_noise(y, -1.0, 1), UsageError);
  CHECK_THROWS_AS(add_noise_exact(y, -1.0, 1), UsageError);
}
