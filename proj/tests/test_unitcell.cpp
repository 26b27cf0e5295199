#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "microlam/unitcell.hpp"

using namespace microlam;
using doctest::Approx;

namespace {

// Wave vector in physical space; stripes are the level sets of its phase.
Eigen::Vector2d phase_gradient(const ParallelogramCell& cell,
                               const StripeFamily& s) {
  const Eigen::Matrix2d binv_t = cell.basis().inverse().transpose();
  return binv_t * Eigen::Vector2d(s.ku, s.kv);
}

}  // namespace

TEST_SUITE("unitcell") {

TEST_CASE("cell geometry is consistent for all ranks") {
  std::mt19937 rng(71);
  for (int k = 0; k < 150; ++k) {
    const int rank = 1 + k % 3;
    const Rank3Laminate lam = testutil::random_laminate(rng, rank);
    const ParallelogramCell cell = build_cell(lam);

    CHECK(cell.basis().determinant() == Approx(1.0).epsilon(1e-10));
    CHECK(cell.stripes.size() == static_cast<std::size_t>(rank));

    for (std::size_t i = 0; i < cell.stripes.size(); ++i) {
      const auto& s = cell.stripes[i];
      const Eigen::Vector2d g = phase_gradient(cell, s);
      // spacing is the distance between consecutive integer phase lines
      CHECK(1.0 / g.norm() == Approx(s.spacing).epsilon(1e-9));
      // stripes run along the layer tangent
      const Eigen::Vector2d t(std::cos(s.theta), std::sin(s.theta));
      CHECK(std::fabs(g.dot(t)) * s.spacing == Approx(0.0).epsilon(1e-9));
      for (std::size_t j = i + 1; j < cell.stripes.size(); ++j) {
        const auto& r = cell.stripes[j];
        CHECK(std::abs(s.ku * r.kv - s.kv * r.ku) == 1);
      }
    }
  }
}

TEST_CASE("union area formula matches dense sampling") {
  std::mt19937 rng(73);
  for (int k = 0; k < 12; ++k) {
    const int rank = 1 + k % 3;
    const Rank3Laminate lam = testutil::random_laminate(rng, rank);
    ParallelogramCell cell = build_cell(lam);
    for (auto& s : cell.stripes) s.width = testutil::urand(rng, 0.05, 0.85);

    const double exact = stripe_union_area(cell);
    std::mt19937 mc(1000 + k);
    const int n = 2'000'000;
    int hits = 0;
    for (int i = 0; i < n; ++i) {
      const double u = testutil::urand(mc, 0, 1);
      const double v = testutil::urand(mc, 0, 1);
      hits += point_is_solid(cell, u, v) ? 1 : 0;
    }
    CHECK(std::fabs(static_cast<double>(hits) / n - exact) < 2.5e-3);
  }
}

TEST_CASE("width bisection hits the volume fraction") {
  std::mt19937 rng(79);
  for (int k = 0; k < 60; ++k) {
    const int rank = 1 + k % 3;
    const Rank3Laminate lam = testutil::random_laminate(rng, rank);
    ParallelogramCell cell = build_cell(lam);
    const double f = testutil::urand(rng, 0.15, 0.85);
    const double psi = width_bisection(cell, lam, f);
    CHECK(psi > 0.0);
    CHECK(stripe_union_area(cell) == Approx(f).epsilon(1e-10));
    // widths stay proportional to the layer weights until they saturate
    for (std::size_t i = 0; i < cell.stripes.size(); ++i) {
      const double expect = psi * lam.p[i];
      if (expect < 1.0)
        CHECK(cell.stripes[i].width == Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("membership is periodic on the lattice") {
  std::mt19937 rng(83);
  const Rank3Laminate lam = testutil::random_laminate(rng, 3);
  ParallelogramCell cell = build_cell(lam);
  width_bisection(cell, lam, 0.5);
  for (int k = 0; k < 500; ++k) {
    const double u = testutil::urand(rng, 0, 1);
    const double v = testutil::urand(rng, 0, 1);
    const bool ref = point_is_solid(cell, u, v);
    CHECK(point_is_solid(cell, u + 1.0, v) == ref);
    CHECK(point_is_solid(cell, u, v - 3.0) == ref);
    CHECK(point_is_solid(cell, u - 2.0, v + 5.0) == ref);
  }
}

TEST_CASE("rasterized field reproduces the volume fraction") {
  std::mt19937 rng(89);
  for (int k = 0; k < 6; ++k) {
    const Rank3Laminate lam = testutil::random_laminate(rng, 1 + k % 3);
    ParallelogramCell cell = build_cell(lam);
    const double f = testutil::urand(rng, 0.25, 0.75);
    width_bisection(cell, lam, f);
    const Eigen::VectorXd rho = rasterize_cell(cell, 200, 200, 3);
    CHECK(rho.minCoeff() >= 0.0);
    CHECK(rho.maxCoeff() <= 1.0);
    CHECK(std::fabs(rho.mean() - f) < 3e-3);
  }
}

TEST_CASE("single layer maps to a square cell of stripes") {
  Rank3Laminate lam;
  lam.rank = 1;
  lam.p = {1.0, 0.0, 0.0};
  lam.theta = {0.6, 0.0, 0.0};
  ParallelogramCell cell = build_cell(lam);
  CHECK(cell.stripes.size() == 1);
  CHECK(cell.a1.norm() == Approx(1.0));
  CHECK(cell.a2.norm() == Approx(1.0));
  CHECK(cell.a1.dot(cell.a2) == Approx(0.0).epsilon(1e-12));
  width_bisection(cell, lam, 0.37);
  CHECK(cell.stripes[0].width == Approx(0.37).epsilon(1e-10));
}

}  // TEST_SUITE
