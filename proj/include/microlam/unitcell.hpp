#pragma once

#include <Eigen/Dense>
#include <vector>

#include "microlam/reconstruct.hpp"

namespace microlam {

// Periodic parallelogram unit cell of area one. Each stripe family is
// described in cell coordinates (u, v) in [0,1)^2 by an integer wave vector:
// the stripe phase is k_u u + k_v v and material is placed where the phase is
// within width/2 of an integer. Integer wave vectors make the pattern
// periodic on the lattice; all families pass through the lattice points.
struct StripeFamily {
  double theta = 0.0;    // layer tangent in physical space
  double spacing = 0.0;  // center-to-center distance, physical units
  int ku = 0;
  int kv = 0;
  double width = 0.0;  // fraction of the spacing filled with stiff material
};

struct ParallelogramCell {
  Eigen::Vector2d a1 = {1.0, 0.0};
  Eigen::Vector2d a2 = {0.0, 1.0};
  std::vector<StripeFamily> stripes;

  Eigen::Matrix2d basis() const {
    Eigen::Matrix2d b;
    b.col(0) = a1;
    b.col(1) = a2;
    return b;
  }
};

// Cell geometry for a reconstructed laminate, widths unset. Rank 3 gives the
// parallelogram spanned by directions of layers 3 and 1 with spacings chosen
// so each family crosses the cell walls an integer number of times; rank 2
// gives a parallelogram along both layer directions with equal spacings;
// rank 1 a rotated unit square. The cell is always normalized to unit area.
ParallelogramCell build_cell(const Rank3Laminate& lam);

// Fraction of the cell covered by the union of the stripe families.
// Closed form, using that all wave vector pairs are unimodular.
double stripe_union_area(const ParallelogramCell& cell);

// Scales stripe widths proportionally to the laminate weights until the
// covered area matches the stiff fraction f. Widths are written into the
// cell; the scaling factor is returned.
double width_bisection(ParallelogramCell& cell, const Rank3Laminate& lam,
                       double f);

// Density raster over the cell: element (i, j) covers
// [i/nx,(i+1)/nx) x [j/ny,(j+1)/ny) in cell coordinates, value = covered
// fraction estimated on a supersample x supersample point grid.
Eigen::VectorXd rasterize_cell(const ParallelogramCell& cell, int nx, int ny,
                               int supersample);

// Point membership test in cell coordinates.
bool point_is_solid(const ParallelogramCell& cell, double u, double v);

}  // namespace microlam
