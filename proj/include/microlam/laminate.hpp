#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "microlam/tensors.hpp"

namespace microlam {

// Trigonometric moments of the lamination measure:
//   m1 = <p, cos 2t>, m2 = <p, sin 2t>, m3 = <p, cos 4t>, m4 = <p, sin 4t>.
// Four numbers capture everything the effective tensor sees of the layer
// directions and relative thicknesses.
struct MomentVector {
  double m1 = 0.0;
  double m2 = 0.0;
  double m3 = 0.0;
  double m4 = 0.0;

  Eigen::Vector4d vec() const { return {m1, m2, m3, m4}; }
  static MomentVector from(const Eigen::Vector4d& v) {
    return {v[0], v[1], v[2], v[3]};
  }
};

// One layer family of a finite-rank laminate: direction t (radians, measured
// from the x-axis to the layer tangent) and mixture weight p >= 0.
struct LayerFamily {
  double theta = 0.0;
  double p = 0.0;
};

// Signed residuals of the three feasibility constraints; feasible moments
// have all residuals <= 0. The third constraint is quadratic in m4 with the
// (1 - m3^2) denominators cleared so it stays smooth at m3 = +-1.
struct FeasibilityResiduals {
  double circle;    // m1^2 + m2^2 - 1
  double band;      // |m3| - 1
  double boundary;  // cleared form of the fourth-moment ellipse constraint
  bool feasible(double tol = 0.0) const {
    return circle <= tol && band <= tol && boundary <= tol;
  }
};

// M(m): the moment matrix entering the effective compliance, expressed in xi
// coordinates. Assembled from the layer-tangent dyads, so for a single layer
// at angle t it reproduces the dyad of (cos 2t, sin 2t, 1)/sqrt(2).
Eigen::Matrix3d moment_matrix(const MomentVector& m);

// Derivatives dM/dm_i (constant matrices).
const std::array<Eigen::Matrix3d, 4>& moment_matrix_derivatives();

// Effective compliance of the optimal laminate with stiff fraction f and
// moments m, in xi coordinates:
//   C(m) = C+ - (1-f) [ (C+ - C-)^{-1} - f e+ M(m) ]^{-1}.
Eigen::Matrix3d effective_compliance(const MomentVector& m, double f,
                                     const MaterialPair& mat);

// Weighted complementary energy 1/2 sum_j w_j s_j : C(m) : s_j.
double complementary_energy(const MomentVector& m, double f,
                            const MaterialPair& mat, const LoadSet& loads);

FeasibilityResiduals moment_feasibility(const MomentVector& m);

// Moments realized by an explicit set of layer families. Weights are used
// as given (callers pass a normalized probability vector).
MomentVector moments_from_layers(const std::vector<LayerFamily>& layers);

}  // namespace microlam
