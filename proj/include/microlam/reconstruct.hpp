#pragma once

#include <array>
#include <optional>

#include "microlam/laminate.hpp"

namespace microlam {

// Moments expressed in a frame rotated by gamma, chosen so the fourth moment
// vanishes. In that frame mt3 = sqrt(m3^2 + m4^2) >= 0.
struct RotatedMoments {
  double gamma = 0.0;
  double mt1 = 0.0;
  double mt2 = 0.0;
  double mt3 = 0.0;
};

RotatedMoments rotate_moments(const MomentVector& m);

// Finite-rank laminate described by up to three layer families. Weights sum
// to one; unused slots have p = 0. Angles are layer tangents in
// (-pi/2, pi/2].
struct Rank3Laminate {
  std::array<double, 3> p{};
  std::array<double, 3> theta{};
  int rank = 0;
};

struct Rank2Solution {
  double p1 = 0.0;
  double theta1 = 0.0;
  double theta2 = 0.0;
};

// Two-layer laminate matching a point (b1, b2, b3) on the smooth part of the
// feasibility boundary (zero fourth moment frame). Returns nothing if the
// closed-form solution fails to reproduce the requested moments, which
// happens at the degenerate corner and edge limits.
std::optional<Rank2Solution> boundary_to_rank2(double b1, double b2,
                                               double b3);

// Splits feasible moments into a rank-1 corner plus a boundary rank-2
// laminate and assembles the resulting rank-3 laminate in the global frame.
Rank3Laminate reconstruct_laminate(const MomentVector& m);

MomentVector laminate_moments(const Rank3Laminate& lam);

// Relative stiff-material widths mu_n of the sequential lamination with
// stiff fraction f; layer n is laminated into the remainder of layers
// 1..n-1, so (1-mu_1)(1-mu_2)(1-mu_3) = 1 - f.
std::array<double, 3> layer_widths(const Rank3Laminate& lam, double f);

}  // namespace microlam
