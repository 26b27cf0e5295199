#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "microlam/laminate.hpp"
#include "microlam/reconstruct.hpp"

namespace testutil {

using microlam::LayerFamily;
using microlam::LoadSet;
using microlam::MomentVector;
using microlam::StressCase;

inline double urand(std::mt19937& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Strictly interior feasible moments: pick (m1, m2) inside the unit disc,
// m3 inside the band, then m4 inside its admissible interval. margin shrinks
// every interval toward its center.
inline MomentVector random_interior_moments(std::mt19937& rng,
                                            double margin = 0.05) {
  for (;;) {
    const double m1 = urand(rng, -1.0, 1.0);
    const double m2 = urand(rng, -1.0, 1.0);
    if (m1 * m1 + m2 * m2 >= 1.0 - 2.0 * margin) continue;
    const double m3 = urand(rng, -1.0 + margin, 1.0 - margin);
    // quartic constraint as a quadratic in m4: m4 in 2 m1 m2 +- sqrt(disc)
    const double disc = 4.0 * m1 * m1 * m2 * m2 -
                        (2.0 * m1 * m1 * (1.0 - m3) +
                         2.0 * m2 * m2 * (1.0 + m3) + m3 * m3 - 1.0);
    if (disc <= margin * margin) continue;
    const double half = std::sqrt(disc) * (1.0 - margin);
    const double m4 = 2.0 * m1 * m2 + urand(rng, -half, half);
    return {m1, m2, m3, m4};
  }
}

// Random laminate with the given number of distinct layer directions.
inline microlam::Rank3Laminate random_laminate(std::mt19937& rng,
                                               int rank = 3) {
  microlam::Rank3Laminate lam;
  lam.rank = rank;
  double total = 0.0;
  for (int n = 0; n < rank; ++n) {
    lam.p[n] = urand(rng, 0.1, 1.0);
    total += lam.p[n];
  }
  for (int n = 0; n < rank; ++n) lam.p[n] /= total;
  const double pi = 3.14159265358979323846;
  for (;;) {
    for (int n = 0; n < rank; ++n)
      lam.theta[n] = urand(rng, -pi / 2, pi / 2);
    bool separated = true;
    for (int a = 0; a < rank; ++a)
      for (int b = a + 1; b < rank; ++b) {
        double d = std::fabs(lam.theta[a] - lam.theta[b]);
        d = std::min(d, pi - d);  // directions are mod pi
        if (d < 0.15) separated = false;
      }
    if (separated) return lam;
  }
}

inline LoadSet random_loadset(std::mt19937& rng, int n_cases) {
  std::vector<StressCase> cases;
  for (int k = 0; k < n_cases; ++k) {
    StressCase s;
    s.s11 = urand(rng, -1.0, 1.0);
    s.s22 = urand(rng, -1.0, 1.0);
    s.s12 = urand(rng, -1.0, 1.0);
    s.weight = urand(rng, 0.2, 1.0);
    cases.push_back(s);
  }
  return LoadSet(cases);
}

}  // namespace testutil
