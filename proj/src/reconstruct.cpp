#include "microlam/reconstruct.hpp"

#include <cmath>
#include <numbers>

namespace microlam {

namespace {

constexpr double pi = std::numbers::pi;

// Wrap a layer tangent angle to (-pi/2, pi/2]; directions are lines, so the
// angle is only meaningful modulo pi.
double wrap_layer_angle(double theta) {
  double w = std::fmod(theta + 0.5 * pi, pi);
  if (w <= 0.0) w += pi;
  return w - 0.5 * pi;
}

// Residual of the cubic boundary surface in the zero-fourth-moment frame,
// denominators cleared; feasible points have F <= 0, the smooth boundary
// F = 0.
double boundary_f(double b1, double b2, double b3) {
  return 2.0 * b1 * b1 * (1.0 - b3) + 2.0 * b2 * b2 * (1.0 + b3) +
         b3 * b3 - 1.0;
}

struct Corner {
  double a1, a2, a3;
  double theta;  // layer direction of the rank-1 laminate at this corner
};

constexpr std::array<Corner, 4> corners{{{1.0, 0.0, 1.0, 0.0},
                                         {-1.0, 0.0, 1.0, 0.5 * pi},
                                         {0.0, 1.0, -1.0, 0.25 * pi},
                                         {0.0, -1.0, -1.0, -0.25 * pi}}};

double moment_error(const Rank3Laminate& lam, const MomentVector& m) {
  const MomentVector r = laminate_moments(lam);
  return (r.vec() - m.vec()).lpNorm<Eigen::Infinity>();
}

}  // namespace

RotatedMoments rotate_moments(const MomentVector& m) {
  RotatedMoments r;
  // 4*gamma cancels the phase of (m3, m4); atan2 of a zero vector is zero,
  // which is the right convention for fully degenerate moments.
  r.gamma = 0.25 * std::atan2(-m.m4, m.m3);
  const double c2 = std::cos(2.0 * r.gamma), s2 = std::sin(2.0 * r.gamma);
  r.mt1 = m.m1 * c2 - m.m2 * s2;
  r.mt2 = m.m1 * s2 + m.m2 * c2;
  r.mt3 = std::hypot(m.m3, m.m4);
  return r;
}

std::optional<Rank2Solution> boundary_to_rank2(double b1, double b2,
                                               double b3) {
  if (std::abs(b3) >= 1.0) return std::nullopt;
  // Parameterize the boundary point as (cos(beta)cos(t), sin(beta)sin(t),
  // cos(2 beta)). With z_n = exp(2 i theta_n) the moment equations read
  //   B  = u z1 + (1-u) z2,          B = b1 + i b2,
  //   b3 = u z1^2 + (1-u) z2^2 = B (z1 + z2) - z1 z2.
  // Writing z_n = exp(i (Sigma -+ d)) and eps = 1 - 2u this collapses to
  //   b3 = exp(2 i Sigma) (cos 2d + i eps sin 2d),
  //   B  = exp(i Sigma)  (cos d  + i eps sin d),
  // whose modulus and phase give d, eps and Sigma in closed form.
  const double c = b3;
  const double cb = std::sqrt(0.5 * (1.0 + c));
  const double sb = std::sqrt(0.5 * (1.0 - c));
  double ct = b1 / cb, st = b2 / sb;
  const double tn = std::hypot(ct, st);  // = 1 exactly on the boundary
  if (tn < 1e-12 || std::abs(tn - 1.0) > 1e-3) return std::nullopt;
  ct /= tn;
  st /= tn;
  const double c2t = ct * ct - st * st;
  const double s2t = 2.0 * ct * st;

  const double g1 = c * c2t;  // cos(2 beta) cos(2t)
  const double s_res = 1.0 + c * c - 2.0 * g1;
  const double x = std::clamp((g1 - c * c) / (1.0 - g1), -1.0, 1.0);
  const double d = 0.5 * std::acos(x);  // layer separation theta2 - theta1
  const double eps_mag =
      std::min(1.0, std::abs(c * s2t) / std::sqrt(s_res));
  const double psi = std::atan2(b2, b1);

  // eps = -c sin(2t)/sqrt(s); validate both signs to be safe near eps = 0.
  const double lead = (c * s2t <= 0.0) ? 1.0 : -1.0;
  Rank2Solution best;
  double best_err = 1e9;
  for (double sigma : {lead, -lead}) {
    const double eps = sigma * eps_mag;
    const double u = 0.5 * (1.0 - eps);
    const double big_sigma = psi - std::atan2(eps * std::sin(d), std::cos(d));
    Rank2Solution cand{std::clamp(u, 0.0, 1.0), 0.5 * (big_sigma - d),
                       0.5 * (big_sigma + d)};
    Rank3Laminate as2;
    as2.p = {cand.p1, 1.0 - cand.p1, 0.0};
    as2.theta = {cand.theta1, cand.theta2, 0.0};
    as2.rank = 2;
    const double err = moment_error(as2, MomentVector{b1, b2, b3, 0.0});
    if (err < best_err) {
      best_err = err;
      best = cand;
    }
    if (best_err <= 1e-10) break;
  }
  if (best_err > 1e-7) return std::nullopt;
  best.theta1 = wrap_layer_angle(best.theta1);
  best.theta2 = wrap_layer_angle(best.theta2);
  return best;
}

Rank3Laminate reconstruct_laminate(const MomentVector& m) {
  const RotatedMoments rot = rotate_moments(m);
  Rank3Laminate lam;

  // Corner of the feasible slice: a single layer family.
  if (rot.mt1 * rot.mt1 + rot.mt2 * rot.mt2 >= 1.0 - 1e-7) {
    lam.p = {1.0, 0.0, 0.0};
    lam.theta = {
        wrap_layer_angle(0.5 * std::atan2(rot.mt2, rot.mt1) - rot.gamma), 0.0,
        0.0};
    lam.rank = 1;
    return lam;
  }
  // Edge mt3 = 1: the layers are orthogonal and mt2 is forced to zero.
  if (rot.mt3 >= 1.0 - 1e-9) {
    const double p1 = std::clamp(0.5 * (1.0 + rot.mt1), 0.0, 1.0);
    lam.p = {p1, 1.0 - p1, 0.0};
    lam.theta = {wrap_layer_angle(-rot.gamma),
                 wrap_layer_angle(0.5 * pi - rot.gamma), 0.0};
    lam.rank = 2;
    return lam;
  }

  const double f_self = boundary_f(rot.mt1, rot.mt2, rot.mt3);

  Rank3Laminate best;
  double best_err = 1e9;
  for (const Corner& c : corners) {
    double alpha;
    double b1, b2, b3;
    if (f_self > -1e-12) {
      // Already on the smooth boundary: pure rank-2, no corner mass.
      alpha = 0.0;
      b1 = rot.mt1;
      b2 = rot.mt2;
      b3 = rot.mt3;
    } else {
      // Ray from the corner through the moments; the cubic F restricted to
      // the ray has a double root at the corner (corners are conical points
      // with vanishing gradient), so the exit parameter solves a linear
      // equation: F(a + s d) = s^2 (c2 + c3 s).
      const double d1 = rot.mt1 - c.a1, d2 = rot.mt2 - c.a2,
                   d3 = rot.mt3 - c.a3;
      const double c2 = 2.0 * d1 * d1 * (1.0 - c.a3) -
                        4.0 * c.a1 * d1 * d3 + 2.0 * d2 * d2 * (1.0 + c.a3) +
                        4.0 * c.a2 * d2 * d3 + d3 * d3;
      const double c3 = 2.0 * d3 * (d2 * d2 - d1 * d1);
      if (std::abs(c3) < 1e-14) continue;
      const double s_star = -c2 / c3;
      if (s_star < 1.0 - 1e-12 || s_star > 1e12) continue;
      alpha = 1.0 - 1.0 / s_star;
      b1 = c.a1 + s_star * d1;
      b2 = c.a2 + s_star * d2;
      b3 = c.a3 + s_star * d3;
      if (std::abs(b3) > 1.0 - 1e-12 || b1 * b1 + b2 * b2 > 1.0 + 1e-9)
        continue;
    }
    const auto r2 = boundary_to_rank2(b1, b2, b3);
    if (!r2) continue;
    Rank3Laminate cand;
    cand.p = {alpha, (1.0 - alpha) * r2->p1, (1.0 - alpha) * (1.0 - r2->p1)};
    cand.theta = {wrap_layer_angle(c.theta - rot.gamma),
                  wrap_layer_angle(r2->theta1 - rot.gamma),
                  wrap_layer_angle(r2->theta2 - rot.gamma)};
    cand.rank = 3;
    const double err = moment_error(cand, m);
    if (err < best_err) {
      best_err = err;
      best = cand;
    }
    if (err <= 1e-9) break;
  }

  if (best_err < 1e9) {
    // Drop negligible layer families so the rank reflects the structure.
    Rank3Laminate out;
    int k = 0;
    for (int i = 0; i < 3; ++i) {
      if (best.p[i] > 1e-12) {
        out.p[k] = best.p[i];
        out.theta[k] = best.theta[i];
        ++k;
      }
    }
    out.rank = k;
    double total = 0.0;
    for (int i = 0; i < k; ++i) total += out.p[i];
    for (int i = 0; i < k; ++i) out.p[i] /= total;
    return out;
  }

  // Nothing validated: happens only in a thin sliver near degenerate
  // boundaries. Fall back to the nearest corner.
  double best_d = 1e18;
  for (const Corner& c : corners) {
    const double d = std::hypot(rot.mt1 - c.a1, rot.mt2 - c.a2,
                                rot.mt3 - c.a3);
    if (d < best_d) {
      best_d = d;
      lam.theta[0] = wrap_layer_angle(c.theta - rot.gamma);
    }
  }
  lam.p = {1.0, 0.0, 0.0};
  lam.rank = 1;
  return lam;
}

MomentVector laminate_moments(const Rank3Laminate& lam) {
  std::vector<LayerFamily> layers;
  for (int i = 0; i < 3; ++i)
    if (lam.p[i] > 0.0) layers.push_back({lam.theta[i], lam.p[i]});
  return moments_from_layers(layers);
}

std::array<double, 3> layer_widths(const Rank3Laminate& lam, double f) {
  const double mu1 = lam.p[0] * f;
  const double mu2 = (mu1 < 1.0) ? lam.p[1] * f / (1.0 - mu1) : 0.0;
  const double used = mu1 + mu2 - mu1 * mu2;
  const double mu3 = (used < 1.0) ? lam.p[2] * f / (1.0 - used) : 0.0;
  return {mu1, mu2, mu3};
}

}  // namespace microlam
