#include "microlam/moment_opt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace microlam {

namespace {

// Shared per-problem data: xi coordinates of the loads, the weighted load
// matrix W = 1/2 sum_j w_j x_j x_j^T, and the constant part of the inner
// matrix K(m) = (C+ - C-)^{-1} - f e+ M(m).
struct Problem {
  std::vector<Eigen::Vector3d> xs;
  std::vector<double> ws;
  Eigen::Matrix3d w_mat;
  Eigen::Matrix3d k_const;
  double e_plus_term = 0.0;  // 1/2 sum_j w_j x_j : C+ : x_j
  double f = 0.0;
  double e_plus = 0.0;

  Problem(const LoadSet& loads, double f_in, const MaterialPair& mat)
      : f(f_in), e_plus(mat.e_plus) {
    const Eigen::Matrix3d c_plus = isotropic_compliance(mat.e_plus, mat.nu);
    const Eigen::Matrix3d c_minus = isotropic_compliance(mat.e_minus, mat.nu);
    k_const = (c_plus - c_minus).diagonal().cwiseInverse().asDiagonal();
    w_mat.setZero();
    for (const auto& s : loads.cases()) {
      Eigen::Vector3d x = to_xi_coords(s).vec();
      xs.push_back(x);
      ws.push_back(s.weight);
      w_mat += 0.5 * s.weight * x * x.transpose();
      e_plus_term += 0.5 * s.weight * x.dot(c_plus * x);
    }
  }

  Eigen::Matrix3d k_of(const MomentVector& m) const {
    return k_const - f * e_plus * moment_matrix(m);
  }

  // Energy as a function of the moments. K is negative definite on the
  // feasible set (the weak phase only adds compliance), so the correction
  // term -(1-f) tr(K^{-1} W) is nonnegative.
  double energy(const MomentVector& m) const {
    return e_plus_term - (1.0 - f) * (k_of(m).inverse() * w_mat).trace();
  }

  Eigen::Vector4d energy_gradient(const MomentVector& m) const {
    const Eigen::Matrix3d kinv = k_of(m).inverse();
    const auto& dm = moment_matrix_derivatives();
    Eigen::Vector4d g;
    // dC/dm_i = -(1-f) f e+ K^{-1} dM_i K^{-1}
    const double c = -(1.0 - f) * f * e_plus;
    std::vector<Eigen::Vector3d> ys(xs.size());
    for (std::size_t j = 0; j < xs.size(); ++j) ys[j] = kinv * xs[j];
    for (int i = 0; i < 4; ++i) {
      double gi = 0.0;
      for (std::size_t j = 0; j < xs.size(); ++j)
        gi += 0.5 * ws[j] * ys[j].dot(dm[i] * ys[j]);
      g[i] = c * gi;
    }
    return g;
  }

  // K is linear in m, so differentiating the gradient once more gives
  // H_ij = -(1-f) (f e+)^2 sum_l w_l (M_i y_l)' K^{-1} (M_j y_l); K^{-1} is
  // negative definite on the feasible set, hence H is positive semidefinite.
  Eigen::Matrix4d energy_hessian(const MomentVector& m) const {
    const Eigen::Matrix3d kinv = k_of(m).inverse();
    const auto& dm = moment_matrix_derivatives();
    const double c = -(1.0 - f) * f * e_plus * f * e_plus;
    Eigen::Matrix4d h = Eigen::Matrix4d::Zero();
    for (std::size_t l = 0; l < xs.size(); ++l) {
      const Eigen::Vector3d y = kinv * xs[l];
      Eigen::Matrix<double, 3, 4> z;
      for (int i = 0; i < 4; ++i) z.col(i) = dm[i] * y;
      h += ws[l] * (z.transpose() * kinv * z);
    }
    return c * h;
  }
};

// Barrier constraint values; all must be strictly positive in the interior.
//   c0 = 1 - m1^2 - m2^2            circle
//   c1 = 1 - m3, c2 = 1 + m3        band
//   c3 = -boundary residual         fourth-moment ellipse, cleared form
Eigen::Vector4d constraints(const Eigen::Vector4d& m) {
  Eigen::Vector4d c;
  c[0] = 1.0 - m[0] * m[0] - m[1] * m[1];
  c[1] = 1.0 - m[2];
  c[2] = 1.0 + m[2];
  c[3] = 1.0 - m[2] * m[2] - 2.0 * m[0] * m[0] * (1.0 - m[2]) -
         2.0 * m[1] * m[1] * (1.0 + m[2]) - m[3] * m[3] +
         4.0 * m[0] * m[1] * m[3];
  return c;
}

bool interior(const Eigen::Vector4d& c) { return c.minCoeff() > 0.0; }

Eigen::Matrix4d constraint_jacobian(const Eigen::Vector4d& m) {
  Eigen::Matrix4d j;  // row i = grad c_i
  j.setZero();
  j(0, 0) = -2.0 * m[0];
  j(0, 1) = -2.0 * m[1];
  j(1, 2) = -1.0;
  j(2, 2) = 1.0;
  j(3, 0) = -4.0 * m[0] * (1.0 - m[2]) + 4.0 * m[1] * m[3];
  j(3, 1) = -4.0 * m[1] * (1.0 + m[2]) + 4.0 * m[0] * m[3];
  j(3, 2) = -2.0 * m[2] + 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1];
  j(3, 3) = -2.0 * m[3] + 4.0 * m[0] * m[1];
  return j;
}

double barrier_value(const Problem& p, const Eigen::Vector4d& m, double t) {
  const Eigen::Vector4d c = constraints(m);
  if (!interior(c)) return std::numeric_limits<double>::infinity();
  return p.energy(MomentVector::from(m)) - t * c.array().log().sum();
}

Eigen::Vector4d barrier_gradient(const Problem& p, const Eigen::Vector4d& m,
                                 double t) {
  const Eigen::Vector4d c = constraints(m);
  const Eigen::Matrix4d j = constraint_jacobian(m);
  Eigen::Vector4d g = p.energy_gradient(MomentVector::from(m));
  for (int i = 0; i < 4; ++i) g -= (t / c[i]) * j.row(i).transpose();
  return g;
}

Eigen::Matrix4d constraint_hessian(int i, const Eigen::Vector4d& m) {
  Eigen::Matrix4d hc = Eigen::Matrix4d::Zero();
  if (i == 0) {
    hc(0, 0) = hc(1, 1) = -2.0;
  } else if (i == 3) {
    hc << -4.0 * (1.0 - m[2]), 4.0 * m[3], 4.0 * m[0], 4.0 * m[1],
        4.0 * m[3], -4.0 * (1.0 + m[2]), -4.0 * m[1], 4.0 * m[0],
        4.0 * m[0], -4.0 * m[1], -2.0, 0.0,
        4.0 * m[1], 4.0 * m[0], 0.0, -2.0;
  }
  return hc;  // the band rows are linear
}

Eigen::Matrix4d barrier_hessian(const Problem& p, const Eigen::Vector4d& m,
                                double t) {
  const Eigen::Vector4d c = constraints(m);
  const Eigen::Matrix4d j = constraint_jacobian(m);
  Eigen::Matrix4d h = p.energy_hessian(MomentVector::from(m));
  for (int i = 0; i < 4; ++i) {
    h += (t / (c[i] * c[i])) * j.row(i).transpose() * j.row(i);
    h -= (t / c[i]) * constraint_hessian(i, m);
  }
  return h;
}

// Near-active constraints at m, skipping ones whose gradient vanishes (the
// cleared quartic has conical points at the rank-1 corners, where it carries
// no usable multiplier).
std::vector<int> active_set(const Eigen::Vector4d& c,
                            const Eigen::Matrix4d& j) {
  std::vector<int> act;
  for (int i = 0; i < 4; ++i)
    if (c[i] < 1e-6 && j.row(i).norm() > 1e-6) act.push_back(i);
  return act;
}

}  // namespace

MomentSolution optimize_moments(const LoadSet& loads, double f,
                                const MaterialPair& mat,
                                const MomentSolverOptions& opts) {
  MomentSolution sol;
  if (loads.empty()) {
    sol.converged = true;
    return sol;
  }
  const Problem p(loads, f, mat);

  Eigen::Vector4d m = Eigen::Vector4d::Zero();  // analytic center
  const double scale = std::max(1.0, std::abs(p.energy(MomentVector{})));
  double t = opts.barrier_init * scale;

  for (int outer = 0; outer < opts.outer_iterations; ++outer) {
    const double tol =
        std::max(opts.grad_tol * scale, std::min(1e-6 * scale, 0.1 * t));
    double lm = 0.0;  // Levenberg damping, raised on failed steps
    for (int inner = 0; inner < opts.max_inner; ++inner) {
      const Eigen::Vector4d g = barrier_gradient(p, m, t);
      if (g.lpNorm<Eigen::Infinity>() < tol) break;

      const Eigen::Matrix4d h = barrier_hessian(p, m, t);

      const double phi0 = barrier_value(p, m, t);
      bool accepted = false;
      for (int attempt = 0; attempt < 8 && !accepted; ++attempt) {
        Eigen::Matrix4d hd = h + lm * Eigen::Matrix4d::Identity();
        Eigen::LDLT<Eigen::Matrix4d> ldlt(hd);
        Eigen::Vector4d d = ldlt.solve(-g);
        if (!d.allFinite() || g.dot(d) >= 0.0) {
          lm = (lm == 0.0) ? 1e-8 : lm * 100.0;
          continue;
        }
        double alpha = 1.0;
        for (int bt = 0; bt < 60; ++bt) {
          const Eigen::Vector4d cand = m + alpha * d;
          const double phi = barrier_value(p, cand, t);
          if (phi <= phi0 + 1e-4 * alpha * g.dot(d)) {
            m = cand;
            accepted = true;
            break;
          }
          alpha *= 0.5;
        }
        if (!accepted) lm = (lm == 0.0) ? 1e-8 : lm * 100.0;
      }
      ++sol.iterations;
      if (!accepted) break;  // stuck; shrink the barrier and retry
      lm = std::max(0.0, lm * 0.01);
    }
    t *= opts.barrier_shrink;
    if (4.0 * t < 1e-13 * scale) break;
  }

  // Central-path residual: multipliers t/c_i are exact for the barrier
  // problem, so max(grad, 4t) bounds the KKT violation. Useless at boundary
  // optima, where the computed c_i saturate double precision.
  const double t_solved = t / opts.barrier_shrink;
  const double grad_norm =
      barrier_gradient(p, m, t_solved).lpNorm<Eigen::Infinity>();
  double residual = std::max(grad_norm, 4.0 * t_solved) / scale;

  // The barrier stalls once an active constraint saturates in floating
  // point, leaving the iterate slightly off the constrained optimum. Polish
  // with Newton on the active-set KKT system grad E = J_A' lambda, c_A = 0.
  {
    const Eigen::Vector4d c0v = constraints(m);
    const std::vector<int> act = active_set(c0v, constraint_jacobian(m));
    const int na = static_cast<int>(act.size());
    if (na > 0) {
      Eigen::Vector4d mp = m;
      Eigen::MatrixXd jt(4, na);
      for (int k = 0; k < na; ++k)
        jt.col(k) = constraint_jacobian(mp).row(act[k]).transpose();
      Eigen::VectorXd lam =
          jt.completeOrthogonalDecomposition().solve(p.energy_gradient(
              MomentVector::from(mp)));
      lam = lam.cwiseMax(0.0);
      auto kkt_f = [&](const Eigen::Vector4d& mm, const Eigen::VectorXd& ll) {
        const Eigen::Matrix4d jj = constraint_jacobian(mm);
        const Eigen::Vector4d cc = constraints(mm);
        Eigen::VectorXd f(4 + na);
        Eigen::Vector4d r = p.energy_gradient(MomentVector::from(mm));
        for (int k = 0; k < na; ++k) {
          r -= ll[k] * jj.row(act[k]).transpose();
          f[4 + k] = cc[act[k]];
        }
        f.head<4>() = r;
        return f;
      };
      const double f_start = kkt_f(mp, lam).lpNorm<Eigen::Infinity>();
      for (int it = 0; it < 10; ++it) {
        const Eigen::VectorXd f = kkt_f(mp, lam);
        if (f.lpNorm<Eigen::Infinity>() < 1e-14 * scale) break;
        Eigen::Matrix4d w = p.energy_hessian(MomentVector::from(mp));
        const Eigen::Matrix4d jj = constraint_jacobian(mp);
        for (int k = 0; k < na; ++k)
          w -= lam[k] * constraint_hessian(act[k], mp);
        Eigen::MatrixXd kktm = Eigen::MatrixXd::Zero(4 + na, 4 + na);
        kktm.topLeftCorner<4, 4>() = w;
        for (int k = 0; k < na; ++k) {
          kktm.block<4, 1>(0, 4 + k) = -jj.row(act[k]).transpose();
          kktm.block<1, 4>(4 + k, 0) = jj.row(act[k]);
        }
        const Eigen::VectorXd d = kktm.fullPivLu().solve(-f);
        if (!d.allFinite() || d.head<4>().lpNorm<Eigen::Infinity>() > 0.05)
          break;
        mp += d.head<4>();
        lam += d.tail(na);
      }
      const bool improved =
          kkt_f(mp, lam).lpNorm<Eigen::Infinity>() < f_start &&
          lam.minCoeff() >= -1e-10 &&
          constraints(mp).minCoeff() > -1e-9 &&
          std::abs(p.energy(MomentVector::from(mp)) -
                   p.energy(MomentVector::from(m))) < 1e-6 * scale;
      if (improved) m = mp;
    }
  }

  sol.m = MomentVector::from(m);
  sol.energy = p.energy(sol.m);

  // Fit nonnegative multipliers of the near-active constraints to the
  // energy gradient and measure the KKT violation directly.
  const Eigen::Vector4d c = constraints(m);
  const Eigen::Matrix4d j = constraint_jacobian(m);
  const Eigen::Vector4d ge = p.energy_gradient(sol.m);
  std::vector<int> act = active_set(c, j);
  Eigen::Vector4d rvec = ge;
  double comp = 0.0;
  while (!act.empty()) {
    Eigen::MatrixXd jt(4, act.size());
    for (std::size_t k = 0; k < act.size(); ++k)
      jt.col(k) = j.row(act[k]).transpose();
    const Eigen::VectorXd lam =
        jt.completeOrthogonalDecomposition().solve(ge);
    int worst = -1;
    for (int k = 0; k < lam.size(); ++k)
      if (lam[k] < 0.0 && (worst < 0 || lam[k] < lam[worst])) worst = k;
    if (worst >= 0) {
      act.erase(act.begin() + worst);
      continue;
    }
    rvec = ge - jt * lam;
    comp = 0.0;
    for (int k = 0; k < lam.size(); ++k)
      comp = std::max(comp, lam[k] * std::abs(c[act[k]]));
    break;
  }
  residual = std::min(
      residual, std::max(rvec.lpNorm<Eigen::Infinity>(), comp) / scale);

  sol.kkt_residual = residual;
  sol.converged = c.minCoeff() > -1e-9 && sol.kkt_residual < 1e-6;
  return sol;
}

OracleResult grid_search_oracle(const LoadSet& loads, double f,
                                const MaterialPair& mat, double resolution) {
  OracleResult best;
  if (loads.empty()) return best;
  const Problem p(loads, f, mat);
  const Eigen::Matrix3d w = p.w_mat;

  const int n = static_cast<int>(std::lround(2.0 / resolution)) + 1;
  auto val = [&](int i) { return -1.0 + i * resolution; };

  // For fixed (m1, m2, m3) the energy is e+ term - (1-f) N(m4)/D(m4) with N
  // and D quadratics in m4 (D = det K, N = tr(adj(K) W); only the K12 entry
  // carries m4). K stays negative definite across the closed feasible
  // interval, so N/D is smooth there and its lattice maximum sits at an
  // interval end or next to a stationary point: checking those few
  // candidates replaces the full m4 scan. D < 0 throughout, so comparing
  // candidates reduces to a cross product test.
  //
  // K = diag(kc) - g M(m), g = f e+:
  //   K00 = kc0 - g (1 + m3)/4     K01 = -g m4 / 4
  //   K11 = kc1 - g (1 - m3)/4     K02 = -g m1 / 2
  //   K22 = kc2 - g / 2            K12 = -g m2 / 2
  const double g = f * p.e_plus;
  const Eigen::Vector3d kc = p.k_const.diagonal();
  const double e22 = kc[2] - 0.5 * g;
  const double w00 = w(0, 0), w11 = w(1, 1), w22 = w(2, 2);
  const double w01 = w(0, 1), w02 = w(0, 2), w12 = w(1, 2);
  // x = K01 = -(g/4) m4; D = -e22 x^2 + 2 K02 K12 x + d0;
  // N = -w22 x^2 + 2 (K12 w02 + K02 w12 - e22 w01) x + n0
  const double da = -e22 * g * g / 16.0;
  const double na = -w22 * g * g / 16.0;

  double best_num = 0.0, best_den = -1.0;  // ratio -> energy correction 0
  bool have_best = false;
  Eigen::Vector4d best_m = Eigen::Vector4d::Zero();
  std::size_t count = 0;

  const double inv_res = 1.0 / resolution;
  for (int i1 = 0; i1 < n; ++i1) {
    const double m1 = val(i1);
    const double kc02 = -0.5 * g * m1;
    for (int i2 = 0; i2 < n; ++i2) {
      const double m2 = val(i2);
      if (m1 * m1 + m2 * m2 > 1.0 + 1e-12) continue;
      const double kc12 = -0.5 * g * m2;
      // coefficients linear in x, via x = -(g/4) m4
      const double db = -0.5 * g * kc02 * kc12;
      const double nb =
          -0.5 * g * (kc12 * w02 + kc02 * w12 - e22 * w01);
      // the quartic admits some m4 only for m3 in [2 m1^2 - 1, 1 - 2 m2^2]
      const int k3_lo =
          std::max(0, static_cast<int>(std::ceil(2.0 * m1 * m1 * inv_res -
                                                 1e-9)));
      const int k3_hi = std::min(
          n - 1, static_cast<int>(std::floor((2.0 - 2.0 * m2 * m2) * inv_res +
                                             1e-9)));
      for (int i3 = k3_lo; i3 <= k3_hi; ++i3) {
        const double m3 = val(i3);
        // feasible m4 interval: (m4 - 2 m1 m2)^2 <= disc
        const double q = 1.0 - m3 * m3 - 2.0 * m1 * m1 * (1.0 - m3) -
                         2.0 * m2 * m2 * (1.0 + m3);
        const double disc =
            std::max(0.0, q + 4.0 * m1 * m1 * m2 * m2);
        const double root = std::sqrt(disc);
        const double lo = 2.0 * m1 * m2 - root;
        const double hi = 2.0 * m1 * m2 + root;
        int k_lo = static_cast<int>(std::ceil((lo + 1.0) * inv_res - 1e-9));
        int k_hi = static_cast<int>(std::floor((hi + 1.0) * inv_res + 1e-9));
        k_lo = std::max(k_lo, 0);
        k_hi = std::min(k_hi, n - 1);
        if (k_lo > k_hi) continue;

        const double a00 = kc[0] - 0.25 * g * (1.0 + m3);
        const double a11 = kc[1] - 0.25 * g * (1.0 - m3);
        const double d0 = a00 * a11 * e22 - a00 * kc12 * kc12 -
                          a11 * kc02 * kc02;
        const double n0 = a11 * (w00 * e22 + w22 * a00 - 2.0 * w02 * kc02) +
                          a00 * (w11 * e22 - 2.0 * w12 * kc12) -
                          w00 * kc12 * kc12 - w11 * kc02 * kc02 +
                          2.0 * w01 * kc02 * kc12;

        int cand[6];
        int nc = 0;
        cand[nc++] = k_lo;
        if (k_hi != k_lo) cand[nc++] = k_hi;
        // stationary points of N/D: (N' D - N D')(m4) = 0, a quadratic
        const double c2 = na * db - nb * da;
        const double c1 = 2.0 * (na * d0 - da * n0);
        const double c0 = nb * d0 - db * n0;
        double roots[2];
        int nr = 0;
        if (std::abs(c2) > 1e-300) {
          const double h = c1 * c1 - 4.0 * c2 * c0;
          if (h >= 0.0) {
            const double sq = std::sqrt(h);
            const double qq = -0.5 * (c1 + std::copysign(sq, c1));
            roots[nr++] = qq / c2;
            if (qq != 0.0) roots[nr++] = c0 / qq;
          }
        } else if (std::abs(c1) > 1e-300) {
          roots[nr++] = -c0 / c1;
        }
        for (int r = 0; r < nr; ++r) {
          if (!(roots[r] > lo && roots[r] < hi)) continue;
          const int kf = static_cast<int>(std::floor((roots[r] + 1.0) *
                                                     inv_res));
          for (int k : {kf, kf + 1}) {
            if (k < k_lo || k > k_hi) continue;
            bool dup = false;
            for (int c = 0; c < nc; ++c) dup = dup || cand[c] == k;
            if (!dup) cand[nc++] = k;
          }
        }

        for (int c = 0; c < nc; ++c) {
          const double m4 = val(cand[c]);
          const double num = (na * m4 + nb) * m4 + n0;
          const double den = (da * m4 + db) * m4 + d0;
          ++count;
          // smaller energy  <=>  larger N/D; D products are positive
          if (!have_best || num * best_den > best_num * den) {
            have_best = true;
            best_num = num;
            best_den = den;
            best_m << m1, m2, m3, m4;
          }
        }
      }
    }
  }
  best.m = MomentVector::from(best_m);
  best.energy = p.energy(best.m);
  best.points_evaluated = count;
  return best;
}

}  // namespace microlam
