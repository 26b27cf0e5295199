#include "microlam/topopt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace microlam {

PeriodicFilter::PeriodicFilter(int nx, int ny, const Eigen::Matrix2d& basis,
                               double radius)
    : radius_(radius) {
  const Eigen::Vector2d a1 = basis.col(0), a2 = basis.col(1);
  // Conservative index ranges: |du| <= R |a2| etc. because the cell area
  // is one.
  const int span_u = static_cast<int>(std::ceil(radius * a2.norm() * nx)) + 1;
  const int span_v = static_cast<int>(std::ceil(radius * a1.norm() * ny)) + 1;

  struct Tap {
    int du, dv;
    double w;
  };
  std::vector<Tap> kernel;
  double total = 0.0;
  for (int dv = -span_v; dv <= span_v; ++dv)
    for (int du = -span_u; du <= span_u; ++du) {
      // shortest-image displacement of the element centers
      double wu = static_cast<double>(du) / nx;
      double wv = static_cast<double>(dv) / ny;
      wu -= std::nearbyint(wu);
      wv -= std::nearbyint(wv);
      const double d = (wu * a1 + wv * a2).norm();
      if (d < radius) {
        kernel.push_back({du, dv, 1.0 - d / radius});
        total += kernel.back().w;
      }
    }

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(kernel.size() * static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int row = j * nx + i;
      for (const auto& tap : kernel) {
        const int ii = ((i + tap.du) % nx + nx) % nx;
        const int jj = ((j + tap.dv) % ny + ny) % ny;
        trips.emplace_back(row, jj * nx + ii, tap.w / total);
      }
    }
  h_.resize(nx * ny, nx * ny);
  h_.setFromTriplets(trips.begin(), trips.end());
  h_.makeCompressed();
}

double heaviside_project(double rho_bar, double beta) {
  return 1.0 - std::exp(-beta * rho_bar) + rho_bar * std::exp(-beta);
}

double heaviside_derivative(double rho_bar, double beta) {
  return beta * std::exp(-beta * rho_bar) + std::exp(-beta);
}

MmaOptimizer::MmaOptimizer(int n) : n_(n) {
  xold1_.resize(n);
  xold2_.resize(n);
  low_ = Eigen::VectorXd::Zero(n);
  upp_ = Eigen::VectorXd::Ones(n);
}

Eigen::VectorXd MmaOptimizer::update(const Eigen::VectorXd& x,
                                     const Eigen::VectorXd& df, double g,
                                     const Eigen::VectorXd& dg) {
  ++iter_;
  constexpr double asy_init = 0.5, asy_incr = 1.2, asy_decr = 0.7;
  constexpr double albefa = 0.1, raa0 = 1e-5;

  if (iter_ <= 2) {
    low_ = x.array() - asy_init;
    upp_ = x.array() + asy_init;
  } else {
    for (int i = 0; i < n_; ++i) {
      const double osc = (x[i] - xold1_[i]) * (xold1_[i] - xold2_[i]);
      const double gamma = osc > 0.0 ? asy_incr : (osc < 0.0 ? asy_decr : 1.0);
      low_[i] = x[i] - gamma * (xold1_[i] - low_[i]);
      upp_[i] = x[i] + gamma * (upp_[i] - xold1_[i]);
      low_[i] = std::clamp(low_[i], x[i] - 10.0, x[i] - 0.01);
      upp_[i] = std::clamp(upp_[i], x[i] + 0.01, x[i] + 10.0);
    }
  }
  xold2_ = (iter_ >= 2) ? xold1_ : x;
  xold1_ = x;

  Eigen::VectorXd alpha(n_), beta(n_);
  Eigen::VectorXd p0(n_), q0(n_), pc(n_), qc(n_);
  for (int i = 0; i < n_; ++i) {
    alpha[i] = std::max({0.0, low_[i] + albefa * (x[i] - low_[i]),
                         x[i] - move_});
    beta[i] = std::min({1.0, upp_[i] - albefa * (upp_[i] - x[i]),
                        x[i] + move_});
    const double u2 = (upp_[i] - x[i]) * (upp_[i] - x[i]);
    const double l2 = (x[i] - low_[i]) * (x[i] - low_[i]);
    const double dfp = std::max(df[i], 0.0), dfm = std::max(-df[i], 0.0);
    p0[i] = u2 * (1.001 * dfp + 0.001 * dfm + raa0);
    q0[i] = l2 * (0.001 * dfp + 1.001 * dfm + raa0);
    pc[i] = u2 * std::max(dg[i], 0.0);
    qc[i] = l2 * std::max(-dg[i], 0.0);
  }
  // constraint bound of the subproblem at the expansion point
  double b = -g;
  for (int i = 0; i < n_; ++i)
    b += pc[i] / (upp_[i] - x[i]) + qc[i] / (x[i] - low_[i]);

  auto primal = [&](double lam, Eigen::VectorXd& xn) {
    for (int i = 0; i < n_; ++i) {
      const double sp = std::sqrt(p0[i] + lam * pc[i]);
      const double sq = std::sqrt(q0[i] + lam * qc[i]);
      xn[i] = std::clamp((low_[i] * sp + upp_[i] * sq) / (sp + sq), alpha[i],
                         beta[i]);
    }
  };
  auto constraint = [&](const Eigen::VectorXd& xn) {
    double c = -b;
    for (int i = 0; i < n_; ++i)
      c += pc[i] / (upp_[i] - xn[i]) + qc[i] / (xn[i] - low_[i]);
    return c;
  };

  Eigen::VectorXd xn(n_);
  primal(0.0, xn);
  if (constraint(xn) > 0.0) {
    double lo = 0.0, hi = 1.0;
    primal(hi, xn);
    int guard = 0;
    while (constraint(xn) > 0.0 && guard++ < 60) {
      lo = hi;
      hi *= 2.0;
      primal(hi, xn);
    }
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      primal(mid, xn);
      if (constraint(xn) > 0.0)
        lo = mid;
      else
        hi = mid;
    }
    primal(hi, xn);
  }
  return xn;
}

TopOptResult optimize_cell(Homogenizer& hom, const PeriodicFilter& filter,
                           const LoadSet& loads, const Eigen::VectorXd& start,
                           const TopOptConfig& config) {
  const int n = hom.element_count();
  TopOptResult res;
  Eigen::VectorXd x = start.cwiseMax(0.0).cwiseMin(1.0);
  MmaOptimizer mma(n);
  mma.set_move_limit(config.move_limit);

  double beta = config.beta_initial;
  int settled = 0;
  int since_advance = 0;
  const double vol_weight = 1.0 / n;  // congruent elements, unit cell area

  // Best volume-feasible design seen; guards against the budget running out
  // right after a beta increase, when the design is mid-recovery.
  double best_obj = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_x, best_xphys;

  for (int iter = 1; iter <= config.max_iterations; ++iter) {
    const Eigen::VectorXd xbar = filter.apply(x);
    Eigen::VectorXd xphys(n), dproj(n);
    for (int e = 0; e < n; ++e) {
      xphys[e] = heaviside_project(xbar[e], beta);
      dproj[e] = heaviside_derivative(xbar[e], beta);
    }

    hom.homogenize(xphys);
    const double obj = hom.complementary_energy(loads);
    const double vol = xphys.mean();
    if (obj < best_obj && vol <= config.volume_fraction + 1e-3) {
      best_obj = obj;
      best_x = x;
      best_xphys = xphys;
    }

    const Eigen::VectorXd dobj =
        filter.apply_transpose(hom.energy_gradient(loads).cwiseProduct(dproj));
    const Eigen::VectorXd dvol =
        filter.apply_transpose(vol_weight * dproj);

    const Eigen::VectorXd xnew =
        mma.update(x, dobj, vol - config.volume_fraction, dvol);
    const double change = (xnew - x).lpNorm<Eigen::Infinity>();
    x = xnew;

    res.history.push_back({iter, obj, vol, change, beta});
    res.iterations = iter;

    const bool at_cap = beta >= config.beta_max;
    if (at_cap) ++settled;
    if (at_cap && settled > config.settle_iterations &&
        change < config.change_tolerance) {
      res.converged = true;
      break;
    }
    ++since_advance;
    // sharpen on schedule, or early once the design settles at this beta
    if (!at_cap && (since_advance >= config.beta_interval ||
                    change < config.change_tolerance)) {
      beta = std::min(beta * config.beta_multiplier, config.beta_max);
      since_advance = 0;
    }
  }

  // Evaluate the final design; keep the best feasible one if it was better.
  const Eigen::VectorXd xbar = filter.apply(x);
  Eigen::VectorXd xphys(n);
  for (int e = 0; e < n; ++e) xphys[e] = heaviside_project(xbar[e], beta);
  hom.homogenize(xphys);
  double obj = hom.complementary_energy(loads);
  if (best_x.size() > 0 &&
      (xphys.mean() > config.volume_fraction + 1e-3 || obj > best_obj)) {
    x = best_x;
    xphys = best_xphys;
    hom.homogenize(xphys);
    obj = hom.complementary_energy(loads);
  }
  res.stiffness = hom.last_stiffness();
  res.objective = obj;
  res.volume = xphys.mean();
  res.design = x;
  res.physical = xphys;
  return res;
}

Eigen::VectorXd random_start(int nx, int ny, double f, std::mt19937& rng,
                             const PeriodicFilter& filter) {
  std::uniform_real_distribution<double> dist(0.0, std::min(1.0, 2.0 * f));
  Eigen::VectorXd x(static_cast<Eigen::Index>(nx) * ny);
  for (Eigen::Index e = 0; e < x.size(); ++e) x[e] = dist(rng);
  return filter.apply(x);
}

Eigen::VectorXd homogeneous_start(int nx, int ny,
                                  const Eigen::Matrix2d& basis, double f,
                                  double radius) {
  Eigen::VectorXd x =
      Eigen::VectorXd::Constant(static_cast<Eigen::Index>(nx) * ny, f);
  const Eigen::Vector2d a1 = basis.col(0), a2 = basis.col(1);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      double wu = (i + 0.5) / nx - 0.5;
      double wv = (j + 0.5) / ny - 0.5;
      wu -= std::nearbyint(wu);
      wv -= std::nearbyint(wv);
      if ((wu * a1 + wv * a2).norm() <= radius) x[j * nx + i] = 0.0;
    }
  return x;
}

}  // namespace microlam
