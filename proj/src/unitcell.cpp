#include "microlam/unitcell.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace microlam {

namespace {

constexpr double pi = std::numbers::pi;

Eigen::Vector2d tangent(double theta) {
  return {std::cos(theta), std::sin(theta)};
}
Eigen::Vector2d normal(double theta) {
  return {-std::sin(theta), std::cos(theta)};
}

// Difference of layer directions modulo pi, in (-pi/2, pi/2].
double angle_diff(double a, double b) {
  double d = std::fmod(a - b + 0.5 * pi, pi);
  if (d <= 0.0) d += pi;
  return d - 0.5 * pi;
}

struct WeightedLayer {
  double theta;
  double weight;
};

// Layer families with near-identical directions cannot be resolved as
// separate stripe families in one cell; fold them together.
std::vector<WeightedLayer> merge_parallel(const Rank3Laminate& lam) {
  std::vector<WeightedLayer> out;
  for (int i = 0; i < 3; ++i) {
    if (lam.p[i] <= 1e-12) continue;
    bool merged = false;
    for (auto& w : out) {
      if (std::abs(angle_diff(lam.theta[i], w.theta)) < 1e-7) {
        w.weight += lam.p[i];
        merged = true;
        break;
      }
    }
    if (!merged) out.push_back({lam.theta[i], lam.p[i]});
  }
  return out;
}

int round_to_int(double x) {
  const double r = std::nearbyint(x);
  if (std::abs(x - r) > 1e-6)
    throw std::runtime_error("stripe wave count is not an integer");
  return static_cast<int>(r);
}

// Exact integral over [0, X] of clamp(c - d, 0, cap) dd.
double integral_falling(double X, double c, double cap) {
  const double t1 = std::clamp(c - cap, 0.0, X);
  const double t2 = std::clamp(c, t1, X);
  return cap * t1 + c * (t2 - t1) - 0.5 * (t2 * t2 - t1 * t1);
}

// Exact integral over [0, X] of clamp(d - b, 0, cap) dd.
double integral_rising(double X, double b, double cap) {
  const double t1 = std::clamp(b, 0.0, X);
  const double t2 = std::clamp(b + cap, t1, X);
  return 0.5 * (t2 * t2 - t1 * t1) - b * (t2 - t1) + cap * std::max(0.0, X - t2);
}

// Measure of {(U,V) on the torus : U in I_a, V in I_b, U+V in I_c} for
// origin-centered arcs I of the given widths. This is the triple overlap of
// three stripe families whose wave vectors are pairwise unimodular.
double triple_overlap(double wa, double wb, double wc) {
  if (wa <= 0.0 || wb <= 0.0 || wc <= 0.0) return 0.0;
  const double cap = std::min(wb, wc);
  const double half = 0.5 * (wb + wc);
  const double X = 0.5 * wa;
  // arc intersection length as a function of center distance d:
  //   clamp(half - d, 0, cap) + clamp(d - (1 - half), 0, cap)
  return 2.0 * (integral_falling(X, half, cap) +
                integral_rising(X, 1.0 - half, cap));
}

}  // namespace

ParallelogramCell build_cell(const Rank3Laminate& lam) {
  ParallelogramCell cell;
  auto layers = merge_parallel(lam);

  if (layers.empty()) return cell;

  if (layers.size() == 1) {
    // Rotated unit square aligned with the single layer.
    const double th = layers[0].theta;
    cell.a1 = tangent(th);
    cell.a2 = normal(th);
    cell.stripes.push_back({th, 1.0, 0, 1, 0.0});
  } else if (layers.size() == 2) {
    // Parallelogram along both layer directions, equal spacings.
    const double th1 = layers[0].theta, th2 = layers[1].theta;
    const double sd = std::sin(th2 - th1);
    const double c = 1.0 / std::sqrt(std::abs(sd));
    cell.a1 = c * tangent(th1);
    cell.a2 = c * tangent(th2);
    const double spacing = std::sqrt(std::abs(sd));
    cell.stripes.push_back({th1, spacing, 0, 1, 0.0});
    cell.stripes.push_back({th2, spacing, 1, 0, 0.0});
  } else {
    // Base layer is the third family; the cell is spanned by the directions
    // of layers 3 and 1 with lengths chosen so layer 2 also fits an integer
    // number of times.
    const double th1 = layers[0].theta, th2 = layers[1].theta,
                 th3 = layers[2].theta;
    const double d13 = th1 - th3, d23 = th2 - th3;
    const double big_l = std::abs(1.0 / std::tan(d23) - 1.0 / std::tan(d13));
    const double area = big_l;  // lambda_3 = 1
    const double root_a = std::sqrt(area);
    cell.a1 = (big_l / root_a) * tangent(th3);
    cell.a2 = (1.0 / (root_a * std::sin(d13))) * tangent(th1);
    const double lt1 = std::abs(std::sin(d13)) * big_l / root_a;
    const double lt2 = std::abs(std::sin(d23)) * big_l / root_a;
    const double lt3 = 1.0 / root_a;
    cell.stripes.push_back({th1, lt1, 0, 0, 0.0});
    cell.stripes.push_back({th2, lt2, 0, 0, 0.0});
    cell.stripes.push_back({th3, lt3, 0, 0, 0.0});
  }

  // Orient the basis right-handed; mirroring a2 keeps the same lattice.
  if (cell.a1.x() * cell.a2.y() - cell.a1.y() * cell.a2.x() < 0.0)
    cell.a2 = -cell.a2;

  // Wave counts along the two lattice vectors; by construction these are
  // integers and every pair of families is unimodular.
  for (auto& s : cell.stripes) {
    const Eigen::Vector2d n = normal(s.theta);
    s.ku = round_to_int(n.dot(cell.a1) / s.spacing);
    s.kv = round_to_int(n.dot(cell.a2) / s.spacing);
    if (s.ku == 0 && s.kv == 0)
      throw std::runtime_error("degenerate stripe family");
  }
  for (std::size_t i = 0; i < cell.stripes.size(); ++i)
    for (std::size_t j = i + 1; j < cell.stripes.size(); ++j) {
      const auto &si = cell.stripes[i], &sj = cell.stripes[j];
      if (std::abs(si.ku * sj.kv - si.kv * sj.ku) != 1)
        throw std::runtime_error("stripe families are not unimodular");
    }
  return cell;
}

double stripe_union_area(const ParallelogramCell& cell) {
  std::vector<double> w;
  for (const auto& s : cell.stripes)
    w.push_back(std::clamp(s.width, 0.0, 1.0));
  switch (w.size()) {
    case 0:
      return 0.0;
    case 1:
      return w[0];
    case 2:
      return w[0] + w[1] - w[0] * w[1];
    case 3:
      return w[0] + w[1] + w[2] - w[0] * w[1] - w[0] * w[2] - w[1] * w[2] +
             triple_overlap(w[0], w[1], w[2]);
    default:
      throw std::logic_error("at most three stripe families supported");
  }
}

double width_bisection(ParallelogramCell& cell, const Rank3Laminate& lam,
                       double f) {
  auto layers = merge_parallel(lam);
  if (layers.size() != cell.stripes.size())
    throw std::invalid_argument("cell does not match laminate");
  if (cell.stripes.empty()) return 0.0;

  double pmax = 0.0;
  for (const auto& l : layers) pmax = std::max(pmax, l.weight);

  auto area_at = [&](double psi) {
    for (std::size_t i = 0; i < cell.stripes.size(); ++i)
      cell.stripes[i].width = std::min(1.0, psi * layers[i].weight);
    return stripe_union_area(cell);
  };

  double lo = 0.0, hi = 1.0 / pmax;  // widest family saturates at hi
  if (area_at(hi) <= f) return hi;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (area_at(mid) < f)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-15) break;
  }
  area_at(hi);
  return hi;
}

bool point_is_solid(const ParallelogramCell& cell, double u, double v) {
  for (const auto& s : cell.stripes) {
    const double phase = s.ku * u + s.kv * v;
    if (std::abs(phase - std::nearbyint(phase)) <= 0.5 * s.width) return true;
  }
  return false;
}

Eigen::VectorXd rasterize_cell(const ParallelogramCell& cell, int nx, int ny,
                               int supersample) {
  const int ss = std::max(1, supersample);
  Eigen::VectorXd rho(static_cast<Eigen::Index>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      int hits = 0;
      for (int b = 0; b < ss; ++b) {
        const double v = (j + (b + 0.5) / ss) / ny;
        for (int a = 0; a < ss; ++a) {
          const double u = (i + (a + 0.5) / ss) / nx;
          hits += point_is_solid(cell, u, v) ? 1 : 0;
        }
      }
      rho[static_cast<Eigen::Index>(j) * nx + i] =
          static_cast<double>(hits) / (ss * ss);
    }
  }
  return rho;
}

}  // namespace microlam
