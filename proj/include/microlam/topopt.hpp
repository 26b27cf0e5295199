#pragma once

#include <Eigen/Sparse>
#include <random>
#include <vector>

#include "microlam/homogenize.hpp"

namespace microlam {

// Cone density filter on the periodic cell; distances are physical
// shortest-image distances, so the kernel wraps across all faces.
class PeriodicFilter {
 public:
  PeriodicFilter(int nx, int ny, const Eigen::Matrix2d& basis, double radius);
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const { return h_ * x; }
  Eigen::VectorXd apply_transpose(const Eigen::VectorXd& x) const {
    return h_.transpose() * x;
  }
  double radius() const { return radius_; }

 private:
  Eigen::SparseMatrix<double> h_;  // rows normalized to unit sum
  double radius_;
};

// Smoothed Heaviside pushing filtered densities toward 0/1; beta controls
// sharpness, beta -> 0 recovers the identity.
double heaviside_project(double rho_bar, double beta);
double heaviside_derivative(double rho_bar, double beta);

// Method of moving asymptotes specialized to box constraints plus a single
// inequality constraint, the standard layout of density-based compliance
// problems. The dual of the separable subproblem is one-dimensional and is
// solved by bisection.
class MmaOptimizer {
 public:
  explicit MmaOptimizer(int n);
  // x in [0,1]^n; returns the next iterate. g <= 0 is the constraint value,
  // dg its gradient.
  Eigen::VectorXd update(const Eigen::VectorXd& x, const Eigen::VectorXd& df,
                         double g, const Eigen::VectorXd& dg);
  void set_move_limit(double move) { move_ = move; }

 private:
  int n_;
  int iter_ = 0;
  double move_ = 0.2;
  Eigen::VectorXd xold1_, xold2_, low_, upp_;
};

struct TopOptConfig {
  double volume_fraction = 0.5;
  double radius = 0.025;  // physical filter radius (half the length scale)
  int max_iterations = 500;
  double move_limit = 0.2;
  double beta_initial = 1.0;
  double beta_multiplier = 2.0;
  int beta_interval = 50;  // iterations between sharpness increases
  double beta_max = 64.0;
  double change_tolerance = 0.01;
  int settle_iterations = 50;  // required at beta_max before stopping
};

struct IterationRecord {
  int iteration;
  double objective;
  double volume;
  double change;
  double beta;
};

struct TopOptResult {
  Eigen::VectorXd design;    // raw design variables
  Eigen::VectorXd physical;  // filtered + projected densities
  double objective = 0.0;
  double volume = 0.0;
  Eigen::Matrix3d stiffness;
  int iterations = 0;
  bool converged = false;  // stopped on the change criterion
  std::vector<IterationRecord> history;
};

// Inverse homogenization: minimize the weighted complementary energy of the
// homogenized cell subject to the volume bound. Returns the best
// volume-feasible design evaluated, which can precede the last iterate when
// the iteration budget runs out during sharpness continuation.
TopOptResult optimize_cell(Homogenizer& hom, const PeriodicFilter& filter,
                           const LoadSet& loads, const Eigen::VectorXd& start,
                           const TopOptConfig& config);

// Starting guesses. The random field is filtered once for continuity; the
// near-homogeneous field carries a void disc at the cell center so element
// sensitivities differ.
Eigen::VectorXd random_start(int nx, int ny, double f, std::mt19937& rng,
                             const PeriodicFilter& filter);
Eigen::VectorXd homogeneous_start(int nx, int ny,
                                  const Eigen::Matrix2d& basis, double f,
                                  double radius);

}  // namespace microlam
