#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

namespace microlam {

// Orthonormal coordinates for symmetric 2x2 tensors:
//   x1 = (s11 - s22)/sqrt(2),  x2 = sqrt(2)*s12,  x3 = (s11 + s22)/sqrt(2).
// The map preserves the Frobenius inner product, so quadratic forms written
// in these coordinates need no metric factors.
struct XiVector {
  double x1 = 0.0;
  double x2 = 0.0;
  double x3 = 0.0;

  Eigen::Vector3d vec() const { return {x1, x2, x3}; }
  double norm() const { return vec().norm(); }
};

// A macroscopic stress given by its Cartesian components.
struct StressCase {
  double s11 = 0.0;
  double s22 = 0.0;
  double s12 = 0.0;
  double weight = 1.0;
};

// Weighted multi-load set. Weights are normalized to sum to one on
// construction; zero-weight cases are dropped.
class LoadSet {
public:
  LoadSet() = default;
  explicit LoadSet(std::vector<StressCase> cases) {
    double total = 0.0;
    for (const auto& c : cases) total += c.weight;
    for (auto& c : cases) {
      if (c.weight <= 0.0) continue;
      c.weight /= total;
      cases_.push_back(c);
    }
  }

  const std::vector<StressCase>& cases() const { return cases_; }
  std::size_t size() const { return cases_.size(); }
  bool empty() const { return cases_.empty(); }

private:
  std::vector<StressCase> cases_;
};

// Isotropic phase pair. The weak phase is an ersatz material: same Poisson
// ratio, Young modulus smaller by ~9 orders of magnitude.
struct MaterialPair {
  double e_plus = 1.0;
  double e_minus = 1.0e-9;
  double nu = 0.3;
};

inline XiVector to_xi_coords(const StressCase& s) {
  constexpr double inv_sqrt2 = 0.70710678118654752440;
  return {(s.s11 - s.s22) * inv_sqrt2, 2.0 * s.s12 * inv_sqrt2,
          (s.s11 + s.s22) * inv_sqrt2};
}

// Compliance of an isotropic plane-stress material in xi coordinates:
// diag(1/(2mu), 1/(2mu), 1/(2kappa)) = diag((1+nu)/E, (1+nu)/E, (1-nu)/E).
// The deviatoric block is degenerate (two equal eigenvalues), the trace axis
// carries the bulk response.
inline Eigen::Matrix3d isotropic_compliance(double e, double nu) {
  Eigen::Vector3d d((1.0 + nu) / e, (1.0 + nu) / e, (1.0 - nu) / e);
  return d.asDiagonal();
}

// Plane-stress stiffness in engineering Voigt order (11, 22, 12).
inline Eigen::Matrix3d isotropic_stiffness_voigt(double e, double nu) {
  Eigen::Matrix3d c;
  const double k = e / (1.0 - nu * nu);
  c << k, k * nu, 0.0,
       k * nu, k, 0.0,
       0.0, 0.0, k * (1.0 - nu) / 2.0;
  return c;
}

// Change of basis for quadratic forms between Voigt (11, 22, 12 with
// engineering shear) and xi coordinates.
Eigen::Matrix3d voigt_to_xi_form(const Eigen::Matrix3d& s_voigt);
Eigen::Matrix3d xi_to_voigt_form(const Eigen::Matrix3d& s_xi);

}  // namespace microlam
