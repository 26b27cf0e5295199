#include "microlam/laminate.hpp"

#include <cmath>

namespace microlam {

Eigen::Matrix3d voigt_to_xi_form(const Eigen::Matrix3d& s_voigt) {
  // Columns of B are the Voigt coordinates of the tensors dual to x1, x2, x3,
  // i.e. the inverse of the coordinate map applied to stress components.
  constexpr double r = 0.70710678118654752440;  // 1/sqrt(2)
  Eigen::Matrix3d b;
  b << r, 0.0, r,
      -r, 0.0, r,
       0.0, r, 0.0;
  return b.transpose() * s_voigt * b;
}

Eigen::Matrix3d xi_to_voigt_form(const Eigen::Matrix3d& s_xi) {
  constexpr double r = 0.70710678118654752440;
  Eigen::Matrix3d binv;  // inverse of the matrix above
  binv << r, -r, 0.0,
          0.0, 0.0, 2.0 * r,
          r, r, 0.0;
  return binv.transpose() * s_xi * binv;
}

Eigen::Matrix3d moment_matrix(const MomentVector& m) {
  Eigen::Matrix3d mm;
  mm << 1.0 + m.m3, m.m4, 2.0 * m.m1,
        m.m4, 1.0 - m.m3, 2.0 * m.m2,
        2.0 * m.m1, 2.0 * m.m2, 2.0;
  return 0.25 * mm;
}

const std::array<Eigen::Matrix3d, 4>& moment_matrix_derivatives() {
  static const std::array<Eigen::Matrix3d, 4> d = [] {
    std::array<Eigen::Matrix3d, 4> a;
    for (auto& x : a) x.setZero();
    a[0](0, 2) = a[0](2, 0) = 0.5;
    a[1](1, 2) = a[1](2, 1) = 0.5;
    a[2](0, 0) = 0.25;
    a[2](1, 1) = -0.25;
    a[3](0, 1) = a[3](1, 0) = 0.25;
    return a;
  }();
  return d;
}

Eigen::Matrix3d effective_compliance(const MomentVector& m, double f,
                                     const MaterialPair& mat) {
  const Eigen::Matrix3d c_plus = isotropic_compliance(mat.e_plus, mat.nu);
  const Eigen::Matrix3d c_minus = isotropic_compliance(mat.e_minus, mat.nu);
  // (C+ - C-)^{-1} is diagonal for an isotropic pair; invert entrywise to
  // avoid forming the near-singular difference product.
  Eigen::Vector3d diff = (c_plus - c_minus).diagonal();
  Eigen::Matrix3d inner = diff.cwiseInverse().asDiagonal();
  inner -= f * mat.e_plus * moment_matrix(m);
  return c_plus - (1.0 - f) * inner.inverse();
}

double complementary_energy(const MomentVector& m, double f,
                            const MaterialPair& mat, const LoadSet& loads) {
  const Eigen::Matrix3d c = effective_compliance(m, f, mat);
  double energy = 0.0;
  for (const auto& s : loads.cases()) {
    const Eigen::Vector3d x = to_xi_coords(s).vec();
    energy += 0.5 * s.weight * x.dot(c * x);
  }
  return energy;
}

FeasibilityResiduals moment_feasibility(const MomentVector& m) {
  FeasibilityResiduals r;
  r.circle = m.m1 * m.m1 + m.m2 * m.m2 - 1.0;
  r.band = std::abs(m.m3) - 1.0;
  // Fourth-moment constraint with denominators cleared:
  //   2 m1^2 (1-m3) + 2 m2^2 (1+m3) + m3^2 + (m4 - 2 m1 m2)^2/(...)  <= 1
  // becomes, after multiplying through by (1-m3^2) and regrouping,
  //   m4^2 - 4 m1 m2 m4 + 2 m1^2 (1-m3) + 2 m2^2 (1+m3) + m3^2 - 1 <= 0.
  r.boundary = m.m4 * m.m4 - 4.0 * m.m1 * m.m2 * m.m4 +
               2.0 * m.m1 * m.m1 * (1.0 - m.m3) +
               2.0 * m.m2 * m.m2 * (1.0 + m.m3) + m.m3 * m.m3 - 1.0;
  return r;
}

MomentVector moments_from_layers(const std::vector<LayerFamily>& layers) {
  MomentVector m;
  for (const auto& l : layers) {
    m.m1 += l.p * std::cos(2.0 * l.theta);
    m.m2 += l.p * std::sin(2.0 * l.theta);
    m.m3 += l.p * std::cos(4.0 * l.theta);
    m.m4 += l.p * std::sin(4.0 * l.theta);
  }
  return m;
}

}  // namespace microlam
