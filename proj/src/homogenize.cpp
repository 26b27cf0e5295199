#include "microlam/homogenize.hpp"

#include <stdexcept>

namespace microlam {

double simp_modulus(double rho, const MaterialPair& mat) {
  return mat.e_minus + rho * rho * rho * (mat.e_plus - mat.e_minus);
}

double simp_modulus_derivative(double rho, const MaterialPair& mat) {
  return 3.0 * rho * rho * (mat.e_plus - mat.e_minus);
}

Homogenizer::Homogenizer(int nx, int ny, const Eigen::Matrix2d& basis,
                         const MaterialPair& mat)
    : nx_(nx), ny_(ny), mat_(mat) {
  if (nx < 2 || ny < 2) throw std::invalid_argument("mesh too coarse");
  const double area = basis.determinant();
  if (area <= 0.0) throw std::invalid_argument("basis must be right-handed");

  // Congruent elements: one stiffness template serves the whole mesh.
  const Eigen::Vector2d h1 = basis.col(0) / nx;
  const Eigen::Vector2d h2 = basis.col(1) / ny;
  Eigen::Matrix2d jac;
  jac.col(0) = 0.5 * h1;  // d x / d xi on [-1,1]^2
  jac.col(1) = 0.5 * h2;
  const double detj = jac.determinant();
  const Eigen::Matrix2d jinv_t = jac.inverse().transpose();
  const Eigen::Matrix3d c1 = isotropic_stiffness_voigt(1.0, mat.nu);

  k0_.setZero();
  f0_.setZero();
  const double gp = 1.0 / std::sqrt(3.0);
  for (int gx = 0; gx < 2; ++gx) {
    for (int gy = 0; gy < 2; ++gy) {
      const double xi = gp * (2 * gx - 1), eta = gp * (2 * gy - 1);
      // node order: (-1,-1), (1,-1), (1,1), (-1,1)
      const double dn_dxi[4] = {-(1 - eta) / 4, (1 - eta) / 4, (1 + eta) / 4,
                                -(1 + eta) / 4};
      const double dn_deta[4] = {-(1 - xi) / 4, -(1 + xi) / 4, (1 + xi) / 4,
                                 (1 - xi) / 4};
      Eigen::Matrix<double, 3, 8> b = Eigen::Matrix<double, 3, 8>::Zero();
      for (int a = 0; a < 4; ++a) {
        const Eigen::Vector2d g =
            jinv_t * Eigen::Vector2d(dn_dxi[a], dn_deta[a]);
        b(0, 2 * a) = g.x();
        b(1, 2 * a + 1) = g.y();
        b(2, 2 * a) = g.y();
        b(2, 2 * a + 1) = g.x();
      }
      k0_ += b.transpose() * c1 * b * detj;
      f0_ += b.transpose() * c1 * detj;
    }
  }

  // Nodal displacements that realize the unit strains exactly; affine fields
  // are reproduced by the bilinear basis on parallelograms.
  const Eigen::Vector2d nodes[4] = {Eigen::Vector2d::Zero(), h1, h1 + h2, h2};
  for (int a = 0; a < 4; ++a) {
    const double x = nodes[a].x(), y = nodes[a].y();
    chi0_(2 * a, 0) = x;
    chi0_(2 * a + 1, 0) = 0.0;
    chi0_(2 * a, 1) = 0.0;
    chi0_(2 * a + 1, 1) = y;
    chi0_(2 * a, 2) = 0.5 * y;
    chi0_(2 * a + 1, 2) = 0.5 * x;
  }

  // Periodic connectivity, node (i, j) with wrapped neighbors; node (0, 0)
  // is pinned, its dofs are eliminated from the system.
  const int n_red = 2 * nx * ny - 2;
  auto dof = [&](int i, int j, int c) {
    const int node = (j % ny) * nx + (i % nx);
    return 2 * node + c - 2;  // < 0 for the pinned node
  };
  dofs_.resize(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      auto& d = dofs_[static_cast<std::size_t>(j) * nx + i];
      const int ni[4] = {i, i + 1, i + 1, i};
      const int nj[4] = {j, j, j + 1, j + 1};
      for (int a = 0; a < 4; ++a) {
        d[2 * a] = dof(ni[a], nj[a], 0);
        d[2 * a + 1] = dof(ni[a], nj[a], 1);
      }
    }

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(dofs_.size() * 64);
  for (const auto& d : dofs_)
    for (int a = 0; a < 8; ++a)
      for (int b = 0; b < 8; ++b)
        if (d[a] >= 0 && d[b] >= 0) trips.emplace_back(d[a], d[b], 1.0);
  k_.resize(n_red, n_red);
  k_.setFromTriplets(trips.begin(), trips.end());
  k_.makeCompressed();

  // Value-slot lookup so reassembly only rewrites the value array.
  slots_.resize(dofs_.size());
  for (std::size_t e = 0; e < dofs_.size(); ++e) {
    const auto& d = dofs_[e];
    for (int a = 0; a < 8; ++a)
      for (int b = 0; b < 8; ++b) {
        int s = -1;
        if (d[a] >= 0 && d[b] >= 0) {
          const int col = d[b];
          for (int it = k_.outerIndexPtr()[col]; it < k_.outerIndexPtr()[col + 1];
               ++it)
            if (k_.innerIndexPtr()[it] == d[a]) {
              s = it;
              break;
            }
        }
        slots_[e][8 * a + b] = s;
      }
  }
  q_.resize(dofs_.size());
}

const Eigen::Matrix3d& Homogenizer::homogenize(const Eigen::VectorXd& rho) {
  if (rho.size() != element_count())
    throw std::invalid_argument("density size mismatch");
  rho_ = rho;

  double* vals = k_.valuePtr();
  std::fill(vals, vals + k_.nonZeros(), 0.0);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(k_.rows(), 3);
  for (std::size_t e = 0; e < dofs_.size(); ++e) {
    const double ee = simp_modulus(rho[e], mat_);
    const auto& slot = slots_[e];
    for (int a = 0; a < 8; ++a)
      for (int b = 0; b < 8; ++b)
        if (slot[8 * a + b] >= 0) vals[slot[8 * a + b]] += ee * k0_(a, b);
    const auto& d = dofs_[e];
    for (int a = 0; a < 8; ++a)
      if (d[a] >= 0) rhs.row(d[a]) += ee * f0_.row(a);
  }

  if (!analyzed_) {
    solver_.analyzePattern(k_);
    analyzed_ = true;
  }
  solver_.factorize(k_);
  if (solver_.info() != Eigen::Success)
    throw std::runtime_error("stiffness factorization failed");
  chi_ = solver_.solve(rhs);

  c_hom_.setZero();
  Eigen::Matrix<double, 8, 3> u;
  for (std::size_t e = 0; e < dofs_.size(); ++e) {
    const auto& d = dofs_[e];
    for (int a = 0; a < 8; ++a)
      for (int c = 0; c < 3; ++c)
        u(a, c) = chi0_(a, c) - (d[a] >= 0 ? chi_(d[a], c) : 0.0);
    q_[e] = u.transpose() * (k0_ * u);
    c_hom_ += simp_modulus(rho[e], mat_) * q_[e];
  }
  // Cell area is one, so no volume normalization is needed; symmetrize away
  // roundoff.
  c_hom_ = (0.5 * (c_hom_ + c_hom_.transpose())).eval();
  return c_hom_;
}

double Homogenizer::complementary_energy(const LoadSet& loads) const {
  const Eigen::Matrix3d s = c_hom_.inverse();
  double energy = 0.0;
  for (const auto& c : loads.cases()) {
    const Eigen::Vector3d sv(c.s11, c.s22, c.s12);
    energy += 0.5 * c.weight * sv.dot(s * sv);
  }
  return energy;
}

Eigen::VectorXd Homogenizer::energy_gradient(const LoadSet& loads) const {
  const Eigen::Matrix3d s = c_hom_.inverse();
  // d(1/2 sigma:C^-1:sigma) = -1/2 eps : dC : eps with eps = C^-1 sigma
  std::vector<Eigen::Vector3d> eps;
  std::vector<double> w;
  for (const auto& c : loads.cases()) {
    eps.push_back(s * Eigen::Vector3d(c.s11, c.s22, c.s12));
    w.push_back(c.weight);
  }
  Eigen::VectorXd g(element_count());
  for (std::size_t e = 0; e < q_.size(); ++e) {
    double acc = 0.0;
    for (std::size_t j = 0; j < eps.size(); ++j)
      acc += 0.5 * w[j] * eps[j].dot(q_[e] * eps[j]);
    g[e] = -simp_modulus_derivative(rho_[e], mat_) * acc;
  }
  return g;
}

}  // namespace microlam
