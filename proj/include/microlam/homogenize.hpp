#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <vector>

#include "microlam/tensors.hpp"

namespace microlam {

// SIMP material law on the stiff/weak pair: E(rho) = e- + rho^3 (e+ - e-).
double simp_modulus(double rho, const MaterialPair& mat);
double simp_modulus_derivative(double rho, const MaterialPair& mat);

// Periodic homogenization of a parallelogram unit cell meshed with nx x ny
// congruent bilinear quadrilaterals. The basis matrix holds the cell vectors
// as columns; the cell must have unit area. Element (i, j) spans
// [i/nx,(i+1)/nx] x [j/ny,(j+1)/ny] in cell coordinates, element index
// e = j*nx + i. Opposite faces are identified; one corner node is pinned to
// remove the translational null space.
class Homogenizer {
 public:
  Homogenizer(int nx, int ny, const Eigen::Matrix2d& basis,
              const MaterialPair& mat);

  // Assembles, factorizes and solves for the three unit test strains, then
  // forms the homogenized stiffness (Voigt, engineering shear) by mutual
  // energies. rho holds physical densities in [0, 1] per element.
  const Eigen::Matrix3d& homogenize(const Eigen::VectorXd& rho);

  // Weighted complementary energy of the last homogenized tensor.
  double complementary_energy(const LoadSet& loads) const;

  // d energy / d rho_e for the last homogenize() call. Self-adjoint: no
  // extra solves.
  Eigen::VectorXd energy_gradient(const LoadSet& loads) const;

  const Eigen::Matrix3d& last_stiffness() const { return c_hom_; }
  const Eigen::Matrix<double, 8, 8>& unit_element_stiffness() const {
    return k0_;
  }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int element_count() const { return nx_ * ny_; }

 private:
  int nx_, ny_;
  MaterialPair mat_;
  Eigen::Matrix<double, 8, 8> k0_;   // element stiffness at unit modulus
  Eigen::Matrix<double, 8, 3> f0_;   // element loads of the unit strains
  Eigen::Matrix<double, 8, 3> chi0_; // element displacements of unit strains
  std::vector<std::array<int, 8>> dofs_;    // global dof per element slot
  std::vector<std::array<int, 64>> slots_;  // value index in K per (i,j)
  Eigen::SparseMatrix<double> k_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver_;
  bool analyzed_ = false;
  Eigen::MatrixXd chi_;      // reduced solution, one column per unit strain
  Eigen::VectorXd rho_;      // densities of the last call
  Eigen::Matrix3d c_hom_;
  std::vector<Eigen::Matrix3d> q_;  // per-element mutual energy at unit E
};

}  // namespace microlam
