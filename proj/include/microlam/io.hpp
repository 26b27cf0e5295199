#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

#include "microlam/reconstruct.hpp"
#include "microlam/topopt.hpp"
#include "microlam/unitcell.hpp"

namespace microlam {

// Binary 8-bit PGM. Densities are element values in [0,1], element (i,j) at
// index j*nx+i with j increasing upward; rows are written top first. By
// default material is white on black (0 = void); invert for dark material.
void write_pgm(const std::filesystem::path& path, const Eigen::VectorXd& rho,
               int nx, int ny, bool invert = false);

// 2x2 tiling of the cell with the outline of the first tile drawn at 50%
// gray so the periodic unit is visible.
void write_pgm_tiled(const std::filesystem::path& path,
                     const Eigen::VectorXd& rho, int nx, int ny,
                     bool invert = false);

// Flat CSV: "nx,ny" header line, then one value per line in element order
// (index j*nx+i).
void write_field_csv(const std::filesystem::path& path,
                     const Eigen::VectorXd& rho, int nx, int ny);

void write_iteration_log(const std::filesystem::path& path,
                         const std::vector<IterationRecord>& history);

// Laminate summary: weights, angles, stiff widths, moments, rotation angle,
// cell geometry and the energy bound.
void write_laminate_json(const std::filesystem::path& path,
                         const Rank3Laminate& lam, const MomentVector& m,
                         double gamma, double f, double bound,
                         const ParallelogramCell& cell);

std::string format_double(double v);

}  // namespace microlam
