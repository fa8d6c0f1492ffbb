#ifndef MPRL_MP_BASIS_SET_HPP_
#define MPRL_MP_BASIS_SET_HPP_

#include <string>

#include <Eigen/Core>

#include "mprl/mp/dmp_config.hpp"

namespace mprl::mp {

// Precomputed position/velocity bases on a uniform grid over [0, tau].
//
// Column j < N of pos_basis is y2 * p2_j - y1 * p1_j, the last column is
// y2 * q2 - y1 * q1; vel_basis uses dy1, dy2 in place of y1, y2. p1 and p2
// are cumulative trapezoid integrals of their integrands, so every row at
// t = 0 is zero.
struct MpBasisSet {
  DmpConfig config;
  Eigen::VectorXd time_grid;
  Eigen::MatrixXd pos_basis;  // grid_len x (N + 1)
  Eigen::MatrixXd vel_basis;  // grid_len x (N + 1)
  Eigen::VectorXd y1, y2, dy1, dy2;
  Eigen::MatrixXd p1, p2;  // grid_len x N
  Eigen::VectorXd q1, q2;

  Eigen::Index grid_len() const { return time_grid.size(); }
  double spacing() const { return time_grid[1] - time_grid[0]; }
  double t_end() const { return time_grid[time_grid.size() - 1]; }
  int num_columns() const { return static_cast<int>(pos_basis.cols()); }
};

MpBasisSet precompute_basis_set(const DmpConfig& cfg, int grid_len);

// Basis rows at an arbitrary time. Grid points are returned exactly;
// between grid points the rows are linearly interpolated.
struct BasisRows {
  Eigen::RowVectorXd pos;
  Eigen::RowVectorXd vel;
};
BasisRows basis_rows_at(const MpBasisSet& basis, double t);

// Flat little-endian binary: magic, alpha, beta, alpha_x, tau (f64),
// N, grid_len (u64), then the row-major tables as f64.
void save_basis_set(const std::string& path, const MpBasisSet& basis);
MpBasisSet load_basis_set(const std::string& path);

}  // namespace mprl::mp

#endif  // MPRL_MP_BASIS_SET_HPP_
