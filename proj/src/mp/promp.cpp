#include "mprl/mp/promp.hpp"

#include <Eigen/Dense>

#include "mprl/error.hpp"

namespace mprl::mp {

ProMpBasis::ProMpBasis(PhaseConfig phase, int num_basis, int num_zero_start)
    : phase_(phase), num_basis_(num_basis) {
  phase_.validate();
  require(num_basis >= 1, "ProMpBasis: need at least one basis");
  require(num_zero_start >= 0, "ProMpBasis: num_zero_start must be >= 0");
  // the movement starts at phase 1, the top of the ascending layout
  layout_ = rbf_layout(phase, num_basis + num_zero_start);
}

Eigen::VectorXd ProMpBasis::value(double t) const {
  return rbf_basis(phase(t, phase_), layout_).head(num_basis_);
}

Eigen::VectorXd ProMpBasis::time_derivative(double t) const {
  const double x = phase(t, phase_);
  const Eigen::VectorXd normalized = rbf_basis(x, layout_);
  // d/dx of phi_i / S with phi_i' = -(x - c_i) / width * phi_i; the shared
  // scale of phi cancels, so the normalized values can stand in for phi.
  const Eigen::VectorXd slope = -(x - layout_.centers.array()) / layout_.width;
  const Eigen::VectorXd d_phi = slope.cwiseProduct(normalized);
  const Eigen::VectorXd d_norm = d_phi - normalized * d_phi.sum();
  const double dx_dt = -phase_.alpha_x / phase_.tau * x;
  return d_norm.head(num_basis_) * dx_dt;
}

DesiredTrajectory promp_evaluate(const Eigen::MatrixXd& weights,
                                 std::span<const double> times,
                                 const ProMpBasis& basis) {
  require(weights.cols() == basis.num_basis(),
          "promp_evaluate: weight columns must equal num_basis");
  DesiredTrajectory traj;
  traj.times.assign(times.begin(), times.end());
  traj.pos.resize(static_cast<Eigen::Index>(times.size()), weights.rows());
  traj.vel.resize(static_cast<Eigen::Index>(times.size()), weights.rows());
  for (std::size_t i = 0; i < times.size(); ++i) {
    traj.pos.row(i) = (weights * basis.value(times[i])).transpose();
    traj.vel.row(i) = (weights * basis.time_derivative(times[i])).transpose();
  }
  return traj;
}

Eigen::MatrixXd promp_fit(const Eigen::MatrixXd& positions, std::span<const double> times,
                          const ProMpBasis& basis, double ridge) {
  require(positions.rows() == static_cast<Eigen::Index>(times.size()),
          "promp_fit: one position row per time required");
  const int n = basis.num_basis();
  Eigen::MatrixXd design(times.size(), n);
  for (std::size_t i = 0; i < times.size(); ++i) design.row(i) = basis.value(times[i]).transpose();
  const Eigen::MatrixXd gram =
      design.transpose() * design + ridge * Eigen::MatrixXd::Identity(n, n);
  // solve for every DoF at once; result is N x D
  const Eigen::MatrixXd w = gram.ldlt().solve(design.transpose() * positions);
  return w.transpose();
}

}  // namespace mprl::mp
