#ifndef MPRL_MP_PROMP_HPP_
#define MPRL_MP_PROMP_HPP_

#include <span>

#include <Eigen/Core>

#include "mprl/mp/dmp_config.hpp"
#include "mprl/mp/trajectory.hpp"

namespace mprl::mp {

// Linear basis-function model y(t) = Phi(t)^T w with normalized Gaussians
// over the phase variable. Velocity uses the analytic time derivative.
//
// num_zero_start extra Gaussians are placed at the start of the movement
// with their weights fixed at zero. They take part in the normalization but
// are not exposed, so trajectories leave y = 0 with near-zero velocity.
class ProMpBasis {
 public:
  ProMpBasis(PhaseConfig phase, int num_basis, int num_zero_start = 0);

  int num_basis() const { return num_basis_; }
  int num_zero_start() const { return static_cast<int>(layout_.centers.size()) - num_basis_; }
  const PhaseConfig& phase_config() const { return phase_; }

  Eigen::VectorXd value(double t) const;
  Eigen::VectorXd time_derivative(double t) const;

 private:
  PhaseConfig phase_;
  int num_basis_;
  RbfLayout layout_;  // N + num_zero_start centers, ascending in phase
};

// weights: D x N, one row per DoF (no goal column).
DesiredTrajectory promp_evaluate(const Eigen::MatrixXd& weights,
                                 std::span<const double> times,
                                 const ProMpBasis& basis);

// Ridge-regularized least squares fit of per-DoF weights to sampled
// positions (steps x D). Returns D x N.
Eigen::MatrixXd promp_fit(const Eigen::MatrixXd& positions, std::span<const double> times,
                          const ProMpBasis& basis, double ridge = 1e-10);

}  // namespace mprl::mp

#endif  // MPRL_MP_PROMP_HPP_
