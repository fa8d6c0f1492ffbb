#ifndef MPRL_CONTROL_PD_CONTROLLER_HPP_
#define MPRL_CONTROL_PD_CONTROLLER_HPP_

#include <limits>

#include <Eigen/Core>

namespace mprl::control {

struct PdGains {
  Eigen::VectorXd kp;
  Eigen::VectorXd kd;

  static PdGains uniform(int num_dof, double kp, double kd);
  void validate() const;
};

// Tracking law a = kp (y_d - y) + kd (yd_d - yd), clamped elementwise to
// [-action_bound, action_bound].
Eigen::VectorXd pd_action(const Eigen::VectorXd& desired_pos, const Eigen::VectorXd& desired_vel,
                          const Eigen::VectorXd& measured_pos, const Eigen::VectorXd& measured_vel,
                          const PdGains& gains,
                          double action_bound = std::numeric_limits<double>::infinity());

}  // namespace mprl::control

#endif  // MPRL_CONTROL_PD_CONTROLLER_HPP_
