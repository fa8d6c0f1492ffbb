#include "mprl/control/pd_controller.hpp"

#include "mprl/error.hpp"

namespace mprl::control {

PdGains PdGains::uniform(int num_dof, double kp, double kd) {
  PdGains g{Eigen::VectorXd::Constant(num_dof, kp), Eigen::VectorXd::Constant(num_dof, kd)};
  g.validate();
  return g;
}

void PdGains::validate() const {
  require(kp.size() == kd.size(), "PdGains: kp and kd sizes differ");
  require(kp.allFinite() && kd.allFinite(), "PdGains: non-finite gain");
  require((kp.array() >= 0.0).all() && (kd.array() >= 0.0).all(),
          "PdGains: gains must be nonnegative");
}

Eigen::VectorXd pd_action(const Eigen::VectorXd& desired_pos, const Eigen::VectorXd& desired_vel,
                          const Eigen::VectorXd& measured_pos, const Eigen::VectorXd& measured_vel,
                          const PdGains& gains, double action_bound) {
  const auto d = gains.kp.size();
  if (desired_pos.size() != d || desired_vel.size() != d || measured_pos.size() != d ||
      measured_vel.size() != d || gains.kd.size() != d) {
    throw PreconditionError("pd_action: dimension mismatch");
  }
  require(action_bound >= 0.0, "pd_action: action bound must be >= 0");
  const Eigen::VectorXd raw =
      gains.kp.cwiseProduct(desired_pos - measured_pos) +
      gains.kd.cwiseProduct(desired_vel - measured_vel);
  return raw.cwiseMax(-action_bound).cwiseMin(action_bound);
}

}  // namespace mprl::control
