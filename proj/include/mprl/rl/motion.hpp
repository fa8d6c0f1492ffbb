#ifndef MPRL_RL_MOTION_HPP_
#define MPRL_RL_MOTION_HPP_

#include <memory>
#include <string>

#include <Eigen/Core>

#include "mprl/mp/basis_set.hpp"
#include "mprl/mp/dmp_config.hpp"
#include "mprl/mp/promp.hpp"
#include "mprl/mp/trajectory.hpp"

namespace mprl::rl {

// kRaw skips trajectory generation: the parameters are the action itself,
// held for the whole segment (frame skipping when k > 1).
enum class MpType { kProDmp, kDmp, kProMp, kRaw };

std::string to_string(MpType type);
MpType mp_type_from_string(const std::string& s);

struct MotionConfig {
  MpType type = MpType::kProDmp;
  int num_dof = 5;
  int num_basis = 5;
  int promp_zero_start = 2;  // padded start bases for promp
  // slow decay spaces the ProMP bases nearly uniformly in time
  double promp_alpha_x = 0.5;
  double alpha = 25.0;
  double alpha_x = 3.0;
  double duration = 2.0;  // seconds, spans the whole episode
  int grid_len = 1001;
  double weight_scale = 1.0;  // policy output -> shape weight
  double goal_scale = 1.0;    // policy output -> goal offset (rad)
  // DMP types: the goal is an offset from the replanning position. ProMP:
  // the trajectory is shifted to start at the replanning position.
  bool relative_goal = true;

  void validate() const;
};

// Maps a policy parameter vector to a desired joint trajectory starting at
// the measured state. Immutable after construction, so one instance is
// shared by all rollout workers.
class MotionGenerator {
 public:
  explicit MotionGenerator(MotionConfig cfg);

  const MotionConfig& config() const { return cfg_; }
  bool is_raw() const { return cfg_.type == MpType::kRaw; }
  // Policy output dimension K.
  int param_dim() const;

  // Desired states at t_b + i * dt for i = 0..steps.
  mp::DesiredTrajectory plan(const Eigen::VectorXd& params, double t_b,
                             const Eigen::VectorXd& y_b, const Eigen::VectorXd& dy_b,
                             int steps, double dt) const;

  // Scaled shape weights and absolute goals for the DMP-family types.
  mp::WeightVector weights(const Eigen::VectorXd& params, const Eigen::VectorXd& y_b) const;

 private:
  MotionConfig cfg_;
  mp::DmpConfig dmp_;
  std::shared_ptr<const mp::MpBasisSet> basis_;
  std::shared_ptr<const mp::ProMpBasis> promp_;
};

}  // namespace mprl::rl

#endif  // MPRL_RL_MOTION_HPP_
