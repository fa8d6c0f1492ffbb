#ifndef MPRL_RL_FRAME_SKIP_HPP_
#define MPRL_RL_FRAME_SKIP_HPP_

#include <memory>

#include "mprl/envs/environment.hpp"

namespace mprl::rl {

// Step-based baseline that holds each action for `repeat` inner steps. The
// returned reward is the in-segment discounted sum, as for planning
// segments; the last decision is shorter when repeat does not divide T.
class FrameSkip final : public envs::Environment {
 public:
  FrameSkip(std::unique_ptr<envs::Environment> inner, int repeat, double gamma = 1.0);

  Eigen::VectorXd reset(std::mt19937_64& rng) override;
  envs::StepResult step(const Eigen::VectorXd& action) override;

  int observation_dim() const override { return inner_->observation_dim(); }
  int action_dim() const override { return inner_->action_dim(); }
  int context_dim() const override { return inner_->context_dim(); }
  Eigen::VectorXd observation() const override { return inner_->observation(); }
  Eigen::VectorXd context() const override { return inner_->context(); }
  Eigen::VectorXd joint_positions() const override { return inner_->joint_positions(); }
  Eigen::VectorXd joint_velocities() const override { return inner_->joint_velocities(); }

  // Counted in decisions: ceil(T / repeat).
  int episode_len() const override;
  int step_index() const override { return decisions_; }
  double dt() const override { return inner_->dt() * repeat_; }
  double action_bound() const override { return inner_->action_bound(); }
  envs::EpisodeStats episode_stats() const override { return inner_->episode_stats(); }

  std::unique_ptr<envs::Environment> clone() const override;

  int repeat() const { return repeat_; }
  const envs::Environment& inner() const { return *inner_; }

 private:
  std::unique_ptr<envs::Environment> inner_;
  int repeat_;
  double gamma_;
  int decisions_ = 0;
};

}  // namespace mprl::rl

#endif  // MPRL_RL_FRAME_SKIP_HPP_
