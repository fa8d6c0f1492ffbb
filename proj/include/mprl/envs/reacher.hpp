#ifndef MPRL_ENVS_REACHER_HPP_
#define MPRL_ENVS_REACHER_HPP_

#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mprl/envs/environment.hpp"

namespace mprl::envs {

enum class RewardKind { kDense, kSparse, kNonMarkovian };

std::string to_string(RewardKind kind);
RewardKind reward_kind_from_string(const std::string& s);

// Mid-episode goal displacement at floor(switch_fraction * T).
struct GoalSwitch {
  double switch_fraction = 0.2;
  double delta_max = 0.3;  // per-coordinate uniform displacement bound
};

struct ReacherConfig {
  int episode_len = 100;
  double dt = 0.02;
  double action_bound = 5.0;  // rad/s^2
  std::vector<double> link_lengths = std::vector<double>(5, 0.2);
  RewardKind reward = RewardKind::kDense;
  std::optional<GoalSwitch> goal_switch;
  double goal_radius_min = 0.2;
  double goal_radius_max = 0.9;
  // Per-step action cost is action_cost * sum_i (a_i / action_bound)^2, i.e.
  // squared actions in normalized [-1, 1] units. Energy statistics report
  // the raw sum of a_i^2.
  double action_cost = 1.0;
  double success_threshold = 0.05;
  double terminal_goal_weight = 200.0;
  double terminal_velocity_weight = 10.0;

  void validate() const;
  int num_joints() const { return static_cast<int>(link_lengths.size()); }
  double reach() const;
  int switch_step() const;
};

struct ReacherState {
  Eigen::VectorXd joint_pos;
  Eigen::VectorXd joint_vel;
  Eigen::Vector2d goal = Eigen::Vector2d::Zero();
  int step_index = 0;
};

// Planar chain with cumulative joint angles; returns the end-effector.
Eigen::Vector2d forward_kinematics(const Eigen::VectorXd& joint_pos,
                                   const std::vector<double>& link_lengths);
// 2 x n analytic Jacobian of forward_kinematics.
Eigen::MatrixXd fk_jacobian(const Eigen::VectorXd& joint_pos,
                            const std::vector<double>& link_lengths);

// Uniform over the upper half of the annulus [r_min, r_max].
Eigen::Vector2d sample_goal(std::mt19937_64& rng, const ReacherConfig& cfg);
// Projects a point into the sampling region (y >= 0, radius in range).
Eigen::Vector2d clip_goal(const Eigen::Vector2d& goal, const ReacherConfig& cfg);
void apply_goal_switch(ReacherState& state, std::mt19937_64& rng, const GoalSwitch& sw,
                       const ReacherConfig& cfg);

// Final-step criterion: only a terminal state within the threshold counts.
bool success(const ReacherState& state, const ReacherConfig& cfg);

// Double-integrator joints driven by accelerations; semi-implicit Euler.
class Reacher5d final : public Environment {
 public:
  explicit Reacher5d(ReacherConfig cfg = {});

  Eigen::VectorXd reset(std::mt19937_64& rng) override;
  StepResult step(const Eigen::VectorXd& action) override;

  int observation_dim() const override;
  int action_dim() const override { return cfg_.num_joints(); }
  int context_dim() const override { return 2; }
  Eigen::VectorXd observation() const override;
  Eigen::VectorXd context() const override { return state_.goal; }
  Eigen::VectorXd joint_positions() const override { return state_.joint_pos; }
  Eigen::VectorXd joint_velocities() const override { return state_.joint_vel; }

  int episode_len() const override { return cfg_.episode_len; }
  int step_index() const override { return state_.step_index; }
  double dt() const override { return cfg_.dt; }
  double action_bound() const override { return cfg_.action_bound; }
  EpisodeStats episode_stats() const override;

  std::unique_ptr<Environment> clone() const override;

  const ReacherConfig& config() const { return cfg_; }
  const ReacherState& state() const { return state_; }
  Eigen::Vector2d end_effector() const;
  double goal_distance() const;
  // Test hook: place the arm and goal directly.
  void set_state(const ReacherState& s);

 private:
  ReacherConfig cfg_;
  ReacherState state_;
  std::mt19937_64 switch_rng_;
  double energy_ = 0.0;
  double min_distance_ = 0.0;
};

// One row per step: t, q1..qn, qd1..qdn, a1..an, r.
struct TraceRow {
  int t = 0;
  Eigen::VectorXd q;
  Eigen::VectorXd qd;
  Eigen::VectorXd a;
  double r = 0.0;
};
void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows);
// Inverse of write_trace_csv; throws FormatError with the line number.
std::vector<TraceRow> read_trace_csv(std::istream& in);

}  // namespace mprl::envs

#endif  // MPRL_ENVS_REACHER_HPP_
