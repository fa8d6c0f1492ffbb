#ifndef MPRL_ENVS_ENVIRONMENT_HPP_
#define MPRL_ENVS_ENVIRONMENT_HPP_

#include <memory>
#include <random>

#include <Eigen/Core>

namespace mprl::envs {

struct StepResult {
  Eigen::VectorXd observation;
  double reward = 0.0;
  bool done = false;
};

// Summary of the episode so far.
struct EpisodeStats {
  bool success = false;
  double final_distance = 0.0;
  double energy = 0.0;  // sum over steps of sum_i a_i^2
  int steps = 0;
};

// Episodic control task with proprioceptive joint state. Instances are
// single-threaded; parallel rollouts clone one per worker.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual Eigen::VectorXd reset(std::mt19937_64& rng) = 0;
  virtual StepResult step(const Eigen::VectorXd& action) = 0;

  virtual int observation_dim() const = 0;
  virtual int action_dim() const = 0;
  virtual int context_dim() const = 0;
  virtual Eigen::VectorXd observation() const = 0;
  // Task-defining part of the observation (fixed unless the task changes).
  virtual Eigen::VectorXd context() const = 0;
  virtual Eigen::VectorXd joint_positions() const = 0;
  virtual Eigen::VectorXd joint_velocities() const = 0;

  virtual int episode_len() const = 0;
  virtual int step_index() const = 0;
  virtual double dt() const = 0;
  virtual double action_bound() const = 0;
  virtual EpisodeStats episode_stats() const = 0;

  virtual std::unique_ptr<Environment> clone() const = 0;
};

}  // namespace mprl::envs

#endif  // MPRL_ENVS_ENVIRONMENT_HPP_
