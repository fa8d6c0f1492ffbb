#ifndef MPRL_RL_TRAINER_HPP_
#define MPRL_RL_TRAINER_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mprl/envs/reacher.hpp"
#include "mprl/nn/adam.hpp"
#include "mprl/nn/checkpoint.hpp"
#include "mprl/nn/gaussian_policy.hpp"
#include "mprl/nn/mlp.hpp"
#include "mprl/rl/motion.hpp"
#include "mprl/rl/policy_update.hpp"
#include "mprl/rl/rollout.hpp"

namespace mprl::rl {

struct TrainConfig {
  envs::ReacherConfig env;
  RolloutConfig rollout;
  MotionConfig motion;  // num_dof and duration follow the env
  double pd_kp = 100.0;
  double pd_kd = 20.0;

  PolicyLossOptions loss;
  std::vector<int> policy_hidden{64, 64};
  std::vector<int> value_hidden{64, 64};
  nn::Activation activation = nn::Activation::kTanh;
  double init_log_std = 0.0;
  double policy_lr = 3e-4;
  double value_lr = 3e-4;
  double max_grad_norm = 0.5;
  int epochs = 10;
  int minibatch = 64;
  bool normalize_advantages = true;

  std::int64_t total_env_steps = 200000;
  int eval_every = 0;  // iterations; 0 disables
  int eval_episodes = 10;
  int checkpoint_every = 0;  // iterations; 0 writes only the final checkpoint
  std::uint64_t seed = 0;
  int threads = 1;
  bool wall_clock = false;  // record wall_ms (breaks byte-identical metrics)

  // Fills fields derived from other sections and checks cross-field rules.
  void finalize();
  void validate() const;
  int policy_input_dim() const;
  std::int64_t steps_per_iteration() const;
  int num_iterations() const;
};

struct EvalSummary {
  int episodes = 0;
  double mean_return = 0.0;
  double success_rate = 0.0;
  double mean_final_distance = 0.0;
  double mean_energy = 0.0;
  std::vector<double> returns;
  std::vector<double> final_distances;
  std::vector<double> energies;
  std::vector<bool> successes;
};

EvalSummary summarize(const Batch& batch);

struct IterationMetrics {
  int iter = 0;
  std::int64_t env_steps = 0;
  double mean_return = 0.0;
  double success_rate = 0.0;
  double kl = 0.0;
  double entropy = 0.0;
  double wall_ms = 0.0;
  double final_distance = 0.0;
  double energy = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double projection_active = 0.0;
  std::optional<EvalSummary> eval;
};

// One JSON object per line.
std::string to_json_line(const IterationMetrics& m, bool wall_clock);

class Trainer {
 public:
  explicit Trainer(TrainConfig cfg);

  const TrainConfig& config() const { return cfg_; }
  const nn::GaussianPolicy& policy() const { return policy_; }
  const nn::Mlp& value_net() const { return value_; }
  const RolloutSetup& setup() const { return setup_; }
  int iteration() const { return iter_; }
  std::int64_t env_steps() const { return env_steps_; }

  // One collect / advantage / update cycle.
  IterationMetrics step();

  // Runs the remaining iterations. With a non-empty out_dir, appends
  // metrics.jsonl and writes checkpoint.bin (periodically and at the end).
  std::vector<IterationMetrics> run(const std::string& out_dir = "",
                                    const std::function<void(const IterationMetrics&)>& on_iter = {});

  EvalSummary evaluate(int episodes, bool deterministic, std::uint64_t seed) const;

  nn::Checkpoint checkpoint(const std::string& config_text = "") const;
  void restore(const nn::Checkpoint& ckpt);

  // Embedded in checkpoints so evaluation can rebuild the setup.
  void set_config_text(std::string text) { config_text_ = std::move(text); }

 private:
  void check_finite(const char* what, double loss, const std::string& out_dir) const;

  TrainConfig cfg_;
  envs::Reacher5d env_;
  MotionGenerator motion_;
  RolloutSetup setup_;
  nn::GaussianPolicy policy_;
  nn::Mlp value_;
  nn::Adam policy_opt_;
  nn::Adam value_opt_;
  int iter_ = 0;
  std::int64_t env_steps_ = 0;
  std::string config_text_;
  std::string out_dir_;
};

}  // namespace mprl::rl

#endif  // MPRL_RL_TRAINER_HPP_
