#ifndef MPRL_RL_ROLLOUT_HPP_
#define MPRL_RL_ROLLOUT_HPP_

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "mprl/control/pd_controller.hpp"
#include "mprl/envs/environment.hpp"
#include "mprl/envs/reacher.hpp"
#include "mprl/nn/diag_gaussian.hpp"
#include "mprl/nn/gaussian_policy.hpp"
#include "mprl/rl/motion.hpp"

namespace mprl::rl {

struct RolloutConfig {
  int horizon_k = 100;
  int episode_len = 100;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  int segments_per_batch = 64;
  // policy input is the context only; requires horizon_k == episode_len
  bool black_box_context_only = false;

  void validate() const;
  int segments_per_episode() const;
  int episodes_per_batch() const;
};

// One policy decision and the k environment steps it controlled.
struct SegmentSample {
  Eigen::VectorXd state;
  Eigen::VectorXd weight;
  double seg_reward = 0.0;
  int horizon = 1;  // steps actually executed
  int start_step = 0;
  Eigen::VectorXd next_state;
  bool done = false;  // terminal: no bootstrap past this segment
  bool episode_end = false;
  double old_log_prob = 0.0;
  nn::DiagGaussian old_dist;
};

struct EpisodeRecord {
  int first_sample = 0;
  int num_samples = 0;
  double undiscounted_return = 0.0;
  double discounted_return = 0.0;
  envs::EpisodeStats stats;
};

struct Batch {
  std::vector<SegmentSample> samples;
  std::vector<EpisodeRecord> episodes;
  std::int64_t env_steps = 0;
};

// Worker count from MP_REPLAN_THREADS (default 1).
int default_threads();

// Stateless 64-bit mixer for deriving independent seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

struct CollectOptions {
  bool deterministic = false;  // act with the mean
  int threads = 1;
};

// Fixed setup shared by every rollout.
struct RolloutSetup {
  const envs::Environment* env = nullptr;  // prototype, cloned per worker
  const MotionGenerator* motion = nullptr;
  control::PdGains gains;
  RolloutConfig cfg;
};

// Runs a single episode on env (reset with rng). Appends its samples and
// optionally the per-step trace.
EpisodeRecord run_episode(const nn::GaussianPolicy& policy, envs::Environment& env,
                          const RolloutSetup& setup, std::mt19937_64& rng, bool deterministic,
                          std::vector<SegmentSample>& samples,
                          std::vector<envs::TraceRow>* trace = nullptr);

// Collects whole episodes until at least segments_per_batch samples exist.
// Episode e is seeded with mix_seed(seed, e), so the batch does not depend
// on the worker count.
Batch collect_segments(const nn::GaussianPolicy& policy, const RolloutSetup& setup,
                       std::uint64_t seed, const CollectOptions& opts = {});

// Same seeding, a fixed number of episodes.
Batch collect_episodes(const nn::GaussianPolicy& policy, const RolloutSetup& setup,
                       int num_episodes, std::uint64_t seed, const CollectOptions& opts = {});

}  // namespace mprl::rl

#endif  // MPRL_RL_ROLLOUT_HPP_
