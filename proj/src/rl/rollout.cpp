#include "mprl/rl/rollout.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <sstream>
#include <string>
#include <thread>

#include "mprl/error.hpp"
#include "mprl/rl/returns.hpp"

namespace mprl::rl {

void RolloutConfig::validate() const {
  require(episode_len >= 1, "rollout: episode_len must be >= 1");
  require(horizon_k >= 1 && horizon_k <= episode_len, "rollout: need 1 <= horizon_k <= episode_len");
  require(gamma > 0.0 && gamma <= 1.0, "rollout: gamma must be in (0, 1]");
  require(gae_lambda >= 0.0 && gae_lambda <= 1.0, "rollout: gae_lambda must be in [0, 1]");
  require(segments_per_batch >= 1, "rollout: segments_per_batch must be >= 1");
  require(!black_box_context_only || horizon_k == episode_len,
          "rollout: black-box mode requires horizon_k == episode_len");
}

int RolloutConfig::segments_per_episode() const {
  return (episode_len + horizon_k - 1) / horizon_k;
}

int RolloutConfig::episodes_per_batch() const {
  const int per = segments_per_episode();
  return (segments_per_batch + per - 1) / per;
}

int default_threads() {
  if (const char* v = std::getenv("MP_REPLAN_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(v, &end, 10);
    if (end != v && *end == '\0' && n >= 1) return static_cast<int>(std::min(n, 256L));
  }
  return 1;
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  // splitmix64 finalizer over a combined word
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

Eigen::VectorXd policy_input(const envs::Environment& env, const RolloutConfig& cfg) {
  return cfg.black_box_context_only ? env.context() : env.observation();
}

std::string describe(const Eigen::VectorXd& v) {
  std::ostringstream os;
  os << '[' << v.transpose() << ']';
  return os.str();
}

}  // namespace

EpisodeRecord run_episode(const nn::GaussianPolicy& policy, envs::Environment& env,
                          const RolloutSetup& setup, std::mt19937_64& rng, bool deterministic,
                          std::vector<SegmentSample>& samples,
                          std::vector<envs::TraceRow>* trace) {
  const RolloutConfig& cfg = setup.cfg;
  const MotionGenerator& motion = *setup.motion;
  require(env.episode_len() == cfg.episode_len, "run_episode: env and rollout episode_len differ");
  require(motion.param_dim() == policy.action_dim(),
          "run_episode: policy output does not match motion parameter dimension");

  EpisodeRecord rec;
  rec.first_sample = static_cast<int>(samples.size());
  env.reset(rng);
  const double dt = env.dt();
  double discount = 1.0;
  std::vector<double> rewards;
  bool done = false;

  while (!done) {
    const int t = env.step_index();
    const int len = std::min(cfg.horizon_k, cfg.episode_len - t);
    SegmentSample s;
    s.state = policy_input(env, cfg);
    s.start_step = t;
    s.horizon = len;
    s.old_dist = policy.distribution(s.state);
    s.weight = deterministic ? s.old_dist.mean : nn::sample(s.old_dist, rng);
    if (!s.weight.allFinite()) {
      throw DivergenceError("rollout: non-finite policy output at step " + std::to_string(t) +
                            ", state " + describe(s.state));
    }
    s.old_log_prob = nn::log_prob(s.old_dist, s.weight);

    mp::DesiredTrajectory plan;
    if (!motion.is_raw()) {
      plan = motion.plan(s.weight, t * dt, env.joint_positions(), env.joint_velocities(), len, dt);
    }
    rewards.clear();
    for (int j = 0; j < len; ++j) {
      Eigen::VectorXd action;
      if (motion.is_raw()) {
        action = s.weight;
      } else {
        // track the desired state one control step ahead
        action = control::pd_action(plan.pos.row(j + 1).transpose(),
                                    plan.vel.row(j + 1).transpose(), env.joint_positions(),
                                    env.joint_velocities(), setup.gains, env.action_bound());
      }
      if (!action.allFinite()) {
        throw DivergenceError("rollout: non-finite action at step " + std::to_string(t + j) +
                              ", weights " + describe(s.weight));
      }
      envs::TraceRow row;
      if (trace) {
        row.t = env.step_index();
        row.q = env.joint_positions();
        row.qd = env.joint_velocities();
        row.a = action.cwiseMax(-env.action_bound()).cwiseMin(env.action_bound());
      }
      const envs::StepResult res = env.step(action);
      rewards.push_back(res.reward);
      rec.undiscounted_return += res.reward;
      rec.discounted_return += discount * res.reward;
      discount *= cfg.gamma;
      if (trace) {
        row.r = res.reward;
        trace->push_back(std::move(row));
      }
      done = res.done;
      if (done && j + 1 < len) {
        throw PreconditionError("rollout: environment ended inside a segment");
      }
    }
    s.seg_reward = segment_reward(rewards, cfg.gamma);
    s.next_state = policy_input(env, cfg);
    s.done = done;
    s.episode_end = done;
    samples.push_back(std::move(s));
  }
  rec.num_samples = static_cast<int>(samples.size()) - rec.first_sample;
  rec.stats = env.episode_stats();
  return rec;
}

Batch collect_episodes(const nn::GaussianPolicy& policy, const RolloutSetup& setup,
                       int num_episodes, std::uint64_t seed, const CollectOptions& opts) {
  setup.cfg.validate();
  require(setup.env != nullptr && setup.motion != nullptr, "collect: incomplete rollout setup");
  require(num_episodes >= 1, "collect: need at least one episode");

  struct Slot {
    std::vector<SegmentSample> samples;
    EpisodeRecord rec;
  };
  std::vector<Slot> slots(static_cast<std::size_t>(num_episodes));
  const int workers = std::clamp(opts.threads, 1, num_episodes);

  auto work = [&](int worker, std::exception_ptr& err) {
    try {
      auto env = setup.env->clone();
      for (int e = worker; e < num_episodes; e += workers) {
        std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(e)));
        Slot& slot = slots[static_cast<std::size_t>(e)];
        slot.rec = run_episode(policy, *env, setup, rng, opts.deterministic, slot.samples);
      }
    } catch (...) {
      err = std::current_exception();
    }
  };

  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  if (workers == 1) {
    work(0, errors[0]);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w, std::ref(errors[static_cast<std::size_t>(w)]));
    for (auto& th : pool) th.join();
  }
  for (auto& err : errors)
    if (err) std::rethrow_exception(err);

  Batch batch;
  for (auto& slot : slots) {
    EpisodeRecord rec = slot.rec;
    rec.first_sample = static_cast<int>(batch.samples.size());
    batch.env_steps += rec.stats.steps;
    for (auto& s : slot.samples) batch.samples.push_back(std::move(s));
    batch.episodes.push_back(rec);
  }
  return batch;
}

Batch collect_segments(const nn::GaussianPolicy& policy, const RolloutSetup& setup,
                       std::uint64_t seed, const CollectOptions& opts) {
  setup.cfg.validate();
  return collect_episodes(policy, setup, setup.cfg.episodes_per_batch(), seed, opts);
}

}  // namespace mprl::rl
