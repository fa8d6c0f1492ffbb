#include "mprl/rl/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "mprl/error.hpp"
#include "mprl/rl/losses.hpp"
#include "mprl/rl/returns.hpp"

namespace mprl::rl {

namespace {

constexpr std::uint64_t kInitStream = 0x1001;
constexpr std::uint64_t kCollectStream = 0x2002;
constexpr std::uint64_t kShuffleStream = 0x3003;
constexpr std::uint64_t kEvalStream = 0x4004;

nn::MlpSpec make_spec(int in, const std::vector<int>& hidden, int out, nn::Activation act) {
  nn::MlpSpec s;
  s.input_dim = in;
  s.hidden_dims = hidden;
  s.output_dim = out;
  s.activation = act;
  return s;
}

nn::Adam::Options adam_options(double lr, double clip) {
  nn::Adam::Options o;
  o.lr = lr;
  o.max_grad_norm = clip;
  return o;
}

Eigen::MatrixXd stack_states(const std::vector<SegmentSample>& samples, bool next) {
  const Eigen::Index dim = samples.front().state.size();
  Eigen::MatrixXd m(dim, static_cast<Eigen::Index>(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i)
    m.col(static_cast<Eigen::Index>(i)) = next ? samples[i].next_state : samples[i].state;
  return m;
}

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

void TrainConfig::finalize() {
  env.validate();
  rollout.episode_len = env.episode_len;
  motion.num_dof = env.num_joints();
  motion.duration = env.episode_len * env.dt;
  if (rollout.black_box_context_only) rollout.horizon_k = env.episode_len;
}

void TrainConfig::validate() const {
  env.validate();
  rollout.validate();
  motion.validate();
  loss.bounds.validate();
  require(rollout.episode_len == env.episode_len, "train: rollout and env episode_len differ");
  require(motion.num_dof == env.num_joints(), "train: motion num_dof must match env joints");
  require(std::abs(motion.duration - env.episode_len * env.dt) < 1e-9,
          "train: motion duration must equal episode_len * dt");
  require(pd_kp >= 0.0 && pd_kd >= 0.0, "train: PD gains must be >= 0");
  require(loss.clip_eps > 0.0 && loss.clip_eps < 1.0, "train: clip_eps must be in (0, 1)");
  require(loss.regression_coef >= 0.0, "train: regression_coef must be >= 0");
  for (int h : policy_hidden) require(h >= 1, "train: policy hidden sizes must be >= 1");
  for (int h : value_hidden) require(h >= 1, "train: value hidden sizes must be >= 1");
  require(init_log_std >= nn::kMinLogStd && init_log_std <= nn::kMaxLogStd,
          "train: init_log_std outside [-20, 2]");
  require(policy_lr >= 0.0 && value_lr >= 0.0, "train: learning rates must be >= 0");
  require(max_grad_norm >= 0.0, "train: max_grad_norm must be >= 0");
  require(epochs >= 1, "train: epochs must be >= 1");
  require(minibatch >= 1, "train: minibatch must be >= 1");
  require(total_env_steps >= 1, "train: total_env_steps must be >= 1");
  require(eval_every >= 0 && eval_episodes >= 1, "train: need eval_every >= 0, eval_episodes >= 1");
  require(checkpoint_every >= 0, "train: checkpoint_every must be >= 0");
  require(threads >= 1, "train: threads must be >= 1");
}

int TrainConfig::policy_input_dim() const {
  envs::Reacher5d probe(env);
  return rollout.black_box_context_only ? probe.context_dim() : probe.observation_dim();
}

std::int64_t TrainConfig::steps_per_iteration() const {
  return static_cast<std::int64_t>(rollout.episodes_per_batch()) * env.episode_len;
}

int TrainConfig::num_iterations() const {
  const std::int64_t per = steps_per_iteration();
  return static_cast<int>((total_env_steps + per - 1) / per);
}

EvalSummary summarize(const Batch& batch) {
  EvalSummary s;
  s.episodes = static_cast<int>(batch.episodes.size());
  for (const auto& e : batch.episodes) {
    s.returns.push_back(e.undiscounted_return);
    s.final_distances.push_back(e.stats.final_distance);
    s.energies.push_back(e.stats.energy);
    s.successes.push_back(e.stats.success);
  }
  s.mean_return = mean_of(s.returns);
  s.mean_final_distance = mean_of(s.final_distances);
  s.mean_energy = mean_of(s.energies);
  s.success_rate = s.episodes == 0 ? 0.0
                                   : static_cast<double>(std::count(s.successes.begin(),
                                                                    s.successes.end(), true)) /
                                         s.episodes;
  return s;
}

std::string to_json_line(const IterationMetrics& m, bool wall_clock) {
  nlohmann::ordered_json j;
  j["iter"] = m.iter;
  j["env_steps"] = m.env_steps;
  j["mean_return"] = m.mean_return;
  j["success_rate"] = m.success_rate;
  j["kl"] = m.kl;
  j["entropy"] = m.entropy;
  j["wall_ms"] = wall_clock ? m.wall_ms : 0.0;
  j["final_distance"] = m.final_distance;
  j["energy"] = m.energy;
  j["policy_loss"] = m.policy_loss;
  j["value_loss"] = m.value_loss;
  j["projection_active"] = m.projection_active;
  if (m.eval) {
    j["eval_return"] = m.eval->mean_return;
    j["eval_success_rate"] = m.eval->success_rate;
    j["eval_final_distance"] = m.eval->mean_final_distance;
    j["eval_energy"] = m.eval->mean_energy;
  }
  return j.dump();
}

Trainer::Trainer(TrainConfig cfg)
    : cfg_([&] {
        cfg.finalize();
        cfg.validate();
        return cfg;
      }()),
      env_(cfg_.env),
      motion_(cfg_.motion),
      policy_(make_spec(cfg_.policy_input_dim(), cfg_.policy_hidden, motion_.param_dim(),
                        cfg_.activation),
              cfg_.init_log_std),
      value_(make_spec(cfg_.policy_input_dim(), cfg_.value_hidden, 1, cfg_.activation)),
      policy_opt_(policy_.num_params(), adam_options(cfg_.policy_lr, cfg_.max_grad_norm)),
      value_opt_(value_.num_params(), adam_options(cfg_.value_lr, cfg_.max_grad_norm)) {
  setup_.env = &env_;
  setup_.motion = &motion_;
  setup_.gains = control::PdGains::uniform(cfg_.env.num_joints(), cfg_.pd_kp, cfg_.pd_kd);
  setup_.cfg = cfg_.rollout;
  std::mt19937_64 rng(mix_seed(cfg_.seed, kInitStream));
  policy_.initialize(rng, 0.01);
  value_.initialize(rng, 1.0);
}

void Trainer::check_finite(const char* what, double loss, const std::string& out_dir) const {
  if (std::isfinite(loss) && policy_.flat_params().allFinite() && value_.params().allFinite())
    return;
  std::string where;
  if (!out_dir.empty()) {
    where = (std::filesystem::path(out_dir) / "diverged.bin").string();
    nn::Checkpoint c = checkpoint(config_text_);
    c.metadata["diverged_at"] = what;
    save_checkpoint(where, c);
  }
  throw DivergenceError(std::string("training diverged (") + what + " = " + std::to_string(loss) +
                        ") at iteration " + std::to_string(iter_) +
                        (where.empty() ? "" : "; state dumped to " + where));
}

IterationMetrics Trainer::step() {
  const auto t0 = std::chrono::steady_clock::now();
  CollectOptions copts;
  copts.threads = cfg_.threads;
  Batch batch = collect_segments(
      policy_, setup_, mix_seed(cfg_.seed, mix_seed(kCollectStream, static_cast<std::uint64_t>(iter_))),
      copts);
  const auto n = static_cast<Eigen::Index>(batch.samples.size());

  // advantages per episode over the segment-level MDP
  const Eigen::VectorXd v_state = value_.forward(stack_states(batch.samples, false)).row(0).transpose();
  const Eigen::VectorXd v_next = value_.forward(stack_states(batch.samples, true)).row(0).transpose();
  Eigen::VectorXd advantages(n);
  Eigen::VectorXd targets(n);
  for (const auto& ep : batch.episodes) {
    const int m = ep.num_samples;
    Eigen::VectorXd rewards(m);
    Eigen::VectorXd values(m + 1);
    Eigen::VectorXd discounts(m);
    for (int i = 0; i < m; ++i) {
      const SegmentSample& s = batch.samples[static_cast<std::size_t>(ep.first_sample + i)];
      rewards[i] = s.seg_reward;
      values[i] = v_state[ep.first_sample + i];
      discounts[i] = std::pow(cfg_.rollout.gamma, s.horizon);
    }
    const SegmentSample& last = batch.samples[static_cast<std::size_t>(ep.first_sample + m - 1)];
    values[m] = last.done ? 0.0 : v_next[ep.first_sample + m - 1];
    const GaeResult g = gae_advantages(rewards, values, discounts, cfg_.rollout.gae_lambda);
    advantages.segment(ep.first_sample, m) = g.advantages;
    targets.segment(ep.first_sample, m) = g.targets;
  }
  if (cfg_.normalize_advantages) advantages = normalize_advantages(advantages);

  IterationMetrics met;
  std::vector<std::size_t> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 shuffle_rng(
      mix_seed(cfg_.seed, mix_seed(kShuffleStream, static_cast<std::uint64_t>(iter_))));
  const Eigen::MatrixXd all_states = stack_states(batch.samples, false);
  double policy_loss_sum = 0.0;
  double value_loss_sum = 0.0;
  double active_sum = 0.0;
  int updates = 0;
  for (int epoch = 0; epoch < cfg_.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    for (std::size_t begin = 0; begin < order.size(); begin += static_cast<std::size_t>(cfg_.minibatch)) {
      const std::size_t end = std::min(order.size(), begin + static_cast<std::size_t>(cfg_.minibatch));
      const auto b = static_cast<Eigen::Index>(end - begin);
      std::vector<const SegmentSample*> mb;
      Eigen::VectorXd adv(b);
      Eigen::VectorXd tgt(b);
      Eigen::MatrixXd states(all_states.rows(), b);
      for (Eigen::Index i = 0; i < b; ++i) {
        const std::size_t idx = order[begin + static_cast<std::size_t>(i)];
        mb.push_back(&batch.samples[idx]);
        adv[i] = advantages[static_cast<Eigen::Index>(idx)];
        tgt[i] = targets[static_cast<Eigen::Index>(idx)];
        states.col(i) = all_states.col(static_cast<Eigen::Index>(idx));
      }

      const PolicyLoss pl = surrogate_loss(policy_, mb, adv, cfg_.loss);
      check_finite("policy loss", pl.total, out_dir_);
      Eigen::VectorXd pp = policy_.flat_params();
      policy_opt_.step(pp, pl.grad);
      policy_.set_flat_params(pp);

      nn::Mlp::Cache cache;
      const Eigen::VectorXd pred = value_.forward(states, cache).row(0).transpose();
      const ValueLoss vl = value_loss(pred, tgt);
      check_finite("value loss", vl.loss, out_dir_);
      Eigen::VectorXd vgrad = Eigen::VectorXd::Zero(value_.num_params());
      value_.backward(cache, vl.d_pred.transpose(), vgrad);
      value_opt_.step(value_.params(), vgrad);

      policy_loss_sum += pl.total;
      value_loss_sum += vl.loss;
      active_sum += pl.projection_active;
      ++updates;
    }
  }

  // KL of the updated network to the behavior distribution
  const Eigen::MatrixXd new_means = policy_.means(all_states);
  const Eigen::VectorXd log_std = policy_.clamped_log_std();
  double kl = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    kl += nn::kl_diag(nn::DiagGaussian{new_means.col(i), log_std},
                      batch.samples[static_cast<std::size_t>(i)].old_dist)
              .total();
  }

  ++iter_;
  env_steps_ += batch.env_steps;
  const EvalSummary train_summary = summarize(batch);
  met.iter = iter_;
  met.env_steps = env_steps_;
  met.mean_return = train_summary.mean_return;
  met.success_rate = train_summary.success_rate;
  met.final_distance = train_summary.mean_final_distance;
  met.energy = train_summary.mean_energy;
  met.kl = kl / static_cast<double>(n);
  met.entropy = nn::entropy(nn::DiagGaussian{new_means.col(0), log_std});
  met.policy_loss = policy_loss_sum / updates;
  met.value_loss = value_loss_sum / updates;
  met.projection_active = active_sum / updates;
  if (cfg_.eval_every > 0 && iter_ % cfg_.eval_every == 0) {
    met.eval = evaluate(cfg_.eval_episodes, true,
                        mix_seed(cfg_.seed, mix_seed(kEvalStream, static_cast<std::uint64_t>(iter_))));
  }
  met.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return met;
}

std::vector<IterationMetrics> Trainer::run(
    const std::string& out_dir, const std::function<void(const IterationMetrics&)>& on_iter) {
  out_dir_ = out_dir;
  std::ofstream metrics;
  std::string ckpt_path;
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    const auto metrics_path = std::filesystem::path(out_dir) / "metrics.jsonl";
    // a fresh run truncates; a resumed run appends after the restored iteration
    metrics.open(metrics_path, iter_ == 0 ? std::ios::trunc : std::ios::app);
    if (!metrics) throw std::runtime_error("cannot open " + metrics_path.string());
    ckpt_path = (std::filesystem::path(out_dir) / "checkpoint.bin").string();
  }
  std::vector<IterationMetrics> all;
  const int total = cfg_.num_iterations();
  while (iter_ < total) {
    IterationMetrics m = step();
    if (metrics.is_open()) {
      metrics << to_json_line(m, cfg_.wall_clock) << '\n';
      metrics.flush();
    }
    if (!ckpt_path.empty() && cfg_.checkpoint_every > 0 && iter_ % cfg_.checkpoint_every == 0)
      nn::save_checkpoint(ckpt_path, checkpoint(config_text_));
    if (on_iter) on_iter(m);
    all.push_back(std::move(m));
  }
  if (!ckpt_path.empty()) nn::save_checkpoint(ckpt_path, checkpoint(config_text_));
  return all;
}

EvalSummary Trainer::evaluate(int episodes, bool deterministic, std::uint64_t seed) const {
  require(episodes >= 1, "evaluate: episodes must be >= 1");
  CollectOptions opts;
  opts.deterministic = deterministic;
  opts.threads = cfg_.threads;
  return summarize(collect_episodes(policy_, setup_, episodes, seed, opts));
}

nn::Checkpoint Trainer::checkpoint(const std::string& config_text) const {
  nn::Checkpoint c;
  c.policy_spec = policy_.spec();
  c.policy_params = policy_.flat_params();
  c.value_spec = value_.spec();
  c.value_params = value_.params();
  c.policy_opt = policy_opt_.state();
  c.value_opt = value_opt_.state();
  c.metadata["iteration"] = std::to_string(iter_);
  c.metadata["env_steps"] = std::to_string(env_steps_);
  c.metadata["seed"] = std::to_string(cfg_.seed);
  if (!config_text.empty()) c.metadata["config"] = config_text;
  return c;
}

void Trainer::restore(const nn::Checkpoint& c) {
  if (c.policy_spec.to_string() != policy_.spec().to_string() ||
      c.value_spec.to_string() != value_.spec().to_string()) {
    throw FormatError("checkpoint network shapes (" + c.policy_spec.to_string() + ", " +
                      c.value_spec.to_string() + ") do not match the config (" +
                      policy_.spec().to_string() + ", " + value_.spec().to_string() + ")");
  }
  policy_.set_flat_params(c.policy_params);
  value_.set_params(c.value_params);
  if (c.policy_opt.m.size() == policy_.num_params()) policy_opt_.set_state(c.policy_opt);
  if (c.value_opt.m.size() == value_.num_params()) value_opt_.set_state(c.value_opt);
  auto get = [&](const char* key) -> std::int64_t {
    const auto it = c.metadata.find(key);
    return it == c.metadata.end() ? 0 : std::stoll(it->second);
  };
  iter_ = static_cast<int>(get("iteration"));
  env_steps_ = get("env_steps");
}

}  // namespace mprl::rl
