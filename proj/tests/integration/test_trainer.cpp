#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "mprl/config/run_config.hpp"
#include "mprl/nn/checkpoint.hpp"
#include "mprl/rl/trainer.hpp"
#include "mprl/stats/stats.hpp"
#include "../unit/test_util.hpp"

namespace mprl::rl {
namespace {

const char* kSmallBb =
    "[env]\nreward = sparse\n"
    "[mp]\ntype = promp\nnum_basis = 2\n"
    "[rollout]\nhorizon_k = 100\nblack_box = true\ngamma = 1.0\nsegments_per_batch = 16\n"
    "[algo]\nname = trpl\n"
    "[net]\npolicy_hidden = 16,16\nvalue_hidden = 16,16\n"
    "[optim]\nepochs = 3\nminibatch = 8\n"
    "[train]\ntotal_env_steps = 6400\neval_every = 2\neval_episodes = 4\n";

const char* kSmallReplan =
    "[env]\nreward = dense\n"
    "[mp]\ntype = prodmp\nnum_basis = 2\n"
    "[rollout]\nhorizon_k = 25\nsegments_per_batch = 32\n"
    "[algo]\nname = trpl\n"
    "[net]\npolicy_hidden = 16,16\nvalue_hidden = 16,16\n"
    "[optim]\nepochs = 2\nminibatch = 16\n"
    "[train]\ntotal_env_steps = 3200\n";

TrainConfig config(const std::string& text) {
  std::istringstream in(text);
  return config::resolve(config::parse_ini(in, "test.ini")).train;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(Trainer, FixedSeedGivesIdenticalMetricStream) {
  for (const char* text : {kSmallBb, kSmallReplan}) {
    const auto dir = test::temp_dir("trainer_det");
    Trainer a(config(text));
    Trainer b(config(text));
    a.run((dir / "a").string());
    b.run((dir / "b").string());
    const std::string ma = slurp((dir / "a" / "metrics.jsonl").string());
    EXPECT_FALSE(ma.empty());
    EXPECT_EQ(ma, slurp((dir / "b" / "metrics.jsonl").string()));
    EXPECT_EQ(a.policy().flat_params(), b.policy().flat_params());
  }
}

TEST(Trainer, DifferentSeedsDiverge) {
  TrainConfig c1 = config(kSmallBb);
  TrainConfig c2 = c1;
  c2.seed = 1;
  Trainer a(c1);
  Trainer b(c2);
  EXPECT_NE(a.step().mean_return, b.step().mean_return);
}

TEST(Trainer, ThreadCountDoesNotChangeResults) {
  TrainConfig c1 = config(kSmallReplan);
  TrainConfig c3 = c1;
  c3.threads = 3;
  Trainer a(c1);
  Trainer b(c3);
  a.run();
  b.run();
  EXPECT_EQ(a.policy().flat_params(), b.policy().flat_params());
}

TEST(Trainer, ZeroLearningRateLeavesPolicyUnchanged) {
  for (const char* text : {kSmallBb, kSmallReplan}) {
    TrainConfig cfg = config(text);
    cfg.policy_lr = 0.0;
    Trainer t(cfg);
    const Eigen::VectorXd before = t.policy().flat_params();
    const IterationMetrics m = t.step();
    EXPECT_EQ(t.policy().flat_params(), before);
    EXPECT_NEAR(m.kl, 0.0, 1e-12);
  }
}

TEST(Trainer, IterationBookkeeping) {
  const TrainConfig cfg = config(kSmallBb);
  Trainer t(cfg);
  const auto all = t.run();
  ASSERT_EQ(static_cast<int>(all.size()), cfg.num_iterations());
  EXPECT_EQ(t.env_steps(), cfg.total_env_steps);
  EXPECT_EQ(all.back().env_steps, cfg.total_env_steps);
  for (const auto& m : all) {
    EXPECT_EQ(m.eval.has_value(), m.iter % 2 == 0) << m.iter;
    EXPECT_GE(m.kl, 0.0);
    EXPECT_LE(m.mean_return, 0.0);
  }
}

TEST(Trainer, ResumeMatchesUninterruptedRun) {
  const auto dir = test::temp_dir("trainer_resume");
  const TrainConfig full = config(kSmallBb);
  Trainer straight(full);
  straight.run((dir / "straight").string());

  TrainConfig half = full;
  half.total_env_steps = full.total_env_steps / 2;
  Trainer first(half);
  first.run((dir / "split").string());
  Trainer second(full);
  second.restore(nn::load_checkpoint((dir / "split" / "checkpoint.bin").string()));
  EXPECT_EQ(second.iteration(), half.num_iterations());
  second.run((dir / "split").string());

  EXPECT_EQ(second.policy().flat_params(), straight.policy().flat_params());
  EXPECT_EQ(slurp((dir / "split" / "metrics.jsonl").string()),
            slurp((dir / "straight" / "metrics.jsonl").string()));
}

TEST(Trainer, CheckpointRestoresEvaluation) {
  Trainer a(config(kSmallReplan));
  a.step();
  Trainer b(config(kSmallReplan));
  b.restore(a.checkpoint());
  const EvalSummary ea = a.evaluate(5, true, 3);
  const EvalSummary eb = b.evaluate(5, true, 3);
  EXPECT_EQ(ea.returns, eb.returns);
  EXPECT_EQ(ea.final_distances, eb.final_distances);
}

TEST(Trainer, DenseStepBasedTrainingReducesFinalDistance) {
  TrainConfig cfg = config(
      "[env]\nreward = dense\n"
      "[mp]\ntype = raw\n"
      "[rollout]\nhorizon_k = 1\ngamma = 0.99\ngae_lambda = 0.95\nsegments_per_batch = 4000\n"
      "[algo]\nname = ppo_clip\nclip_eps = 0.2\n"
      "[net]\npolicy_hidden = 32,32\nvalue_hidden = 32,32\ninit_log_std = 0\n"
      "[optim]\npolicy_lr = 1e-3\nvalue_lr = 3e-3\nepochs = 10\nminibatch = 128\n"
      "[train]\ntotal_env_steps = 200000\nseed = 1\n");
  Trainer t(cfg);
  const auto all = t.run();
  std::vector<double> dist;
  for (const auto& m : all) dist.push_back(m.final_distance);
  // mean final distance over consecutive blocks of 10 iterations
  std::vector<double> blocks;
  for (std::size_t i = 0; i + 10 <= dist.size(); i += 10)
    blocks.push_back(stats::mean(std::vector<double>(dist.begin() + i, dist.begin() + i + 10)));
  ASSERT_GE(blocks.size(), 2u);
  for (std::size_t i = 1; i < blocks.size(); ++i)
    EXPECT_LT(blocks[i], blocks[i - 1]) << "block " << i;
  // 5-iteration smoothed window at the end against the start
  const auto window = [&](std::size_t from) {
    return stats::mean(std::vector<double>(dist.begin() + from, dist.begin() + from + 5));
  };
  EXPECT_LT(window(dist.size() - 5), 0.5 * window(0));
}

}  // namespace
}  // namespace mprl::rl
