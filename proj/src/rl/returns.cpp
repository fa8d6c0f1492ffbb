#include "mprl/rl/returns.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mprl/error.hpp"

namespace mprl::rl {

double segment_reward(std::span<const double> step_rewards, double gamma) {
  require(!step_rewards.empty(), "segment_reward: empty segment");
  require(gamma > 0.0 && gamma <= 1.0, "segment_reward: gamma must be in (0, 1]");
  double sum = 0.0;
  double g = 1.0;
  for (double r : step_rewards) {
    sum += g * r;
    g *= gamma;
  }
  return sum;
}

std::vector<int> segment_lengths(int episode_len, int horizon) {
  require(episode_len >= 1, "segment_lengths: episode_len must be >= 1");
  require(horizon >= 1 && horizon <= episode_len, "segment_lengths: need 1 <= k <= T");
  std::vector<int> out;
  for (int start = 0; start < episode_len; start += horizon)
    out.push_back(std::min(horizon, episode_len - start));
  return out;
}

double episode_return(const std::vector<SegmentReward>& segments, double gamma,
                      int episode_len) {
  require(!segments.empty(), "episode_return: no segments");
  require(gamma > 0.0 && gamma <= 1.0, "episode_return: gamma must be in (0, 1]");
  int expected_start = 0;
  double total = 0.0;
  for (const auto& s : segments) {
    require(s.length >= 1, "episode_return: segment length must be >= 1");
    if (s.start != expected_start) {
      throw PreconditionError(
          "episode_return: segments do not tile the episode (expected start " +
          std::to_string(expected_start) + ", got " + std::to_string(s.start) + ")");
    }
    total += std::pow(gamma, s.start) * s.reward;
    expected_start += s.length;
  }
  if (episode_len >= 0 && expected_start != episode_len) {
    throw PreconditionError("episode_return: segments cover " + std::to_string(expected_start) +
                            " steps, episode has " + std::to_string(episode_len));
  }
  return total;
}

GaeResult gae_advantages(const Eigen::VectorXd& seg_rewards, const Eigen::VectorXd& values,
                         const Eigen::VectorXd& discounts, double lambda) {
  const Eigen::Index n = seg_rewards.size();
  require(values.size() == n + 1, "gae_advantages: values must have one more entry than rewards");
  require(discounts.size() == n, "gae_advantages: one discount per segment required");
  require(lambda >= 0.0 && lambda <= 1.0, "gae_advantages: lambda must be in [0, 1]");
  GaeResult out;
  out.advantages.resize(n);
  double acc = 0.0;
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    const double delta = seg_rewards[i] + discounts[i] * values[i + 1] - values[i];
    acc = delta + discounts[i] * lambda * acc;
    out.advantages[i] = acc;
  }
  out.targets = out.advantages + values.head(n);
  return out;
}

GaeResult gae_advantages(const Eigen::VectorXd& seg_rewards, const Eigen::VectorXd& values,
                         double gamma_eff, double lambda) {
  require(gamma_eff > 0.0 && gamma_eff <= 1.0, "gae_advantages: gamma_eff must be in (0, 1]");
  return gae_advantages(seg_rewards, values,
                        Eigen::VectorXd::Constant(seg_rewards.size(), gamma_eff), lambda);
}

}  // namespace mprl::rl
