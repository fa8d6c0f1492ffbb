#ifndef MPRL_RL_RETURNS_HPP_
#define MPRL_RL_RETURNS_HPP_

#include <span>
#include <vector>

#include <Eigen/Core>

namespace mprl::rl {

// Discounted in-segment sum: sum_i gamma^i r_i.
double segment_reward(std::span<const double> step_rewards, double gamma);

// One planning segment of an episode: steps [start, start + length).
struct SegmentReward {
  int start = 0;
  int length = 1;
  double reward = 0.0;
};

// Segment lengths tiling an episode of T steps with horizon k; the last
// segment is shorter when k does not divide T.
std::vector<int> segment_lengths(int episode_len, int horizon);

// sum_j gamma^{start_j} R_j over segments that tile [0, episode_len)
// contiguously. episode_len < 0 skips the coverage check at the end.
double episode_return(const std::vector<SegmentReward>& segments, double gamma,
                      int episode_len = -1);

struct GaeResult {
  Eigen::VectorXd advantages;
  Eigen::VectorXd targets;  // advantages + values
};

// GAE over one episode of n segments. values has n + 1 entries, the last
// being the bootstrap value (zero for a terminal end). discounts[i] is the
// discount between segment i and i + 1, gamma^{k_i}.
GaeResult gae_advantages(const Eigen::VectorXd& seg_rewards, const Eigen::VectorXd& values,
                         const Eigen::VectorXd& discounts, double lambda);
GaeResult gae_advantages(const Eigen::VectorXd& seg_rewards, const Eigen::VectorXd& values,
                         double gamma_eff, double lambda);

}  // namespace mprl::rl

#endif  // MPRL_RL_RETURNS_HPP_
