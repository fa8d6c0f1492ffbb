#ifndef MPRL_RL_POLICY_UPDATE_HPP_
#define MPRL_RL_POLICY_UPDATE_HPP_

#include <string>
#include <vector>

#include <Eigen/Core>

#include "mprl/nn/gaussian_policy.hpp"
#include "mprl/rl/rollout.hpp"
#include "mprl/trpl/projection.hpp"

namespace mprl::rl {

enum class Algorithm { kPpoClip, kTrpl };

std::string to_string(Algorithm algo);
Algorithm algorithm_from_string(const std::string& s);

struct PolicyLossOptions {
  Algorithm algorithm = Algorithm::kTrpl;
  double clip_eps = 0.2;
  trpl::TrustRegionBounds bounds;
  double regression_coef = 1.0;
  double entropy_coef = 0.0;
};

struct PolicyLoss {
  double total = 0.0;
  double surrogate = 0.0;
  double regression = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
  double projection_active = 0.0;  // fraction of samples with an active bound
  Eigen::VectorXd grad;            // d total / d policy flat params
};

// Mean loss over the minibatch and its exact gradient. kPpoClip uses the
// clipped ratio; kTrpl evaluates the plain ratio under the projected
// distribution (projection against each sample's old_dist, differentiated
// through) and adds the regression term pulling the network toward its
// projection.
PolicyLoss surrogate_loss(const nn::GaussianPolicy& policy,
                          const std::vector<const SegmentSample*>& minibatch,
                          const Eigen::VectorXd& advantages, const PolicyLossOptions& opts);

}  // namespace mprl::rl

#endif  // MPRL_RL_POLICY_UPDATE_HPP_
