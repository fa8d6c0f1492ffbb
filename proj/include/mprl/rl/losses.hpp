#ifndef MPRL_RL_LOSSES_HPP_
#define MPRL_RL_LOSSES_HPP_

#include <Eigen/Core>

#include "mprl/nn/diag_gaussian.hpp"

namespace mprl::rl {

// Loss plus its gradient with respect to each sample's new log probability.
struct SurrogateTerms {
  double loss = 0.0;
  Eigen::VectorXd d_log_prob;
  double clip_fraction = 0.0;
};

// -mean(min(rho A, clip(rho, 1 - eps, 1 + eps) A)), rho = exp(lp_new - lp_old).
SurrogateTerms ppo_clip_surrogate(const Eigen::VectorXd& log_prob_new,
                                  const Eigen::VectorXd& log_prob_old,
                                  const Eigen::VectorXd& advantages, double clip_eps);

// -mean(rho A); the trust region is enforced by the projection instead.
SurrogateTerms importance_surrogate(const Eigen::VectorXd& log_prob_new,
                                    const Eigen::VectorXd& log_prob_old,
                                    const Eigen::VectorXd& advantages);

struct ValueLoss {
  double loss = 0.0;
  Eigen::VectorXd d_pred;  // 2 (V - G) / n
};
ValueLoss value_loss(const Eigen::VectorXd& predicted, const Eigen::VectorXd& targets);

// Zero mean, unit std; a single element or zero spread only centers.
Eigen::VectorXd normalize_advantages(const Eigen::VectorXd& adv);

// Gradient of log N(x; mean, exp(log_std)^2) with respect to mean and log std.
struct LogProbGrad {
  Eigen::VectorXd d_mean;
  Eigen::VectorXd d_log_std;
};
LogProbGrad log_prob_grad(const nn::DiagGaussian& dist, const Eigen::VectorXd& x);

}  // namespace mprl::rl

#endif  // MPRL_RL_LOSSES_HPP_
