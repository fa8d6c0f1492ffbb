#include "mprl/rl/policy_update.hpp"

#include <cmath>

#include "mprl/error.hpp"
#include "mprl/rl/losses.hpp"

namespace mprl::rl {

std::string to_string(Algorithm algo) {
  return algo == Algorithm::kPpoClip ? "ppo_clip" : "trpl";
}

Algorithm algorithm_from_string(const std::string& s) {
  if (s == "ppo_clip") return Algorithm::kPpoClip;
  if (s == "trpl") return Algorithm::kTrpl;
  throw PreconditionError("unknown algorithm '" + s + "' (ppo_clip, trpl)");
}

PolicyLoss surrogate_loss(const nn::GaussianPolicy& policy,
                          const std::vector<const SegmentSample*>& minibatch,
                          const Eigen::VectorXd& advantages, const PolicyLossOptions& opts) {
  const auto n = static_cast<Eigen::Index>(minibatch.size());
  require(n > 0, "surrogate_loss: empty minibatch");
  require(advantages.size() == n, "surrogate_loss: one advantage per sample required");
  const int in_dim = policy.spec().input_dim;
  const int k = policy.action_dim();

  Eigen::MatrixXd states(in_dim, n);
  Eigen::VectorXd lp_old(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const SegmentSample& s = *minibatch[static_cast<std::size_t>(i)];
    require(s.state.size() == in_dim && s.weight.size() == k,
            "surrogate_loss: sample does not match the policy dimensions");
    states.col(i) = s.state;
    lp_old[i] = s.old_log_prob;
  }
  nn::Mlp::Cache cache;
  const Eigen::MatrixXd means = policy.means(states, cache);
  const Eigen::VectorXd log_std = policy.clamped_log_std();
  const bool trpl_mode = opts.algorithm == Algorithm::kTrpl;

  std::vector<nn::DiagGaussian> net(static_cast<std::size_t>(n));
  std::vector<trpl::Projection> proj;
  if (trpl_mode) proj.resize(static_cast<std::size_t>(n));
  Eigen::VectorXd lp_new(n);
  PolicyLoss out;
  int active = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    net[u] = {means.col(i), log_std};
    if (trpl_mode) {
      proj[u] = trpl::project_policy(net[u], minibatch[u]->old_dist, opts.bounds);
      if (proj[u].mean_active || proj[u].cov_active) ++active;
      lp_new[i] = nn::log_prob(proj[u].dist, minibatch[u]->weight);
    } else {
      lp_new[i] = nn::log_prob(net[u], minibatch[u]->weight);
    }
  }

  const SurrogateTerms terms = trpl_mode
                                   ? importance_surrogate(lp_new, lp_old, advantages)
                                   : ppo_clip_surrogate(lp_new, lp_old, advantages, opts.clip_eps);
  out.surrogate = terms.loss;
  out.clip_fraction = terms.clip_fraction;
  out.projection_active = static_cast<double>(active) / static_cast<double>(n);

  Eigen::MatrixXd d_mean = Eigen::MatrixXd::Zero(k, n);
  Eigen::VectorXd d_log_std = Eigen::VectorXd::Zero(k);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    const double w = terms.d_log_prob[i];
    if (trpl_mode) {
      const LogProbGrad g = log_prob_grad(proj[u].dist, minibatch[u]->weight);
      const trpl::ProjectionGrad pg = trpl::project_policy_backward(
          proj[u], net[u], minibatch[u]->old_dist, w * g.d_mean, w * g.d_log_std);
      d_mean.col(i) += pg.d_mean;
      d_log_std += pg.d_log_std;
      if (opts.regression_coef > 0.0) {
        const trpl::RegressionLoss reg = trpl::trust_region_regression_loss(proj[u].dist, net[u]);
        const double c = opts.regression_coef / static_cast<double>(n);
        out.regression += c * reg.loss;
        d_mean.col(i) += c * reg.d_mean;
        d_log_std += c * reg.d_log_std;
      }
    } else {
      const LogProbGrad g = log_prob_grad(net[u], minibatch[u]->weight);
      d_mean.col(i) += w * g.d_mean;
      d_log_std += w * g.d_log_std;
    }
  }

  // state-independent std: entropy is sum(log_std) + const
  out.entropy = nn::entropy(net.front());
  if (opts.entropy_coef != 0.0) d_log_std.array() -= opts.entropy_coef;

  out.total = out.surrogate + out.regression - opts.entropy_coef * out.entropy;
  out.grad = policy.backward(cache, d_mean, d_log_std);
  return out;
}

}  // namespace mprl::rl
