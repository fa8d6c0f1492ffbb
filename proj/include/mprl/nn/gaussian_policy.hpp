#ifndef MPRL_NN_GAUSSIAN_POLICY_HPP_
#define MPRL_NN_GAUSSIAN_POLICY_HPP_

#include <random>

#include <Eigen/Core>

#include "mprl/nn/diag_gaussian.hpp"
#include "mprl/nn/mlp.hpp"

namespace mprl::nn {

// State-conditioned mean network plus a state-independent learned log std.
// Flat parameters: [mean network parameters, log_std].
class GaussianPolicy {
 public:
  GaussianPolicy() = default;
  GaussianPolicy(MlpSpec mean_spec, double init_log_std = 0.0);

  void initialize(std::mt19937_64& rng, double output_gain = 0.01);

  const MlpSpec& spec() const { return mean_net_.spec(); }
  int action_dim() const { return mean_net_.spec().output_dim; }
  int num_params() const { return mean_net_.num_params() + action_dim(); }

  Eigen::VectorXd flat_params() const;
  void set_flat_params(const Eigen::VectorXd& p);

  const Mlp& mean_net() const { return mean_net_; }
  // Raw parameter; distributions use the clamped value.
  const Eigen::VectorXd& log_std_param() const { return log_std_; }
  Eigen::VectorXd clamped_log_std() const;

  DiagGaussian distribution(const Eigen::VectorXd& state) const;
  // K x B means for a column batch of states.
  Eigen::MatrixXd means(const Eigen::MatrixXd& states) const;
  Eigen::MatrixXd means(const Eigen::MatrixXd& states, Mlp::Cache& cache) const;

  // Flat gradient from dL/dmean (K x B, matching the cached forward) and
  // dL/dlog_std (K, summed over the batch). Clamped log std entries get no
  // gradient.
  Eigen::VectorXd backward(const Mlp::Cache& cache, const Eigen::MatrixXd& d_mean,
                           const Eigen::VectorXd& d_log_std) const;

 private:
  Mlp mean_net_;
  Eigen::VectorXd log_std_;
};

}  // namespace mprl::nn

#endif  // MPRL_NN_GAUSSIAN_POLICY_HPP_
