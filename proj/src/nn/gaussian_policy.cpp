#include "mprl/nn/gaussian_policy.hpp"

#include "mprl/error.hpp"

namespace mprl::nn {

GaussianPolicy::GaussianPolicy(MlpSpec mean_spec, double init_log_std)
    : mean_net_(std::move(mean_spec)),
      log_std_(Eigen::VectorXd::Constant(mean_net_.spec().output_dim, init_log_std)) {}

void GaussianPolicy::initialize(std::mt19937_64& rng, double output_gain) {
  mean_net_.initialize(rng, output_gain);
}

Eigen::VectorXd GaussianPolicy::flat_params() const {
  Eigen::VectorXd p(num_params());
  p << mean_net_.params(), log_std_;
  return p;
}

void GaussianPolicy::set_flat_params(const Eigen::VectorXd& p) {
  require(p.size() == num_params(), "GaussianPolicy::set_flat_params: size mismatch");
  mean_net_.set_params(p.head(mean_net_.num_params()));
  log_std_ = p.tail(action_dim());
}

Eigen::VectorXd GaussianPolicy::clamped_log_std() const {
  return log_std_.cwiseMax(kMinLogStd).cwiseMin(kMaxLogStd);
}

DiagGaussian GaussianPolicy::distribution(const Eigen::VectorXd& state) const {
  return {mean_net_.forward_one(state), clamped_log_std()};
}

Eigen::MatrixXd GaussianPolicy::means(const Eigen::MatrixXd& states) const {
  return mean_net_.forward(states);
}

Eigen::MatrixXd GaussianPolicy::means(const Eigen::MatrixXd& states, Mlp::Cache& cache) const {
  return mean_net_.forward(states, cache);
}

Eigen::VectorXd GaussianPolicy::backward(const Mlp::Cache& cache, const Eigen::MatrixXd& d_mean,
                                         const Eigen::VectorXd& d_log_std) const {
  require(d_log_std.size() == action_dim(), "GaussianPolicy::backward: log_std grad size");
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(num_params());
  Eigen::VectorXd net_grad = Eigen::VectorXd::Zero(mean_net_.num_params());
  mean_net_.backward(cache, d_mean, net_grad);
  grad.head(mean_net_.num_params()) = net_grad;
  for (int k = 0; k < action_dim(); ++k) {
    const bool inside = log_std_[k] >= kMinLogStd && log_std_[k] <= kMaxLogStd;
    grad[mean_net_.num_params() + k] = inside ? d_log_std[k] : 0.0;
  }
  return grad;
}

}  // namespace mprl::nn
