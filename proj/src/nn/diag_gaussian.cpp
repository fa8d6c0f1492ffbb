#include "mprl/nn/diag_gaussian.hpp"

#include <cmath>
#include <numbers>

#include "mprl/error.hpp"

namespace mprl::nn {

void DiagGaussian::validate() const {
  require(mean.size() == log_std.size(), "DiagGaussian: mean/log_std size mismatch");
  require(log_std.allFinite(), "DiagGaussian: non-finite log_std");
}

double log_prob(const DiagGaussian& dist, const Eigen::VectorXd& x) {
  require(x.size() == dist.dim(), "log_prob: dimension mismatch");
  const Eigen::ArrayXd z = (x - dist.mean).array() * (-dist.log_std.array()).exp();
  const double log_2pi = std::log(2.0 * std::numbers::pi);
  return -0.5 * z.square().sum() - dist.log_std.sum() -
         0.5 * log_2pi * static_cast<double>(dist.dim());
}

double entropy(const DiagGaussian& dist) {
  const double per_dim = 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e);
  return dist.log_std.sum() + per_dim * static_cast<double>(dist.dim());
}

Eigen::VectorXd sample(const DiagGaussian& dist, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd out(dist.dim());
  for (Eigen::Index i = 0; i < out.size(); ++i)
    out[i] = dist.mean[i] + std::exp(dist.log_std[i]) * normal(rng);
  return out;
}

KlParts kl_diag(const DiagGaussian& p, const DiagGaussian& q) {
  require(p.dim() == q.dim(), "kl_diag: dimension mismatch");
  const Eigen::ArrayXd var_q = (2.0 * q.log_std.array()).exp();
  const Eigen::ArrayXd ratio = (2.0 * (p.log_std - q.log_std).array()).exp();
  KlParts kl;
  kl.mean_part = 0.5 * ((p.mean - q.mean).array().square() / var_q).sum();
  // log(sq/sp) + sp^2/(2 sq^2) - 1/2
  kl.cov_part = ((q.log_std - p.log_std).array() + 0.5 * ratio - 0.5).sum();
  return kl;
}

}  // namespace mprl::nn
