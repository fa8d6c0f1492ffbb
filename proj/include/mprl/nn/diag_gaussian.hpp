#ifndef MPRL_NN_DIAG_GAUSSIAN_HPP_
#define MPRL_NN_DIAG_GAUSSIAN_HPP_

#include <random>

#include <Eigen/Core>

namespace mprl::nn {

inline constexpr double kMinLogStd = -20.0;
inline constexpr double kMaxLogStd = 2.0;

// Gaussian with diagonal covariance, parameterized by mean and log std.
struct DiagGaussian {
  Eigen::VectorXd mean;
  Eigen::VectorXd log_std;

  Eigen::Index dim() const { return mean.size(); }
  Eigen::VectorXd std() const { return log_std.array().exp(); }
  Eigen::VectorXd variance() const { return (2.0 * log_std.array()).exp(); }
  void validate() const;
};

double log_prob(const DiagGaussian& dist, const Eigen::VectorXd& sample);
double entropy(const DiagGaussian& dist);
Eigen::VectorXd sample(const DiagGaussian& dist, std::mt19937_64& rng);

// KL(p || q) split into the part driven by the means and the part driven by
// the variances; total() is their sum.
struct KlParts {
  double mean_part = 0.0;
  double cov_part = 0.0;
  double total() const { return mean_part + cov_part; }
};
KlParts kl_diag(const DiagGaussian& p, const DiagGaussian& q);

}  // namespace mprl::nn

#endif  // MPRL_NN_DIAG_GAUSSIAN_HPP_
