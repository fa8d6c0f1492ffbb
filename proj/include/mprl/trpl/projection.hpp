#ifndef MPRL_TRPL_PROJECTION_HPP_
#define MPRL_TRPL_PROJECTION_HPP_

#include <Eigen/Core>

#include "mprl/nn/diag_gaussian.hpp"

namespace mprl::trpl {

struct TrustRegionBounds {
  double eps_mean = 0.005;
  double eps_cov = 0.0005;

  void validate() const;
};

// Mean part of the KL divergence under the old covariance:
// 1/2 sum (mu - mu_old)^2 / sigma_old^2.
double mean_distance(const Eigen::VectorXd& mu, const Eigen::VectorXd& mu_old,
                     const Eigen::VectorXd& sigma_old);

// Covariance part of KL(N(., sigma) || N(., sigma_old)) for diagonal
// covariances: 1/2 sum [r - ln r - 1] with r = sigma^2 / sigma_old^2.
double cov_distance(const Eigen::VectorXd& sigma, const Eigen::VectorXd& sigma_old);

// Closest mean (in the old-covariance metric) within the mean bound; the
// identity when already inside.
Eigen::VectorXd project_mean(const Eigen::VectorXd& mu, const Eigen::VectorXd& mu_old,
                             const Eigen::VectorXd& sigma_old, double eps_mean);

// Closest diagonal covariance within the covariance bound, returned as
// standard deviations. Active solutions interpolate the precisions,
// 1/sigma~^2 = (1 - s) / sigma^2 + s / sigma_old^2, with s found by
// bisection so that the bound holds with equality.
Eigen::VectorXd project_cov(const Eigen::VectorXd& sigma, const Eigen::VectorXd& sigma_old,
                            double eps_cov);

// Projected policy plus what the backward pass needs.
struct Projection {
  nn::DiagGaussian dist;
  bool mean_active = false;
  bool cov_active = false;
  double mean_scale = 1.0;     // sqrt(eps_mean / d_mean) when active
  double mean_distance = 0.0;  // d_mean of the unprojected mean
  double interp = 0.0;         // precision interpolation weight s
};

Projection project_policy(const nn::DiagGaussian& next, const nn::DiagGaussian& old,
                          const TrustRegionBounds& bounds);

// Vector-Jacobian product of project_policy with respect to the new mean
// and log std; the old distribution is a constant.
struct ProjectionGrad {
  Eigen::VectorXd d_mean;
  Eigen::VectorXd d_log_std;
};
ProjectionGrad project_policy_backward(const Projection& proj, const nn::DiagGaussian& next,
                                       const nn::DiagGaussian& old,
                                       const Eigen::VectorXd& d_proj_mean,
                                       const Eigen::VectorXd& d_proj_log_std);

// KL(unprojected || projected), pulling the network output toward its
// projection. The projected distribution is a fixed target; gradients are
// with respect to the unprojected mean and log std.
struct RegressionLoss {
  double loss = 0.0;
  Eigen::VectorXd d_mean;
  Eigen::VectorXd d_log_std;
};
RegressionLoss trust_region_regression_loss(const nn::DiagGaussian& proj,
                                            const nn::DiagGaussian& unproj);

}  // namespace mprl::trpl

#endif  // MPRL_TRPL_PROJECTION_HPP_
