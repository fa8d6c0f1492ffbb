#include "mprl/trpl/projection.hpp"

#include <cmath>

#include "mprl/error.hpp"

namespace mprl::trpl {

namespace {

void check_positive(const Eigen::VectorXd& v, const char* what) {
  if (!v.allFinite() || !(v.array() > 0.0).all())
    throw PreconditionError(std::string(what) + " must be positive and finite");
}

// d_cov between variances (not standard deviations)
double cov_distance_var(const Eigen::ArrayXd& var, const Eigen::ArrayXd& var_old) {
  const Eigen::ArrayXd r = var / var_old;
  return 0.5 * (r - r.log() - 1.0).sum();
}

Eigen::ArrayXd interpolate_var(const Eigen::ArrayXd& var, const Eigen::ArrayXd& var_old,
                               double s) {
  return 1.0 / ((1.0 - s) / var + s / var_old);
}

// Smallest s in [0, 1] (to double resolution) whose interpolated covariance
// satisfies the bound. The distance is monotone decreasing in s.
double solve_interp(const Eigen::ArrayXd& var, const Eigen::ArrayXd& var_old, double eps) {
  double lo = 0.0;  // violates the bound
  double hi = 1.0;  // distance zero
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (cov_distance_var(interpolate_var(var, var_old, mid), var_old) > eps) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

}  // namespace

void TrustRegionBounds::validate() const {
  require(eps_mean > 0.0 && std::isfinite(eps_mean), "trust region: eps_mean must be > 0");
  require(eps_cov > 0.0 && std::isfinite(eps_cov), "trust region: eps_cov must be > 0");
}

double mean_distance(const Eigen::VectorXd& mu, const Eigen::VectorXd& mu_old,
                     const Eigen::VectorXd& sigma_old) {
  require(mu.size() == mu_old.size() && mu.size() == sigma_old.size(),
          "mean_distance: dimension mismatch");
  return 0.5 * ((mu - mu_old).array() / sigma_old.array()).square().sum();
}

double cov_distance(const Eigen::VectorXd& sigma, const Eigen::VectorXd& sigma_old) {
  require(sigma.size() == sigma_old.size(), "cov_distance: dimension mismatch");
  return cov_distance_var(sigma.array().square(), sigma_old.array().square());
}

Eigen::VectorXd project_mean(const Eigen::VectorXd& mu, const Eigen::VectorXd& mu_old,
                             const Eigen::VectorXd& sigma_old, double eps_mean) {
  check_positive(sigma_old, "project_mean: sigma_old");
  require(eps_mean > 0.0, "project_mean: eps_mean must be > 0");
  const double d = mean_distance(mu, mu_old, sigma_old);
  if (d <= eps_mean) return mu;
  return mu_old + (mu - mu_old) * std::sqrt(eps_mean / d);
}

Eigen::VectorXd project_cov(const Eigen::VectorXd& sigma, const Eigen::VectorXd& sigma_old,
                            double eps_cov) {
  check_positive(sigma, "project_cov: sigma");
  check_positive(sigma_old, "project_cov: sigma_old");
  require(eps_cov > 0.0, "project_cov: eps_cov must be > 0");
  if (cov_distance(sigma, sigma_old) <= eps_cov) return sigma;
  const Eigen::ArrayXd var = sigma.array().square();
  const Eigen::ArrayXd var_old = sigma_old.array().square();
  const double s = solve_interp(var, var_old, eps_cov);
  return interpolate_var(var, var_old, s).sqrt().matrix();
}

Projection project_policy(const nn::DiagGaussian& next, const nn::DiagGaussian& old,
                          const TrustRegionBounds& bounds) {
  require(next.dim() == old.dim(), "project_policy: dimension mismatch");
  next.validate();
  old.validate();
  Projection p;
  p.dist = next;

  const Eigen::VectorXd sigma_old = old.std();
  p.mean_distance = mean_distance(next.mean, old.mean, sigma_old);
  if (p.mean_distance > bounds.eps_mean) {
    p.mean_active = true;
    p.mean_scale = std::sqrt(bounds.eps_mean / p.mean_distance);
    p.dist.mean = old.mean + (next.mean - old.mean) * p.mean_scale;
  }

  const Eigen::ArrayXd var = next.variance().array();
  const Eigen::ArrayXd var_old = old.variance().array();
  if (cov_distance_var(var, var_old) > bounds.eps_cov) {
    p.cov_active = true;
    p.interp = solve_interp(var, var_old, bounds.eps_cov);
    p.dist.log_std = (0.5 * interpolate_var(var, var_old, p.interp).log()).matrix();
  }
  return p;
}

ProjectionGrad project_policy_backward(const Projection& proj, const nn::DiagGaussian& next,
                                       const nn::DiagGaussian& old,
                                       const Eigen::VectorXd& d_proj_mean,
                                       const Eigen::VectorXd& d_proj_log_std) {
  require(d_proj_mean.size() == next.dim() && d_proj_log_std.size() == next.dim(),
          "project_policy_backward: gradient dimension mismatch");
  ProjectionGrad g{d_proj_mean, d_proj_log_std};

  if (proj.mean_active) {
    const Eigen::VectorXd delta = next.mean - old.mean;
    const Eigen::VectorXd var_old = old.variance();
    const double r = proj.mean_scale;
    const double d = proj.mean_distance;
    g.d_mean = r * d_proj_mean -
               (r / (2.0 * d)) * d_proj_mean.dot(delta) * delta.cwiseQuotient(var_old);
  }

  if (proj.cov_active) {
    const Eigen::ArrayXd v = next.variance().array();
    const Eigen::ArrayXd u = old.variance().array();
    const double s = proj.interp;
    const Eigen::ArrayXd vt = interpolate_var(v, u, s);
    const Eigen::ArrayXd d_vt = d_proj_log_std.array() / (2.0 * vt);   // dL/dvt
    const Eigen::ArrayXd dvt_dv = vt.square() * (1.0 - s) / v.square();  // at fixed s
    const Eigen::ArrayXd dvt_ds = -vt.square() * (1.0 / u - 1.0 / v);
    const Eigen::ArrayXd dh_dvt = 0.5 * (1.0 / u - 1.0 / vt);
    const double dh_ds = (dh_dvt * dvt_ds).sum();
    Eigen::ArrayXd d_v = d_vt * dvt_dv;
    if (std::abs(dh_ds) > 0.0) {
      // implicit function theorem on h(s, v) = d_cov(vt, u) - eps = 0
      const Eigen::ArrayXd ds_dv = -(dh_dvt * dvt_dv) / dh_ds;
      d_v += (d_vt * dvt_ds).sum() * ds_dv;
    }
    g.d_log_std = (d_v * 2.0 * v).matrix();
  }
  return g;
}

RegressionLoss trust_region_regression_loss(const nn::DiagGaussian& proj,
                                            const nn::DiagGaussian& unproj) {
  require(proj.dim() == unproj.dim(), "trust_region_regression_loss: dimension mismatch");
  const nn::KlParts kl = nn::kl_diag(unproj, proj);
  RegressionLoss out;
  out.loss = kl.total();
  const Eigen::ArrayXd var_proj = proj.variance().array();
  out.d_mean = ((unproj.mean - proj.mean).array() / var_proj).matrix();
  out.d_log_std = (unproj.variance().array() / var_proj - 1.0).matrix();
  return out;
}

}  // namespace mprl::trpl
