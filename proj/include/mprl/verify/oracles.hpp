#ifndef MPRL_VERIFY_ORACLES_HPP_
#define MPRL_VERIFY_ORACLES_HPP_

#include <span>

#include <Eigen/Core>

#include "mprl/mp/dmp_config.hpp"
#include "mprl/mp/trajectory.hpp"
#include "mprl/nn/diag_gaussian.hpp"
#include "mprl/trpl/projection.hpp"

namespace mprl::verify {

// DMP reference by RK4 with `substeps` integration steps per output sample;
// returns samples at t_b + i * sample_dt for i = 0..samples.
mp::DesiredTrajectory rk4_reference(const mp::InitialCondition& ic, const mp::WeightVector& w,
                                    const mp::DmpConfig& cfg, double sample_dt, int samples,
                                    int substeps);

// Smooth convex problem min f(x) s.t. g(x) <= eps with analytic derivatives.
struct ConvexProblem {
  virtual ~ConvexProblem() = default;
  virtual double f(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::VectorXd grad_f(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::MatrixXd hess_f(const Eigen::VectorXd& x) const = 0;
  virtual double g(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::VectorXd grad_g(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::MatrixXd hess_g(const Eigen::VectorXd& x) const = 0;
};

struct SolverResult {
  Eigen::VectorXd x;
  double multiplier = 0.0;
  int outer_iterations = 0;
  bool converged = false;
};

// Augmented Lagrangian with damped Newton inner solves, started from x0
// (taken to be the unconstrained minimizer).
SolverResult solve_constrained(const ConvexProblem& problem, const Eigen::VectorXd& x0,
                               double eps);

// The trust-region projection posed directly as the two constrained
// problems: the mean closest to the new mean in the old-covariance metric,
// and the covariance minimizing the covariance part of KL(proj || new),
// each inside its KL ball around the old distribution. The covariance is
// optimized over log variances.
nn::DiagGaussian numeric_projection(const nn::DiagGaussian& next, const nn::DiagGaussian& old,
                                    const trpl::TrustRegionBounds& bounds);

// sum_t gamma^t r_t by explicit powers.
double brute_force_return(std::span<const double> rewards, double gamma);

// A_t = sum_{i >= t} (prod_{j=t}^{i-1} discounts_j lambda) delta_i, each
// term formed separately.
Eigen::VectorXd brute_force_gae(const Eigen::VectorXd& rewards, const Eigen::VectorXd& values,
                                const Eigen::VectorXd& discounts, double lambda);

}  // namespace mprl::verify

#endif  // MPRL_VERIFY_ORACLES_HPP_
