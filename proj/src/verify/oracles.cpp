#include "mprl/verify/oracles.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "mprl/error.hpp"
#include "mprl/mp/dmp_integrator.hpp"

namespace mprl::verify {

mp::DesiredTrajectory rk4_reference(const mp::InitialCondition& ic, const mp::WeightVector& w,
                                    const mp::DmpConfig& cfg, double sample_dt, int samples,
                                    int substeps) {
  require(substeps >= 1, "rk4_reference: substeps must be >= 1");
  const mp::DesiredTrajectory fine =
      mp::dmp_integrate(ic, w, cfg, sample_dt / substeps, samples * substeps);
  mp::DesiredTrajectory out;
  out.pos.resize(samples + 1, w.num_dof());
  out.vel.resize(samples + 1, w.num_dof());
  for (int i = 0; i <= samples; ++i) {
    out.times.push_back(ic.t_b + i * sample_dt);
    out.pos.row(i) = fine.pos.row(i * substeps);
    out.vel.row(i) = fine.vel.row(i * substeps);
  }
  return out;
}

SolverResult solve_constrained(const ConvexProblem& p, const Eigen::VectorXd& x0, double eps) {
  SolverResult res;
  res.x = x0;
  if (p.g(x0) <= eps) {
    res.converged = true;
    return res;
  }
  double lambda = 0.0;
  double rho = 10.0;
  double prev_violation = std::numeric_limits<double>::infinity();
  Eigen::VectorXd x = x0;
  for (int outer = 0; outer < 100; ++outer) {
    res.outer_iterations = outer + 1;
    auto lagrangian = [&](const Eigen::VectorXd& z) {
      const double h = p.g(z) - eps;
      return p.f(z) + lambda * h + 0.5 * rho * h * h;
    };
    for (int inner = 0; inner < 200; ++inner) {
      const double h = p.g(x) - eps;
      const Eigen::VectorXd gg = p.grad_g(x);
      const Eigen::VectorXd grad = p.grad_f(x) + (lambda + rho * h) * gg;
      Eigen::MatrixXd hess = p.hess_f(x) + (lambda + rho * h) * p.hess_g(x) + rho * gg * gg.transpose();
      Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
      Eigen::VectorXd dir;
      if (ldlt.info() == Eigen::Success && (ldlt.vectorD().array() > 0.0).all()) {
        dir = -ldlt.solve(grad);
      } else {
        dir = -grad;
      }
      if (dir.dot(grad) >= 0.0) dir = -grad;
      // backtracking on the augmented Lagrangian
      const double l0 = lagrangian(x);
      double step = 1.0;
      Eigen::VectorXd next = x + dir;
      while (!(lagrangian(next) <= l0 + 1e-4 * step * grad.dot(dir)) && step > 1e-12) {
        step *= 0.5;
        next = x + step * dir;
      }
      const double moved = (next - x).lpNorm<Eigen::Infinity>();
      x = next;
      if (moved < 1e-15 * (1.0 + x.lpNorm<Eigen::Infinity>()) || grad.lpNorm<Eigen::Infinity>() < 1e-14)
        break;
    }
    const double h = p.g(x) - eps;
    lambda = std::max(0.0, lambda + rho * h);
    if (std::abs(h) < 1e-14 * std::max(1.0, eps)) {
      res.converged = true;
      break;
    }
    if (std::abs(h) > 0.25 * prev_violation) rho = std::min(rho * 4.0, 1e12);
    prev_violation = std::abs(h);
  }
  res.x = x;
  res.multiplier = lambda;
  return res;
}

namespace {

// 1/2 sum (x - target)^2 / metric, used for both mean objective and bound.
struct Quadratic {
  Eigen::ArrayXd target;
  Eigen::ArrayXd metric;
  double value(const Eigen::VectorXd& x) const {
    return 0.5 * ((x.array() - target).square() / metric).sum();
  }
  Eigen::VectorXd grad(const Eigen::VectorXd& x) const {
    return ((x.array() - target) / metric).matrix();
  }
  Eigen::MatrixXd hess() const { return (1.0 / metric).matrix().asDiagonal(); }
};

struct MeanProblem final : ConvexProblem {
  Quadratic obj;
  Quadratic con;
  double f(const Eigen::VectorXd& x) const override { return obj.value(x); }
  Eigen::VectorXd grad_f(const Eigen::VectorXd& x) const override { return obj.grad(x); }
  Eigen::MatrixXd hess_f(const Eigen::VectorXd&) const override { return obj.hess(); }
  double g(const Eigen::VectorXd& x) const override { return con.value(x); }
  Eigen::VectorXd grad_g(const Eigen::VectorXd& x) const override { return con.grad(x); }
  Eigen::MatrixXd hess_g(const Eigen::VectorXd&) const override { return con.hess(); }
};

// 1/2 sum [exp(z) / ref - z + ln ref - 1] over log variances z.
struct LogVarKl {
  Eigen::ArrayXd ref;
  double value(const Eigen::VectorXd& z) const {
    return 0.5 * (z.array().exp() / ref - z.array() + ref.log() - 1.0).sum();
  }
  Eigen::VectorXd grad(const Eigen::VectorXd& z) const {
    return (0.5 * (z.array().exp() / ref - 1.0)).matrix();
  }
  Eigen::MatrixXd hess(const Eigen::VectorXd& z) const {
    return (0.5 * z.array().exp() / ref).matrix().asDiagonal();
  }
};

struct CovProblem final : ConvexProblem {
  LogVarKl obj;
  LogVarKl con;
  double f(const Eigen::VectorXd& z) const override { return obj.value(z); }
  Eigen::VectorXd grad_f(const Eigen::VectorXd& z) const override { return obj.grad(z); }
  Eigen::MatrixXd hess_f(const Eigen::VectorXd& z) const override { return obj.hess(z); }
  double g(const Eigen::VectorXd& z) const override { return con.value(z); }
  Eigen::VectorXd grad_g(const Eigen::VectorXd& z) const override { return con.grad(z); }
  Eigen::MatrixXd hess_g(const Eigen::VectorXd& z) const override { return con.hess(z); }
};

}  // namespace

nn::DiagGaussian numeric_projection(const nn::DiagGaussian& next, const nn::DiagGaussian& old,
                                    const trpl::TrustRegionBounds& bounds) {
  require(next.dim() == old.dim(), "numeric_projection: dimension mismatch");
  const Eigen::ArrayXd var_old = old.variance().array();

  MeanProblem mp;
  mp.obj = {next.mean.array(), var_old};
  mp.con = {old.mean.array(), var_old};
  const SolverResult mean_res = solve_constrained(mp, next.mean, bounds.eps_mean);

  CovProblem cp;
  cp.obj = {next.variance().array()};
  cp.con = {var_old};
  const Eigen::VectorXd z0 = (2.0 * next.log_std.array()).matrix();
  const SolverResult cov_res = solve_constrained(cp, z0, bounds.eps_cov);

  return {mean_res.x, (0.5 * cov_res.x.array()).matrix()};
}

double brute_force_return(std::span<const double> rewards, double gamma) {
  double total = 0.0;
  for (std::size_t t = 0; t < rewards.size(); ++t)
    total += std::pow(gamma, static_cast<double>(t)) * rewards[t];
  return total;
}

Eigen::VectorXd brute_force_gae(const Eigen::VectorXd& rewards, const Eigen::VectorXd& values,
                                const Eigen::VectorXd& discounts, double lambda) {
  const Eigen::Index n = rewards.size();
  require(values.size() == n + 1 && discounts.size() == n, "brute_force_gae: length mismatch");
  Eigen::VectorXd delta(n);
  for (Eigen::Index i = 0; i < n; ++i)
    delta[i] = rewards[i] + discounts[i] * values[i + 1] - values[i];
  Eigen::VectorXd adv = Eigen::VectorXd::Zero(n);
  for (Eigen::Index t = 0; t < n; ++t) {
    for (Eigen::Index i = t; i < n; ++i) {
      double weight = 1.0;
      for (Eigen::Index j = t; j < i; ++j) weight *= discounts[j] * lambda;
      adv[t] += weight * delta[i];
    }
  }
  return adv;
}

}  // namespace mprl::verify
