#include "mprl/mp/dmp_integrator.hpp"

#include <cmath>

#include "mprl/error.hpp"

namespace mprl::mp {

DesiredTrajectory dmp_integrate(const InitialCondition& ic, const WeightVector& w,
                                const DmpConfig& cfg, double dt, int steps) {
  require(dt > 0.0 && std::isfinite(dt), "dmp_integrate: dt must be > 0");
  require(steps >= 0, "dmp_integrate: steps must be >= 0");
  require(ic.t_b >= 0.0, "dmp_integrate: t_b must be >= 0");
  w.validate(cfg.num_basis());
  const int dofs = w.num_dof();
  require(ic.y_b.size() == dofs && ic.dy_b.size() == dofs,
          "dmp_integrate: initial condition dimension does not match weights");

  const int n = cfg.num_basis();
  const double alpha = cfg.alpha();
  const double beta = cfg.beta();
  const double tau = cfg.tau();
  const RbfLayout layout = n > 0 ? rbf_layout(cfg.phase(), n) : RbfLayout{};
  const Eigen::MatrixXd shape = w.per_dof().leftCols(n);
  const Eigen::VectorXd goal = w.per_dof().col(n);

  // acceleration of every DoF at time t
  auto accel = [&](double t, const Eigen::VectorXd& y, const Eigen::VectorXd& yd) {
    Eigen::VectorXd forcing = Eigen::VectorXd::Zero(dofs);
    if (n > 0) {
      const double x = phase(t, cfg.phase());
      forcing = x * (shape * rbf_basis(x, layout));
    }
    return Eigen::VectorXd(
        (alpha * (beta * (goal - y) - tau * yd) + forcing) / (tau * tau));
  };

  DesiredTrajectory traj;
  traj.pos.resize(steps + 1, dofs);
  traj.vel.resize(steps + 1, dofs);
  traj.times.reserve(steps + 1);

  Eigen::VectorXd y = ic.y_b;
  Eigen::VectorXd yd = ic.dy_b;
  traj.times.push_back(ic.t_b);
  traj.pos.row(0) = y.transpose();
  traj.vel.row(0) = yd.transpose();
  for (int i = 0; i < steps; ++i) {
    const double t = ic.t_b + i * dt;
    const Eigen::VectorXd k1v = accel(t, y, yd);
    const Eigen::VectorXd k1y = yd;
    const Eigen::VectorXd k2v = accel(t + 0.5 * dt, y + 0.5 * dt * k1y, yd + 0.5 * dt * k1v);
    const Eigen::VectorXd k2y = yd + 0.5 * dt * k1v;
    const Eigen::VectorXd k3v = accel(t + 0.5 * dt, y + 0.5 * dt * k2y, yd + 0.5 * dt * k2v);
    const Eigen::VectorXd k3y = yd + 0.5 * dt * k2v;
    const Eigen::VectorXd k4v = accel(t + dt, y + dt * k3y, yd + dt * k3v);
    const Eigen::VectorXd k4y = yd + dt * k3v;
    y += dt / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
    yd += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    traj.times.push_back(ic.t_b + (i + 1) * dt);
    traj.pos.row(i + 1) = y.transpose();
    traj.vel.row(i + 1) = yd.transpose();
  }
  return traj;
}

}  // namespace mprl::mp
