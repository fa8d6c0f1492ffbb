#include "mprl/mp/prodmp.hpp"

#include <cmath>
#include <limits>

#include "mprl/error.hpp"

namespace mprl::mp {

namespace {

void check_inputs(const InitialCondition& ic, const WeightVector& w,
                  const MpBasisSet& basis) {
  w.validate(basis.config.num_basis());
  require(ic.y_b.size() == w.num_dof() && ic.dy_b.size() == w.num_dof(),
          "prodmp: initial condition dimension does not match weights");
  require(std::isfinite(ic.t_b) && ic.y_b.allFinite() && ic.dy_b.allFinite(),
          "prodmp: non-finite initial condition");
}

}  // namespace

ProDmpCoefficients prodmp_solve_coeffs(const InitialCondition& ic,
                                       const WeightVector& w,
                                       const MpBasisSet& basis) {
  check_inputs(ic, w, basis);
  const Complementary c = complementary(ic.t_b, basis.config);
  const BasisRows rows = basis_rows_at(basis, ic.t_b);
  const double det = c.wronskian();
  if (!std::isfinite(det) || std::abs(det) < std::numeric_limits<double>::min()) {
    throw SingularityError("prodmp_solve_coeffs: vanishing Wronskian at t_b = " +
                           std::to_string(ic.t_b));
  }

  // Phi_b^T w_g and dPhi_b^T w_g for every DoF at once
  const Eigen::VectorXd phi_w = w.per_dof() * rows.pos.transpose();
  const Eigen::VectorXd dphi_w = w.per_dof() * rows.vel.transpose();

  ProDmpCoefficients out;
  out.c1 = ((c.dy2 * ic.y_b - c.y2 * ic.dy_b) + (c.y2 * dphi_w - c.dy2 * phi_w)) / det;
  out.c2 = ((c.y1 * ic.dy_b - c.dy1 * ic.y_b) + (c.dy1 * phi_w - c.y1 * dphi_w)) / det;
  return out;
}

ProDmpState prodmp_evaluate(const ProDmpCoefficients& coeffs, const WeightVector& w,
                            const MpBasisSet& basis, double t) {
  const Complementary c = complementary(t, basis.config);
  const BasisRows rows = basis_rows_at(basis, t);
  ProDmpState s;
  s.pos = coeffs.c1 * c.y1 + coeffs.c2 * c.y2 + w.per_dof() * rows.pos.transpose();
  s.vel = coeffs.c1 * c.dy1 + coeffs.c2 * c.dy2 + w.per_dof() * rows.vel.transpose();
  return s;
}

DesiredTrajectory prodmp_rollout(const InitialCondition& ic, const WeightVector& w,
                                 const MpBasisSet& basis, int horizon_steps,
                                 double step_dt) {
  require(horizon_steps >= 0, "prodmp_rollout: horizon_steps must be >= 0");
  if (step_dt <= 0.0) step_dt = basis.spacing();
  const double t_last = ic.t_b + horizon_steps * step_dt;
  if (t_last > basis.t_end() * (1.0 + 1e-9)) {
    throw RangeError("prodmp_rollout: horizon ends at t = " + std::to_string(t_last) +
                     " beyond basis range " + std::to_string(basis.t_end()));
  }
  const ProDmpCoefficients coeffs = prodmp_solve_coeffs(ic, w, basis);

  DesiredTrajectory traj;
  traj.pos.resize(horizon_steps + 1, w.num_dof());
  traj.vel.resize(horizon_steps + 1, w.num_dof());
  traj.times.reserve(horizon_steps + 1);
  for (int i = 0; i <= horizon_steps; ++i) {
    const double t = std::min(ic.t_b + i * step_dt, basis.t_end());
    traj.times.push_back(ic.t_b + i * step_dt);
    const ProDmpState s = prodmp_evaluate(coeffs, w, basis, t);
    traj.pos.row(i) = s.pos.transpose();
    traj.vel.row(i) = s.vel.transpose();
  }
  return traj;
}

}  // namespace mprl::mp
