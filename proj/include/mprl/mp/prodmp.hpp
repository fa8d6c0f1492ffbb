#ifndef MPRL_MP_PRODMP_HPP_
#define MPRL_MP_PRODMP_HPP_

#include <Eigen/Core>

#include "mprl/mp/basis_set.hpp"
#include "mprl/mp/trajectory.hpp"

namespace mprl::mp {

// Per-DoF coefficients of the complementary functions.
struct ProDmpCoefficients {
  Eigen::VectorXd c1;
  Eigen::VectorXd c2;
};

// Solves the initial value problem so that the closed-form trajectory passes
// through (y_b, dy_b) at t_b.
ProDmpCoefficients prodmp_solve_coeffs(const InitialCondition& ic,
                                       const WeightVector& w,
                                       const MpBasisSet& basis);

// Position and velocity of every DoF at time t for given coefficients.
struct ProDmpState {
  Eigen::VectorXd pos;
  Eigen::VectorXd vel;
};
ProDmpState prodmp_evaluate(const ProDmpCoefficients& coeffs, const WeightVector& w,
                            const MpBasisSet& basis, double t);

// Samples the trajectory at t_b + i * step_dt for i = 0..horizon_steps; row 0
// equals (y_b, dy_b). step_dt defaults to the basis grid spacing.
DesiredTrajectory prodmp_rollout(const InitialCondition& ic, const WeightVector& w,
                                 const MpBasisSet& basis, int horizon_steps,
                                 double step_dt = 0.0);

}  // namespace mprl::mp

#endif  // MPRL_MP_PRODMP_HPP_
