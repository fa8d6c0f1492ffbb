#ifndef MPRL_MP_DMP_INTEGRATOR_HPP_
#define MPRL_MP_DMP_INTEGRATOR_HPP_

#include "mprl/mp/dmp_config.hpp"
#include "mprl/mp/trajectory.hpp"

namespace mprl::mp {

// Classic DMP
//   tau^2 ydd = alpha (beta (g - y) - tau yd) + x phi_x^T w
// integrated with fourth-order Runge-Kutta from ic. Returns steps + 1 samples
// at t_b + i * dt. Works for any beta, not only the critically damped case.
DesiredTrajectory dmp_integrate(const InitialCondition& ic, const WeightVector& w,
                                const DmpConfig& cfg, double dt, int steps);

}  // namespace mprl::mp

#endif  // MPRL_MP_DMP_INTEGRATOR_HPP_
