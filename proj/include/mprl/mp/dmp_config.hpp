#ifndef MPRL_MP_DMP_CONFIG_HPP_
#define MPRL_MP_DMP_CONFIG_HPP_

#include <optional>

#include <Eigen/Core>

namespace mprl::mp {

// Exponentially decaying clock x(t) = exp(-alpha_x / tau * t).
struct PhaseConfig {
  double alpha_x = 3.0;
  double tau = 1.0;  // seconds

  void validate() const;
};

// Spring-damper DMP parameters. beta defaults to alpha / 4 (critical
// damping); the closed-form generator only supports that case.
class DmpConfig {
 public:
  DmpConfig() : DmpConfig(25.0, 5) {}
  DmpConfig(double alpha, int num_basis, PhaseConfig phase = {},
            std::optional<double> beta = std::nullopt);

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  // Number of shape weights N. Zero disables the forcing term and leaves
  // only the goal column.
  int num_basis() const { return num_basis_; }
  const PhaseConfig& phase() const { return phase_; }
  double tau() const { return phase_.tau; }
  bool critically_damped() const;

 private:
  double alpha_;
  double beta_;
  int num_basis_;
  PhaseConfig phase_;
};

double phase(double t, const PhaseConfig& cfg);

// Gaussian centers, equally spaced in phase over [x(tau), 1], and their
// shared width. The bundle is evaluated as exp(-(x - c)^2 / (2 * width)).
struct RbfLayout {
  Eigen::VectorXd centers;
  double width = 1.0;
};
RbfLayout rbf_layout(const PhaseConfig& phase, int num_basis);

// Normalized Gaussian bundle phi_x; entries are >= 0 and sum to one.
Eigen::VectorXd rbf_basis(double x, const DmpConfig& cfg);
Eigen::VectorXd rbf_basis(double x, const RbfLayout& layout);

// Complementary functions of the homogeneous critically damped ODE and
// their time derivatives.
struct Complementary {
  double y1;
  double y2;
  double dy1;
  double dy2;

  double wronskian() const { return y1 * dy2 - dy1 * y2; }
};
Complementary complementary(double t, const DmpConfig& cfg);

// Closed-form goal integrals.
struct GoalIntegrals {
  double q1;
  double q2;
};
GoalIntegrals q1q2(double t, const DmpConfig& cfg);

}  // namespace mprl::mp

#endif  // MPRL_MP_DMP_CONFIG_HPP_
