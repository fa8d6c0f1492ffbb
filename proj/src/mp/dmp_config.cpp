#include "mprl/mp/dmp_config.hpp"

#include <cmath>
#include <string>

#include "mprl/error.hpp"

namespace mprl::mp {

void PhaseConfig::validate() const {
  require(std::isfinite(alpha_x) && alpha_x > 0.0, "phase: alpha_x must be > 0");
  require(std::isfinite(tau) && tau > 0.0, "phase: tau must be > 0");
}

DmpConfig::DmpConfig(double alpha, int num_basis, PhaseConfig phase,
                     std::optional<double> beta)
    : alpha_(alpha),
      beta_(beta.value_or(alpha / 4.0)),
      num_basis_(num_basis),
      phase_(phase) {
  require(std::isfinite(alpha_) && alpha_ > 0.0, "dmp: alpha must be > 0");
  require(std::isfinite(beta_) && beta_ > 0.0, "dmp: beta must be > 0");
  require(num_basis_ >= 0, "dmp: num_basis must be >= 0");
  phase_.validate();
}

bool DmpConfig::critically_damped() const {
  return std::abs(beta_ - alpha_ / 4.0) <= 1e-12 * alpha_;
}

double phase(double t, const PhaseConfig& cfg) {
  if (!(t >= 0.0)) {
    throw PreconditionError("phase: t must be >= 0, got " + std::to_string(t));
  }
  return std::exp(-cfg.alpha_x / cfg.tau * t);
}

RbfLayout rbf_layout(const PhaseConfig& phase_cfg, int num_basis) {
  require(num_basis >= 1, "rbf_layout: need at least one basis");
  const double x_end = phase(phase_cfg.tau, phase_cfg);
  RbfLayout layout;
  layout.centers.resize(num_basis);
  double spacing = 1.0 - x_end;
  if (num_basis == 1) {
    layout.centers[0] = 0.5 * (1.0 + x_end);
  } else {
    spacing = (1.0 - x_end) / (num_basis - 1);
    for (int i = 0; i < num_basis; ++i) layout.centers[i] = x_end + i * spacing;
  }
  layout.width = 0.5 * spacing * spacing;
  return layout;
}

Eigen::VectorXd rbf_basis(double x, const RbfLayout& layout) {
  if (!(x > 0.0)) throw DomainError("rbf_basis: phase must be > 0");
  const Eigen::Index n = layout.centers.size();
  Eigen::VectorXd exponent(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = x - layout.centers[i];
    exponent[i] = -d * d / (2.0 * layout.width);
  }
  // shift by the max exponent so the normalizer never underflows
  const double shift = exponent.maxCoeff();
  Eigen::VectorXd out = (exponent.array() - shift).exp().matrix();
  return out / out.sum();
}

Eigen::VectorXd rbf_basis(double x, const DmpConfig& cfg) {
  if (!(x > 0.0)) throw DomainError("rbf_basis: phase must be > 0");
  if (cfg.num_basis() == 0) return Eigen::VectorXd(0);
  return rbf_basis(x, rbf_layout(cfg.phase(), cfg.num_basis()));
}

Complementary complementary(double t, const DmpConfig& cfg) {
  require(t >= 0.0, "complementary: t must be >= 0");
  const double a = cfg.alpha() / (2.0 * cfg.tau());
  const double y1 = std::exp(-a * t);
  return {y1, t * y1, -a * y1, (1.0 - a * t) * y1};
}

GoalIntegrals q1q2(double t, const DmpConfig& cfg) {
  require(t >= 0.0, "q1q2: t must be >= 0");
  const double a = cfg.alpha() / (2.0 * cfg.tau());
  const double e = std::exp(a * t);
  return {(a * t - 1.0) * e + 1.0, a * std::expm1(a * t)};
}

}  // namespace mprl::mp
