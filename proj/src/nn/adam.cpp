#include "mprl/nn/adam.hpp"

#include <cmath>

#include "mprl/error.hpp"

namespace mprl::nn {

Adam::Adam(Eigen::Index num_params, Options options) : options_(options) {
  require(options_.lr >= 0.0, "Adam: learning rate must be >= 0");
  state_.m = Eigen::VectorXd::Zero(num_params);
  state_.v = Eigen::VectorXd::Zero(num_params);
}

void Adam::step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
  require(params.size() == state_.m.size() && grad.size() == state_.m.size(),
          "Adam::step: size mismatch");
  Eigen::VectorXd g = grad;
  if (options_.max_grad_norm > 0.0) {
    const double norm = g.norm();
    if (norm > options_.max_grad_norm) g *= options_.max_grad_norm / norm;
  }
  ++state_.step;
  state_.m = options_.beta1 * state_.m + (1.0 - options_.beta1) * g;
  state_.v = options_.beta2 * state_.v + (1.0 - options_.beta2) * g.cwiseAbs2();
  const double bc1 = 1.0 - std::pow(options_.beta1, static_cast<double>(state_.step));
  const double bc2 = 1.0 - std::pow(options_.beta2, static_cast<double>(state_.step));
  params.array() -= options_.lr * (state_.m.array() / bc1) /
                    ((state_.v.array() / bc2).sqrt() + options_.eps);
}

void Adam::set_state(AdamState state) {
  require(state.m.size() == state_.m.size() && state.v.size() == state_.v.size(),
          "Adam::set_state: size mismatch");
  state_ = std::move(state);
}

}  // namespace mprl::nn
