#ifndef MPRL_NN_ADAM_HPP_
#define MPRL_NN_ADAM_HPP_

#include <cstdint>

#include <Eigen/Core>

namespace mprl::nn {

struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  std::int64_t step = 0;
};

// Gradient descent with bias-corrected first/second moment estimates.
class Adam {
 public:
  struct Options {
    double lr = 3e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    // global gradient-norm clip; <= 0 disables
    double max_grad_norm = 0.0;
  };

  Adam(Eigen::Index num_params, Options options);

  // Descends: params -= lr * m_hat / (sqrt(v_hat) + eps).
  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad);

  const Options& options() const { return options_; }
  const AdamState& state() const { return state_; }
  void set_state(AdamState state);

 private:
  Options options_;
  AdamState state_;
};

}  // namespace mprl::nn

#endif  // MPRL_NN_ADAM_HPP_
