#ifndef MPRL_NN_GRADIENT_CHECK_HPP_
#define MPRL_NN_GRADIENT_CHECK_HPP_

#include <functional>

#include <Eigen/Core>

namespace mprl::nn {

// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h for every i.
Eigen::VectorXd central_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double h = 1e-5);

// Jacobian of a vector map by central differences; rows index outputs.
Eigen::MatrixXd central_difference_jacobian(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
    double h = 1e-5);

// ||a - b||_inf / max(||a||_inf, ||b||_inf); zero when both vanish.
double relative_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

}  // namespace mprl::nn

#endif  // MPRL_NN_GRADIENT_CHECK_HPP_
