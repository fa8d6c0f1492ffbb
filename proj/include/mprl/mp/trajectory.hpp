#ifndef MPRL_MP_TRAJECTORY_HPP_
#define MPRL_MP_TRAJECTORY_HPP_

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace mprl::mp {

// Per-DoF shape weights followed by the goal attractor. Row d holds
// [w_1 .. w_N, g] for DoF d.
class WeightVector {
 public:
  WeightVector() = default;
  WeightVector(int num_dof, int num_basis);
  explicit WeightVector(Eigen::MatrixXd per_dof);

  // Flat layout is DoF-major: [dof0 weights, dof0 goal, dof1 weights, ...].
  static WeightVector from_flat(std::span<const double> flat, int num_dof,
                                int num_basis);
  Eigen::VectorXd flat() const;

  int num_dof() const { return static_cast<int>(per_dof_.rows()); }
  int num_basis() const { return static_cast<int>(per_dof_.cols()) - 1; }

  Eigen::MatrixXd& per_dof() { return per_dof_; }
  const Eigen::MatrixXd& per_dof() const { return per_dof_; }
  double goal(int dof) const { return per_dof_(dof, per_dof_.cols() - 1); }
  void set_goal(int dof, double g) { per_dof_(dof, per_dof_.cols() - 1) = g; }

  void validate(int expected_num_basis) const;

 private:
  Eigen::MatrixXd per_dof_;
};

// Replanning state: time and measured position/velocity per DoF.
struct InitialCondition {
  double t_b = 0.0;
  Eigen::VectorXd y_b;
  Eigen::VectorXd dy_b;
};

// Time-indexed positions and velocities, one column per DoF.
struct DesiredTrajectory {
  std::vector<double> times;
  Eigen::MatrixXd pos;  // steps x D
  Eigen::MatrixXd vel;  // steps x D

  std::size_t steps() const { return times.size(); }
  int num_dof() const { return static_cast<int>(pos.cols()); }
  void validate() const;
};

// CSV with header "t,dof,pos,vel", one row per (time, dof). Values are
// written with round-trip precision.
void write_csv(std::ostream& out, const DesiredTrajectory& traj);
void write_csv(const std::string& path, const DesiredTrajectory& traj);
DesiredTrajectory read_csv(std::istream& in);
DesiredTrajectory read_csv(const std::string& path);

}  // namespace mprl::mp

#endif  // MPRL_MP_TRAJECTORY_HPP_
