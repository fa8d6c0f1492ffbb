#include "mprl/rl/motion.hpp"

#include <cmath>

#include "mprl/error.hpp"
#include "mprl/mp/dmp_integrator.hpp"
#include "mprl/mp/prodmp.hpp"

namespace mprl::rl {

std::string to_string(MpType type) {
  switch (type) {
    case MpType::kProDmp:
      return "prodmp";
    case MpType::kDmp:
      return "dmp";
    case MpType::kProMp:
      return "promp";
    case MpType::kRaw:
      return "raw";
  }
  return "prodmp";
}

MpType mp_type_from_string(const std::string& s) {
  if (s == "prodmp") return MpType::kProDmp;
  if (s == "dmp") return MpType::kDmp;
  if (s == "promp") return MpType::kProMp;
  if (s == "raw") return MpType::kRaw;
  throw PreconditionError("unknown mp type '" + s + "' (prodmp, dmp, promp, raw)");
}

void MotionConfig::validate() const {
  require(num_dof >= 1, "motion: num_dof must be >= 1");
  require(num_basis >= 0, "motion: num_basis must be >= 0");
  require(type != MpType::kProMp || num_basis >= 1, "motion: promp needs num_basis >= 1");
  require(alpha > 0.0 && alpha_x > 0.0 && promp_alpha_x > 0.0,
          "motion: alpha, alpha_x and promp_alpha_x must be > 0");
  require(duration > 0.0 && std::isfinite(duration), "motion: duration must be > 0");
  require(grid_len >= 2, "motion: grid_len must be >= 2");
  require(promp_zero_start >= 0, "motion: promp_zero_start must be >= 0");
  require(std::isfinite(weight_scale) && std::isfinite(goal_scale),
          "motion: scales must be finite");
}

MotionGenerator::MotionGenerator(MotionConfig cfg)
    : cfg_(cfg), dmp_(cfg.alpha, cfg.num_basis, mp::PhaseConfig{cfg.alpha_x, cfg.duration}) {
  cfg_.validate();
  if (cfg_.type == MpType::kProDmp) {
    basis_ = std::make_shared<const mp::MpBasisSet>(mp::precompute_basis_set(dmp_, cfg_.grid_len));
  } else if (cfg_.type == MpType::kProMp) {
    promp_ = std::make_shared<const mp::ProMpBasis>(mp::PhaseConfig{cfg_.promp_alpha_x, cfg_.duration},
                                                     cfg_.num_basis,
                                                     cfg_.promp_zero_start);
  }
}

int MotionGenerator::param_dim() const {
  switch (cfg_.type) {
    case MpType::kProDmp:
    case MpType::kDmp:
      return cfg_.num_dof * (cfg_.num_basis + 1);
    case MpType::kProMp:
      return cfg_.num_dof * cfg_.num_basis;
    case MpType::kRaw:
      return cfg_.num_dof;
  }
  return 0;
}

mp::WeightVector MotionGenerator::weights(const Eigen::VectorXd& params,
                                          const Eigen::VectorXd& y_b) const {
  require(cfg_.type == MpType::kProDmp || cfg_.type == MpType::kDmp,
          "MotionGenerator::weights: only for dmp and prodmp");
  require(params.size() == param_dim(), "MotionGenerator: parameter dimension mismatch");
  require(y_b.size() == cfg_.num_dof, "MotionGenerator: state dimension mismatch");
  mp::WeightVector w = mp::WeightVector::from_flat(
      std::span<const double>(params.data(), static_cast<std::size_t>(params.size())),
      cfg_.num_dof, cfg_.num_basis);
  auto& m = w.per_dof();
  m.leftCols(cfg_.num_basis) *= cfg_.weight_scale;
  m.col(cfg_.num_basis) *= cfg_.goal_scale;
  if (cfg_.relative_goal) m.col(cfg_.num_basis) += y_b;
  return w;
}

mp::DesiredTrajectory MotionGenerator::plan(const Eigen::VectorXd& params, double t_b,
                                            const Eigen::VectorXd& y_b,
                                            const Eigen::VectorXd& dy_b, int steps,
                                            double dt) const {
  require(steps >= 1 && dt > 0.0, "MotionGenerator::plan: need steps >= 1 and dt > 0");
  require(params.allFinite(), "MotionGenerator::plan: non-finite parameters");
  switch (cfg_.type) {
    case MpType::kProDmp:
      return mp::prodmp_rollout({t_b, y_b, dy_b}, weights(params, y_b), *basis_, steps, dt);
    case MpType::kDmp:
      return mp::dmp_integrate({t_b, y_b, dy_b}, weights(params, y_b), dmp_, dt, steps);
    case MpType::kProMp: {
      require(params.size() == param_dim(), "MotionGenerator: parameter dimension mismatch");
      // row-major reshape keeps the DoF-major flat layout of the other types
      const Eigen::MatrixXd w =
          cfg_.weight_scale *
          Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
              params.data(), cfg_.num_dof, cfg_.num_basis);
      std::vector<double> times(static_cast<std::size_t>(steps) + 1);
      for (int i = 0; i <= steps; ++i) times[static_cast<std::size_t>(i)] = t_b + i * dt;
      mp::DesiredTrajectory traj = mp::promp_evaluate(w, times, *promp_);
      if (cfg_.relative_goal) {
        // anchor the position (not the velocity) at the measured state
        const Eigen::RowVectorXd offset = y_b.transpose() - traj.pos.row(0);
        traj.pos.rowwise() += offset;
      }
      return traj;
    }
    case MpType::kRaw:
      break;
  }
  throw PreconditionError("MotionGenerator::plan: raw actions have no trajectory");
}

}  // namespace mprl::rl
