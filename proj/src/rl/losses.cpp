#include "mprl/rl/losses.hpp"

#include <algorithm>
#include <cmath>

#include "mprl/error.hpp"

namespace mprl::rl {

namespace {

void check_aligned(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                   const char* what) {
  if (a.size() != b.size() || a.size() != c.size() || a.size() == 0)
    throw PreconditionError(std::string(what) + ": inputs must be non-empty and aligned");
}

Eigen::VectorXd ratios(const Eigen::VectorXd& lp_new, const Eigen::VectorXd& lp_old,
                       const char* what) {
  Eigen::VectorXd rho = (lp_new - lp_old).array().exp().matrix();
  for (Eigen::Index i = 0; i < rho.size(); ++i) {
    if (!std::isfinite(rho[i])) {
      throw DivergenceError(std::string(what) + ": non-finite importance ratio at sample " +
                            std::to_string(i) + " (log_prob_new=" + std::to_string(lp_new[i]) +
                            ", log_prob_old=" + std::to_string(lp_old[i]) + ")");
    }
  }
  return rho;
}

}  // namespace

SurrogateTerms ppo_clip_surrogate(const Eigen::VectorXd& log_prob_new,
                                  const Eigen::VectorXd& log_prob_old,
                                  const Eigen::VectorXd& advantages, double clip_eps) {
  check_aligned(log_prob_new, log_prob_old, advantages, "ppo_clip_surrogate");
  require(clip_eps > 0.0, "ppo_clip_surrogate: clip epsilon must be > 0");
  const Eigen::VectorXd rho = ratios(log_prob_new, log_prob_old, "ppo_clip_surrogate");
  const auto n = static_cast<double>(rho.size());
  SurrogateTerms out;
  out.d_log_prob = Eigen::VectorXd::Zero(rho.size());
  int clipped = 0;
  for (Eigen::Index i = 0; i < rho.size(); ++i) {
    const double a = advantages[i];
    const double unclipped = rho[i] * a;
    const double clipped_obj = std::clamp(rho[i], 1.0 - clip_eps, 1.0 + clip_eps) * a;
    if (unclipped <= clipped_obj) {
      out.loss -= unclipped / n;
      out.d_log_prob[i] = -rho[i] * a / n;
    } else {
      out.loss -= clipped_obj / n;
      ++clipped;
    }
  }
  out.clip_fraction = clipped / n;
  return out;
}

SurrogateTerms importance_surrogate(const Eigen::VectorXd& log_prob_new,
                                    const Eigen::VectorXd& log_prob_old,
                                    const Eigen::VectorXd& advantages) {
  check_aligned(log_prob_new, log_prob_old, advantages, "importance_surrogate");
  const Eigen::VectorXd rho = ratios(log_prob_new, log_prob_old, "importance_surrogate");
  const auto n = static_cast<double>(rho.size());
  SurrogateTerms out;
  const Eigen::VectorXd obj = rho.cwiseProduct(advantages);
  out.loss = -obj.sum() / n;
  out.d_log_prob = -obj / n;
  return out;
}

ValueLoss value_loss(const Eigen::VectorXd& predicted, const Eigen::VectorXd& targets) {
  require(predicted.size() == targets.size() && predicted.size() > 0,
          "value_loss: inputs must be non-empty and aligned");
  const auto n = static_cast<double>(predicted.size());
  const Eigen::VectorXd diff = predicted - targets;
  return {diff.squaredNorm() / n, 2.0 * diff / n};
}

Eigen::VectorXd normalize_advantages(const Eigen::VectorXd& adv) {
  if (adv.size() == 0) return adv;
  const double mean = adv.mean();
  Eigen::VectorXd centered = adv.array() - mean;
  if (adv.size() < 2) return centered;
  const double sd = std::sqrt(centered.squaredNorm() / static_cast<double>(adv.size() - 1));
  if (!(sd > 1e-12)) return centered;
  return centered / sd;
}

LogProbGrad log_prob_grad(const nn::DiagGaussian& dist, const Eigen::VectorXd& x) {
  require(x.size() == dist.dim(), "log_prob_grad: dimension mismatch");
  const Eigen::ArrayXd z = (x - dist.mean).array() / dist.std().array();
  return {(z / dist.std().array()).matrix(), (z.square() - 1.0).matrix()};
}

}  // namespace mprl::rl
