#include "mprl/rl/frame_skip.hpp"

#include "mprl/error.hpp"

namespace mprl::rl {

FrameSkip::FrameSkip(std::unique_ptr<envs::Environment> inner, int repeat, double gamma)
    : inner_(std::move(inner)), repeat_(repeat), gamma_(gamma) {
  require(inner_ != nullptr, "frame_skip: null environment");
  require(repeat_ >= 1, "frame_skip: repeat must be >= 1, got " + std::to_string(repeat_));
  require(gamma_ > 0.0 && gamma_ <= 1.0, "frame_skip: gamma must be in (0, 1]");
}

Eigen::VectorXd FrameSkip::reset(std::mt19937_64& rng) {
  decisions_ = 0;
  return inner_->reset(rng);
}

envs::StepResult FrameSkip::step(const Eigen::VectorXd& action) {
  envs::StepResult out;
  double discount = 1.0;
  for (int i = 0; i < repeat_; ++i) {
    envs::StepResult r = inner_->step(action);
    out.reward += discount * r.reward;
    discount *= gamma_;
    out.observation = std::move(r.observation);
    out.done = r.done;
    if (r.done) break;
  }
  ++decisions_;
  return out;
}

int FrameSkip::episode_len() const {
  return (inner_->episode_len() + repeat_ - 1) / repeat_;
}

std::unique_ptr<envs::Environment> FrameSkip::clone() const {
  auto copy = std::make_unique<FrameSkip>(inner_->clone(), repeat_, gamma_);
  copy->decisions_ = decisions_;
  return copy;
}

}  // namespace mprl::rl
