#include "mprl/envs/reacher.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <istream>
#include <ostream>
#include <sstream>

#include "mprl/error.hpp"

namespace mprl::envs {

std::string to_string(RewardKind kind) {
  switch (kind) {
    case RewardKind::kDense:
      return "dense";
    case RewardKind::kSparse:
      return "sparse";
    case RewardKind::kNonMarkovian:
      return "non_markovian";
  }
  return "dense";
}

RewardKind reward_kind_from_string(const std::string& s) {
  if (s == "dense") return RewardKind::kDense;
  if (s == "sparse") return RewardKind::kSparse;
  if (s == "non_markovian") return RewardKind::kNonMarkovian;
  throw PreconditionError("unknown reward kind '" + s + "' (dense, sparse, non_markovian)");
}

void ReacherConfig::validate() const {
  require(episode_len >= 1, "reacher: episode_len must be >= 1");
  require(dt > 0.0 && std::isfinite(dt), "reacher: dt must be > 0");
  require(action_bound > 0.0 && std::isfinite(action_bound), "reacher: action_bound must be > 0");
  require(!link_lengths.empty(), "reacher: need at least one link");
  for (double l : link_lengths) require(l > 0.0 && std::isfinite(l), "reacher: link lengths must be > 0");
  require(goal_radius_min >= 0.0 && goal_radius_min <= goal_radius_max,
          "reacher: need 0 <= goal_radius_min <= goal_radius_max");
  require(goal_radius_max <= reach(), "reacher: goal_radius_max exceeds the arm reach");
  require(action_cost >= 0.0 && std::isfinite(action_cost), "reacher: action_cost must be >= 0");
  require(success_threshold > 0.0, "reacher: success_threshold must be > 0");
  if (goal_switch) {
    require(goal_switch->switch_fraction > 0.0 && goal_switch->switch_fraction < 1.0,
            "reacher: switch_fraction must be in (0, 1)");
    require(goal_switch->delta_max >= 0.0, "reacher: switch delta_max must be >= 0");
  }
}

double ReacherConfig::reach() const {
  double r = 0.0;
  for (double l : link_lengths) r += l;
  return r;
}

int ReacherConfig::switch_step() const {
  if (!goal_switch) return -1;
  return static_cast<int>(std::floor(goal_switch->switch_fraction * episode_len));
}

Eigen::Vector2d forward_kinematics(const Eigen::VectorXd& joint_pos,
                                   const std::vector<double>& link_lengths) {
  require(joint_pos.size() == static_cast<Eigen::Index>(link_lengths.size()),
          "forward_kinematics: joint count does not match link count");
  Eigen::Vector2d p = Eigen::Vector2d::Zero();
  double angle = 0.0;
  for (Eigen::Index i = 0; i < joint_pos.size(); ++i) {
    angle += joint_pos[i];
    p.x() += link_lengths[i] * std::cos(angle);
    p.y() += link_lengths[i] * std::sin(angle);
  }
  return p;
}

Eigen::MatrixXd fk_jacobian(const Eigen::VectorXd& joint_pos,
                            const std::vector<double>& link_lengths) {
  const Eigen::Index n = joint_pos.size();
  require(n == static_cast<Eigen::Index>(link_lengths.size()),
          "fk_jacobian: joint count does not match link count");
  // column j is the sum over links i >= j of the link vector rotated by 90 deg
  Eigen::MatrixXd link(2, n);
  double angle = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    angle += joint_pos[i];
    link(0, i) = link_lengths[i] * std::cos(angle);
    link(1, i) = link_lengths[i] * std::sin(angle);
  }
  Eigen::MatrixXd jac(2, n);
  Eigen::Vector2d tail = Eigen::Vector2d::Zero();
  for (Eigen::Index j = n - 1; j >= 0; --j) {
    tail += link.col(j);
    jac(0, j) = -tail.y();
    jac(1, j) = tail.x();
  }
  return jac;
}

Eigen::Vector2d sample_goal(std::mt19937_64& rng, const ReacherConfig& cfg) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double r2_lo = cfg.goal_radius_min * cfg.goal_radius_min;
  const double r2_hi = cfg.goal_radius_max * cfg.goal_radius_max;
  const double r = std::sqrt(r2_lo + (r2_hi - r2_lo) * unit(rng));
  const double theta = std::numbers::pi * unit(rng);
  return {r * std::cos(theta), r * std::sin(theta)};
}

Eigen::Vector2d clip_goal(const Eigen::Vector2d& goal, const ReacherConfig& cfg) {
  Eigen::Vector2d g(goal.x(), std::max(goal.y(), 0.0));
  const double r = g.norm();
  if (r > cfg.goal_radius_max) {
    g *= cfg.goal_radius_max / r;
  } else if (r < cfg.goal_radius_min) {
    if (r > 0.0) {
      g *= cfg.goal_radius_min / r;
    } else {
      g = Eigen::Vector2d(0.0, cfg.goal_radius_min);
    }
  }
  return g;
}

void apply_goal_switch(ReacherState& state, std::mt19937_64& rng, const GoalSwitch& sw,
                       const ReacherConfig& cfg) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const double dx = sw.delta_max * unit(rng);
  const double dy = sw.delta_max * unit(rng);
  if (sw.delta_max == 0.0) return;
  state.goal = clip_goal(state.goal + Eigen::Vector2d(dx, dy), cfg);
}

bool success(const ReacherState& state, const ReacherConfig& cfg) {
  if (state.step_index != cfg.episode_len) return false;
  const double d = (forward_kinematics(state.joint_pos, cfg.link_lengths) - state.goal).norm();
  return d < cfg.success_threshold;
}

Reacher5d::Reacher5d(ReacherConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  const int n = cfg_.num_joints();
  state_.joint_pos = Eigen::VectorXd::Zero(n);
  state_.joint_vel = Eigen::VectorXd::Zero(n);
  state_.goal = Eigen::Vector2d(0.0, 0.5 * (cfg_.goal_radius_min + cfg_.goal_radius_max));
  min_distance_ = goal_distance();
}

Eigen::VectorXd Reacher5d::reset(std::mt19937_64& rng) {
  const int n = cfg_.num_joints();
  state_.joint_pos = Eigen::VectorXd::Zero(n);
  state_.joint_vel = Eigen::VectorXd::Zero(n);
  state_.goal = sample_goal(rng, cfg_);
  state_.step_index = 0;
  // the switch stream is drawn up front so the goal stream does not depend
  // on whether a switch is configured
  switch_rng_.seed(rng());
  energy_ = 0.0;
  min_distance_ = goal_distance();
  return observation();
}

StepResult Reacher5d::step(const Eigen::VectorXd& action) {
  require(action.size() == cfg_.num_joints(), "reacher step: action dimension mismatch");
  if (!action.allFinite()) throw DomainError("reacher step: non-finite action");
  if (state_.step_index >= cfg_.episode_len)
    throw PreconditionError("reacher step: episode already finished; call reset");

  const Eigen::VectorXd a = action.cwiseMax(-cfg_.action_bound).cwiseMin(cfg_.action_bound);
  state_.joint_vel += cfg_.dt * a;
  state_.joint_pos += cfg_.dt * state_.joint_vel;
  ++state_.step_index;

  const double tau = a.squaredNorm();
  energy_ += tau;
  const bool done = state_.step_index == cfg_.episode_len;
  const double dist = goal_distance();
  min_distance_ = std::min(min_distance_, dist);

  double reward = -cfg_.action_cost * tau / (cfg_.action_bound * cfg_.action_bound);
  switch (cfg_.reward) {
    case RewardKind::kDense:
      reward -= dist;
      break;
    case RewardKind::kSparse:
      if (done) {
        reward -= cfg_.terminal_goal_weight * dist +
                  cfg_.terminal_velocity_weight * state_.joint_vel.squaredNorm();
      }
      break;
    case RewardKind::kNonMarkovian:
      if (done) reward -= cfg_.terminal_goal_weight * min_distance_;
      break;
  }

  if (cfg_.goal_switch && state_.step_index == cfg_.switch_step()) {
    apply_goal_switch(state_, switch_rng_, *cfg_.goal_switch, cfg_);
    // the episode minimum restarts against the new target
    min_distance_ = goal_distance();
  }
  return {observation(), reward, done};
}

int Reacher5d::observation_dim() const {
  const int n = cfg_.num_joints();
  return 3 * n + 4 + (cfg_.reward == RewardKind::kDense ? 0 : 1);
}

Eigen::VectorXd Reacher5d::observation() const {
  const int n = cfg_.num_joints();
  Eigen::VectorXd obs(observation_dim());
  obs.segment(0, n) = state_.joint_pos.array().cos().matrix();
  obs.segment(n, n) = state_.joint_pos.array().sin().matrix();
  obs.segment(2 * n, n) = state_.joint_vel;
  obs.segment(3 * n, 2) = state_.goal;
  obs.segment(3 * n + 2, 2) = end_effector() - state_.goal;
  if (cfg_.reward != RewardKind::kDense)
    obs[3 * n + 4] = static_cast<double>(state_.step_index) / cfg_.episode_len;
  return obs;
}

EpisodeStats Reacher5d::episode_stats() const {
  EpisodeStats s;
  s.success = success(state_, cfg_);
  s.final_distance = goal_distance();
  s.energy = energy_;
  s.steps = state_.step_index;
  return s;
}

std::unique_ptr<Environment> Reacher5d::clone() const {
  return std::make_unique<Reacher5d>(*this);
}

Eigen::Vector2d Reacher5d::end_effector() const {
  return forward_kinematics(state_.joint_pos, cfg_.link_lengths);
}

double Reacher5d::goal_distance() const { return (end_effector() - state_.goal).norm(); }

void Reacher5d::set_state(const ReacherState& s) {
  require(s.joint_pos.size() == cfg_.num_joints() && s.joint_vel.size() == cfg_.num_joints(),
          "reacher set_state: joint dimension mismatch");
  require(s.step_index >= 0 && s.step_index <= cfg_.episode_len,
          "reacher set_state: step_index out of range");
  state_ = s;
  min_distance_ = goal_distance();
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows) {
  const Eigen::Index n = rows.empty() ? 0 : rows.front().q.size();
  out << 't';
  for (const char* p : {"q", "qd", "a"})
    for (Eigen::Index i = 1; i <= n; ++i) out << ',' << p << i;
  out << ",r\n";
  out.precision(std::numeric_limits<double>::max_digits10);
  for (const auto& row : rows) {
    require(row.q.size() == n && row.qd.size() == n && row.a.size() == n,
            "write_trace_csv: ragged rows");
    out << row.t;
    for (const Eigen::VectorXd* v : {&row.q, &row.qd, &row.a})
      for (Eigen::Index i = 0; i < n; ++i) out << ',' << (*v)[i];
    out << ',' << row.r << '\n';
  }
}

std::vector<TraceRow> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("trace csv: missing header");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.size() < 2 || (header.size() - 2) % 3 != 0 || header.front() != "t" ||
      header.back() != "r")
    throw FormatError("trace csv: unexpected header '" + line + "'");
  const auto n = static_cast<Eigen::Index>((header.size() - 2) / 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::string k = std::to_string(i + 1);
    if (header[1 + i] != "q" + k || header[1 + n + i] != "qd" + k ||
        header[1 + 2 * n + i] != "a" + k)
      throw FormatError("trace csv: unexpected header '" + line + "'");
  }

  std::vector<TraceRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string cell;
    try {
      while (std::getline(ss, cell, ',')) {
        std::size_t used = 0;
        vals.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      }
    } catch (const std::exception&) {
      throw FormatError("trace csv line " + std::to_string(lineno) + ": bad number");
    }
    if (vals.size() != header.size())
      throw FormatError("trace csv line " + std::to_string(lineno) + ": expected " +
                        std::to_string(header.size()) + " fields");
    TraceRow row;
    row.t = static_cast<int>(vals[0]);
    row.q = Eigen::Map<const Eigen::VectorXd>(vals.data() + 1, n);
    row.qd = Eigen::Map<const Eigen::VectorXd>(vals.data() + 1 + n, n);
    row.a = Eigen::Map<const Eigen::VectorXd>(vals.data() + 1 + 2 * n, n);
    row.r = vals.back();
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace mprl::envs
