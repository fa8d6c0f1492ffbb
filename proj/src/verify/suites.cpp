#include "mprl/verify/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <random>

#include "mprl/error.hpp"
#include "mprl/mp/basis_set.hpp"
#include "mprl/mp/prodmp.hpp"
#include "mprl/nn/gaussian_policy.hpp"
#include "mprl/nn/gradient_check.hpp"
#include "mprl/rl/losses.hpp"
#include "mprl/rl/policy_update.hpp"
#include "mprl/rl/returns.hpp"
#include "mprl/trpl/projection.hpp"
#include "mprl/verify/oracles.hpp"

namespace mprl::verify {

namespace {

using Clock = std::chrono::steady_clock;

Check make_check(std::string name, double err, double tol) {
  return {std::move(name), err, tol, std::isfinite(err) && err <= tol};
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Eigen::VectorXd uniform_vec(std::mt19937_64& rng, Eigen::Index n, double lo, double hi) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = uniform(rng, lo, hi);
  return v;
}

Eigen::VectorXd normal_vec(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = nd(rng);
  return v;
}

mp::WeightVector random_weights(std::mt19937_64& rng, int dofs, int num_basis) {
  mp::WeightVector w(dofs, num_basis);
  for (int d = 0; d < dofs; ++d) {
    for (int j = 0; j < num_basis; ++j) w.per_dof()(d, j) = uniform(rng, -100.0, 100.0);
    w.set_goal(d, uniform(rng, -1.0, 1.0));
  }
  return w;
}

constexpr int kDofs = 5;

mp::DmpConfig oracle_config() { return mp::DmpConfig(25.0, 5, mp::PhaseConfig{3.0, 2.0}); }

}  // namespace

bool SuiteReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

SuiteReport verify_mp_oracle(const VerifyOptions& opts) {
  require(opts.grid_len >= 2, "verify: grid_len must be >= 2");
  const auto t0 = Clock::now();
  SuiteReport rep;
  rep.suite = "mp_oracle";
  std::mt19937_64 rng(opts.seed);
  const mp::DmpConfig cfg = oracle_config();
  const mp::MpBasisSet basis = mp::precompute_basis_set(cfg, opts.grid_len);
  const int last = opts.grid_len - 1;
  const double h = basis.spacing();

  // closed form against the integrated ODE on the basis grid
  const int substeps = std::max(1, (10000 + last - 1) / last);
  double pos_err = 0.0;
  double vel_err = 0.0;
  for (int i = 0; i < opts.mp_instances; ++i) {
    const mp::WeightVector w = random_weights(rng, kDofs, cfg.num_basis());
    const int start = i % 2 == 0 ? 0 : std::uniform_int_distribution<int>(0, last / 2)(rng);
    mp::InitialCondition ic{start * h, uniform_vec(rng, kDofs, -1.0, 1.0),
                            uniform_vec(rng, kDofs, -2.0, 2.0)};
    const mp::DesiredTrajectory closed = mp::prodmp_rollout(ic, w, basis, last - start);
    const mp::DesiredTrajectory ref = rk4_reference(ic, w, cfg, h, last - start, substeps);
    pos_err = std::max(pos_err, (closed.pos - ref.pos).cwiseAbs().maxCoeff());
    vel_err = std::max(vel_err, (closed.vel - ref.vel).cwiseAbs().maxCoeff());
  }
  rep.checks.push_back(make_check("prodmp_vs_rk4_position", pos_err, 1e-3));
  rep.checks.push_back(make_check("prodmp_vs_rk4_velocity", vel_err, 1e-2));

  // continuity when a new weight vector takes over mid-trajectory
  double pos_jump = 0.0;
  double vel_jump = 0.0;
  if (last >= 2) {
    for (int i = 0; i < opts.replans; ++i) {
      const mp::WeightVector w1 = random_weights(rng, kDofs, cfg.num_basis());
      const mp::WeightVector w2 = random_weights(rng, kDofs, cfg.num_basis());
      mp::InitialCondition ic{0.0, uniform_vec(rng, kDofs, -1.0, 1.0),
                              uniform_vec(rng, kDofs, -2.0, 2.0)};
      const int b = std::uniform_int_distribution<int>(1, last - 1)(rng);
      const mp::DesiredTrajectory first = mp::prodmp_rollout(ic, w1, basis, b);
      mp::InitialCondition at_b{b * h, first.pos.row(b).transpose(), first.vel.row(b).transpose()};
      const mp::DesiredTrajectory second = mp::prodmp_rollout(at_b, w2, basis, last - b);
      pos_jump = std::max(pos_jump, (second.pos.row(0) - first.pos.row(b)).cwiseAbs().maxCoeff());
      vel_jump = std::max(vel_jump, (second.vel.row(0) - first.vel.row(b)).cwiseAbs().maxCoeff());
    }
  }
  rep.checks.push_back(make_check("replan_position_jump", pos_jump, 1e-9));
  rep.checks.push_back(make_check("replan_velocity_jump", vel_jump, 1e-8));

  // coefficients reproduce the initial condition
  double ic_err = 0.0;
  double ic0_err = 0.0;
  const double a = cfg.alpha() / (2.0 * cfg.tau());
  for (int i = 0; i < opts.ic_instances; ++i) {
    const mp::WeightVector w = random_weights(rng, kDofs, cfg.num_basis());
    mp::InitialCondition ic{uniform(rng, 0.0, cfg.tau()), uniform_vec(rng, kDofs, -1.0, 1.0),
                            uniform_vec(rng, kDofs, -2.0, 2.0)};
    const mp::ProDmpCoefficients c = mp::prodmp_solve_coeffs(ic, w, basis);
    const mp::ProDmpState s = mp::prodmp_evaluate(c, w, basis, ic.t_b);
    ic_err = std::max({ic_err, (s.pos - ic.y_b).cwiseAbs().maxCoeff(),
                       (s.vel - ic.dy_b).cwiseAbs().maxCoeff()});
    ic.t_b = 0.0;
    const mp::ProDmpCoefficients c0 = mp::prodmp_solve_coeffs(ic, w, basis);
    ic0_err = std::max({ic0_err, (c0.c1 - ic.y_b).cwiseAbs().maxCoeff(),
                        (c0.c2 - (ic.dy_b + ic.y_b * a)).cwiseAbs().maxCoeff()});
  }
  rep.checks.push_back(make_check("initial_condition_round_trip", ic_err, 1e-10));
  rep.checks.push_back(make_check("initial_condition_t0_exact", ic0_err, 0.0));
  rep.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return rep;
}

SuiteReport verify_projection(const VerifyOptions& opts) {
  const auto t0 = Clock::now();
  SuiteReport rep;
  rep.suite = "projection";
  std::mt19937_64 rng(opts.seed + 1);
  double mean_excess = -std::numeric_limits<double>::infinity();
  double cov_excess = -std::numeric_limits<double>::infinity();
  double kl_excess = -std::numeric_limits<double>::infinity();
  double identity_err = 0.0;
  double optimizer_err = 0.0;
  double idempotence_err = 0.0;
  int inside = 0;
  for (int i = 0; i < opts.projection_pairs; ++i) {
    const int d = std::uniform_int_distribution<int>(1, 8)(rng);
    nn::DiagGaussian old{normal_vec(rng, d), uniform_vec(rng, d, -1.5, 0.5)};
    trpl::TrustRegionBounds b{std::pow(10.0, uniform(rng, -3.0, -1.0)),
                              std::pow(10.0, uniform(rng, -4.0, -1.3))};
    // every fifth pair is a small step that stays inside both bounds
    const double scale = i % 5 == 0 ? 1e-3 * std::sqrt(b.eps_cov / d)
                                     : std::pow(10.0, uniform(rng, -2.0, 0.7));
    nn::DiagGaussian next{old.mean + scale * old.std().cwiseProduct(normal_vec(rng, d)),
                          old.log_std + scale * uniform_vec(rng, d, -1.0, 1.0)};

    const trpl::Projection p = trpl::project_policy(next, old, b);
    const Eigen::VectorXd sigma_old = old.std();
    mean_excess = std::max(mean_excess, trpl::mean_distance(p.dist.mean, old.mean, sigma_old) - b.eps_mean);
    cov_excess = std::max(cov_excess, trpl::cov_distance(p.dist.std(), sigma_old) - b.eps_cov);
    kl_excess = std::max(kl_excess, nn::kl_diag(p.dist, old).total() - b.eps_mean - b.eps_cov);

    const bool in_region = trpl::mean_distance(next.mean, old.mean, sigma_old) <= b.eps_mean &&
                           trpl::cov_distance(next.std(), sigma_old) <= b.eps_cov;
    if (in_region) {
      ++inside;
      const bool same = (p.dist.mean.array() == next.mean.array()).all() &&
                        (p.dist.log_std.array() == next.log_std.array()).all();
      identity_err = std::max(identity_err, same ? 0.0 : 1.0);
    }

    const nn::DiagGaussian ref = numeric_projection(next, old, b);
    optimizer_err = std::max({optimizer_err, (p.dist.mean - ref.mean).cwiseAbs().maxCoeff(),
                              (p.dist.std() - ref.std()).cwiseAbs().maxCoeff()});

    const trpl::Projection twice = trpl::project_policy(p.dist, old, b);
    idempotence_err = std::max({idempotence_err, (twice.dist.mean - p.dist.mean).cwiseAbs().maxCoeff(),
                                (twice.dist.log_std - p.dist.log_std).cwiseAbs().maxCoeff()});
  }
  rep.checks.push_back(make_check("mean_bound_excess", mean_excess, 1e-9));
  rep.checks.push_back(make_check("cov_bound_excess", cov_excess, 1e-9));
  rep.checks.push_back(make_check("total_kl_excess", kl_excess, 1e-6));
  rep.checks.push_back(make_check("identity_inside_region", inside > 0 ? identity_err : 1.0, 0.0));
  rep.checks.push_back(make_check("numeric_optimizer_match", optimizer_err, 1e-6));
  rep.checks.push_back(make_check("idempotence", idempotence_err, 1e-10));
  rep.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return rep;
}

SuiteReport verify_gradients(const VerifyOptions& opts) {
  const auto t0 = Clock::now();
  SuiteReport rep;
  rep.suite = "gradients";
  std::mt19937_64 rng(opts.seed + 2);
  constexpr double kTol = 1e-4;

  // MLP parameters and inputs, both activations
  for (nn::Activation act : {nn::Activation::kTanh, nn::Activation::kRelu}) {
    nn::Mlp net(nn::MlpSpec{4, {7, 5}, 3, act});
    net.initialize(rng, 1.0);
    net.params() += 0.1 * normal_vec(rng, net.num_params());
    const Eigen::MatrixXd x = Eigen::MatrixXd::Random(4, 3);
    const Eigen::MatrixXd c = Eigen::MatrixXd::Random(3, 3);
    nn::Mlp::Cache cache;
    net.forward(x, cache);
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(net.num_params());
    const Eigen::MatrixXd dx = net.backward(cache, c, grad);
    auto loss_p = [&](const Eigen::VectorXd& p) {
      nn::Mlp m = net;
      m.set_params(p);
      return (m.forward(x).array() * c.array()).sum();
    };
    auto loss_x = [&](const Eigen::VectorXd& flat) {
      const Eigen::MatrixXd xi = Eigen::Map<const Eigen::MatrixXd>(flat.data(), 4, 3);
      return (net.forward(xi).array() * c.array()).sum();
    };
    const Eigen::VectorXd x_flat = Eigen::Map<const Eigen::VectorXd>(x.data(), x.size());
    const Eigen::VectorXd dx_flat = Eigen::Map<const Eigen::VectorXd>(dx.data(), dx.size());
    const std::string tag = nn::to_string(act);
    rep.checks.push_back(make_check("mlp_params_" + tag,
                                    nn::relative_error(grad, nn::central_difference(loss_p, net.params())), kTol));
    rep.checks.push_back(make_check("mlp_inputs_" + tag,
                                    nn::relative_error(dx_flat, nn::central_difference(loss_x, x_flat)), kTol));
  }

  // Gaussian policy: means and log std through the flat parameter vector
  nn::GaussianPolicy policy(nn::MlpSpec{3, {8, 8}, 4, nn::Activation::kTanh}, -0.3);
  policy.initialize(rng, 1.0);
  {
    const Eigen::MatrixXd states = Eigen::MatrixXd::Random(3, 5);
    const Eigen::MatrixXd c = Eigen::MatrixXd::Random(4, 5);
    const Eigen::VectorXd e = Eigen::VectorXd::Random(4);
    nn::Mlp::Cache cache;
    policy.means(states, cache);
    const Eigen::VectorXd grad = policy.backward(cache, c, e);
    auto loss = [&](const Eigen::VectorXd& p) {
      nn::GaussianPolicy q = policy;
      q.set_flat_params(p);
      return (q.means(states).array() * c.array()).sum() + e.dot(q.clamped_log_std());
    };
    rep.checks.push_back(make_check("policy_params",
                                    nn::relative_error(grad, nn::central_difference(loss, policy.flat_params())), kTol));
  }

  // log density
  {
    nn::DiagGaussian dist{normal_vec(rng, 4), uniform_vec(rng, 4, -1.0, 0.5)};
    const Eigen::VectorXd x = normal_vec(rng, 4);
    const rl::LogProbGrad g = rl::log_prob_grad(dist, x);
    Eigen::VectorXd packed(8);
    packed << dist.mean, dist.log_std;
    Eigen::VectorXd analytic(8);
    analytic << g.d_mean, g.d_log_std;
    auto f = [&](const Eigen::VectorXd& p) {
      return nn::log_prob(nn::DiagGaussian{p.head(4), p.tail(4)}, x);
    };
    rep.checks.push_back(make_check("log_prob", nn::relative_error(analytic, nn::central_difference(f, packed)), kTol));
  }

  // projection layer with both bounds active, and the regression loss
  {
    const int d = 4;
    const trpl::TrustRegionBounds b{0.01, 0.002};
    double worst = 0.0;
    double worst_reg = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      nn::DiagGaussian old{normal_vec(rng, d), uniform_vec(rng, d, -1.0, 0.3)};
      nn::DiagGaussian next{old.mean + 0.5 * old.std().cwiseProduct(normal_vec(rng, d)),
                            old.log_std + uniform_vec(rng, d, -0.6, 0.6)};
      const Eigen::VectorXd a = normal_vec(rng, d);
      const Eigen::VectorXd c = normal_vec(rng, d);
      const trpl::Projection p = trpl::project_policy(next, old, b);
      const trpl::ProjectionGrad g = trpl::project_policy_backward(p, next, old, a, c);
      Eigen::VectorXd packed(2 * d);
      packed << next.mean, next.log_std;
      Eigen::VectorXd analytic(2 * d);
      analytic << g.d_mean, g.d_log_std;
      auto f = [&](const Eigen::VectorXd& q) {
        const trpl::Projection pq = trpl::project_policy(nn::DiagGaussian{q.head(d), q.tail(d)}, old, b);
        return a.dot(pq.dist.mean) + c.dot(pq.dist.log_std);
      };
      worst = std::max(worst, nn::relative_error(analytic, nn::central_difference(f, packed)));

      const trpl::RegressionLoss r = trpl::trust_region_regression_loss(p.dist, next);
      analytic << r.d_mean, r.d_log_std;
      auto fr = [&](const Eigen::VectorXd& q) {
        return trpl::trust_region_regression_loss(p.dist, nn::DiagGaussian{q.head(d), q.tail(d)}).loss;
      };
      worst_reg = std::max(worst_reg, nn::relative_error(analytic, nn::central_difference(fr, packed)));
    }
    rep.checks.push_back(make_check("projection_backward", worst, kTol));
    rep.checks.push_back(make_check("regression_loss", worst_reg, kTol));
  }

  // full policy losses through the network
  {
    std::vector<rl::SegmentSample> samples(6);
    Eigen::VectorXd adv = normal_vec(rng, 6);
    for (auto& s : samples) {
      s.state = normal_vec(rng, 3);
      const nn::DiagGaussian cur = policy.distribution(s.state);
      s.old_dist = nn::DiagGaussian{cur.mean + 0.3 * normal_vec(rng, 4),
                                    cur.log_std + 0.2 * normal_vec(rng, 4)};
      s.weight = nn::sample(s.old_dist, rng);
      s.old_log_prob = nn::log_prob(s.old_dist, s.weight);
    }
    std::vector<const rl::SegmentSample*> mb;
    for (const auto& s : samples) mb.push_back(&s);
    for (rl::Algorithm algo : {rl::Algorithm::kTrpl, rl::Algorithm::kPpoClip}) {
      rl::PolicyLossOptions o;
      o.algorithm = algo;
      o.bounds = {0.05, 0.01};
      o.entropy_coef = 0.01;
      const rl::PolicyLoss pl = rl::surrogate_loss(policy, mb, adv, o);
      // the regression target is the projection at the current parameters,
      // held fixed
      std::vector<nn::DiagGaussian> targets;
      for (const auto& s : samples)
        targets.push_back(trpl::project_policy(policy.distribution(s.state), s.old_dist, o.bounds).dist);
      auto f = [&](const Eigen::VectorXd& p) {
        nn::GaussianPolicy q = policy;
        q.set_flat_params(p);
        rl::PolicyLossOptions no_reg = o;
        no_reg.regression_coef = 0.0;
        double total = rl::surrogate_loss(q, mb, adv, no_reg).total;
        if (algo == rl::Algorithm::kTrpl) {
          for (std::size_t i = 0; i < samples.size(); ++i) {
            total += o.regression_coef / static_cast<double>(samples.size()) *
                     trpl::trust_region_regression_loss(targets[i], q.distribution(samples[i].state)).loss;
          }
        }
        return total;
      };
      rep.checks.push_back(make_check("surrogate_" + rl::to_string(algo),
                                      nn::relative_error(pl.grad, nn::central_difference(f, policy.flat_params())), kTol));
    }
  }

  // value regression
  {
    const Eigen::VectorXd pred = normal_vec(rng, 7);
    const Eigen::VectorXd tgt = normal_vec(rng, 7);
    auto f = [&](const Eigen::VectorXd& p) { return rl::value_loss(p, tgt).loss; };
    rep.checks.push_back(make_check("value_loss",
                                    nn::relative_error(rl::value_loss(pred, tgt).d_pred, nn::central_difference(f, pred)), kTol));
  }
  rep.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return rep;
}

SuiteReport verify_returns(const VerifyOptions& opts) {
  const auto t0 = Clock::now();
  SuiteReport rep;
  rep.suite = "returns";
  std::mt19937_64 rng(opts.seed + 3);
  double worst = 0.0;
  // 137 is prime, so every k > 1 leaves a shorter final segment
  for (int episode_len : {100, 137}) {
    for (int k : {1, 2, 5, 10, 25, 50, 100}) {
      for (int e = 0; e < opts.return_episodes; ++e) {
        const double gamma = e == 0 ? 1.0 : uniform(rng, 0.9, 1.0);
        const Eigen::VectorXd r = uniform_vec(rng, episode_len, -1.0, 1.0);
        std::vector<rl::SegmentReward> segs;
        int start = 0;
        for (int len : rl::segment_lengths(episode_len, k)) {
          segs.push_back({start, len,
                          rl::segment_reward(std::span<const double>(r.data() + start, len), gamma)});
          start += len;
        }
        const double composed = rl::episode_return(segs, gamma, episode_len);
        const double direct = brute_force_return(std::span<const double>(r.data(), r.size()), gamma);
        worst = std::max(worst, std::abs(composed - direct));
      }
    }
  }
  rep.checks.push_back(make_check("segment_return_identity", worst, 1e-12));

  double gae_err = 0.0;
  for (int e = 0; e < 200; ++e) {
    const int n = std::uniform_int_distribution<int>(1, 30)(rng);
    const double gamma = uniform(rng, 0.9, 1.0);
    const int k = std::uniform_int_distribution<int>(1, 10)(rng);
    const Eigen::VectorXd rew = uniform_vec(rng, n, -2.0, 2.0);
    const Eigen::VectorXd val = uniform_vec(rng, n + 1, -2.0, 2.0);
    Eigen::VectorXd disc = Eigen::VectorXd::Constant(n, std::pow(gamma, k));
    disc[n - 1] = std::pow(gamma, std::uniform_int_distribution<int>(1, k)(rng));
    const double lambda = uniform(rng, 0.0, 1.0);
    const rl::GaeResult g = rl::gae_advantages(rew, val, disc, lambda);
    gae_err = std::max(gae_err, (g.advantages - brute_force_gae(rew, val, disc, lambda)).cwiseAbs().maxCoeff());
  }
  rep.checks.push_back(make_check("gae_vs_direct_sum", gae_err, 1e-12));
  rep.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return rep;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"mp_oracle", "projection", "gradients", "returns"};
  return names;
}

SuiteReport run_suite(const std::string& name, const VerifyOptions& opts) {
  if (name == "mp_oracle") return verify_mp_oracle(opts);
  if (name == "projection") return verify_projection(opts);
  if (name == "gradients") return verify_gradients(opts);
  if (name == "returns") return verify_returns(opts);
  throw PreconditionError("unknown verify suite '" + name + "'");
}

void print_report(std::ostream& out, const SuiteReport& report) {
  char buf[256];
  for (const Check& c : report.checks) {
    std::snprintf(buf, sizeof buf, "%s %s.%s max_err=%.3e tol=%.1e\n", c.passed ? "PASS" : "FAIL",
                  report.suite.c_str(), c.name.c_str(), c.max_error, c.tolerance);
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "%s suite %s (%zu checks, %.2f s)\n",
                report.passed() ? "PASS" : "FAIL", report.suite.c_str(), report.checks.size(),
                report.seconds);
  out << buf;
}

}  // namespace mprl::verify
