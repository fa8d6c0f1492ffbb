#include <cmath>

#include <gtest/gtest.h>

#include "mprl/control/pd_controller.hpp"
#include "mprl/error.hpp"
#include "mprl/mp/basis_set.hpp"
#include "mprl/mp/prodmp.hpp"
#include "test_util.hpp"

namespace mprl::control {
namespace {

TEST(PdAction, ZeroErrorZeroAction) {
  const Eigen::VectorXd q = Eigen::VectorXd::LinSpaced(5, -1.0, 1.0);
  const Eigen::VectorXd qd = Eigen::VectorXd::Constant(5, 0.3);
  const Eigen::VectorXd a = pd_action(q, qd, q, qd, PdGains::uniform(5, 100.0, 20.0));
  EXPECT_EQ(a.cwiseAbs().maxCoeff(), 0.0);
}

TEST(PdAction, ProportionalTerm) {
  const Eigen::VectorXd a =
      pd_action(Eigen::VectorXd::Constant(1, 0.5), Eigen::VectorXd::Constant(1, 0.7),
                Eigen::VectorXd::Zero(1), Eigen::VectorXd::Constant(1, 0.7),
                PdGains::uniform(1, 1.0, 0.0));
  EXPECT_DOUBLE_EQ(a[0], 0.5);
}

TEST(PdAction, LinearInErrorBeforeClamping) {
  std::mt19937_64 rng(2);
  PdGains gains{test::uniform_vec(rng, 4, 0, 50), test::uniform_vec(rng, 4, 0, 10)};
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(4);
  for (int i = 0; i < 100; ++i) {
    const Eigen::VectorXd ep1 = test::normal_vec(rng, 4), ev1 = test::normal_vec(rng, 4);
    const Eigen::VectorXd ep2 = test::normal_vec(rng, 4), ev2 = test::normal_vec(rng, 4);
    const double s = test::uniform_vec(rng, 1, -3, 3)[0];
    const Eigen::VectorXd lhs = pd_action(ep1 + s * ep2, ev1 + s * ev2, zero, zero, gains);
    const Eigen::VectorXd rhs =
        pd_action(ep1, ev1, zero, zero, gains) + s * pd_action(ep2, ev2, zero, zero, gains);
    EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12);
    const Eigen::VectorXd direct =
        gains.kp.cwiseProduct(ep1) + gains.kd.cwiseProduct(ev1);
    EXPECT_LT((pd_action(ep1, ev1, zero, zero, gains) - direct).cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(PdAction, ClampedToBound) {
  std::mt19937_64 rng(4);
  const PdGains gains = PdGains::uniform(5, 100.0, 20.0);
  for (int i = 0; i < 200; ++i) {
    const Eigen::VectorXd a =
        pd_action(test::normal_vec(rng, 5), test::normal_vec(rng, 5), test::normal_vec(rng, 5),
                  test::normal_vec(rng, 5), gains, 5.0);
    EXPECT_LE(a.cwiseAbs().maxCoeff(), 5.0);
  }
  // clamp, not scale: unsaturated entries are untouched
  const Eigen::VectorXd a = pd_action(Eigen::Vector2d(1.0, 0.01), Eigen::Vector2d::Zero(),
                                      Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero(),
                                      PdGains::uniform(2, 100.0, 0.0), 5.0);
  EXPECT_DOUBLE_EQ(a[0], 5.0);
  EXPECT_DOUBLE_EQ(a[1], 1.0);
}

TEST(PdAction, Preconditions) {
  const Eigen::VectorXd v2 = Eigen::VectorXd::Zero(2), v3 = Eigen::VectorXd::Zero(3);
  EXPECT_THROW(pd_action(v2, v2, v3, v2, PdGains::uniform(2, 1, 1)), PreconditionError);
  EXPECT_THROW(pd_action(v2, v2, v2, v2, PdGains::uniform(3, 1, 1)), PreconditionError);
  EXPECT_THROW(PdGains::uniform(2, -1.0, 1.0).validate(), PreconditionError);
}

TEST(PdAction, TracksProDmpReferenceOnDoubleIntegrator) {
  // semi-implicit Euler double integrator at dt = 0.02 over tau = 1
  const mp::MpBasisSet basis = mp::precompute_basis_set(mp::DmpConfig(25.0, 5), 1001);
  const PdGains gains = PdGains::uniform(5, 100.0, 20.0);
  const double dt = 0.02;
  const int steps = 50;
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    mp::WeightVector w(5, 5);
    w.per_dof() = Eigen::Map<const Eigen::MatrixXd>(test::normal_vec(rng, 30).data(), 5, 6);
    const mp::InitialCondition ic{0.0, Eigen::VectorXd::Zero(5), Eigen::VectorXd::Zero(5)};
    const mp::DesiredTrajectory ref = mp::prodmp_rollout(ic, w, basis, steps, dt);
    Eigen::VectorXd q = ic.y_b, qd = ic.dy_b;
    double sq = 0.0;
    for (int t = 0; t < steps; ++t) {
      const Eigen::VectorXd a =
          pd_action(ref.pos.row(t + 1).transpose(), ref.vel.row(t + 1).transpose(), q, qd, gains);
      qd += dt * a;
      q += dt * qd;
      sq += (q - ref.pos.row(t + 1).transpose()).squaredNorm();
    }
    EXPECT_LT(std::sqrt(sq / (steps * 5)), 0.05) << "trial " << trial;
  }
}

}  // namespace
}  // namespace mprl::control
