#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <gtest/gtest.h>

#include "mprl/error.hpp"
#include "mprl/nn/adam.hpp"
#include "mprl/nn/checkpoint.hpp"
#include "mprl/nn/diag_gaussian.hpp"
#include "mprl/nn/gaussian_policy.hpp"
#include "mprl/nn/gradient_check.hpp"
#include "mprl/nn/mlp.hpp"
#include "test_util.hpp"

namespace mprl::nn {
namespace {

using test::normal_vec;

TEST(MlpSpec, ParseRoundTrip) {
  const MlpSpec spec{7, {64, 32}, 12, Activation::kRelu};
  EXPECT_EQ(MlpSpec::parse(spec.to_string()), spec);
  EXPECT_EQ(MlpSpec::parse("3::2:tanh"), (MlpSpec{3, {}, 2, Activation::kTanh}));
  EXPECT_THROW(MlpSpec::parse("3:x:2:tanh"), FormatError);
  EXPECT_THROW((MlpSpec{0, {}, 2}.validate()), PreconditionError);
  EXPECT_EQ((MlpSpec{3, {4}, 2}.num_params()), 4 * 3 + 4 + 2 * 4 + 2);
}

TEST(Mlp, ZeroParamsGiveZeroOutput) {
  const Mlp net(MlpSpec{4, {8, 8}, 3, Activation::kTanh});
  EXPECT_EQ(net.forward(Eigen::MatrixXd::Random(4, 5)).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Mlp, IdentityLinearLayer) {
  Mlp net(MlpSpec{3, {}, 3});
  Eigen::VectorXd p = Eigen::VectorXd::Zero(net.num_params());
  Eigen::Map<Eigen::MatrixXd>(p.data(), 3, 3) = Eigen::Matrix3d::Identity();
  net.set_params(p);
  const Eigen::Vector3d x(0.3, -1.2, 4.0);
  EXPECT_EQ(net.forward_one(x), Eigen::VectorXd(x));
}

TEST(Mlp, ForwardIsDeterministic) {
  Mlp net(MlpSpec{5, {16, 16}, 4});
  std::mt19937_64 rng(1);
  net.initialize(rng, 1.0);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(5, 7);
  const Eigen::MatrixXd y1 = net.forward(x);
  const Eigen::MatrixXd y2 = net.forward(x);
  EXPECT_EQ(y1, y2);
}

TEST(Mlp, OrthogonalInitialization) {
  Mlp net(MlpSpec{16, {16}, 4});
  std::mt19937_64 rng(3);
  net.initialize(rng, 0.01);
  const Eigen::Map<const Eigen::MatrixXd> w0(net.params().data(), 16, 16);
  EXPECT_LT((w0 * w0.transpose() - Eigen::MatrixXd::Identity(16, 16)).cwiseAbs().maxCoeff(), 1e-12);
  const Eigen::Map<const Eigen::MatrixXd> w1(net.params().data() + 16 * 16 + 16, 4, 16);
  EXPECT_LT((w1 * w1.transpose() - 1e-4 * Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff(),
            1e-15);
  EXPECT_EQ(net.params().segment(16 * 16, 16).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Mlp, LinearGradientIsInput) {
  Mlp net(MlpSpec{3, {}, 1});
  std::mt19937_64 rng(5);
  net.initialize(rng, 1.0);
  const Eigen::Vector3d x(0.5, -2.0, 1.5);
  Mlp::Cache cache;
  net.forward(x, cache);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(net.num_params());
  const Eigen::MatrixXd dx = net.backward(cache, Eigen::MatrixXd::Ones(1, 1), grad);
  EXPECT_EQ(grad.head(3), Eigen::VectorXd(x));
  EXPECT_EQ(grad[3], 1.0);
  EXPECT_LT((dx - Eigen::Map<const Eigen::MatrixXd>(net.params().data(), 1, 3).transpose())
                .cwiseAbs()
                .maxCoeff(),
            1e-15);
}

TEST(Mlp, ZeroUpstreamZeroGradient) {
  Mlp net(MlpSpec{4, {8}, 2});
  std::mt19937_64 rng(6);
  net.initialize(rng, 1.0);
  Mlp::Cache cache;
  net.forward(Eigen::MatrixXd::Random(4, 3), cache);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(net.num_params());
  net.backward(cache, Eigen::MatrixXd::Zero(2, 3), grad);
  EXPECT_EQ(grad.cwiseAbs().maxCoeff(), 0.0);
}

struct Shape {
  MlpSpec spec;
  int batch;
};

class MlpGradient : public ::testing::TestWithParam<Shape> {};

TEST_P(MlpGradient, MatchesCentralDifferences) {
  const Shape s = GetParam();
  Mlp net(s.spec);
  std::mt19937_64 rng(77);
  net.initialize(rng, 1.0);
  // move biases off zero so relu kinks are not hit exactly
  net.params() += 0.1 * normal_vec(rng, net.num_params());
  const Eigen::MatrixXd x = Eigen::Map<const Eigen::MatrixXd>(
      normal_vec(rng, s.spec.input_dim * s.batch).data(), s.spec.input_dim, s.batch);
  const Eigen::MatrixXd up = Eigen::Map<const Eigen::MatrixXd>(
      normal_vec(rng, s.spec.output_dim * s.batch).data(), s.spec.output_dim, s.batch);
  const auto loss = [&](const Eigen::MatrixXd& out) { return (out.array() * up.array()).sum(); };

  Mlp::Cache cache;
  net.forward(x, cache);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(net.num_params());
  const Eigen::MatrixXd dx = net.backward(cache, up, grad);

  const Eigen::VectorXd fd = central_difference(
      [&](const Eigen::VectorXd& p) {
        Mlp probe = net;
        probe.set_params(p);
        return loss(probe.forward(x));
      },
      net.params());
  EXPECT_LT(relative_error(grad, fd), 1e-4);

  const Eigen::VectorXd x_flat = Eigen::Map<const Eigen::VectorXd>(x.data(), x.size());
  const Eigen::VectorXd fd_x = central_difference(
      [&](const Eigen::VectorXd& v) {
        return loss(net.forward(Eigen::Map<const Eigen::MatrixXd>(v.data(), x.rows(), x.cols())));
      },
      x_flat);
  EXPECT_LT(relative_error(Eigen::Map<const Eigen::VectorXd>(dx.data(), dx.size()), fd_x), 1e-4);
}

INSTANTIATE_TEST_SUITE_P(
    Shapes, MlpGradient,
    ::testing::Values(Shape{{3, {}, 2, Activation::kTanh}, 4},
                      Shape{{4, {8}, 3, Activation::kTanh}, 5},
                      Shape{{6, {16, 16}, 12, Activation::kTanh}, 3},
                      Shape{{2, {5, 7, 3}, 1, Activation::kTanh}, 6},
                      Shape{{4, {8}, 3, Activation::kRelu}, 5},
                      Shape{{6, {16, 16}, 12, Activation::kRelu}, 3}));

TEST(DiagGaussian, StandardNormalLogDensity) {
  const DiagGaussian d{Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1)};
  EXPECT_NEAR(log_prob(d, Eigen::VectorXd::Zero(1)), -0.5 * std::log(2.0 * std::numbers::pi),
              1e-15);
  EXPECT_NEAR(log_prob(d, Eigen::VectorXd::Zero(1)), -0.918939, 5e-7);
}

TEST(DiagGaussian, LogDensityIsSumOfUnivariates) {
  std::mt19937_64 rng(8);
  const DiagGaussian d{normal_vec(rng, 4), normal_vec(rng, 4, 0.5)};
  const Eigen::VectorXd x = normal_vec(rng, 4);
  double expected = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double s = std::exp(d.log_std[i]);
    const double z = (x[i] - d.mean[i]) / s;
    expected += -0.5 * z * z - std::log(s) - 0.5 * std::log(2.0 * std::numbers::pi);
  }
  EXPECT_NEAR(log_prob(d, x), expected, 1e-12);
}

TEST(DiagGaussian, ModeAndTranslationInvariance) {
  std::mt19937_64 rng(9);
  const DiagGaussian d{normal_vec(rng, 3), normal_vec(rng, 3, 0.3)};
  const double at_mode = log_prob(d, d.mean);
  for (int i = 0; i < 100; ++i) EXPECT_LT(log_prob(d, d.mean + 0.1 * normal_vec(rng, 3)), at_mode);
  const Eigen::VectorXd c = normal_vec(rng, 3);
  const Eigen::VectorXd x = normal_vec(rng, 3);
  const DiagGaussian shifted{d.mean + c, d.log_std};
  EXPECT_NEAR(log_prob(shifted, x + c), log_prob(d, x), 1e-12);
}

TEST(DiagGaussian, EntropyClosedForm) {
  const DiagGaussian d{Eigen::VectorXd::Zero(2), Eigen::Vector2d(0.0, std::log(2.0))};
  const double per_dim = 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e);
  EXPECT_NEAR(entropy(d), 2.0 * per_dim + std::log(2.0), 1e-14);
}

TEST(DiagGaussian, SampleCollapsesAtMinimumStd) {
  std::mt19937_64 rng(10);
  const DiagGaussian d{Eigen::Vector3d(1.0, -2.0, 0.5), Eigen::VectorXd::Constant(3, kMinLogStd)};
  for (int i = 0; i < 100; ++i) EXPECT_LT((sample(d, rng) - d.mean).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(DiagGaussian, EmpiricalMeanWithinFourSigma) {
  std::mt19937_64 rng(11);
  const DiagGaussian d{Eigen::Vector2d(0.7, -1.3), Eigen::Vector2d(std::log(0.5), std::log(2.0))};
  const int n = 100000;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(2);
  for (int i = 0; i < n; ++i) sum += sample(d, rng);
  const Eigen::VectorXd emp = sum / n;
  for (int k = 0; k < 2; ++k) EXPECT_LT(std::abs(emp[k] - d.mean[k]), 4.0 * d.std()[k] / std::sqrt(n));
}

TEST(DiagGaussian, SamplingIsSeeded) {
  const DiagGaussian d{Eigen::VectorXd::Zero(4), Eigen::VectorXd::Zero(4)};
  std::mt19937_64 a(5), b(5);
  for (int i = 0; i < 20; ++i) EXPECT_EQ(sample(d, a), sample(d, b));
}

TEST(KlDiag, ZeroForIdenticalDistributions) {
  std::mt19937_64 rng(12);
  const DiagGaussian p{normal_vec(rng, 5), normal_vec(rng, 5)};
  EXPECT_EQ(kl_diag(p, p).total(), 0.0);
}

TEST(KlDiag, UnitMeanShift) {
  const DiagGaussian p{Eigen::VectorXd::Ones(1), Eigen::VectorXd::Zero(1)};
  const DiagGaussian q{Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1)};
  EXPECT_DOUBLE_EQ(kl_diag(p, q).total(), 0.5);
  EXPECT_DOUBLE_EQ(kl_diag(p, q).mean_part, 0.5);
  EXPECT_DOUBLE_EQ(kl_diag(p, q).cov_part, 0.0);
}

TEST(KlDiag, NonNegativeAndDecomposes) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 10000; ++i) {
    const DiagGaussian p{normal_vec(rng, 3), normal_vec(rng, 3)};
    const DiagGaussian q{normal_vec(rng, 3), normal_vec(rng, 3)};
    const KlParts kl = kl_diag(p, q);
    double total = 0.0, mean_part = 0.0;
    for (int k = 0; k < 3; ++k) {
      const double sp = std::exp(p.log_std[k]), sq = std::exp(q.log_std[k]);
      const double dm = p.mean[k] - q.mean[k];
      total += std::log(sq / sp) + (sp * sp + dm * dm) / (2 * sq * sq) - 0.5;
      mean_part += dm * dm / (2 * sq * sq);
    }
    ASSERT_GE(kl.total(), 0.0);
    EXPECT_NEAR(kl.total(), total, 1e-12 * std::max(1.0, total));
    EXPECT_NEAR(kl.mean_part, mean_part, 1e-12 * std::max(1.0, mean_part));
    EXPECT_NEAR(kl.mean_part + kl.cov_part, kl.total(), 1e-12);
  }
}

TEST(GaussianPolicy, LogStdClampedToRange) {
  GaussianPolicy policy(MlpSpec{2, {4}, 3}, 0.0);
  Eigen::VectorXd p = policy.flat_params();
  p.tail(3) << -30.0, 0.5, 7.0;
  policy.set_flat_params(p);
  EXPECT_EQ(policy.clamped_log_std(), Eigen::Vector3d(kMinLogStd, 0.5, kMaxLogStd));
  EXPECT_EQ(policy.log_std_param()[0], -30.0);
}

TEST(GaussianPolicy, LogProbGradientThroughBackward) {
  // d log N / d mean = (x - mu) / sigma^2, pushed through the network
  GaussianPolicy policy(MlpSpec{4, {8, 8}, 3}, -0.3);
  std::mt19937_64 rng(14);
  policy.initialize(rng, 1.0);
  const Eigen::VectorXd s = normal_vec(rng, 4);
  const Eigen::VectorXd x = normal_vec(rng, 3);
  Mlp::Cache cache;
  const Eigen::VectorXd mu = policy.means(s, cache);
  const Eigen::VectorXd var = (2.0 * policy.clamped_log_std().array()).exp();
  const Eigen::VectorXd d_mean = (x - mu).cwiseQuotient(var);
  const Eigen::VectorXd d_log_std = ((x - mu).array().square() / var.array() - 1.0).matrix();
  const Eigen::VectorXd grad = policy.backward(cache, d_mean, d_log_std);
  const Eigen::VectorXd fd = central_difference(
      [&](const Eigen::VectorXd& p) {
        GaussianPolicy probe = policy;
        probe.set_flat_params(p);
        return log_prob(probe.distribution(s), x);
      },
      policy.flat_params());
  EXPECT_LT(relative_error(grad, fd), 1e-4);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  // bias correction makes the first step lr * g / (|g| + eps)
  Adam opt(3, Adam::Options{0.01, 0.9, 0.999, 1e-8, 0.0});
  Eigen::VectorXd p = Eigen::Vector3d(1.0, 2.0, 3.0);
  const Eigen::Vector3d g(0.5, -4.0, 0.0);
  opt.step(p, g);
  EXPECT_NEAR(p[0], 1.0 - 0.01 * 0.5 / (0.5 + 1e-8), 1e-15);
  EXPECT_NEAR(p[1], 2.0 + 0.01 * 4.0 / (4.0 + 1e-8), 1e-15);
  EXPECT_EQ(p[2], 3.0);
  EXPECT_EQ(opt.state().step, 1);
}

TEST(Adam, MatchesReferenceRecursion) {
  const Adam::Options o{0.003, 0.9, 0.999, 1e-8, 0.0};
  Adam opt(2, o);
  std::mt19937_64 rng(15);
  Eigen::VectorXd p = normal_vec(rng, 2), ref = p;
  Eigen::VectorXd m = Eigen::VectorXd::Zero(2), v = Eigen::VectorXd::Zero(2);
  for (int t = 1; t <= 20; ++t) {
    const Eigen::VectorXd g = normal_vec(rng, 2);
    opt.step(p, g);
    m = o.beta1 * m + (1 - o.beta1) * g;
    v = o.beta2 * v + (1 - o.beta2) * g.cwiseProduct(g);
    const Eigen::VectorXd mh = m / (1 - std::pow(o.beta1, t));
    const Eigen::VectorXd vh = v / (1 - std::pow(o.beta2, t));
    ref -= (o.lr * mh.array() / (vh.array().sqrt() + o.eps)).matrix();
  }
  EXPECT_LT((p - ref).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Adam, ClipsGlobalNorm) {
  Adam clipped(2, Adam::Options{0.1, 0.9, 0.999, 1e-8, 1.0});
  Adam scaled(2, Adam::Options{0.1, 0.9, 0.999, 1e-8, 0.0});
  Eigen::VectorXd a = Eigen::Vector2d::Zero(), b = a;
  clipped.step(a, Eigen::Vector2d(30.0, 40.0));
  scaled.step(b, Eigen::Vector2d(0.6, 0.8));
  EXPECT_EQ(clipped.state().m, scaled.state().m);
  EXPECT_EQ(a, b);
}

TEST(Adam, ZeroLearningRateLeavesParameters) {
  Adam opt(2, Adam::Options{0.0});
  Eigen::VectorXd p = Eigen::Vector2d(1.0, -1.0);
  opt.step(p, Eigen::Vector2d(5.0, 5.0));
  EXPECT_EQ(p, Eigen::VectorXd(Eigen::Vector2d(1.0, -1.0)));
}

Checkpoint sample_checkpoint() {
  std::mt19937_64 rng(16);
  Checkpoint c;
  c.policy_spec = MlpSpec{4, {8}, 3};
  c.policy_params = normal_vec(rng, c.policy_spec.num_params() + 3);
  c.value_spec = MlpSpec{4, {8}, 1, Activation::kRelu};
  c.value_params = normal_vec(rng, c.value_spec.num_params());
  c.policy_opt = {normal_vec(rng, c.policy_params.size()), normal_vec(rng, c.policy_params.size()), 7};
  c.value_opt = {normal_vec(rng, c.value_params.size()), normal_vec(rng, c.value_params.size()), 7};
  c.metadata = {{"iteration", "7"}, {"config", "[env]\nreward = sparse\n"}};
  return c;
}

TEST(Checkpoint, RoundTripIsExact) {
  const auto dir = test::temp_dir("ckpt");
  const std::string path = (dir / "c.bin").string();
  const Checkpoint c = sample_checkpoint();
  save_checkpoint(path, c);
  EXPECT_TRUE(std::filesystem::exists(manifest_path(path)));
  const Checkpoint r = load_checkpoint(path);
  EXPECT_EQ(r.policy_spec, c.policy_spec);
  EXPECT_EQ(r.value_spec, c.value_spec);
  EXPECT_EQ(r.policy_params, c.policy_params);
  EXPECT_EQ(r.value_params, c.value_params);
  EXPECT_EQ(r.policy_opt.m, c.policy_opt.m);
  EXPECT_EQ(r.value_opt.v, c.value_opt.v);
  EXPECT_EQ(r.policy_opt.step, 7);
  EXPECT_EQ(r.metadata, c.metadata);
}

TEST(Checkpoint, CorruptionIsDetected) {
  const auto dir = test::temp_dir("ckpt_bad");
  const std::string path = (dir / "c.bin").string();
  save_checkpoint(path, sample_checkpoint());
  std::string bytes;
  {
    std::ifstream in(path, std::ios::binary);
    bytes.assign(std::istreambuf_iterator<char>(in), {});
  }
  for (std::size_t at : {std::size_t{0}, bytes.size() / 2, bytes.size() - 1}) {
    std::string bad = bytes;
    bad[at] = static_cast<char>(bad[at] ^ 0x5a);
    std::ofstream(path, std::ios::binary) << bad;
    EXPECT_THROW(load_checkpoint(path), FormatError) << "byte " << at;
  }
  std::ofstream(path, std::ios::binary) << bytes.substr(0, bytes.size() / 3);
  EXPECT_THROW(load_checkpoint(path), FormatError);
}

}  // namespace
}  // namespace mprl::nn
