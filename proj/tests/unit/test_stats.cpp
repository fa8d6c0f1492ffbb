#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <gtest/gtest.h>

#include "mprl/error.hpp"
#include "mprl/stats/stats.hpp"
#include "test_util.hpp"

namespace mprl::stats {
namespace {

// sort, drop floor(n/4) from both ends, average what remains
double trimmed_mean_oracle(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t cut = v.size() / 4;
  double sum = 0.0;
  for (std::size_t i = cut; i < v.size() - cut; ++i) sum += v[i];
  return sum / static_cast<double>(v.size() - 2 * cut);
}

TEST(Iqm, Examples) {
  EXPECT_EQ(iqm(std::vector<double>{1, 2, 3, 4}), 2.5);
  EXPECT_EQ(iqm(std::vector<double>{4, 1, 3, 2}), 2.5);
  EXPECT_EQ(iqm(std::vector<double>(9, -1.75)), -1.75);
  // n = 5 drops one from each end
  EXPECT_EQ(iqm(std::vector<double>{100, 1, 2, 3, -100}), 2.0);
}

TEST(Iqm, MatchesSortTrimMeanExactly) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> len(4, 200);
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::VectorXd x = test::normal_vec(rng, len(rng), 10.0);
    const std::vector<double> v(x.data(), x.data() + x.size());
    ASSERT_EQ(iqm(v), trimmed_mean_oracle(v)) << "trial " << trial;
  }
}

TEST(Iqm, BoundedAndTranslationEquivariant) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::VectorXd x = test::normal_vec(rng, 4 + trial % 37, 5.0);
    std::vector<double> v(x.data(), x.data() + x.size());
    const double m = iqm(v);
    EXPECT_GE(m, x.minCoeff());
    EXPECT_LE(m, x.maxCoeff());
    const double c = test::uniform_vec(rng, 1, -50, 50)[0];
    for (double& e : v) e += c;
    EXPECT_NEAR(iqm(v), m + c, 1e-12 * (1 + std::abs(m + c)));
  }
}

TEST(Iqm, Preconditions) {
  EXPECT_THROW(iqm(std::vector<double>{1, 2, 3}), PreconditionError);
  EXPECT_THROW(iqm(std::vector<double>{1, 2, 3, std::nan("")}), DomainError);
  EXPECT_THROW(iqm(std::vector<double>{1, 2, 3, std::numeric_limits<double>::infinity()}),
               DomainError);
}

TEST(Descriptive, MeanMedianStd) {
  const std::vector<double> v{3, 1, 4, 1, 5};
  EXPECT_DOUBLE_EQ(mean(v), 2.8);
  EXPECT_EQ(median(v), 3.0);
  EXPECT_EQ(median(std::vector<double>{4, 1, 3, 2}), 2.5);
  EXPECT_NEAR(stddev(v), std::sqrt((0.04 + 3.24 + 1.44 + 3.24 + 4.84) / 5.0), 1e-15);
}

TEST(Bootstrap, ZeroVarianceGivesPointInterval) {
  const RunMatrix m = RunMatrix::Constant(5, 8, 0.42);
  const Interval ci = stratified_bootstrap_ci(m, iqm_of, 500, 0.95, 3);
  // summing then dividing may round the constant by an ulp
  EXPECT_NEAR(ci.lo, 0.42, 1e-15);
  EXPECT_EQ(ci.lo, ci.hi);
}

TEST(Bootstrap, ResamplesWithinSeeds) {
  // rows constant: any within-row resample keeps every row mean, so every
  // replicate of the overall mean is the same
  RunMatrix m(4, 6);
  for (int r = 0; r < 4; ++r) m.row(r).setConstant(r * 1.5 - 2.0);
  const std::vector<double> reps = bootstrap_replicates(m, mean_of, 300, 9);
  EXPECT_NEAR(reps.front(), mean_of(m), 1e-14);
  EXPECT_NEAR(reps.back(), mean_of(m), 1e-14);
}

TEST(Bootstrap, DeterministicGivenSeed) {
  std::mt19937_64 rng(4);
  const RunMatrix m = RunMatrix::NullaryExpr(6, 10, [&] { return test::normal_vec(rng, 1)[0]; });
  const Interval a = stratified_bootstrap_ci(m, iqm_of, 1000, 0.95, 77);
  const Interval b = stratified_bootstrap_ci(m, iqm_of, 1000, 0.95, 77);
  EXPECT_EQ(a.lo, b.lo);
  EXPECT_EQ(a.hi, b.hi);
  const Interval c = stratified_bootstrap_ci(m, iqm_of, 1000, 0.95, 78);
  EXPECT_TRUE(a.lo != c.lo || a.hi != c.hi);
}

TEST(Bootstrap, WiderLevelContainsNarrower) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const RunMatrix m = RunMatrix::NullaryExpr(5, 8, [&] { return test::normal_vec(rng, 1)[0]; });
    const Interval i95 = stratified_bootstrap_ci(m, iqm_of, 500, 0.95, trial);
    const Interval i99 = stratified_bootstrap_ci(m, iqm_of, 500, 0.99, trial);
    EXPECT_LE(i99.lo, i95.lo);
    EXPECT_GE(i99.hi, i95.hi);
  }
}

TEST(Bootstrap, IntervalContainsPointStatistic) {
  std::mt19937_64 rng(6);
  int contained = 0;
  const int trials = 300;
  for (int trial = 0; trial < trials; ++trial) {
    const RunMatrix m = RunMatrix::NullaryExpr(10, 10, [&] { return test::normal_vec(rng, 1, 3.0)[0]; });
    const Interval ci = stratified_bootstrap_ci(m, iqm_of, 300, 0.95, trial);
    const double p = iqm_of(m);
    if (ci.lo <= p && p <= ci.hi) ++contained;
  }
  EXPECT_GE(contained, static_cast<int>(std::ceil(0.99 * trials)));
}

TEST(Bootstrap, Preconditions) {
  const RunMatrix m = RunMatrix::Ones(3, 4);
  EXPECT_THROW(stratified_bootstrap_ci(m, iqm_of, 99), PreconditionError);
  EXPECT_THROW(stratified_bootstrap_ci(RunMatrix(0, 0), mean_of), PreconditionError);
  RunMatrix bad = m;
  bad(1, 2) = std::nan("");
  EXPECT_THROW(validate_run_matrix(bad), DomainError);
}

TEST(Bootstrap, PercentileInterpolates) {
  const std::vector<double> sorted{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const Interval ci = percentile_interval(sorted, 0.8);
  EXPECT_NEAR(ci.lo, 1.0, 1e-12);
  EXPECT_NEAR(ci.hi, 9.0, 1e-12);
}

TEST(Summary, JsonFields) {
  RunMatrix m(2, 4);
  m << 1, 2, 3, 4, 5, 6, 7, 8;
  const Summary s = summarize_iqm("return", m, 200, 0.9, 1);
  EXPECT_EQ(s.point, 4.5);
  EXPECT_EQ(s.n, 8);
  EXPECT_EQ(s.seeds, 2);
  const std::string j = to_json(s);
  for (const char* key : {"\"metric\"", "\"iqm\"", "\"ci_lo\"", "\"ci_hi\"", "\"level\"", "\"n\"",
                          "\"seeds\"", "\"reps\""})
    EXPECT_NE(j.find(key), std::string::npos) << key;
}

TEST(Jsonl, ReadsLastValueAndReportsBadLines) {
  const auto dir = test::temp_dir("jsonl");
  const std::string path = (dir / "m.jsonl").string();
  std::ofstream(path) << "{\"iter\":1,\"x\":0.5}\n\n{\"iter\":2}\n{\"iter\":3,\"x\":0.75}\n";
  EXPECT_EQ(read_jsonl_lines(path).size(), 3u);
  EXPECT_EQ(last_value(path, "x"), 0.75);
  EXPECT_THROW(last_value(path, "missing"), FormatError);
  std::ofstream(path) << "{\"iter\":1}\n[1,2]\n";
  try {
    read_jsonl_lines(path);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos) << e.what();
  }
}

}  // namespace
}  // namespace mprl::stats
