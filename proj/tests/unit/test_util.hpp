#ifndef MPRL_TESTS_TEST_UTIL_HPP_
#define MPRL_TESTS_TEST_UTIL_HPP_

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include <Eigen/Core>

namespace mprl::test {

inline Eigen::VectorXd uniform_vec(std::mt19937_64& rng, Eigen::Index n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

inline Eigen::VectorXd normal_vec(std::mt19937_64& rng, Eigen::Index n, double stddev = 1.0) {
  std::normal_distribution<double> g(0.0, stddev);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("mprl_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace mprl::test

#endif  // MPRL_TESTS_TEST_UTIL_HPP_
