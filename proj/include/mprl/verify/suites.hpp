#ifndef MPRL_VERIFY_SUITES_HPP_
#define MPRL_VERIFY_SUITES_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace mprl::verify {

struct Check {
  std::string name;
  double max_error = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct SuiteReport {
  std::string suite;
  std::vector<Check> checks;
  double seconds = 0.0;
  bool passed() const;
};

struct VerifyOptions {
  std::uint64_t seed = 1;
  // quadrature grid for the closed-form generator in mp_oracle
  int grid_len = 1000;
  int mp_instances = 100;
  int replans = 1000;
  int ic_instances = 10000;
  int projection_pairs = 1000;
  int return_episodes = 20;
};

// Closed form vs RK4, replanning continuity, initial-condition round trip.
SuiteReport verify_mp_oracle(const VerifyOptions& opts);
// Bounds, identity inside the region, agreement with the numeric optimizer.
SuiteReport verify_projection(const VerifyOptions& opts);
// Manual backward passes vs central differences.
SuiteReport verify_gradients(const VerifyOptions& opts);
// Segment-composed returns and GAE vs brute force.
SuiteReport verify_returns(const VerifyOptions& opts);

const std::vector<std::string>& suite_names();
// name is one of suite_names().
SuiteReport run_suite(const std::string& name, const VerifyOptions& opts);

void print_report(std::ostream& out, const SuiteReport& report);

}  // namespace mprl::verify

#endif  // MPRL_VERIFY_SUITES_HPP_
