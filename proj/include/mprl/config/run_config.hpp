#ifndef MPRL_CONFIG_RUN_CONFIG_HPP_
#define MPRL_CONFIG_RUN_CONFIG_HPP_

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "mprl/rl/trainer.hpp"

namespace mprl::config {

// Invalid run configuration. line() is 0 when the problem is not tied to a
// single line (missing keys, cross-field rules).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, int line)
      : std::runtime_error(message), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct IniEntry {
  std::string value;
  int line = 0;
};

// `[section]` headers followed by `key = value` lines; `#` and `;` start
// comments. Keys before the first header are rejected.
struct IniFile {
  std::string source;
  std::map<std::string, std::map<std::string, IniEntry>> sections;
};

IniFile parse_ini(std::istream& in, const std::string& source = "<config>");
IniFile parse_ini_file(const std::string& path);

struct RunConfig {
  std::string env_variant = "reacher5d";
  // reject non-prodmp generators when replanning (k < T)
  bool smooth_replanning = false;
  rl::TrainConfig train;
};

// Keys that have no default, as "section.key".
const std::vector<std::string>& required_keys();

// Applies every key over the defaults, then checks cross-field rules and
// returns the finalized config.
RunConfig resolve(const IniFile& ini);
RunConfig load_run_config(const std::string& path);

// Every key with its resolved value, in schema order; parses back to the
// same config.
std::string render(const RunConfig& cfg);

}  // namespace mprl::config

#endif  // MPRL_CONFIG_RUN_CONFIG_HPP_
