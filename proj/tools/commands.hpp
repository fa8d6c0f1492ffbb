#ifndef MPRL_TOOLS_COMMANDS_HPP_
#define MPRL_TOOLS_COMMANDS_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace mprl::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2 };

struct TrainArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool dry_run = false;
  bool resume = false;
  bool no_projection = false;
};

struct EvalArgs {
  std::string path;  // checkpoint file or a directory of runs
  int episodes = 10;
  bool deterministic = false;
  std::uint64_t seed = 0;
  int reps = 2000;
};

struct VerifyArgs {
  std::string suite = "all";
  int grid_len = 1000;
  std::uint64_t seed = 1;
};

struct ExportArgs {
  std::string run_dir;
  std::string what;
  std::string out;  // defaults to <run_dir>/export
  int episodes = 5;
  std::uint64_t seed = 0;
};

int cmd_train(const TrainArgs& args, std::ostream& out, std::ostream& err);
int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream& err);
int cmd_verify(const VerifyArgs& args, std::ostream& out, std::ostream& err);
int cmd_export(const ExportArgs& args, std::ostream& out, std::ostream& err);

// Parses argv and dispatches; parse errors return kUsage.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace mprl::cli

#endif  // MPRL_TOOLS_COMMANDS_HPP_
