#ifndef MPRL_NN_CHECKPOINT_HPP_
#define MPRL_NN_CHECKPOINT_HPP_

#include <map>
#include <string>

#include <Eigen/Core>

#include "mprl/nn/adam.hpp"
#include "mprl/nn/mlp.hpp"

namespace mprl::nn {

// Everything needed to resume or evaluate a run.
struct Checkpoint {
  MlpSpec policy_spec;
  Eigen::VectorXd policy_params;  // mean network followed by log_std
  MlpSpec value_spec;
  Eigen::VectorXd value_params;
  AdamState policy_opt;
  AdamState value_opt;
  std::map<std::string, std::string> metadata;
};

// Binary file at `path` (magic, network specs, f64 little-endian parameter
// blocks, FNV-1a trailer) plus a human-readable `path.manifest`.
void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

std::string manifest_path(const std::string& checkpoint_path);

}  // namespace mprl::nn

#endif  // MPRL_NN_CHECKPOINT_HPP_
