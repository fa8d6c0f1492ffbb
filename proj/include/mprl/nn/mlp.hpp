#ifndef MPRL_NN_MLP_HPP_
#define MPRL_NN_MLP_HPP_

#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace mprl::nn {

enum class Activation { kTanh, kRelu };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);

struct MlpSpec {
  int input_dim = 1;
  std::vector<int> hidden_dims;
  int output_dim = 1;
  Activation activation = Activation::kTanh;

  void validate() const;
  int num_params() const;
  // "in:h1,h2:out:tanh"
  std::string to_string() const;
  static MlpSpec parse(const std::string& text);
  bool operator==(const MlpSpec&) const = default;
};

// Fully connected network with an affine output layer. Inputs and outputs
// are column-batched: one sample per column.
//
// Parameters live in one flat vector, layer by layer: W (out x in,
// column-major) followed by b (out).
class Mlp {
 public:
  struct Cache {
    // layer inputs: activations[0] is the network input, activations[l] the
    // output of hidden layer l
    std::vector<Eigen::MatrixXd> activations;
  };

  Mlp() : Mlp(MlpSpec{}) {}
  explicit Mlp(MlpSpec spec);

  // Orthogonal rows/columns (QR of a Gaussian draw); hidden layers use gain
  // 1, the output layer `output_gain`. Biases start at zero.
  void initialize(std::mt19937_64& rng, double output_gain);

  const MlpSpec& spec() const { return spec_; }
  int num_params() const { return static_cast<int>(params_.size()); }
  Eigen::VectorXd& params() { return params_; }
  const Eigen::VectorXd& params() const { return params_; }
  void set_params(const Eigen::VectorXd& p);

  Eigen::MatrixXd forward(const Eigen::MatrixXd& input) const;
  Eigen::MatrixXd forward(const Eigen::MatrixXd& input, Cache& cache) const;
  Eigen::VectorXd forward_one(const Eigen::VectorXd& input) const;

  // Adds dL/dparams into `grad` (size num_params) given dL/doutput and the
  // cache of the matching forward pass; returns dL/dinput.
  Eigen::MatrixXd backward(const Cache& cache, const Eigen::MatrixXd& upstream,
                           Eigen::VectorXd& grad) const;

 private:
  struct LayerOffsets {
    int rows;
    int cols;
    int weight_offset;
    int bias_offset;
  };

  MlpSpec spec_;
  std::vector<LayerOffsets> layers_;
  Eigen::VectorXd params_;
};

}  // namespace mprl::nn

#endif  // MPRL_NN_MLP_HPP_
