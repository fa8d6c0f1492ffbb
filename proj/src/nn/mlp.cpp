#include "mprl/nn/mlp.hpp"

#include <sstream>

#include <Eigen/Dense>

#include "mprl/error.hpp"

namespace mprl::nn {

std::string to_string(Activation a) { return a == Activation::kTanh ? "tanh" : "relu"; }

Activation activation_from_string(const std::string& s) {
  if (s == "tanh") return Activation::kTanh;
  if (s == "relu") return Activation::kRelu;
  throw PreconditionError("unknown activation '" + s + "' (expected tanh or relu)");
}

void MlpSpec::validate() const {
  require(input_dim >= 1 && output_dim >= 1, "MlpSpec: dims must be >= 1");
  for (int h : hidden_dims) require(h >= 1, "MlpSpec: hidden dims must be >= 1");
}

int MlpSpec::num_params() const {
  int total = 0;
  int prev = input_dim;
  for (int h : hidden_dims) {
    total += h * prev + h;
    prev = h;
  }
  return total + output_dim * prev + output_dim;
}

std::string MlpSpec::to_string() const {
  std::ostringstream ss;
  ss << input_dim << ':';
  for (std::size_t i = 0; i < hidden_dims.size(); ++i) {
    if (i) ss << ',';
    ss << hidden_dims[i];
  }
  ss << ':' << output_dim << ':' << nn::to_string(activation);
  return ss.str();
}

MlpSpec MlpSpec::parse(const std::string& text) {
  std::stringstream ss(text);
  std::string in, hidden, out, act;
  if (!std::getline(ss, in, ':') || !std::getline(ss, hidden, ':') ||
      !std::getline(ss, out, ':') || !std::getline(ss, act)) {
    throw FormatError("bad network spec '" + text + "'");
  }
  MlpSpec spec;
  try {
    spec.input_dim = std::stoi(in);
    spec.output_dim = std::stoi(out);
    std::stringstream hs(hidden);
    std::string h;
    while (std::getline(hs, h, ','))
      if (!h.empty()) spec.hidden_dims.push_back(std::stoi(h));
  } catch (const std::logic_error&) {
    throw FormatError("bad network spec '" + text + "'");
  }
  spec.activation = activation_from_string(act);
  spec.validate();
  return spec;
}

Mlp::Mlp(MlpSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  int prev = spec_.input_dim;
  int offset = 0;
  std::vector<int> outs = spec_.hidden_dims;
  outs.push_back(spec_.output_dim);
  for (int out : outs) {
    layers_.push_back({out, prev, offset, offset + out * prev});
    offset += out * prev + out;
    prev = out;
  }
  params_ = Eigen::VectorXd::Zero(offset);
}

void Mlp::initialize(std::mt19937_64& rng, double output_gain) {
  std::normal_distribution<double> normal(0.0, 1.0);
  params_.setZero();
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& L = layers_[l];
    const int big = std::max(L.rows, L.cols);
    Eigen::MatrixXd g(big, big);
    for (int i = 0; i < g.size(); ++i) g.data()[i] = normal(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    // make the decomposition unique so the draw, not the QR sign
    // convention, determines the result
    const Eigen::VectorXd d = qr.matrixQR().diagonal();
    for (int c = 0; c < big; ++c)
      if (d[c] < 0) q.col(c) *= -1.0;
    const double gain = l + 1 == layers_.size() ? output_gain : 1.0;
    Eigen::Map<Eigen::MatrixXd> w(params_.data() + L.weight_offset, L.rows, L.cols);
    w = gain * q.topLeftCorner(L.rows, L.cols);
  }
}

void Mlp::set_params(const Eigen::VectorXd& p) {
  require(p.size() == params_.size(), "Mlp::set_params: size mismatch");
  params_ = p;
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& input) const {
  Cache unused;
  return forward(input, unused);
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& input, Cache& cache) const {
  if (input.rows() != spec_.input_dim) {
    throw PreconditionError("Mlp::forward: expected input dim " +
                            std::to_string(spec_.input_dim) + ", got " +
                            std::to_string(input.rows()));
  }
  cache.activations.clear();
  cache.activations.push_back(input);
  Eigen::MatrixXd a = input;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& L = layers_[l];
    Eigen::Map<const Eigen::MatrixXd> w(params_.data() + L.weight_offset, L.rows, L.cols);
    Eigen::Map<const Eigen::VectorXd> b(params_.data() + L.bias_offset, L.rows);
    Eigen::MatrixXd z = w * a;
    z.colwise() += b;
    if (l + 1 < layers_.size()) {
      if (spec_.activation == Activation::kTanh) {
        z = z.array().tanh();
      } else {
        z = z.cwiseMax(0.0);
      }
      cache.activations.push_back(z);
    }
    a = std::move(z);
  }
  return a;
}

Eigen::VectorXd Mlp::forward_one(const Eigen::VectorXd& input) const {
  return forward(Eigen::MatrixXd(input)).col(0);
}

Eigen::MatrixXd Mlp::backward(const Cache& cache, const Eigen::MatrixXd& upstream,
                              Eigen::VectorXd& grad) const {
  require(cache.activations.size() == layers_.size(),
          "Mlp::backward: cache does not match this network");
  require(grad.size() == params_.size(), "Mlp::backward: gradient size mismatch");
  const auto batch = cache.activations.front().cols();
  require(upstream.rows() == spec_.output_dim && upstream.cols() == batch,
          "Mlp::backward: upstream gradient shape mismatch");

  Eigen::MatrixXd delta = upstream;  // dL/dz of the current layer
  for (std::size_t l = layers_.size(); l-- > 0;) {
    const auto& L = layers_[l];
    const Eigen::MatrixXd& in = cache.activations[l];
    Eigen::Map<Eigen::MatrixXd> gw(grad.data() + L.weight_offset, L.rows, L.cols);
    Eigen::Map<Eigen::VectorXd> gb(grad.data() + L.bias_offset, L.rows);
    gw.noalias() += delta * in.transpose();
    gb += delta.rowwise().sum();
    Eigen::Map<const Eigen::MatrixXd> w(params_.data() + L.weight_offset, L.rows, L.cols);
    Eigen::MatrixXd d_in = w.transpose() * delta;
    if (l > 0) {
      // `in` is the post-activation output of hidden layer l-1
      if (spec_.activation == Activation::kTanh) {
        d_in.array() *= 1.0 - in.array().square();
      } else {
        d_in.array() *= (in.array() > 0.0).cast<double>();
      }
    }
    delta = std::move(d_in);
  }
  return delta;
}

}  // namespace mprl::nn
