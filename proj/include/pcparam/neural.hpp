#pragma once

#include "pcparam/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace pcparam {

enum class OutputActivation { None, Softplus };

std::string to_string(OutputActivation a);
OutputActivation output_activation_from_string(const std::string& s);

/// Fully connected stack: hidden layers use sin(omega * z), the output layer
/// is affine, optionally followed by softplus (inverse-scale net).
struct NetworkSpec {
  int input_dim = 3;
  std::vector<int> hidden_widths;
  int output_dim = 2;
  OutputActivation output_activation = OutputActivation::None;
  double omega = 1.0;

  void validate() const;
  std::size_t parameter_count() const;

  bool operator==(const NetworkSpec&) const = default;
};

/// Default architectures.
NetworkSpec shape_matching_net_spec();  // 2 -> (64, 64, 64) -> 2
NetworkSpec parametrization_net_spec(); // 3 -> (256 x 5) -> 2
NetworkSpec inverse_lambda_net_spec();  // 3 -> (128, 128, 128) -> 1, softplus

/// Flat parameter vector, layer by layer: row-major weights (fan_out x fan_in)
/// followed by biases.
struct NetworkParams {
  NetworkSpec spec;
  Eigen::VectorXd values;

  void validate() const;
};

/// Weights uniform in +-sqrt(6 / fan_in) / omega, biases zero; deterministic per seed.
NetworkParams init_params(const NetworkSpec& spec, std::uint64_t seed);

/// Numerically stable log(1 + e^x).
double softplus(double x);

/// Evaluates the network on a batch (one sample per row).
Points forward(const NetworkParams& params, const Points& inputs);

/// Pre-activations kept from a forward pass for reuse by backward.
struct ForwardCache {
  Eigen::MatrixXd input;                      // input_dim x batch
  std::vector<Eigen::MatrixXd> pre;           // per layer, fan_out x batch
  std::vector<Eigen::MatrixXd> activations;   // per hidden layer, fan_out x batch
  Points output;                              // batch x output_dim
};

ForwardCache forward_cached(const NetworkParams& params, const Points& inputs);

struct NetworkGradient {
  Eigen::VectorXd params;
  Points inputs;
};

/// Reverse-mode gradient of sum(cotangent .* forward(inputs)).
NetworkGradient backward(const NetworkParams& params, const ForwardCache& cache,
                         const Points& cotangent, bool want_inputs = false);

NetworkGradient backward(const NetworkParams& params, const Points& inputs,
                         const Points& cotangent, bool want_inputs = false);

}  // namespace pcparam
