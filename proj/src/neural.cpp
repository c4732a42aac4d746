#include "pcparam/neural.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace pcparam {
namespace {

using RowMajorMap = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using MutRowMajorMap = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

std::vector<int> layer_sizes(const NetworkSpec& spec) {
  std::vector<int> sizes{spec.input_dim};
  sizes.insert(sizes.end(), spec.hidden_widths.begin(), spec.hidden_widths.end());
  sizes.push_back(spec.output_dim);
  return sizes;
}

double sigmoid(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

}  // namespace

std::string to_string(OutputActivation a) {
  return a == OutputActivation::Softplus ? "softplus" : "none";
}

OutputActivation output_activation_from_string(const std::string& s) {
  if (s == "none") return OutputActivation::None;
  if (s == "softplus") return OutputActivation::Softplus;
  throw std::invalid_argument("unknown output activation '" + s + "'");
}

void NetworkSpec::validate() const {
  if (input_dim != 2 && input_dim != 3) throw std::invalid_argument("network input_dim must be 2 or 3");
  if (hidden_widths.empty()) throw std::invalid_argument("network needs at least one hidden layer");
  for (int w : hidden_widths)
    if (w < 1) throw std::invalid_argument("hidden widths must be positive");
  if (output_dim < 1) throw std::invalid_argument("network output_dim must be positive");
  if (output_activation == OutputActivation::Softplus && output_dim != 1)
    throw std::invalid_argument("softplus output is reserved for scalar (inverse-scale) nets");
  if (!(omega > 0.0) || !std::isfinite(omega)) throw std::invalid_argument("omega must be positive");
}

std::size_t NetworkSpec::parameter_count() const {
  const auto sizes = layer_sizes(*this);
  std::size_t n = 0;
  for (std::size_t l = 1; l < sizes.size(); ++l)
    n += static_cast<std::size_t>(sizes[l - 1]) * sizes[l] + sizes[l];
  return n;
}

NetworkSpec shape_matching_net_spec() { return {2, {64, 64, 64}, 2, OutputActivation::None, 1.0}; }
NetworkSpec parametrization_net_spec() {
  return {3, {256, 256, 256, 256, 256}, 2, OutputActivation::None, 1.0};
}
NetworkSpec inverse_lambda_net_spec() { return {3, {128, 128, 128}, 1, OutputActivation::Softplus, 1.0}; }

void NetworkParams::validate() const {
  spec.validate();
  if (static_cast<std::size_t>(values.size()) != spec.parameter_count())
    throw std::invalid_argument("parameter vector length " + std::to_string(values.size()) +
                                " does not match spec (" + std::to_string(spec.parameter_count()) + ")");
  if (!values.allFinite()) throw std::invalid_argument("network parameters contain non-finite values");
}

NetworkParams init_params(const NetworkSpec& spec, std::uint64_t seed) {
  spec.validate();
  NetworkParams p{spec, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(spec.parameter_count()))};
  std::mt19937_64 rng(seed);
  const auto sizes = layer_sizes(spec);
  Eigen::Index offset = 0;
  for (std::size_t l = 1; l < sizes.size(); ++l) {
    const double bound = std::sqrt(6.0 / sizes[l - 1]) / spec.omega;
    std::uniform_real_distribution<double> dist(-bound, bound);
    const Eigen::Index nw = static_cast<Eigen::Index>(sizes[l - 1]) * sizes[l];
    for (Eigen::Index k = 0; k < nw; ++k) p.values(offset + k) = dist(rng);
    offset += nw + sizes[l];
  }
  return p;
}

// Floored at the smallest normal double so the output stays strictly positive
// where e^x underflows.
double softplus(double x) {
  return std::max(std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))), std::numeric_limits<double>::min());
}

ForwardCache forward_cached(const NetworkParams& params, const Points& inputs) {
  params.validate();
  const NetworkSpec& spec = params.spec;
  if (inputs.cols() != spec.input_dim)
    throw std::invalid_argument("network input dimension mismatch: expected " +
                                std::to_string(spec.input_dim) + ", got " +
                                std::to_string(inputs.cols()));
  const auto sizes = layer_sizes(spec);
  const std::size_t layers = sizes.size() - 1;

  ForwardCache cache;
  cache.input = inputs.transpose();
  cache.pre.reserve(layers);
  cache.activations.reserve(layers - 1);
  Eigen::Index offset = 0;
  for (std::size_t l = 0; l < layers; ++l) {
    const int fan_in = sizes[l], fan_out = sizes[l + 1];
    const RowMajorMap w(params.values.data() + offset, fan_out, fan_in);
    const Eigen::Map<const Eigen::VectorXd> b(params.values.data() + offset + fan_in * fan_out, fan_out);
    offset += static_cast<Eigen::Index>(fan_in) * fan_out + fan_out;
    const Eigen::MatrixXd& a = l == 0 ? cache.input : cache.activations.back();
    Eigen::MatrixXd z = w * a;
    z.colwise() += b;
    cache.pre.push_back(std::move(z));
    if (l + 1 < layers) cache.activations.push_back((spec.omega * cache.pre.back().array()).sin().matrix());
  }
  const Eigen::MatrixXd& last = cache.pre.back();
  if (spec.output_activation == OutputActivation::Softplus)
    cache.output = last.unaryExpr([](double v) { return softplus(v); }).transpose();
  else
    cache.output = last.transpose();
  return cache;
}

Points forward(const NetworkParams& params, const Points& inputs) {
  return forward_cached(params, inputs).output;
}

NetworkGradient backward(const NetworkParams& params, const ForwardCache& cache,
                         const Points& cotangent, bool want_inputs) {
  const NetworkSpec& spec = params.spec;
  if (cotangent.rows() != cache.output.rows() || cotangent.cols() != cache.output.cols())
    throw std::invalid_argument("cotangent shape does not match network output");
  const auto sizes = layer_sizes(spec);
  const std::size_t layers = sizes.size() - 1;

  NetworkGradient grad;
  grad.params = Eigen::VectorXd::Zero(params.values.size());

  std::vector<Eigen::Index> offsets(layers);
  Eigen::Index offset = 0;
  for (std::size_t l = 0; l < layers; ++l) {
    offsets[l] = offset;
    offset += static_cast<Eigen::Index>(sizes[l]) * sizes[l + 1] + sizes[l + 1];
  }

  Eigen::MatrixXd g = cotangent.transpose();
  if (spec.output_activation == OutputActivation::Softplus)
    g.array() *= cache.pre.back().unaryExpr([](double v) { return sigmoid(v); }).array();

  for (std::size_t l = layers; l-- > 0;) {
    const int fan_in = sizes[l], fan_out = sizes[l + 1];
    const Eigen::MatrixXd& a = l == 0 ? cache.input : cache.activations[l - 1];
    MutRowMajorMap dw(grad.params.data() + offsets[l], fan_out, fan_in);
    dw.noalias() = g * a.transpose();
    Eigen::Map<Eigen::VectorXd>(grad.params.data() + offsets[l] + fan_in * fan_out, fan_out) =
        g.rowwise().sum();
    if (l == 0 && !want_inputs) break;
    const RowMajorMap w(params.values.data() + offsets[l], fan_out, fan_in);
    Eigen::MatrixXd prev = w.transpose() * g;
    if (l > 0) prev.array() *= spec.omega * (spec.omega * cache.pre[l - 1].array()).cos();
    g = std::move(prev);
  }
  if (want_inputs) grad.inputs = g.transpose();
  return grad;
}

NetworkGradient backward(const NetworkParams& params, const Points& inputs,
                         const Points& cotangent, bool want_inputs) {
  return backward(params, forward_cached(params, inputs), cotangent, want_inputs);
}

}  // namespace pcparam
