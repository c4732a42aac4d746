#include "doctest.h"
#include "oracles.hpp"

#include "pcparam/neural.hpp"

#include <numbers>

using namespace pcparam;

namespace {

NetworkSpec small(int in, std::vector<int> hidden, int out, OutputActivation act = OutputActivation::None) {
  NetworkSpec s;
  s.input_dim = in;
  s.hidden_widths = std::move(hidden);
  s.output_dim = out;
  s.output_activation = act;
  return s;
}

double weighted_output(const NetworkParams& p, const Points& in, const Points& cot) {
  return (forward(p, in).array() * cot.array()).sum();
}

}  // namespace

TEST_CASE("spec validation and defaults") {
  CHECK_THROWS_AS(small(3, {}, 2).validate(), std::invalid_argument);
  CHECK_THROWS_AS(small(4, {8}, 2).validate(), std::invalid_argument);
  CHECK_THROWS_AS(small(3, {8, 0}, 2).validate(), std::invalid_argument);
  CHECK_THROWS_AS(small(3, {8}, 2, OutputActivation::Softplus).validate(), std::invalid_argument);
  CHECK_NOTHROW(small(2, {8}, 1, OutputActivation::Softplus).validate());

  CHECK(small(3, {8, 8}, 2).parameter_count() == 122);
  CHECK(init_params(small(3, {8, 8}, 2), 0).values.size() == 122);

  CHECK(shape_matching_net_spec() == small(2, {64, 64, 64}, 2));
  CHECK(parametrization_net_spec() == small(3, {256, 256, 256, 256, 256}, 2));
  CHECK(inverse_lambda_net_spec() == small(3, {128, 128, 128}, 1, OutputActivation::Softplus));
  CHECK(parametrization_net_spec().omega == 1.0);

  CHECK(output_activation_from_string(to_string(OutputActivation::Softplus)) == OutputActivation::Softplus);
  CHECK(output_activation_from_string(to_string(OutputActivation::None)) == OutputActivation::None);
  CHECK_THROWS_AS(output_activation_from_string("relu"), std::invalid_argument);
}

TEST_CASE("initialization") {
  const NetworkSpec spec = small(3, {16, 8}, 2);
  const NetworkParams a = init_params(spec, 5), b = init_params(spec, 5), c = init_params(spec, 6);
  CHECK(a.values == b.values);
  CHECK(a.values != c.values);
  // Layer 1 weights then biases.
  const double bound = std::sqrt(6.0 / 3);
  CHECK(a.values.head(48).cwiseAbs().maxCoeff() <= bound);
  CHECK(a.values.segment(48, 16).isZero());
  CHECK(a.values.segment(64, 128).cwiseAbs().maxCoeff() <= std::sqrt(6.0 / 16));
  CHECK(a.values.tail(2).isZero());
}

TEST_CASE("forward evaluation") {
  std::mt19937_64 rng(41);
  const Points in = oracle::uniform(rng, 5, 3, -1, 1);

  NetworkParams zero = init_params(small(3, {4, 4}, 2), 0);
  zero.values.setZero();
  CHECK(forward(zero, in).isZero());

  NetworkParams zero_sp = init_params(small(3, {4}, 1, OutputActivation::Softplus), 0);
  zero_sp.values.setZero();
  CHECK((forward(zero_sp, in).array() - std::log(2.0)).abs().maxCoeff() < 1e-15);

  // 2 -> (2) -> 1 by hand: out = 3 sin(x + 2y + 0.5) - sin(-x + 0.1) + 0.25.
  NetworkParams hand_set = init_params(small(2, {2}, 1), 0);
  hand_set.values << 1, 2, -1, 0, 0.5, 0.1, 3, -1, 0.25;
  const Points p = (Points(2, 2) << 0.3, -0.7, 1.2, 0.4).finished();
  const Points out = forward(hand_set, p);
  for (int i = 0; i < 2; ++i) {
    const double x = p(i, 0), y = p(i, 1);
    CHECK(out(i, 0) == doctest::Approx(3 * std::sin(x + 2 * y + 0.5) - std::sin(-x + 0.1) + 0.25).epsilon(1e-14));
  }
  hand_set.spec.output_activation = OutputActivation::Softplus;
  const Points sp = forward(hand_set, p);
  for (int i = 0; i < 2; ++i) CHECK(sp(i, 0) == doctest::Approx(std::log1p(std::exp(out(i, 0)))).epsilon(1e-14));

  CHECK_THROWS_AS(forward(hand_set, in), std::invalid_argument);
  NetworkParams bad = hand_set;
  bad.values(3) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(forward(bad, p), std::invalid_argument);
}

TEST_CASE("softplus") {
  CHECK(softplus(0.0) == doctest::Approx(std::log(2.0)));
  CHECK(softplus(800.0) == doctest::Approx(800.0));
  CHECK(softplus(-800.0) > 0.0);
  CHECK(softplus(-30.0) == doctest::Approx(std::exp(-30.0)).epsilon(1e-12));
  for (double x = -50; x <= 50; x += 0.37) CHECK(softplus(x) > 0.0);
}

TEST_CASE("batched evaluation equals per-sample evaluation") {
  std::mt19937_64 rng(42);
  for (int t = 0; t < 10; ++t) {
    const NetworkParams p = init_params(small(3, {7, 5}, 2), 100 + t);
    const Points in = oracle::uniform(rng, 9, 3, -2, 2);
    const Points all = forward(p, in);
    // Equal up to summation order inside the matrix products.
    for (Eigen::Index i = 0; i < in.rows(); ++i) CHECK((forward(p, in.row(i)) - all.row(i)).cwiseAbs().maxCoeff() <= 1e-14);
    std::vector<int> rev(9);
    std::iota(rev.rbegin(), rev.rend(), 0);
    CHECK((forward(p, gather_rows(in, rev)) - gather_rows(all, rev)).cwiseAbs().maxCoeff() <= 1e-14);
  }
}

TEST_CASE("reverse-mode gradients") {
  std::mt19937_64 rng(43);
  for (int t = 0; t < 20; ++t) {
    const bool sp = t % 2 == 1;
    const NetworkSpec spec = small(2 + t % 2, {2 + t % 5, 3 + t % 3}, sp ? 1 : 2, sp ? OutputActivation::Softplus : OutputActivation::None);
    const NetworkParams p = init_params(spec, 200 + t);
    const Points in = oracle::uniform(rng, 4, spec.input_dim, -1, 1);
    const Points cot = oracle::uniform(rng, 4, spec.output_dim, -1, 1);

    const NetworkGradient g = backward(p, in, cot, true);
    const Eigen::VectorXd fd_params = oracle::fd_gradient([&](const Eigen::VectorXd& v) {
      NetworkParams q = p;
      q.values = v;
      return weighted_output(q, in, cot);
    }, p.values, 1e-6);
    CHECK(oracle::rel_error(g.params, fd_params) < 1e-5);
    const Eigen::VectorXd fd_inputs = oracle::fd_gradient([&](const Eigen::VectorXd& v) {
      return weighted_output(p, oracle::unflatten(v, spec.input_dim), cot);
    }, oracle::flatten(in), 1e-6);
    CHECK(oracle::rel_error(oracle::flatten(g.inputs), fd_inputs) < 1e-5);

    // Linearity in the cotangent.
    CHECK(backward(p, in, Points::Zero(4, spec.output_dim)).params.isZero());
    const NetworkGradient g2 = backward(p, in, 2.0 * cot, true);
    CHECK((g2.params - 2.0 * g.params).norm() <= 1e-13 * g.params.norm());

    // The cached path gives the same result.
    const ForwardCache cache = forward_cached(p, in);
    CHECK(cache.output == forward(p, in));
    CHECK(backward(p, cache, cot).params == g.params);
  }
  const NetworkParams p = init_params(small(2, {3}, 2), 1);
  CHECK_THROWS_AS(backward(p, Points::Zero(3, 2), Points::Zero(2, 2)), std::invalid_argument);
}
