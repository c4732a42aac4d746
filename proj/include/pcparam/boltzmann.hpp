#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace pcparam {

// Boltzmann operator B_a(x) = sum x_i e^{a x_i} / sum e^{a x_i}.
// Positive a gives a soft maximum, negative a a soft minimum, a = 0 the mean.
// Exponents are shifted by max_i(a x_i) so e^{...} never overflows.

namespace detail {

template <typename Derived>
void check_boltzmann_input(const Eigen::DenseBase<Derived>& x, typename Derived::Scalar alpha) {
  if (x.size() == 0) throw std::invalid_argument("Boltzmann operator of an empty vector");
  if (!std::isfinite(alpha)) throw std::invalid_argument("Boltzmann alpha must be finite");
}

}  // namespace detail

/// Softmax(alpha * x), computed with the max-shift.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> boltzmann_weights(
    const Eigen::DenseBase<Derived>& x, typename Derived::Scalar alpha) {
  using Scalar = typename Derived::Scalar;
  detail::check_boltzmann_input(x, alpha);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> z = alpha * x.derived().reshaped();
  z = (z.array() - z.maxCoeff()).exp();
  return z / z.sum();
}

template <typename Derived>
typename Derived::Scalar boltzmann(const Eigen::DenseBase<Derived>& x,
                                   typename Derived::Scalar alpha) {
  const auto w = boltzmann_weights(x, alpha);
  return w.dot(x.derived().reshaped().matrix());
}

/// Gradient of boltzmann(x, alpha) with respect to x:
/// Softmax(alpha x) .* (1 + alpha (x - B_alpha(x))).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> boltzmann_gradient(
    const Eigen::DenseBase<Derived>& x, typename Derived::Scalar alpha) {
  using Scalar = typename Derived::Scalar;
  const auto w = boltzmann_weights(x, alpha);
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v = x.derived().reshaped();
  const Scalar b = w.dot(v);
  return (w.array() * (Scalar(1) + alpha * (v.array() - b))).matrix();
}

/// Value and gradient in one pass.
template <typename Scalar>
struct BoltzmannEval {
  Scalar value;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> gradient;
};

template <typename Derived>
BoltzmannEval<typename Derived::Scalar> boltzmann_with_gradient(
    const Eigen::DenseBase<Derived>& x, typename Derived::Scalar alpha) {
  using Scalar = typename Derived::Scalar;
  const auto w = boltzmann_weights(x, alpha);
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v = x.derived().reshaped();
  const Scalar b = w.dot(v);
  return {b, (w.array() * (Scalar(1) + alpha * (v.array() - b))).matrix()};
}

/// Both sides of the exponential error bound for the soft maximum and the
/// soft minimum of a non-constant vector. `max_multiplicity` / `min_multiplicity`
/// count how many entries attain the extreme value.
struct BoltzmannBoundAudit {
  double max_error = 0.0;  // |B_a(x) - max x|
  double max_bound = 0.0;  // (n/m) e^{-a (max - second max)} |x|
  double min_error = 0.0;  // |B_{-a}(x) - min x|
  double min_bound = 0.0;  // (n/l) e^{-a (second min - min)} |x|
  int max_multiplicity = 0;
  int min_multiplicity = 0;

  bool holds() const { return max_error <= max_bound && min_error <= min_bound; }
};

/// Evaluates the error bound for alpha > 0. The error is accumulated as
/// sum (x_i - x_max) w_i / sum w_i so it carries only relative rounding
/// error, which keeps tiny bounds at large alpha checkable in floating point.
/// Throws for constant vectors, for which the bound is not defined.
BoltzmannBoundAudit audit_boltzmann_bound(const Eigen::VectorXd& x, double alpha);

}  // namespace pcparam
