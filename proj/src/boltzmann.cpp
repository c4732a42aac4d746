#include "pcparam/boltzmann.hpp"

#include <algorithm>
#include <limits>

namespace pcparam {
namespace {

struct Extreme {
  double deviation;  // non-negative distance of the soft extreme from the hard one
  double gap;        // distance from the extreme to the nearest other distinct value
  int multiplicity;
};

// sign = +1 audits the soft maximum, -1 the soft minimum (via B_{-a}(x) = -B_a(-x)).
Extreme soft_extreme(const Eigen::VectorXd& x, double alpha, double sign) {
  const Eigen::VectorXd y = sign * x;
  const double top = y.maxCoeff();
  int m = 0;
  double second = -std::numeric_limits<double>::infinity();
  for (double v : y) {
    if (v == top)
      ++m;
    else
      second = std::max(second, v);
  }
  double num = 0.0, den = 0.0;
  for (double v : y) {
    const double w = std::exp(alpha * (v - top));
    num += (top - v) * w;
    den += w;
  }
  return {num / den, top - second, m};
}

}  // namespace

BoltzmannBoundAudit audit_boltzmann_bound(const Eigen::VectorXd& x, double alpha) {
  if (x.size() == 0) throw std::invalid_argument("Boltzmann audit of an empty vector");
  if (!(alpha > 0.0)) throw std::invalid_argument("Boltzmann audit requires alpha > 0");
  if (x.maxCoeff() == x.minCoeff())
    throw std::invalid_argument("Boltzmann bound is undefined for constant vectors");
  const double n = static_cast<double>(x.size());
  const double norm = x.norm();
  const Extreme hi = soft_extreme(x, alpha, 1.0);
  const Extreme lo = soft_extreme(x, alpha, -1.0);
  BoltzmannBoundAudit a;
  a.max_error = hi.deviation;
  a.max_multiplicity = hi.multiplicity;
  a.max_bound = n / hi.multiplicity * std::exp(-alpha * hi.gap) * norm;
  a.min_error = lo.deviation;
  a.min_multiplicity = lo.multiplicity;
  a.min_bound = n / lo.multiplicity * std::exp(-alpha * lo.gap) * norm;
  return a;
}

}  // namespace pcparam
