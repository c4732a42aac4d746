#pragma once

// Independent reference computations for the tests: direct loops in long
// double, finite differences, brute-force geometric checks.

#include "pcparam/types.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

using pcparam::Points;

inline long double dist(const Points& a, Eigen::Index i, const Points& b, Eigen::Index k) {
  long double s = 0;
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    const long double d = static_cast<long double>(a(i, c)) - b(k, c);
    s += d * d;
  }
  return std::sqrt(s);
}

inline double directed(const Points& a, const Points& b) {
  long double worst = 0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    long double best = std::numeric_limits<long double>::infinity();
    for (Eigen::Index k = 0; k < b.rows(); ++k) best = std::min(best, dist(a, i, b, k));
    worst = std::max(worst, best);
  }
  return static_cast<double>(worst);
}

inline double hausdorff(const Points& a, const Points& b) { return std::max(directed(a, b), directed(b, a)); }
inline double modified_hausdorff(const Points& a, const Points& b) { return directed(a, b) + directed(b, a); }

/// Defining formula of the Boltzmann operator without any shift, in long double.
inline long double boltzmann(const std::vector<long double>& x, long double alpha) {
  long double num = 0, den = 0;
  for (long double v : x) {
    const long double w = std::exp(alpha * v);
    num += v * w;
    den += w;
  }
  return num / den;
}

/// Soft Hausdorff by direct nested loops.
inline double hand(const Points& y, const Points& w, double alpha) {
  std::vector<long double> rows, cols;
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    std::vector<long double> d;
    for (Eigen::Index k = 0; k < w.rows(); ++k) d.push_back(dist(y, i, w, k));
    long double m = *std::min_element(d.begin(), d.end());
    for (auto& v : d) v -= m;  // shift for range only; B is shift-equivariant
    rows.push_back(boltzmann(d, -alpha) + m);
  }
  for (Eigen::Index k = 0; k < w.rows(); ++k) {
    std::vector<long double> d;
    for (Eigen::Index i = 0; i < y.rows(); ++i) d.push_back(dist(y, i, w, k));
    long double m = *std::min_element(d.begin(), d.end());
    for (auto& v : d) v -= m;
    cols.push_back(boltzmann(d, -alpha) + m);
  }
  const auto outer = [&](std::vector<long double> v) {
    const long double m = *std::max_element(v.begin(), v.end());
    for (auto& x : v) x -= m;
    return boltzmann(v, alpha) + m;
  };
  return static_cast<double>(outer(rows) + outer(cols));
}

/// Distortion energy summed term by term over all ordered pairs.
inline double leg(const Points& x, const Points& y, const Eigen::MatrixXd& lambda, double sigma) {
  const long double s2 = static_cast<long double>(sigma) * sigma;
  long double sum = 0;
  const Eigen::Index n = x.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const long double dx = dist(x, i, x, j), dy = dist(y, i, y, j);
      const long double l = lambda(i, j);
      const long double t = std::exp(-dx * dx / s2) - std::exp(-dy * dy / (s2 * l * l));
      sum += t * t;
    }
  return static_cast<double>(sum / (static_cast<long double>(n) * n));
}

/// Central finite-difference gradient of f at v (entries perturbed in place).
inline Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd v,
                                   double step) {
  Eigen::VectorXd g(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double keep = v(i);
    v(i) = keep + step;
    const double fp = f(v);
    v(i) = keep - step;
    const double fm = f(v);
    v(i) = keep;
    g(i) = (fp - fm) / (2 * step);
  }
  return g;
}

/// Relative error with a floor on the denominator so near-zero gradients
/// are compared absolutely.
inline double rel_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double floor = 1e-6) {
  return (a - b).norm() / std::max({a.norm(), b.norm(), floor});
}

inline Eigen::VectorXd flatten(const Points& p) {
  Eigen::VectorXd v(p.size());
  for (Eigen::Index i = 0; i < p.rows(); ++i)
    for (Eigen::Index c = 0; c < p.cols(); ++c) v(i * p.cols() + c) = p(i, c);
  return v;
}

inline Points unflatten(const Eigen::VectorXd& v, Eigen::Index cols) {
  Points p(v.size() / cols, cols);
  for (Eigen::Index i = 0; i < p.rows(); ++i)
    for (Eigen::Index c = 0; c < cols; ++c) p(i, c) = v(i * cols + c);
  return p;
}

inline Points uniform(std::mt19937_64& rng, Eigen::Index n, Eigen::Index dim, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Points p(n, dim);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index c = 0; c < dim; ++c) p(i, c) = u(rng);
  return p;
}

/// Interior angle at corner a of triangle (a, b, c), from the law of cosines.
inline double corner_angle(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c) {
  const double ab = (b - a).norm(), ac = (c - a).norm(), bc = (c - b).norm();
  return std::acos(std::clamp((ab * ab + ac * ac - bc * bc) / (2 * ab * ac), -1.0, 1.0));
}

/// Circumcircle of a 2D triangle: centre and squared radius, in long double.
inline void circumcircle(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c,
                         long double& cx, long double& cy, long double& r2) {
  const long double ax = a.x(), ay = a.y(), bx = b.x(), by = b.y(), qx = c.x(), qy = c.y();
  const long double d = 2 * (ax * (by - qy) + bx * (qy - ay) + qx * (ay - by));
  cx = ((ax * ax + ay * ay) * (by - qy) + (bx * bx + by * by) * (qy - ay) + (qx * qx + qy * qy) * (ay - by)) / d;
  cy = ((ax * ax + ay * ay) * (qx - bx) + (bx * bx + by * by) * (ax - qx) + (qx * qx + qy * qy) * (bx - ax)) / d;
  r2 = (ax - cx) * (ax - cx) + (ay - cy) * (ay - cy);
}

/// Even-odd test against a closed polygon.
inline bool in_polygon(const std::vector<Eigen::Vector2d>& poly, const Eigen::Vector2d& p) {
  bool inside = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const auto& a = poly[i];
    const auto& b = poly[j];
    if ((a.y() > p.y()) != (b.y() > p.y()) && p.x() < (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x())
      inside = !inside;
  }
  return inside;
}

}  // namespace oracle
