#include "pcparam/predicates.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace pcparam {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon() / 2.0;
constexpr double kCcwErrBound = (3.0 + 16.0 * kEps) * kEps;
constexpr double kIccErrBound = (10.0 + 96.0 * kEps) * kEps;

// Exact arithmetic on nonoverlapping floating-point expansions: a value is
// the exact sum of its components, stored in increasing magnitude.
using Expansion = std::vector<double>;

void two_sum(double a, double b, double& x, double& y) {
  x = a + b;
  const double bv = x - a, av = x - bv;
  y = (a - av) + (b - bv);
}

Expansion from_diff(double a, double b) {
  const double x = a - b;
  const double bv = a - x, av = x + bv;
  const double y = (a - av) + (bv - b);
  return y == 0.0 ? Expansion{x} : Expansion{y, x};
}

Expansion grow(const Expansion& e, double b) {
  Expansion h;
  h.reserve(e.size() + 1);
  double q = b;
  for (double c : e) {
    double r;
    two_sum(q, c, q, r);
    if (r != 0.0) h.push_back(r);
  }
  if (q != 0.0 || h.empty()) h.push_back(q);
  return h;
}

Expansion add(Expansion e, const Expansion& f) {
  for (double c : f) e = grow(e, c);
  return e;
}

Expansion negate(Expansion e) {
  for (double& c : e) c = -c;
  return e;
}

Expansion scale(const Expansion& e, double b) {
  Expansion h;
  h.reserve(2 * e.size());
  double q = 0.0;
  bool first = true;
  for (double c : e) {
    const double p = c * b, pe = std::fma(c, b, -p);
    if (first) {
      q = p;
      if (pe != 0.0) h.push_back(pe);
      first = false;
      continue;
    }
    double sum, r;
    two_sum(q, pe, sum, r);
    if (r != 0.0) h.push_back(r);
    two_sum(p, sum, q, r);
    if (r != 0.0) h.push_back(r);
  }
  if (q != 0.0 || h.empty()) h.push_back(q);
  return h;
}

Expansion mul(const Expansion& e, const Expansion& f) {
  Expansion out{0.0};
  for (double c : f) out = add(out, scale(e, c));
  return out;
}

int sign_of(const Expansion& e) {
  for (auto it = e.rbegin(); it != e.rend(); ++it)
    if (*it != 0.0) return *it > 0.0 ? 1 : -1;
  return 0;
}

int orient2d_exact(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
  const Expansion acx = from_diff(a.x(), c.x()), bcx = from_diff(b.x(), c.x());
  const Expansion acy = from_diff(a.y(), c.y()), bcy = from_diff(b.y(), c.y());
  return sign_of(add(mul(acx, bcy), negate(mul(acy, bcx))));
}

int incircle_exact(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c,
                   const Eigen::Vector2d& d) {
  const Expansion adx = from_diff(a.x(), d.x()), ady = from_diff(a.y(), d.y());
  const Expansion bdx = from_diff(b.x(), d.x()), bdy = from_diff(b.y(), d.y());
  const Expansion cdx = from_diff(c.x(), d.x()), cdy = from_diff(c.y(), d.y());
  const Expansion alift = add(mul(adx, adx), mul(ady, ady));
  const Expansion blift = add(mul(bdx, bdx), mul(bdy, bdy));
  const Expansion clift = add(mul(cdx, cdx), mul(cdy, cdy));
  const Expansion bc = add(mul(bdx, cdy), negate(mul(cdx, bdy)));
  const Expansion ca = add(mul(cdx, ady), negate(mul(adx, cdy)));
  const Expansion ab = add(mul(adx, bdy), negate(mul(bdx, ady)));
  return sign_of(add(add(mul(alift, bc), mul(blift, ca)), mul(clift, ab)));
}

}  // namespace

int orient2d(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
  const double left = (a.x() - c.x()) * (b.y() - c.y());
  const double right = (a.y() - c.y()) * (b.x() - c.x());
  const double det = left - right;
  const double bound = kCcwErrBound * (std::abs(left) + std::abs(right));
  if (det > bound) return 1;
  if (-det > bound) return -1;
  return orient2d_exact(a, b, c);
}

int incircle(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c,
             const Eigen::Vector2d& d) {
  const double adx = a.x() - d.x(), ady = a.y() - d.y();
  const double bdx = b.x() - d.x(), bdy = b.y() - d.y();
  const double cdx = c.x() - d.x(), cdy = c.y() - d.y();

  const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
  const double cdxady = cdx * ady, adxcdy = adx * cdy;
  const double adxbdy = adx * bdy, bdxady = bdx * ady;
  const double alift = adx * adx + ady * ady;
  const double blift = bdx * bdx + bdy * bdy;
  const double clift = cdx * cdx + cdy * cdy;

  const double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady);
  const double permanent = (std::abs(bdxcdy) + std::abs(cdxbdy)) * alift +
                           (std::abs(cdxady) + std::abs(adxcdy)) * blift +
                           (std::abs(adxbdy) + std::abs(bdxady)) * clift;
  const double bound = kIccErrBound * permanent;
  if (det > bound) return 1;
  if (-det > bound) return -1;
  return incircle_exact(a, b, c, d);
}

}  // namespace pcparam
