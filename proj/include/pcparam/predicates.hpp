#pragma once

#include <Eigen/Core>

namespace pcparam {

// Robust planar predicates. A floating-point evaluation is accepted when its
// magnitude exceeds a forward error bound; otherwise the determinant is
// recomputed exactly with floating-point expansion arithmetic.

/// +1 if (a, b, c) turn counter-clockwise, -1 if clockwise, 0 if collinear.
int orient2d(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c);

/// +1 if d lies strictly inside the circle through counter-clockwise a, b, c;
/// -1 if strictly outside, 0 if cocircular.
int incircle(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c,
             const Eigen::Vector2d& d);

}  // namespace pcparam
