#pragma once

#include "pcparam/types.hpp"

#include <numbers>

namespace pcparam {

/// Euclidean distance between every row of `a` and every row of `b`
/// (rows of the result follow `a`, columns follow `b`).
Eigen::MatrixXd pairwise_distances(const Points& a, const Points& b);

/// max_i min_k |a_i - b_k|
double directed_hausdorff(const Points& a, const Points& b);

/// Classical Hausdorff distance: the larger of the two directed distances.
double hausdorff_exact(const Points& a, const Points& b);

/// Sum of the two directed distances; dominates hausdorff_exact.
double modified_hausdorff_exact(const Points& a, const Points& b);

struct CornerDiff {
  int triangle;
  int corner;
  double diff;  // reference angle minus mapped angle, radians
};

struct Histogram {
  std::vector<double> edges;  // bins + 1 entries
  std::vector<long> counts;

  long total() const;
};

/// Equal-width histogram over [lo, hi]; values outside are clamped into the
/// end bins so that every value is counted.
Histogram make_histogram(const std::vector<double>& values, int bins, double lo, double hi);

struct AngleDistortionReport {
  std::vector<CornerDiff> per_corner;
  double mean_abs = 0.0;
  Histogram histogram;
};

struct AngleHistogramSpec {
  int bins = 60;
  double lo = -std::numbers::pi;
  double hi = std::numbers::pi;
};

/// Interior angles of triangle (p0, p1, p2) at each corner, via arccos of
/// normalized dot products. Throws on a zero-length edge.
Eigen::Vector3d triangle_angles(const Eigen::VectorXd& p0, const Eigen::VectorXd& p1,
                                const Eigen::VectorXd& p2, int triangle_id = -1);

/// Per-corner angle difference between `reference` and the same
/// connectivity placed at `mapped` (2D, one row per reference vertex).
AngleDistortionReport angle_distortion(const TriangleMesh& reference, const Points& mapped,
                                       const AngleHistogramSpec& hist = {});

/// Area of each triangle of `mesh` (2D or 3D vertices).
Eigen::VectorXd triangle_areas(const TriangleMesh& mesh);

/// Longest edge length over all triangles.
double max_edge_length(const TriangleMesh& mesh);

}  // namespace pcparam
