#include "pcparam/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pcparam {
namespace {

void require_same_dim(const Points& a, const Points& b) {
  if (a.cols() != b.cols())
    throw std::invalid_argument("dimension mismatch: " + std::to_string(a.cols()) + " vs " +
                                std::to_string(b.cols()));
}

}  // namespace

Eigen::MatrixXd pairwise_distances(const Points& a, const Points& b) {
  require_same_dim(a, b);
  Eigen::MatrixXd d(a.rows(), b.rows());
  for (Eigen::Index k = 0; k < b.rows(); ++k)
    for (Eigen::Index i = 0; i < a.rows(); ++i) d(i, k) = (a.row(i) - b.row(k)).norm();
  return d;
}

double directed_hausdorff(const Points& a, const Points& b) {
  require_same_dim(a, b);
  if (a.rows() == 0 || b.rows() == 0) throw std::invalid_argument("empty point set");
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    double nearest = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < b.rows() && nearest > worst; ++k)
      nearest = std::min(nearest, (a.row(i) - b.row(k)).squaredNorm());
    worst = std::max(worst, nearest);
  }
  return std::sqrt(worst);
}

double hausdorff_exact(const Points& a, const Points& b) {
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

double modified_hausdorff_exact(const Points& a, const Points& b) {
  return directed_hausdorff(a, b) + directed_hausdorff(b, a);
}

long Histogram::total() const {
  long s = 0;
  for (long c : counts) s += c;
  return s;
}

Histogram make_histogram(const std::vector<double>& values, int bins, double lo, double hi) {
  if (bins < 1 || !(hi > lo)) throw std::invalid_argument("invalid histogram range");
  Histogram h;
  h.edges.resize(static_cast<std::size_t>(bins) + 1);
  for (int b = 0; b <= bins; ++b) h.edges[b] = lo + (hi - lo) * b / bins;
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  for (double v : values) {
    int b = static_cast<int>(std::floor((v - lo) / (hi - lo) * bins));
    h.counts[static_cast<std::size_t>(std::clamp(b, 0, bins - 1))] += 1;
  }
  return h;
}

Eigen::Vector3d triangle_angles(const Eigen::VectorXd& p0, const Eigen::VectorXd& p1,
                                const Eigen::VectorXd& p2, int triangle_id) {
  const std::array<const Eigen::VectorXd*, 3> p{&p0, &p1, &p2};
  Eigen::Vector3d angles;
  for (int c = 0; c < 3; ++c) {
    const Eigen::VectorXd u = *p[(c + 1) % 3] - *p[c];
    const Eigen::VectorXd v = *p[(c + 2) % 3] - *p[c];
    const double nu = u.norm(), nv = v.norm();
    if (nu == 0.0 || nv == 0.0)
      throw std::invalid_argument("zero-length edge in triangle " + std::to_string(triangle_id));
    angles(c) = std::acos(std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0));
  }
  return angles;
}

AngleDistortionReport angle_distortion(const TriangleMesh& reference, const Points& mapped,
                                       const AngleHistogramSpec& hist) {
  if (mapped.rows() != reference.vertices.rows())
    throw std::invalid_argument("mapped cloud must have one point per reference vertex");
  if (mapped.cols() != 2) throw std::invalid_argument("mapped cloud must be 2D");
  const auto ref_dim = reference.vertices.cols();
  if (ref_dim != 2 && ref_dim != 3)
    throw std::invalid_argument("reference mesh must be 2D or 3D");

  AngleDistortionReport report;
  report.per_corner.reserve(static_cast<std::size_t>(reference.num_triangles()) * 3);
  std::vector<double> diffs;
  diffs.reserve(report.per_corner.capacity());
  double sum_abs = 0.0;
  for (Eigen::Index t = 0; t < reference.num_triangles(); ++t) {
    const auto tri = reference.triangles.row(t);
    const int id = static_cast<int>(t);
    const Eigen::Vector3d theta =
        triangle_angles(reference.vertices.row(tri(0)).transpose(),
                        reference.vertices.row(tri(1)).transpose(),
                        reference.vertices.row(tri(2)).transpose(), id);
    const Eigen::Vector3d phi = triangle_angles(
        mapped.row(tri(0)).transpose(), mapped.row(tri(1)).transpose(),
        mapped.row(tri(2)).transpose(), id);
    for (int c = 0; c < 3; ++c) {
      const double d = theta(c) - phi(c);
      report.per_corner.push_back({id, c, d});
      diffs.push_back(d);
      sum_abs += std::abs(d);
    }
  }
  report.mean_abs = diffs.empty() ? 0.0 : sum_abs / static_cast<double>(diffs.size());
  report.histogram = make_histogram(diffs, hist.bins, hist.lo, hist.hi);
  return report;
}

Eigen::VectorXd triangle_areas(const TriangleMesh& mesh) {
  Eigen::VectorXd areas(mesh.num_triangles());
  for (Eigen::Index t = 0; t < mesh.num_triangles(); ++t) {
    const auto tri = mesh.triangles.row(t);
    Eigen::Vector3d a = Eigen::Vector3d::Zero(), b = Eigen::Vector3d::Zero();
    const auto dim = mesh.vertices.cols();
    a.head(dim) = (mesh.vertices.row(tri(1)) - mesh.vertices.row(tri(0))).transpose();
    b.head(dim) = (mesh.vertices.row(tri(2)) - mesh.vertices.row(tri(0))).transpose();
    areas(t) = 0.5 * a.cross(b).norm();
  }
  return areas;
}

double max_edge_length(const TriangleMesh& mesh) {
  double r = 0.0;
  for (Eigen::Index t = 0; t < mesh.num_triangles(); ++t)
    for (int c = 0; c < 3; ++c)
      r = std::max(r, (mesh.vertices.row(mesh.triangles(t, c)) -
                       mesh.vertices.row(mesh.triangles(t, (c + 1) % 3)))
                          .norm());
  return r;
}

}  // namespace pcparam
