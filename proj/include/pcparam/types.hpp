#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pcparam {

/// Points stored one per row; the column count is the ambient dimension.
using Points = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Triangles = Eigen::Matrix<int, Eigen::Dynamic, 3, Eigen::RowMajor>;

/// Raised when a numeric computation produces a non-finite value.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Validated point cloud: non-empty, dimension 2 or 3, finite coordinates.
class PointCloud {
 public:
  PointCloud() = default;
  explicit PointCloud(Points points);

  const Points& points() const { return points_; }
  Eigen::Index size() const { return points_.rows(); }
  int dim() const { return static_cast<int>(points_.cols()); }

  auto row(Eigen::Index i) const { return points_.row(i); }

 private:
  Points points_;
};

/// Vertex positions plus triangle index triples.
struct TriangleMesh {
  Points vertices;
  Triangles triangles;

  Eigen::Index num_vertices() const { return vertices.rows(); }
  Eigen::Index num_triangles() const { return triangles.rows(); }

  /// Throws std::invalid_argument when indices are out of range, a
  /// triangle repeats a vertex, or an edge is shared by more than two faces.
  void validate() const;
};

/// Throws std::invalid_argument unless every entry is finite.
void require_finite(const Eigen::Ref<const Eigen::MatrixXd>& m, const char* what);

/// Selects rows of `points` in the given order.
Points gather_rows(const Points& points, const std::vector<int>& indices);

}  // namespace pcparam
