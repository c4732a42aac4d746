#include "pcparam/types.hpp"

#include <unordered_map>

namespace pcparam {

PointCloud::PointCloud(Points points) : points_(std::move(points)) {
  if (points_.rows() == 0) throw std::invalid_argument("point cloud is empty");
  if (points_.cols() != 2 && points_.cols() != 3)
    throw std::invalid_argument("point cloud dimension must be 2 or 3, got " +
                                std::to_string(points_.cols()));
  require_finite(points_, "point cloud");
}

void TriangleMesh::validate() const {
  const Eigen::Index n = vertices.rows();
  std::unordered_map<std::uint64_t, int> edge_count;
  for (Eigen::Index t = 0; t < triangles.rows(); ++t) {
    const auto tri = triangles.row(t);
    for (int c = 0; c < 3; ++c) {
      if (tri(c) < 0 || tri(c) >= n)
        throw std::invalid_argument("triangle " + std::to_string(t) +
                                    " has out-of-range vertex index " +
                                    std::to_string(tri(c)));
    }
    if (tri(0) == tri(1) || tri(1) == tri(2) || tri(0) == tri(2))
      throw std::invalid_argument("triangle " + std::to_string(t) + " is degenerate");
    for (int c = 0; c < 3; ++c) {
      auto a = static_cast<std::uint32_t>(tri(c));
      auto b = static_cast<std::uint32_t>(tri((c + 1) % 3));
      if (a > b) std::swap(a, b);
      const std::uint64_t key = (std::uint64_t{a} << 32) | b;
      if (++edge_count[key] > 2)
        throw std::invalid_argument("edge (" + std::to_string(a) + ", " +
                                    std::to_string(b) + ") has more than two faces");
    }
  }
}

void require_finite(const Eigen::Ref<const Eigen::MatrixXd>& m, const char* what) {
  if (!m.allFinite()) throw std::invalid_argument(std::string(what) + " contains non-finite values");
}

Points gather_rows(const Points& points, const std::vector<int>& indices) {
  Points out(static_cast<Eigen::Index>(indices.size()), points.cols());
  for (std::size_t i = 0; i < indices.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = points.row(indices[i]);
  return out;
}

}  // namespace pcparam
