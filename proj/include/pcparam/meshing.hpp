#pragma once

#include "pcparam/domains.hpp"
#include "pcparam/neural.hpp"
#include "pcparam/types.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

namespace pcparam {

inline std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (std::uint64_t{static_cast<std::uint32_t>(a)} << 32) | static_cast<std::uint32_t>(b);
}

inline std::pair<int, int> edge_from_key(std::uint64_t key) {
  return {static_cast<int>(key >> 32), static_cast<int>(key & 0xffffffffu)};
}

/// Undirected edge -> incident triangle ids.
using EdgeIncidence = std::unordered_map<std::uint64_t, std::vector<int>>;

EdgeIncidence edge_incidence(const TriangleMesh& mesh);

struct DelaunayResult {
  TriangleMesh mesh;  // vertices are the input points, duplicates unreferenced
  std::vector<std::pair<int, int>> duplicates;  // (dropped index, index kept in its place)
};

/// Delaunay triangulation of the convex hull of 2D points (Bowyer-Watson with
/// a super-triangle, hull completion and Lawson flips, robust predicates).
/// Throws if fewer than three distinct points or all points are collinear.
DelaunayResult delaunay(const Points& points);

/// Removes every triangle with an edge longer than h; vertices are kept.
TriangleMesh prune_long_faces(const TriangleMesh& mesh, double h);

/// Closed loops of edges with exactly one incident face, each a simple
/// cycle (loops may meet at pinch vertices). Throws on an edge shared by
/// more than two faces.
std::vector<std::vector<int>> boundary_edges(const TriangleMesh& mesh);

enum class MeshMode { Uniform, LambdaAdapted };

using ScalarField = std::function<double(const Eigen::Vector2d&)>;

struct ParamMeshOptions {
  MeshMode mode = MeshMode::Uniform;
  double target_edge = 0.1;
  ScalarField lambda_inv;  // required for LambdaAdapted
  std::uint64_t seed = 0;
};

/// Triangle mesh of a parameter domain: vertices inside the domain,
/// Delaunay connectivity, faces whose centroid lies outside removed.
/// Uniform mode uses a triangular lattice; lambda-adapted mode places
/// vertices by variable-radius dart throwing with local spacing
/// proportional to 1 / sqrt(lambda_inv), normalized to a median of target_edge.
TriangleMesh generate_param_mesh(const DomainSpec& domain, const ParamMeshOptions& options);

struct InterpolationResult {
  Points points;             // one row per query; NaN rows for dropped queries
  std::vector<bool> valid;
  std::vector<int> dropped;  // query indices outside the triangulated region
};

/// Barycentric interpolation of `original` over a triangulation of
/// `mapped` (its Delaunay triangulation unless one is supplied). Queries
/// within 1e-9 of the region are snapped onto it; farther ones are dropped.
InterpolationResult interpolate_inverse(const Points& mapped, const Points& original, const Points& queries,
                                        const TriangleMesh* triangulation = nullptr);

/// Scalar field on the plane interpolating per-point values over a
/// triangulation of `mapped`, falling back to the nearest point outside it.
ScalarField interpolated_field(const Points& mapped, const Eigen::VectorXd& values);

/// Per-point inverse scale estimated from a known map: the mean over the k
/// nearest neighbours of |x_i - x_j| / (2 |y_i - y_j|).
Eigen::VectorXd estimate_lambda_inv(const Points& original, const Points& mapped, int k = 6);

/// Builds a parameter-domain mesh and lifts its vertices to 3D through the
/// inverse map; faces touching dropped vertices are removed.
TriangleMesh reconstruct_surface(const Points& mapped, const Points& original, const DomainSpec& domain,
                                 const ParamMeshOptions& options);

/// Same, with the map and the inverse-scale field given by trained networks.
TriangleMesh reconstruct_surface(const NetworkParams& map_net, const NetworkParams* lambda_net,
                                 const Points& original, const DomainSpec& domain, MeshMode mode,
                                 double target_edge, std::uint64_t seed = 0);

}  // namespace pcparam
