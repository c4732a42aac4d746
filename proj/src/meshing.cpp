#include "pcparam/meshing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <unordered_set>

namespace pcparam {
namespace {

double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

Eigen::Vector2d closest_on_segment(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& q) {
  const Eigen::Vector2d d = b - a;
  const double len2 = d.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((q - a).dot(d) / len2, 0.0, 1.0) : 0.0;
  return a + t * d;
}

// Uniform grid over triangle bounding boxes for point location.
class TriangleLocator {
 public:
  TriangleLocator(Points vertices, Triangles triangles) : v_(std::move(vertices)), t_(std::move(triangles)) {
    lo_ = v_.colwise().minCoeff().transpose();
    hi_ = v_.colwise().maxCoeff().transpose();
    const Eigen::Index nt = std::max<Eigen::Index>(t_.rows(), 1);
    n_ = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(nt))));
    cell_ = ((hi_ - lo_) / n_).cwiseMax(1e-300);
    cells_.assign(static_cast<std::size_t>(n_) * n_, {});
    for (Eigen::Index t = 0; t < t_.rows(); ++t) {
      Eigen::Vector2d blo = corner(t, 0), bhi = blo;
      for (int c = 1; c < 3; ++c) {
        blo = blo.cwiseMin(corner(t, c));
        bhi = bhi.cwiseMax(corner(t, c));
      }
      const auto [i0, j0] = cell_of(blo);
      const auto [i1, j1] = cell_of(bhi);
      for (int i = i0; i <= i1; ++i)
        for (int j = j0; j <= j1; ++j) cells_[static_cast<std::size_t>(i) * n_ + j].push_back(static_cast<int>(t));
    }
  }

  const Triangles& triangles() const { return t_; }

  Eigen::Vector2d corner(Eigen::Index t, int c) const { return v_.row(t_(t, c)).transpose(); }

  // Barycentric coordinates of q in triangle t.
  Eigen::Vector3d barycentric(Eigen::Index t, const Eigen::Vector2d& q) const {
    const Eigen::Vector2d a = corner(t, 0), b = corner(t, 1), c = corner(t, 2);
    const double d = cross2(b - a, c - a);
    const double l0 = cross2(b - q, c - q) / d;
    const double l1 = cross2(c - q, a - q) / d;
    return {l0, l1, 1.0 - l0 - l1};
  }

  // Triangle containing q (with barycentric coordinates), or -1.
  int locate(const Eigen::Vector2d& q, Eigen::Vector3d& bary) const {
    if ((q.array() < lo_.array()).any() || (q.array() > hi_.array()).any()) return -1;
    const auto [i, j] = cell_of(q);
    for (int t : cells_[static_cast<std::size_t>(i) * n_ + j]) {
      const Eigen::Vector3d w = barycentric(t, q);
      if (w.minCoeff() >= -1e-12) {
        bary = w.cwiseMax(0.0) / w.cwiseMax(0.0).sum();
        return t;
      }
    }
    return -1;
  }

  // Nearest triangle and the barycentric coordinates of the closest point on it.
  int nearest(const Eigen::Vector2d& q, Eigen::Vector3d& bary, double& dist) const {
    dist = std::numeric_limits<double>::infinity();
    int best = -1;
    for (Eigen::Index t = 0; t < t_.rows(); ++t) {
      for (int c = 0; c < 3; ++c) {
        const Eigen::Vector2d p = closest_on_segment(corner(t, c), corner(t, (c + 1) % 3), q);
        const double d = (p - q).norm();
        if (d < dist) {
          dist = d;
          best = static_cast<int>(t);
          bary = barycentric(t, p).cwiseMax(0.0);
          bary /= bary.sum();
        }
      }
    }
    return best;
  }

 private:
  std::pair<int, int> cell_of(const Eigen::Vector2d& p) const {
    const auto idx = [&](double x, double lo, double w) {
      return std::clamp(static_cast<int>(std::floor((x - lo) / w)), 0, n_ - 1);
    };
    return {idx(p.x(), lo_.x(), cell_.x()), idx(p.y(), lo_.y(), cell_.y())};
  }

  Points v_;
  Triangles t_;
  Eigen::Vector2d lo_, hi_, cell_;
  int n_ = 1;
  std::vector<std::vector<int>> cells_;
};

// Point at arc length s along a loop.
Eigen::Vector2d loop_point(const Loop& loop, double s) {
  for (const auto& seg : loop.segments) {
    const double len = segment_length(seg);
    if (s <= len) return segment_point(seg, len > 0.0 ? s / len : 0.0);
    s -= len;
  }
  return segment_end(loop.segments.back());
}

std::vector<const Loop*> loops_of(const DomainSpec& domain) {
  std::vector<const Loop*> loops{&domain.outer};
  for (const auto& h : domain.holes) loops.push_back(&h);
  return loops;
}

Points to_points(const std::vector<Eigen::Vector2d>& pts) {
  Points out(static_cast<Eigen::Index>(pts.size()), 2);
  for (std::size_t i = 0; i < pts.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = pts[i].transpose();
  return out;
}

// Delaunay of the points, keeping faces whose centroid lies in the domain,
// with unreferenced (duplicate) vertices compacted away.
TriangleMesh clipped_delaunay(const DomainSpec& domain, const std::vector<Eigen::Vector2d>& pts) {
  const DelaunayResult del = delaunay(to_points(pts));
  std::vector<Eigen::Index> keep;
  for (Eigen::Index t = 0; t < del.mesh.num_triangles(); ++t) {
    Eigen::Vector2d c = Eigen::Vector2d::Zero();
    for (int k = 0; k < 3; ++k) c += del.mesh.vertices.row(del.mesh.triangles(t, k)).transpose();
    if (contains(domain, c / 3.0)) keep.push_back(t);
  }
  std::vector<int> remap(pts.size(), -1);
  std::vector<Eigen::Vector2d> used;
  Triangles tris(static_cast<Eigen::Index>(keep.size()), 3);
  for (std::size_t k = 0; k < keep.size(); ++k)
    for (int c = 0; c < 3; ++c) {
      const int v = del.mesh.triangles(keep[k], c);
      if (remap[v] < 0) {
        remap[v] = static_cast<int>(used.size());
        used.push_back(pts[v]);
      }
      tris(static_cast<Eigen::Index>(k), c) = remap[v];
    }
  return {to_points(used), tris};
}

double median_edge_length(const TriangleMesh& mesh) {
  std::vector<double> lengths;
  for (const auto& [key, faces] : edge_incidence(mesh)) {
    const auto [a, b] = edge_from_key(key);
    lengths.push_back((mesh.vertices.row(a) - mesh.vertices.row(b)).norm());
  }
  if (lengths.empty()) throw std::runtime_error("mesh has no edges");
  auto mid = lengths.begin() + static_cast<std::ptrdiff_t>(lengths.size() / 2);
  std::nth_element(lengths.begin(), mid, lengths.end());
  return *mid;
}

void check_feature_size(const DomainSpec& domain, double h) {
  for (const Loop* loop : loops_of(domain))
    if (loop->length() < 3.0 * h)
      throw std::invalid_argument("target edge length " + std::to_string(h) +
                                  " is too large for a boundary loop of length " + std::to_string(loop->length()));
}

TriangleMesh uniform_mesh(const DomainSpec& domain, double h) {
  std::vector<Eigen::Vector2d> pts;
  for (const Loop* loop : loops_of(domain))
    for (const auto& seg : loop->segments) {
      const int n = std::max(1, static_cast<int>(std::lround(segment_length(seg) / h)));
      for (int k = 0; k < n; ++k) pts.push_back(segment_point(seg, static_cast<double>(k) / n));
    }
  const auto [lo, hi] = domain.bounding_box();
  const double dy = h * std::sqrt(3.0) / 2.0;
  for (int j = 0; lo.y() + j * dy <= hi.y(); ++j) {
    const double y = lo.y() + j * dy;
    for (double x = lo.x() + (j % 2 ? 0.5 * h : 0.0); x <= hi.x(); x += h) {
      const Eigen::Vector2d p(x, y);
      if (contains(domain, p) && distance_to_boundary(domain, p) >= 0.5 * h) pts.push_back(p);
    }
  }
  return clipped_delaunay(domain, pts);
}

// Variable-radius dart throwing at spacing kappa / sqrt(lambda_inv).
TriangleMesh adapted_mesh(const DomainSpec& domain, const ScalarField& field, double kappa, std::uint64_t seed) {
  const auto spacing = [&](const Eigen::Vector2d& p) {
    const double v = field(p);
    if (!(v > 0.0) || !std::isfinite(v)) throw NumericError("inverse-scale field must be positive and finite");
    return kappa / std::sqrt(v);
  };

  std::vector<Eigen::Vector2d> pts;
  std::vector<double> radius;
  for (const Loop* loop : loops_of(domain)) {
    const double total = loop->length();
    const std::size_t first = pts.size();
    double s = 0.0;
    while (true) {
      const Eigen::Vector2d p = loop_point(*loop, s);
      const double r = spacing(p);
      pts.push_back(p);
      radius.push_back(r);
      if (s + 1.5 * r >= total) break;
      s += r;
    }
    if (pts.size() - first < 3) throw std::invalid_argument("target edge length too large for a boundary loop");
  }

  // Expected interior count from the mean of 1 / s^2 over the area.
  const Points probe = sample_area(domain, 2000, seed ^ 0x5bd1e995u);
  double inv_s2 = 0.0, min_s = std::numeric_limits<double>::infinity(), max_s = 0.0;
  for (Eigen::Index i = 0; i < probe.rows(); ++i) {
    const double s = spacing(probe.row(i).transpose());
    inv_s2 += 1.0 / (s * s);
    min_s = std::min(min_s, s);
    max_s = std::max(max_s, s);
  }
  for (double r : radius) {
    min_s = std::min(min_s, r);
    max_s = std::max(max_s, r);
  }
  const double expected = domain.area() * inv_s2 / static_cast<double>(probe.rows());
  const auto candidates = static_cast<Eigen::Index>(std::clamp(30.0 * expected, 2000.0, 2e6));
  const Points cand = sample_area(domain, candidates, seed);

  const auto [lo, hi] = domain.bounding_box();
  const double cell = min_s;
  const int nx = static_cast<int>(std::ceil((hi.x() - lo.x()) / cell)) + 1;
  const int ny = static_cast<int>(std::ceil((hi.y() - lo.y()) / cell)) + 1;
  const int reach = static_cast<int>(std::ceil(max_s / cell));
  std::vector<std::vector<int>> grid(static_cast<std::size_t>(nx) * ny);
  const auto cell_of = [&](const Eigen::Vector2d& p) {
    return std::pair{std::clamp(static_cast<int>((p.x() - lo.x()) / cell), 0, nx - 1),
                     std::clamp(static_cast<int>((p.y() - lo.y()) / cell), 0, ny - 1)};
  };
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const auto [i, j] = cell_of(pts[k]);
    grid[static_cast<std::size_t>(i) * ny + j].push_back(static_cast<int>(k));
  }

  for (Eigen::Index c = 0; c < cand.rows(); ++c) {
    const Eigen::Vector2d p = cand.row(c).transpose();
    const double r = spacing(p);
    if (distance_to_boundary(domain, p) < 0.5 * r) continue;
    const auto [ci, cj] = cell_of(p);
    bool ok = true;
    for (int i = std::max(0, ci - reach); i <= std::min(nx - 1, ci + reach) && ok; ++i)
      for (int j = std::max(0, cj - reach); j <= std::min(ny - 1, cj + reach) && ok; ++j)
        for (int k : grid[static_cast<std::size_t>(i) * ny + j])
          if ((pts[k] - p).norm() < 0.5 * (r + radius[k])) {
            ok = false;
            break;
          }
    if (!ok) continue;
    grid[static_cast<std::size_t>(ci) * ny + cj].push_back(static_cast<int>(pts.size()));
    pts.push_back(p);
    radius.push_back(r);
  }
  return clipped_delaunay(domain, pts);
}

}  // namespace

TriangleMesh generate_param_mesh(const DomainSpec& domain, const ParamMeshOptions& options) {
  domain.validate();
  const double h = options.target_edge;
  if (!(h > 0.0)) throw std::invalid_argument("target edge length must be positive");
  check_feature_size(domain, h);
  if (options.mode == MeshMode::Uniform) return uniform_mesh(domain, h);

  if (!options.lambda_inv) throw std::invalid_argument("lambda-adapted meshing needs an inverse-scale field");
  // Calibrate the spacing constant so the median edge length matches the target.
  const Points probe = sample_area(domain, 501, options.seed ^ 0x9e3779b97f4a7c15ull);
  std::vector<double> values;
  for (Eigen::Index i = 0; i < probe.rows(); ++i) values.push_back(options.lambda_inv(probe.row(i).transpose()));
  std::nth_element(values.begin(), values.begin() + 250, values.end());
  double kappa = h * std::sqrt(values[250]);
  TriangleMesh mesh;
  for (int iter = 0; iter < 4; ++iter) {
    mesh = adapted_mesh(domain, options.lambda_inv, kappa, options.seed);
    const double ratio = h / median_edge_length(mesh);
    if (std::abs(ratio - 1.0) < 0.01) break;
    kappa *= ratio;
  }
  return mesh;
}

InterpolationResult interpolate_inverse(const Points& mapped, const Points& original, const Points& queries,
                                        const TriangleMesh* triangulation) {
  if (mapped.rows() != original.rows())
    throw std::invalid_argument("mapped and original clouds differ in size");
  if (mapped.cols() != 2 || queries.cols() != 2) throw std::invalid_argument("mapped points and queries must be 2D");
  const Triangles tris = triangulation ? triangulation->triangles : delaunay(mapped).mesh.triangles;
  const TriangleLocator locator(mapped, tris);

  InterpolationResult result;
  result.points = Points::Constant(queries.rows(), original.cols(), std::numeric_limits<double>::quiet_NaN());
  result.valid.assign(static_cast<std::size_t>(queries.rows()), false);
  for (Eigen::Index q = 0; q < queries.rows(); ++q) {
    const Eigen::Vector2d p = queries.row(q).transpose();
    Eigen::Vector3d w;
    int t = locator.locate(p, w);
    if (t < 0) {
      double dist = 0.0;
      t = locator.nearest(p, w, dist);
      if (t < 0 || dist > 1e-9) {
        result.dropped.push_back(static_cast<int>(q));
        continue;
      }
    }
    Eigen::RowVectorXd x = Eigen::RowVectorXd::Zero(original.cols());
    for (int c = 0; c < 3; ++c) {
      // Exact pass-through at vertices.
      if (w(c) == 1.0) {
        x = original.row(tris(t, c));
        break;
      }
      x += w(c) * original.row(tris(t, c));
    }
    result.points.row(q) = x;
    result.valid[static_cast<std::size_t>(q)] = true;
  }
  return result;
}

ScalarField interpolated_field(const Points& mapped, const Eigen::VectorXd& values) {
  if (mapped.rows() != values.size()) throw std::invalid_argument("field values and points differ in size");
  auto locator = std::make_shared<TriangleLocator>(mapped, delaunay(mapped).mesh.triangles);
  auto pts = std::make_shared<Points>(mapped);
  auto vals = std::make_shared<Eigen::VectorXd>(values);
  return [locator, pts, vals](const Eigen::Vector2d& p) {
    Eigen::Vector3d w;
    const int t = locator->locate(p, w);
    if (t >= 0) {
      double v = 0.0;
      for (int c = 0; c < 3; ++c) v += w(c) * (*vals)(locator->triangles()(t, c));
      return v;
    }
    Eigen::Index nearest = 0;
    (pts->rowwise() - p.transpose()).rowwise().squaredNorm().minCoeff(&nearest);
    return (*vals)(nearest);
  };
}

Eigen::VectorXd estimate_lambda_inv(const Points& original, const Points& mapped, int k) {
  if (original.rows() != mapped.rows()) throw std::invalid_argument("original and mapped clouds differ in size");
  if (k < 1) throw std::invalid_argument("neighbour count must be positive");
  const Eigen::Index n = original.rows();
  Eigen::VectorXd out(n);
  std::vector<std::pair<double, Eigen::Index>> dist(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j)
      dist[static_cast<std::size_t>(j)] = {(original.row(i) - original.row(j)).squaredNorm(), j};
    const auto kk = std::min<std::size_t>(static_cast<std::size_t>(k) + 1, dist.size());
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(kk), dist.end());
    double sum = 0.0;
    int used = 0;
    for (std::size_t m = 0; m < kk; ++m) {
      const Eigen::Index j = dist[m].second;
      const double dy = (mapped.row(i) - mapped.row(j)).norm();
      if (j == i || dy <= 0.0 || dist[m].first <= 0.0) continue;
      sum += std::sqrt(dist[m].first) / (2.0 * dy);
      ++used;
    }
    if (used == 0) throw NumericError("cannot estimate inverse scale at point " + std::to_string(i));
    out(i) = sum / used;
  }
  return out;
}

TriangleMesh reconstruct_surface(const Points& mapped, const Points& original, const DomainSpec& domain,
                                 const ParamMeshOptions& options) {
  const TriangleMesh param = generate_param_mesh(domain, options);
  const InterpolationResult lifted = interpolate_inverse(mapped, original, param.vertices);

  std::vector<int> remap(lifted.valid.size(), -1);
  int count = 0;
  for (std::size_t i = 0; i < lifted.valid.size(); ++i)
    if (lifted.valid[i]) remap[i] = count++;
  TriangleMesh out;
  out.vertices.resize(count, original.cols());
  for (std::size_t i = 0; i < remap.size(); ++i)
    if (remap[i] >= 0) out.vertices.row(remap[i]) = lifted.points.row(static_cast<Eigen::Index>(i));
  std::vector<std::array<int, 3>> faces;
  for (Eigen::Index t = 0; t < param.num_triangles(); ++t) {
    const int a = remap[param.triangles(t, 0)], b = remap[param.triangles(t, 1)], c = remap[param.triangles(t, 2)];
    if (a >= 0 && b >= 0 && c >= 0) faces.push_back({a, b, c});
  }
  out.triangles.resize(static_cast<Eigen::Index>(faces.size()), 3);
  for (std::size_t k = 0; k < faces.size(); ++k)
    for (int c = 0; c < 3; ++c) out.triangles(static_cast<Eigen::Index>(k), c) = faces[k][c];
  return out;
}

TriangleMesh reconstruct_surface(const NetworkParams& map_net, const NetworkParams* lambda_net,
                                 const Points& original, const DomainSpec& domain, MeshMode mode,
                                 double target_edge, std::uint64_t seed) {
  const Points mapped = forward(map_net, original);
  ParamMeshOptions options;
  options.mode = mode;
  options.target_edge = target_edge;
  options.seed = seed;
  if (mode == MeshMode::LambdaAdapted) {
    if (!lambda_net) throw std::invalid_argument("lambda-adapted reconstruction needs an inverse-scale network");
    options.lambda_inv = interpolated_field(mapped, forward(*lambda_net, original).col(0));
  }
  return reconstruct_surface(mapped, original, domain, options);
}

}  // namespace pcparam
