#include "pcparam/synthetic.hpp"

#include "pcparam/domains.hpp"
#include "pcparam/meshing.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace pcparam {
namespace {

// Jittered triangular lattice points p with accept(p), jitter as a fraction of h.
template <class Accept>
std::vector<Eigen::Vector2d> lattice(double h, double extent, double jitter, std::uint64_t seed, Accept accept) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-jitter * h, jitter * h);
  std::vector<Eigen::Vector2d> out;
  const double dy = h * std::sqrt(3.0) / 2.0;
  const int rows = static_cast<int>(std::ceil(extent / dy));
  const int cols = static_cast<int>(std::ceil(extent / h));
  for (int j = -rows; j <= rows; ++j)
    for (int i = -cols; i <= cols; ++i) {
      const Eigen::Vector2d p(i * h + (j % 2 ? 0.5 * h : 0.0) + u(rng), j * dy + u(rng));
      if (accept(p)) out.push_back(p);
    }
  return out;
}

}  // namespace

Points blob_2d(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto radius = [](double theta) { return 0.35 * (1.0 + 0.25 * std::sin(3.0 * theta)); };
  Points out(n, 2);
  for (Eigen::Index k = 0; k < n;) {
    const Eigen::Vector2d p(0.45 * u(rng), 0.45 * u(rng));
    if (p.norm() <= radius(std::atan2(p.y(), p.x()))) out.row(k++) = (p + Eigen::Vector2d(0.5, 0.5)).transpose();
  }
  return out;
}

Points spike_surface(Eigen::Index n, std::uint64_t seed, double height, double width) {
  const Points xy = sample_area(unit_disk(), n, seed);
  Points out(n, 3);
  out.leftCols(2) = xy;
  out.col(2) = (-(xy.rowwise().squaredNorm()) / (width * width)).array().exp() * height;
  return out;
}

TriangleMesh face_like_surface(double spacing, std::uint64_t seed) {
  auto pts = lattice(spacing, 1.0, 0.1, seed, [&](const Eigen::Vector2d& p) { return p.norm() <= 1.0 - 0.3 * spacing; });
  const int ring = static_cast<int>(std::ceil(2.0 * std::numbers::pi / spacing));
  for (int k = 0; k < ring; ++k) {
    const double t = 2.0 * std::numbers::pi * k / ring;
    pts.emplace_back(std::cos(t), std::sin(t));
  }
  Points xy(static_cast<Eigen::Index>(pts.size()), 2);
  for (std::size_t i = 0; i < pts.size(); ++i) xy.row(static_cast<Eigen::Index>(i)) = pts[i].transpose();

  const auto bump = [](const Eigen::Vector2d& p, double cx, double cy, double w) {
    return std::exp(-((p.x() - cx) * (p.x() - cx) + (p.y() - cy) * (p.y() - cy)) / (w * w));
  };
  TriangleMesh mesh{Points(xy.rows(), 3), delaunay(xy).mesh.triangles};
  for (Eigen::Index i = 0; i < xy.rows(); ++i) {
    const Eigen::Vector2d p = xy.row(i).transpose();
    const double z = 0.35 * (1.0 - p.squaredNorm()) + 0.30 * bump(p, 0.0, -0.05, 0.18) -
                     0.10 * bump(p, -0.35, 0.30, 0.15) - 0.10 * bump(p, 0.35, 0.30, 0.15);
    mesh.vertices.row(i) << p.x(), p.y(), z;
  }
  return mesh;
}

Points hemisphere(Eigen::Index n, std::uint64_t seed, double z_min) {
  const double r = std::sqrt(1.0 - z_min * z_min);
  const Points xy = sample_area(unit_disk(), n, seed) * r;
  Points out(n, 3);
  out.leftCols(2) = xy;
  out.col(2) = (1.0 - xy.rowwise().squaredNorm().array()).sqrt();
  return out;
}

Points annulus_cloud(double h, double inner_radius, double outer_radius, std::uint64_t seed) {
  auto pts = lattice(h, outer_radius, 0.1, seed, [&](const Eigen::Vector2d& p) {
    const double r = p.norm();
    return r >= inner_radius + 0.4 * h && r <= outer_radius - 0.4 * h;
  });
  for (double radius : {inner_radius, outer_radius}) {
    const int n = static_cast<int>(std::ceil(2.0 * std::numbers::pi * radius / h));
    for (int k = 0; k < n; ++k) {
      const double t = 2.0 * std::numbers::pi * k / n;
      pts.emplace_back(radius * std::cos(t), radius * std::sin(t));
    }
  }
  Points out(static_cast<Eigen::Index>(pts.size()), 2);
  for (std::size_t i = 0; i < pts.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = pts[i].transpose();
  return out;
}

}  // namespace pcparam
