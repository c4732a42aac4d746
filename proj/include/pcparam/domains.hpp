#pragma once

#include "pcparam/types.hpp"

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace pcparam {

struct LineSegment {
  Eigen::Vector2d from;
  Eigen::Vector2d to;
};

/// Circular arc swept from `start_angle` towards `end_angle`, counter-clockwise
/// when `ccw` is set. A sweep of zero length is read as the full circle.
struct ArcSegment {
  Eigen::Vector2d center;
  double radius = 1.0;
  double start_angle = 0.0;
  double end_angle = 0.0;
  bool ccw = true;

  double sweep() const;  // in (0, 2 pi]
  double angle_at(double t) const;  // t in [0, 1]
  bool covers_angle(double theta) const;
};

using Segment = std::variant<LineSegment, ArcSegment>;

Eigen::Vector2d segment_start(const Segment& s);
Eigen::Vector2d segment_end(const Segment& s);
double segment_length(const Segment& s);
/// Point at arc-length fraction t in [0, 1].
Eigen::Vector2d segment_point(const Segment& s, double t);
double segment_distance(const Segment& s, const Eigen::Vector2d& p);

struct Loop {
  std::vector<Segment> segments;

  double length() const;
  /// Signed enclosed area (positive for counter-clockwise loops).
  double signed_area() const;
  /// Vertices of a polyline approximation with chord deviation <= tol.
  std::vector<Eigen::Vector2d> polygonize(double tol) const;
};

/// Planar region: the inside of `outer` minus the inside of each hole.
struct DomainSpec {
  Loop outer;
  std::vector<Loop> holes;

  /// Loops closed, holes inside the outer loop, no self-intersections.
  void validate() const;
  double area() const;
  double boundary_length() const;
  /// Axis-aligned bounds as (min, max).
  std::pair<Eigen::Vector2d, Eigen::Vector2d> bounding_box() const;
};

/// Even-odd membership with arcs resolved analytically; points on the
/// boundary count as inside.
bool contains(const DomainSpec& domain, const Eigen::Vector2d& p);

double distance_to_boundary(const DomainSpec& domain, const Eigen::Vector2d& p);

/// n points uniform over the region (rejection from the bounding box).
Points sample_area(const DomainSpec& domain, Eigen::Index n, std::uint64_t seed);

enum class BoundarySampling { Random, Equal };

/// n points distributed by arc length over all loops of the domain.
Points sample_boundary(const DomainSpec& domain, Eigen::Index n, std::uint64_t seed,
                       BoundarySampling mode = BoundarySampling::Random);

// Presets.
DomainSpec unit_square();   // [0,1]^2
DomainSpec unit_disk();     // centered at the origin
DomainSpec annulus(double inner_radius, double outer_radius);
/// Unit disk with two eye half-disks (flat edge up) and a mouth half-disk (flat edge down).
DomainSpec smiling_face();
/// 1.6 x 0.5 body with semicircular wheel-arch cutouts and an arc roofline.
DomainSpec car_shape();
/// Closed zero-area loop tracing segment a -> b -> a; useful for boundary sampling only.
DomainSpec segment_domain(const Eigen::Vector2d& a, const Eigen::Vector2d& b);

DomainSpec domain_preset(const std::string& name);
std::vector<std::string> domain_preset_names();

/// 400 targets, 200 evenly spaced (endpoints included) on each of the
/// segments [-0.5, 0.5] x {-0.25} and [-0.5, 0.5] x {0.25}.
Points landmark_targets_lines();

/// Landmark regions as index lists into the point cloud, each matched to a
/// 2D target set.
struct LandmarkSet {
  std::vector<std::vector<int>> regions;
  std::vector<Points> targets;

  std::size_t size() const { return regions.size(); }
  bool empty() const { return regions.empty(); }
  void validate(Eigen::Index n_points) const;
};

}  // namespace pcparam
