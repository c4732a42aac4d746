#include "pcparam/domains.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace pcparam {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kClosureTol = 1e-9;
constexpr double kOnBoundaryTol = 1e-12;

double wrap_positive(double a) {
  a = std::fmod(a, kTwoPi);
  return a < 0.0 ? a + kTwoPi : a;
}

Eigen::Vector2d on_circle(const ArcSegment& arc, double theta) {
  return arc.center + arc.radius * Eigen::Vector2d(std::cos(theta), std::sin(theta));
}

double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

// Number of crossings of the ray {p + t (1, 0), t > 0} with a y-monotone
// piece between y0 and y1 (half-open in y so shared endpoints count once).
bool straddles(double y0, double y1, double py) { return (y0 > py) != (y1 > py); }

int line_crossings(const LineSegment& l, const Eigen::Vector2d& p) {
  const Eigen::Vector2d& a = l.from;
  const Eigen::Vector2d& b = l.to;
  if (!straddles(a.y(), b.y(), p.y())) return 0;
  const double x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
  return x > p.x() ? 1 : 0;
}

int arc_crossings(const ArcSegment& arc, const Eigen::Vector2d& p) {
  const double dir = arc.ccw ? 1.0 : -1.0;
  const double sweep = arc.sweep();
  // Split the sweep at the top and bottom of the circle so every piece is y-monotone.
  std::vector<double> cuts{arc.start_angle};
  const double half_pi = 0.5 * std::numbers::pi;
  double first = arc.ccw ? std::floor((arc.start_angle - half_pi) / std::numbers::pi) + 1.0
                         : std::ceil((arc.start_angle - half_pi) / std::numbers::pi) - 1.0;
  for (double k = first;; k += dir) {
    const double c = half_pi + k * std::numbers::pi;
    if (dir * (c - arc.start_angle) >= sweep) break;
    if (dir * (c - arc.start_angle) > 0.0) cuts.push_back(c);
  }
  cuts.push_back(arc.start_angle + dir * sweep);

  int count = 0;
  const double dy = p.y() - arc.center.y();
  const double half_chord = std::sqrt(std::max(0.0, arc.radius * arc.radius - dy * dy));
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double y0 = arc.center.y() + arc.radius * std::sin(cuts[i]);
    const double y1 = arc.center.y() + arc.radius * std::sin(cuts[i + 1]);
    if (!straddles(y0, y1, p.y())) continue;
    const double side = std::cos(0.5 * (cuts[i] + cuts[i + 1])) >= 0.0 ? 1.0 : -1.0;
    if (arc.center.x() + side * half_chord > p.x()) ++count;
  }
  return count;
}

bool inside_loop(const Loop& loop, const Eigen::Vector2d& p) {
  int crossings = 0;
  for (const auto& s : loop.segments) {
    crossings += std::visit(
        [&](const auto& seg) {
          using T = std::decay_t<decltype(seg)>;
          if constexpr (std::is_same_v<T, LineSegment>)
            return line_crossings(seg, p);
          else
            return arc_crossings(seg, p);
        },
        s);
  }
  return crossings % 2 == 1;
}

double loop_distance(const Loop& loop, const Eigen::Vector2d& p) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& s : loop.segments) d = std::min(d, segment_distance(s, p));
  return d;
}

void check_closed(const Loop& loop, const std::string& name) {
  if (loop.segments.empty()) throw std::invalid_argument(name + " loop has no segments");
  for (std::size_t i = 0; i < loop.segments.size(); ++i) {
    const auto& a = loop.segments[i];
    const auto& b = loop.segments[(i + 1) % loop.segments.size()];
    if ((segment_end(a) - segment_start(b)).norm() > kClosureTol)
      throw std::invalid_argument(name + " loop is not closed after segment " + std::to_string(i));
  }
  for (const auto& s : loop.segments) {
    if (const auto* arc = std::get_if<ArcSegment>(&s); arc && !(arc->radius > 0.0))
      throw std::invalid_argument(name + " loop has an arc with non-positive radius");
  }
}

bool segments_intersect(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c,
                        const Eigen::Vector2d& d) {
  const double d1 = cross2(b - a, c - a), d2 = cross2(b - a, d - a);
  const double d3 = cross2(d - c, a - c), d4 = cross2(d - c, b - c);
  if (((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0)
    return true;
  const auto on_seg = [](const Eigen::Vector2d& p, const Eigen::Vector2d& q, const Eigen::Vector2d& r) {
    return std::min(p.x(), q.x()) <= r.x() && r.x() <= std::max(p.x(), q.x()) &&
           std::min(p.y(), q.y()) <= r.y() && r.y() <= std::max(p.y(), q.y());
  };
  return (d1 == 0 && on_seg(a, b, c)) || (d2 == 0 && on_seg(a, b, d)) ||
         (d3 == 0 && on_seg(c, d, a)) || (d4 == 0 && on_seg(c, d, b));
}

using Polyline = std::vector<Eigen::Vector2d>;

void check_simple(const Polyline& ring, const std::string& name) {
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_intersect(ring[i], ring[(i + 1) % n], ring[j], ring[(j + 1) % n]))
        throw std::invalid_argument(name + " loop intersects itself");
    }
}

void check_disjoint(const Polyline& a, const Polyline& b, const std::string& what) {
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      if (segments_intersect(a[i], a[(i + 1) % a.size()], b[j], b[(j + 1) % b.size()]))
        throw std::invalid_argument(what);
}

LineSegment line(double x0, double y0, double x1, double y1) { return {{x0, y0}, {x1, y1}}; }

}  // namespace

// ---------------------------------------------------------------------------

double ArcSegment::sweep() const {
  const double raw = ccw ? end_angle - start_angle : start_angle - end_angle;
  const double s = wrap_positive(raw);
  return s <= 1e-12 ? kTwoPi : s;
}

double ArcSegment::angle_at(double t) const { return start_angle + (ccw ? 1.0 : -1.0) * t * sweep(); }

bool ArcSegment::covers_angle(double theta) const {
  const double delta = wrap_positive(ccw ? theta - start_angle : start_angle - theta);
  return delta <= sweep();
}

Eigen::Vector2d segment_start(const Segment& s) {
  if (const auto* l = std::get_if<LineSegment>(&s)) return l->from;
  const auto& a = std::get<ArcSegment>(s);
  return on_circle(a, a.start_angle);
}

Eigen::Vector2d segment_end(const Segment& s) {
  if (const auto* l = std::get_if<LineSegment>(&s)) return l->to;
  const auto& a = std::get<ArcSegment>(s);
  return on_circle(a, a.angle_at(1.0));
}

double segment_length(const Segment& s) {
  if (const auto* l = std::get_if<LineSegment>(&s)) return (l->to - l->from).norm();
  const auto& a = std::get<ArcSegment>(s);
  return a.radius * a.sweep();
}

Eigen::Vector2d segment_point(const Segment& s, double t) {
  if (const auto* l = std::get_if<LineSegment>(&s)) return l->from + t * (l->to - l->from);
  const auto& a = std::get<ArcSegment>(s);
  return on_circle(a, a.angle_at(t));
}

double segment_distance(const Segment& s, const Eigen::Vector2d& p) {
  if (const auto* l = std::get_if<LineSegment>(&s)) {
    const Eigen::Vector2d d = l->to - l->from;
    const double len2 = d.squaredNorm();
    const double t = len2 > 0.0 ? std::clamp((p - l->from).dot(d) / len2, 0.0, 1.0) : 0.0;
    return (l->from + t * d - p).norm();
  }
  const auto& a = std::get<ArcSegment>(s);
  const Eigen::Vector2d v = p - a.center;
  if (v.squaredNorm() > 0.0 && a.covers_angle(std::atan2(v.y(), v.x())))
    return std::abs(v.norm() - a.radius);
  return std::min((p - segment_start(s)).norm(), (p - segment_end(s)).norm());
}

double Loop::length() const {
  double total = 0.0;
  for (const auto& s : segments) total += segment_length(s);
  return total;
}

double Loop::signed_area() const {
  // Green's theorem: area = 1/2 closed-integral (x dy - y dx).
  double twice = 0.0;
  for (const auto& s : segments) {
    if (const auto* l = std::get_if<LineSegment>(&s)) {
      twice += cross2(l->from, l->to);
    } else {
      const auto& a = std::get<ArcSegment>(s);
      const double t0 = a.start_angle;
      const double t1 = a.angle_at(1.0);
      const double dt = t1 - t0;
      twice += a.radius * a.radius * dt +
               a.radius * (a.center.x() * (std::sin(t1) - std::sin(t0)) -
                           a.center.y() * (std::cos(t1) - std::cos(t0)));
    }
  }
  return 0.5 * twice;
}

std::vector<Eigen::Vector2d> Loop::polygonize(double tol) const {
  std::vector<Eigen::Vector2d> out;
  for (const auto& s : segments) {
    if (std::holds_alternative<LineSegment>(s)) {
      out.push_back(segment_start(s));
      continue;
    }
    const auto& a = std::get<ArcSegment>(s);
    const double max_step = tol >= a.radius ? std::numbers::pi / 2 : 2.0 * std::acos(1.0 - tol / a.radius);
    const int pieces = std::max(1, static_cast<int>(std::ceil(a.sweep() / max_step)));
    for (int j = 0; j < pieces; ++j) out.push_back(segment_point(s, static_cast<double>(j) / pieces));
  }
  return out;
}

void DomainSpec::validate() const {
  check_closed(outer, "outer");
  for (std::size_t h = 0; h < holes.size(); ++h) check_closed(holes[h], "hole " + std::to_string(h));

  const auto [lo, hi] = bounding_box();
  const double tol = 1e-4 * std::max(1.0, (hi - lo).norm());
  const Polyline outer_ring = outer.polygonize(tol);
  check_simple(outer_ring, "outer");
  std::vector<Polyline> hole_rings;
  for (std::size_t h = 0; h < holes.size(); ++h) {
    const std::string name = "hole " + std::to_string(h);
    hole_rings.push_back(holes[h].polygonize(tol));
    check_simple(hole_rings.back(), name);
    check_disjoint(outer_ring, hole_rings.back(), name + " touches the outer loop");
    for (const auto& v : hole_rings.back())
      if (!inside_loop(outer, v)) throw std::invalid_argument(name + " is not inside the outer loop");
    for (std::size_t g = 0; g < h; ++g) {
      check_disjoint(hole_rings[g], hole_rings.back(), name + " touches hole " + std::to_string(g));
      if (inside_loop(holes[g], hole_rings.back().front()) || inside_loop(holes[h], hole_rings[g].front()))
        throw std::invalid_argument(name + " is nested with hole " + std::to_string(g));
    }
  }
}

double DomainSpec::area() const {
  double a = std::abs(outer.signed_area());
  for (const auto& h : holes) a -= std::abs(h.signed_area());
  return a;
}

double DomainSpec::boundary_length() const {
  double total = outer.length();
  for (const auto& h : holes) total += h.length();
  return total;
}

std::pair<Eigen::Vector2d, Eigen::Vector2d> DomainSpec::bounding_box() const {
  Eigen::Vector2d lo = Eigen::Vector2d::Constant(std::numeric_limits<double>::infinity());
  Eigen::Vector2d hi = -lo;
  for (const auto& s : outer.segments) {
    if (const auto* l = std::get_if<LineSegment>(&s)) {
      lo = lo.cwiseMin(l->from).cwiseMin(l->to);
      hi = hi.cwiseMax(l->from).cwiseMax(l->to);
      continue;
    }
    const auto& a = std::get<ArcSegment>(s);
    lo = lo.cwiseMin(segment_start(s)).cwiseMin(segment_end(s));
    hi = hi.cwiseMax(segment_start(s)).cwiseMax(segment_end(s));
    for (int k = 0; k < 4; ++k) {
      const double theta = k * 0.5 * std::numbers::pi;
      if (a.covers_angle(theta)) {
        const Eigen::Vector2d p = on_circle(a, theta);
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
      }
    }
  }
  return {lo, hi};
}

bool contains(const DomainSpec& domain, const Eigen::Vector2d& p) {
  if (distance_to_boundary(domain, p) <= kOnBoundaryTol) return true;
  if (!inside_loop(domain.outer, p)) return false;
  for (const auto& h : domain.holes)
    if (inside_loop(h, p)) return false;
  return true;
}

double distance_to_boundary(const DomainSpec& domain, const Eigen::Vector2d& p) {
  double d = loop_distance(domain.outer, p);
  for (const auto& h : domain.holes) d = std::min(d, loop_distance(h, p));
  return d;
}

Points sample_area(const DomainSpec& domain, Eigen::Index n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_area needs n >= 1");
  const double area = domain.area();
  if (!(area > 1e-12)) throw std::invalid_argument("cannot sample the area of a degenerate domain");
  const auto [lo, hi] = domain.bounding_box();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(lo.x(), hi.x()), uy(lo.y(), hi.y());
  Points out(n, 2);
  Eigen::Index filled = 0;
  while (filled < n) {
    const Eigen::Vector2d p(ux(rng), uy(rng));
    if (contains(domain, p)) out.row(filled++) = p.transpose();
  }
  return out;
}

Points sample_boundary(const DomainSpec& domain, Eigen::Index n, std::uint64_t seed,
                       BoundarySampling mode) {
  if (n < 1) throw std::invalid_argument("sample_boundary needs n >= 1");
  std::vector<const Segment*> segs;
  std::vector<double> cumulative{0.0};
  const auto add_loop = [&](const Loop& loop) {
    for (const auto& s : loop.segments) {
      segs.push_back(&s);
      cumulative.push_back(cumulative.back() + segment_length(s));
    }
  };
  add_loop(domain.outer);
  for (const auto& h : domain.holes) add_loop(h);
  const double total = cumulative.back();
  if (!(total > 0.0)) throw std::invalid_argument("domain boundary has zero length");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, total);
  Points out(n, 2);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double s = mode == BoundarySampling::Equal ? total * static_cast<double>(k) / static_cast<double>(n)
                                                     : u(rng);
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), s);
    std::size_t idx = static_cast<std::size_t>(std::distance(cumulative.begin(), it)) - 1;
    idx = std::min(idx, segs.size() - 1);
    const double len = cumulative[idx + 1] - cumulative[idx];
    const double t = len > 0.0 ? std::clamp((s - cumulative[idx]) / len, 0.0, 1.0) : 0.0;
    out.row(k) = segment_point(*segs[idx], t).transpose();
  }
  return out;
}

// ---------------------------------------------------------------------------

DomainSpec unit_square() {
  return {Loop{{line(0, 0, 1, 0), line(1, 0, 1, 1), line(1, 1, 0, 1), line(0, 1, 0, 0)}}, {}};
}

DomainSpec unit_disk() { return {Loop{{ArcSegment{{0.0, 0.0}, 1.0, 0.0, kTwoPi, true}}}, {}}; }

DomainSpec annulus(double inner_radius, double outer_radius) {
  if (!(inner_radius > 0.0 && inner_radius < outer_radius))
    throw std::invalid_argument("annulus radii must satisfy 0 < inner < outer");
  return {Loop{{ArcSegment{{0.0, 0.0}, outer_radius, 0.0, kTwoPi, true}}},
          {Loop{{ArcSegment{{0.0, 0.0}, inner_radius, 0.0, kTwoPi, true}}}}};
}

DomainSpec smiling_face() {
  const auto eye = [](double cx) {
    constexpr double cy = 0.30, r = 0.15;
    return Loop{{line(cx - r, cy, cx + r, cy), ArcSegment{{cx, cy}, r, 0.0, std::numbers::pi, false}}};
  };
  constexpr double my = -0.30, mr = 0.30;
  Loop mouth{{line(-mr, my, mr, my), ArcSegment{{0.0, my}, mr, 0.0, std::numbers::pi, true}}};
  return {unit_disk().outer, {eye(-0.35), eye(0.35), mouth}};
}

DomainSpec car_shape() {
  constexpr double half_w = 0.8, half_h = 0.25;
  constexpr double wheel_x = 0.45, wheel_r = 0.12;
  constexpr double roof_x = 0.55, roof_peak = 0.45;
  // Circle through (+-roof_x, half_h) and (0, roof_peak).
  constexpr double roof_cy =
      (roof_x * roof_x + half_h * half_h - roof_peak * roof_peak) / (2.0 * (half_h - roof_peak));
  constexpr double roof_r = roof_peak - roof_cy;
  const double a0 = std::atan2(half_h - roof_cy, roof_x);
  const double a1 = std::atan2(half_h - roof_cy, -roof_x);
  Loop outer{{
      line(-half_w, -half_h, -wheel_x - wheel_r, -half_h),
      ArcSegment{{-wheel_x, -half_h}, wheel_r, std::numbers::pi, 0.0, false},
      line(-wheel_x + wheel_r, -half_h, wheel_x - wheel_r, -half_h),
      ArcSegment{{wheel_x, -half_h}, wheel_r, std::numbers::pi, 0.0, false},
      line(wheel_x + wheel_r, -half_h, half_w, -half_h),
      line(half_w, -half_h, half_w, half_h),
      line(half_w, half_h, roof_x, half_h),
      ArcSegment{{0.0, roof_cy}, roof_r, a0, a1, true},
      line(-roof_x, half_h, -half_w, half_h),
      line(-half_w, half_h, -half_w, -half_h),
  }};
  return {outer, {}};
}

DomainSpec segment_domain(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return {Loop{{LineSegment{a, b}, LineSegment{b, a}}}, {}};
}

DomainSpec domain_preset(const std::string& name) {
  if (name == "square") return unit_square();
  if (name == "disk") return unit_disk();
  if (name == "smiling_face") return smiling_face();
  if (name == "car") return car_shape();
  if (name == "annulus") return annulus(0.5, 1.0);
  throw std::invalid_argument("unknown domain preset '" + name + "'");
}

std::vector<std::string> domain_preset_names() { return {"square", "disk", "smiling_face", "car", "annulus"}; }

Points landmark_targets_lines() {
  constexpr int per_line = 200;
  Points out(2 * per_line, 2);
  for (int line_id = 0; line_id < 2; ++line_id) {
    const double y = line_id == 0 ? -0.25 : 0.25;
    for (int k = 0; k < per_line; ++k)
      out.row(line_id * per_line + k) << -0.5 + static_cast<double>(k) / (per_line - 1), y;
  }
  return out;
}

void LandmarkSet::validate(Eigen::Index n_points) const {
  if (regions.size() != targets.size())
    throw std::invalid_argument("landmark region and target counts differ: " +
                                std::to_string(regions.size()) + " vs " + std::to_string(targets.size()));
  for (std::size_t k = 0; k < regions.size(); ++k) {
    if (regions[k].empty()) throw std::invalid_argument("landmark region " + std::to_string(k) + " is empty");
    for (int idx : regions[k])
      if (idx < 0 || idx >= n_points)
        throw std::invalid_argument("landmark index " + std::to_string(idx) + " out of range");
    if (targets[k].rows() == 0 || targets[k].cols() != 2)
      throw std::invalid_argument("landmark target " + std::to_string(k) + " must be a non-empty 2D set");
    require_finite(targets[k], "landmark target");
  }
}

}  // namespace pcparam
