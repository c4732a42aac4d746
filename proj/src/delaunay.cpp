#include "pcparam/meshing.hpp"
#include "pcparam/predicates.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <numeric>

namespace pcparam {
namespace {

struct Tri {
  std::array<int, 3> v;  // counter-clockwise
  std::array<int, 3> n;  // n[i] is the neighbour across the edge opposite v[i]; -1 if none
  bool alive = true;
};

int index_of(const Tri& t, int vertex) {
  for (int i = 0; i < 3; ++i)
    if (t.v[i] == vertex) return i;
  return -1;
}

class Triangulation {
 public:
  explicit Triangulation(std::vector<Eigen::Vector2d> pts) : pts_(std::move(pts)) {}

  const Eigen::Vector2d& p(int i) const { return pts_[static_cast<std::size_t>(i)]; }
  std::vector<Tri>& tris() { return tris_; }

  void add_super_triangle(double scale) {
    Eigen::Vector2d lo = pts_.front(), hi = pts_.front();
    for (const auto& q : pts_) {
      lo = lo.cwiseMin(q);
      hi = hi.cwiseMax(q);
    }
    const Eigen::Vector2d c = 0.5 * (lo + hi);
    const double span = std::max((hi - lo).maxCoeff(), 1e-300);
    const double m = scale * span;
    super_ = static_cast<int>(pts_.size());
    pts_.push_back(c + Eigen::Vector2d(-3 * m, -3 * m));
    pts_.push_back(c + Eigen::Vector2d(3 * m, -3 * m));
    pts_.push_back(c + Eigen::Vector2d(0, 3 * m));
    tris_.push_back({{super_, super_ + 1, super_ + 2}, {-1, -1, -1}});
    last_ = 0;
  }

  bool is_super(int v) const { return v >= super_; }

  // Returns the index of a vertex coinciding with point i, or -1 after inserting it.
  int insert(int i) {
    const Eigen::Vector2d& q = p(i);
    const int start = locate(q);
    for (int c = 0; c < 3; ++c)
      if (p(tris_[start].v[c]) == q) return tris_[start].v[c];

    ++stamp_;
    if (mark_.size() < tris_.size()) mark_.resize(tris_.size(), 0);
    std::vector<int> cavity{start};
    mark_[start] = stamp_;
    for (std::size_t k = 0; k < cavity.size(); ++k) {
      const Tri& t = tris_[cavity[k]];
      for (int e = 0; e < 3; ++e) {
        const int nb = t.n[e];
        if (nb < 0 || mark_[nb] == stamp_) continue;
        const Tri& u = tris_[nb];
        if (incircle(p(u.v[0]), p(u.v[1]), p(u.v[2]), q) > 0) {
          mark_[nb] = stamp_;
          cavity.push_back(nb);
        }
      }
    }

    struct Rim {
      int a, b, outside;
    };
    std::vector<Rim> rim;
    for (int c : cavity) {
      const Tri& t = tris_[c];
      for (int e = 0; e < 3; ++e) {
        const int nb = t.n[e];
        if (nb >= 0 && mark_[nb] == stamp_) continue;
        rim.push_back({t.v[(e + 1) % 3], t.v[(e + 2) % 3], nb});
      }
    }

    std::vector<int> created;
    created.reserve(rim.size());
    for (std::size_t k = 0; k < rim.size(); ++k) {
      int id;
      if (k < cavity.size()) {
        id = cavity[k];
      } else {
        id = static_cast<int>(tris_.size());
        tris_.emplace_back();
        mark_.push_back(0);
      }
      tris_[id] = Tri{{rim[k].a, rim[k].b, i}, {-1, -1, rim[k].outside}, true};
      mark_[id] = 0;
      created.push_back(id);
      if (rim[k].outside >= 0) {
        Tri& o = tris_[rim[k].outside];
        for (int e = 0; e < 3; ++e)
          if (o.v[e] != rim[k].a && o.v[e] != rim[k].b) o.n[e] = id;
      }
    }
    for (int id : created) {
      Tri& t = tris_[id];
      for (int other : created) {
        if (other == id) continue;
        const Tri& u = tris_[other];
        if (u.v[0] == t.v[1]) t.n[0] = other;  // shares edge (t.v[1], i)
        if (u.v[1] == t.v[0]) t.n[1] = other;  // shares edge (i, t.v[0])
      }
    }
    last_ = created.front();
    return -1;
  }

  // Kills every triangle that touches a super-triangle vertex.
  void strip_super() {
    for (auto& t : tris_) {
      if (!t.alive) continue;
      if (is_super(t.v[0]) || is_super(t.v[1]) || is_super(t.v[2])) t.alive = false;
    }
  }

  // Rebuilds neighbour links among live triangles.
  void relink() {
    std::map<std::pair<int, int>, int> directed;
    for (int id = 0; id < static_cast<int>(tris_.size()); ++id) {
      if (!tris_[id].alive) continue;
      for (int e = 0; e < 3; ++e) directed[{tris_[id].v[(e + 1) % 3], tris_[id].v[(e + 2) % 3]}] = id;
    }
    for (int id = 0; id < static_cast<int>(tris_.size()); ++id) {
      Tri& t = tris_[id];
      if (!t.alive) continue;
      for (int e = 0; e < 3; ++e) {
        auto it = directed.find({t.v[(e + 2) % 3], t.v[(e + 1) % 3]});
        t.n[e] = it == directed.end() ? -1 : it->second;
      }
    }
  }

  // Adds triangles in the concavities of the boundary until it is convex.
  // Returns false when the live region's boundary is not a single closed walk.
  bool complete_hull() {
    relink();
    // Boundary edge a -> b (interior on the left) keyed by its start vertex.
    std::map<std::pair<int, int>, int> boundary;  // (a, b) -> triangle
    for (int id = 0; id < static_cast<int>(tris_.size()); ++id) {
      const Tri& t = tris_[id];
      if (!t.alive) continue;
      for (int e = 0; e < 3; ++e)
        if (t.n[e] < 0) boundary[{t.v[(e + 1) % 3], t.v[(e + 2) % 3]}] = id;
    }
    if (boundary.empty()) return false;

    // Walk the boundary, resolving pinch vertices by turning around the fan.
    std::vector<int> loop;
    const auto first = boundary.begin()->first;
    std::pair<int, int> edge = first;
    std::size_t guard = 0;
    do {
      loop.push_back(edge.first);
      const int v = edge.second;
      int t = boundary.at(edge);
      int next = -1;
      for (std::size_t spin = 0; spin < tris_.size() + 1; ++spin) {
        const Tri& tri = tris_[t];
        const int iv = index_of(tri, v);
        const int x = tri.v[(iv + 1) % 3];
        const int across = tri.n[(iv + 2) % 3];  // neighbour across edge (v, x)
        if (across < 0) {
          next = x;
          break;
        }
        t = across;
      }
      if (next < 0) return false;
      edge = {v, next};
      if (++guard > boundary.size()) return false;
    } while (edge != first);
    if (loop.size() != boundary.size()) return false;

    bool changed = true;
    while (changed && loop.size() > 3) {
      changed = false;
      for (std::size_t k = 0; k < loop.size() && loop.size() > 3; ++k) {
        const std::size_t n = loop.size();
        const int a = loop[(k + n - 1) % n], b = loop[k], c = loop[(k + 1) % n];
        if (a == c || orient2d(p(a), p(b), p(c)) >= 0) continue;
        bool blocked = false;
        for (int w : loop) {
          if (w == a || w == b || w == c) continue;
          if (orient2d(p(a), p(c), p(w)) >= 0 && orient2d(p(c), p(b), p(w)) >= 0 &&
              orient2d(p(b), p(a), p(w)) >= 0) {
            blocked = true;
            break;
          }
        }
        if (blocked) continue;
        tris_.push_back({{a, c, b}, {-1, -1, -1}, true});
        loop.erase(loop.begin() + static_cast<std::ptrdiff_t>(k));
        changed = true;
      }
    }
    relink();
    return true;
  }

  void lawson_flip() {
    std::vector<std::pair<int, int>> stack;
    for (int id = 0; id < static_cast<int>(tris_.size()); ++id)
      if (tris_[id].alive)
        for (int e = 0; e < 3; ++e) stack.emplace_back(id, e);
    while (!stack.empty()) {
      auto [t1, i] = stack.back();
      stack.pop_back();
      Tri& a = tris_[t1];
      const int t2 = a.n[i];
      if (!a.alive || t2 < 0) continue;
      Tri& b = tris_[t2];
      const int v1 = a.v[i], pv = a.v[(i + 1) % 3], qv = a.v[(i + 2) % 3];
      const int j = index_of(b, pv) >= 0 ? (index_of(b, pv) + 1) % 3 : -1;
      if (j < 0 || b.v[(j + 1) % 3] != qv) continue;
      const int v2 = b.v[j];
      if (incircle(p(v1), p(pv), p(qv), p(v2)) <= 0) continue;

      const int A = a.n[(i + 1) % 3];  // across (qv, v1)
      const int B = a.n[(i + 2) % 3];  // across (v1, pv)
      const int C = b.n[(j + 1) % 3];  // across (pv, v2)
      const int D = b.n[(j + 2) % 3];  // across (v2, qv)
      a = Tri{{v1, pv, v2}, {C, t2, B}, true};
      b = Tri{{v1, v2, qv}, {D, A, t1}, true};
      if (A >= 0)
        for (int e = 0; e < 3; ++e)
          if (tris_[A].n[e] == t1) tris_[A].n[e] = t2;
      if (C >= 0)
        for (int e = 0; e < 3; ++e)
          if (tris_[C].n[e] == t2) tris_[C].n[e] = t1;
      stack.emplace_back(t1, 0);
      stack.emplace_back(t1, 2);
      stack.emplace_back(t2, 0);
      stack.emplace_back(t2, 1);
    }
  }

 private:
  int locate(const Eigen::Vector2d& q) {
    int t = last_;
    if (!tris_[t].alive)
      for (t = static_cast<int>(tris_.size()) - 1; !tris_[t].alive; --t) {
      }
    const std::size_t limit = 4 * tris_.size() + 16;
    for (std::size_t step = 0; step < limit; ++step) {
      const Tri& tri = tris_[t];
      int next = -1;
      for (int k = 0; k < 3; ++k) {
        const int e = static_cast<int>((k + step) % 3);
        if (orient2d(p(tri.v[(e + 1) % 3]), p(tri.v[(e + 2) % 3]), q) < 0) {
          next = tri.n[e];
          break;
        }
      }
      if (next < 0) return t;
      t = next;
    }
    // Walk did not settle; scan.
    for (int id = 0; id < static_cast<int>(tris_.size()); ++id) {
      const Tri& tri = tris_[id];
      if (!tri.alive) continue;
      if (orient2d(p(tri.v[0]), p(tri.v[1]), q) >= 0 && orient2d(p(tri.v[1]), p(tri.v[2]), q) >= 0 &&
          orient2d(p(tri.v[2]), p(tri.v[0]), q) >= 0)
        return id;
    }
    throw std::logic_error("delaunay: point location failed");
  }

  std::vector<Eigen::Vector2d> pts_;
  std::vector<Tri> tris_;
  std::vector<int> mark_;
  int stamp_ = 0;
  int last_ = 0;
  int super_ = 0;
};

}  // namespace

EdgeIncidence edge_incidence(const TriangleMesh& mesh) {
  EdgeIncidence inc;
  for (Eigen::Index t = 0; t < mesh.num_triangles(); ++t)
    for (int c = 0; c < 3; ++c)
      inc[edge_key(mesh.triangles(t, c), mesh.triangles(t, (c + 1) % 3))].push_back(static_cast<int>(t));
  return inc;
}

DelaunayResult delaunay(const Points& points) {
  if (points.cols() != 2) throw std::invalid_argument("delaunay expects 2D points");
  require_finite(points, "delaunay input");
  const int n = static_cast<int>(points.rows());
  if (n < 3) throw std::invalid_argument("delaunay needs at least three points");

  std::vector<Eigen::Vector2d> pts(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) pts[i] = points.row(i).transpose();

  // Collinearity check over distinct points.
  int a = 0, b = -1, c = -1;
  for (int i = 1; i < n && b < 0; ++i)
    if (pts[i] != pts[a]) b = i;
  if (b >= 0)
    for (int i = 1; i < n && c < 0; ++i)
      if (orient2d(pts[a], pts[b], pts[i]) != 0) c = i;
  if (c < 0) throw std::invalid_argument("delaunay input is collinear or has fewer than three distinct points");

  for (double scale : {1e3, 1e7, 1e12}) {
    Triangulation tr(pts);
    tr.add_super_triangle(scale);
    DelaunayResult result;
    for (int i = 0; i < n; ++i) {
      const int dup = tr.insert(i);
      if (dup >= 0) result.duplicates.emplace_back(i, dup);
    }
    tr.strip_super();
    if (!tr.complete_hull()) continue;
    tr.lawson_flip();

    std::vector<std::array<int, 3>> live;
    for (const auto& t : tr.tris())
      if (t.alive) live.push_back(t.v);
    result.mesh.vertices = points;
    result.mesh.triangles.resize(static_cast<Eigen::Index>(live.size()), 3);
    for (std::size_t k = 0; k < live.size(); ++k)
      for (int e = 0; e < 3; ++e) result.mesh.triangles(static_cast<Eigen::Index>(k), e) = live[k][e];
    return result;
  }
  throw std::runtime_error("delaunay: could not complete the convex hull");
}

TriangleMesh prune_long_faces(const TriangleMesh& mesh, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("prune threshold h must be positive");
  std::vector<Eigen::Index> keep;
  const double h2 = h * h;
  for (Eigen::Index t = 0; t < mesh.num_triangles(); ++t) {
    bool ok = true;
    for (int c = 0; c < 3 && ok; ++c)
      ok = (mesh.vertices.row(mesh.triangles(t, c)) - mesh.vertices.row(mesh.triangles(t, (c + 1) % 3)))
               .squaredNorm() <= h2;
    if (ok) keep.push_back(t);
  }
  TriangleMesh out{mesh.vertices, Triangles(static_cast<Eigen::Index>(keep.size()), 3)};
  for (std::size_t k = 0; k < keep.size(); ++k) out.triangles.row(static_cast<Eigen::Index>(k)) = mesh.triangles.row(keep[k]);
  return out;
}

std::vector<std::vector<int>> boundary_edges(const TriangleMesh& mesh) {
  const EdgeIncidence inc = edge_incidence(mesh);
  std::vector<std::uint64_t> border;
  for (const auto& [key, faces] : inc) {
    if (faces.size() > 2) {
      const auto [u, v] = edge_from_key(key);
      throw std::invalid_argument("non-manifold edge (" + std::to_string(u) + ", " + std::to_string(v) +
                                  ") has " + std::to_string(faces.size()) + " faces");
    }
    if (faces.size() == 1) border.push_back(key);
  }
  std::sort(border.begin(), border.end());

  const auto third = [&](int t, int u, int v) {
    for (int c = 0; c < 3; ++c) {
      const int w = mesh.triangles(t, c);
      if (w != u && w != v) return w;
    }
    return -1;
  };

  std::unordered_map<std::uint64_t, bool> used;
  std::vector<std::vector<int>> loops;
  for (std::uint64_t start : border) {
    if (used[start]) continue;
    auto [u, v] = edge_from_key(start);
    std::vector<int> loop{u};
    used[start] = true;
    int prev = u, cur = v;
    int tri = inc.at(start).front();
    while (cur != u) {
      loop.push_back(cur);
      // Turn around `cur` through the fan, starting in the triangle of the incoming edge.
      int from = prev, t = tri, next = -1;
      for (std::size_t spin = 0; spin <= inc.size(); ++spin) {
        const int x = third(t, from, cur);
        const std::uint64_t key = edge_key(cur, x);
        const auto& faces = inc.at(key);
        if (faces.size() == 1) {
          next = x;
          tri = t;
          used[key] = true;
          break;
        }
        t = faces[0] == t ? faces[1] : faces[0];
        from = x;
      }
      if (next < 0) throw std::logic_error("boundary_edges: could not close loop");
      prev = cur;
      cur = next;
    }
    // A walk through a pinch vertex visits it twice; split it into simple cycles.
    std::vector<int> stack;
    std::unordered_map<int, std::size_t> at;
    for (int w : loop) {
      if (const auto it = at.find(w); it != at.end()) {
        std::vector<int> cycle(stack.begin() + static_cast<std::ptrdiff_t>(it->second), stack.end());
        for (std::size_t k = it->second + 1; k < stack.size(); ++k) at.erase(stack[k]);
        stack.resize(it->second + 1);
        loops.push_back(std::move(cycle));
        continue;
      }
      at[w] = stack.size();
      stack.push_back(w);
    }
    loops.push_back(std::move(stack));
  }
  return loops;
}

}  // namespace pcparam
