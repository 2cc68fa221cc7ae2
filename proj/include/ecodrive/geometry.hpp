#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

namespace ecodrive::geom {

using Vec2 = Eigen::Vector2d;

/// Canonicalization tolerance in meters. Positions span ~1e3 m, so doubles
/// leave plenty of headroom below this.
inline constexpr double kTol = 1e-9;

struct EmptyHull : std::runtime_error {
  EmptyHull() : std::runtime_error("convex_hull: empty point set") {}
};
struct UnboundedRegion : std::runtime_error {
  explicit UnboundedRegion(const char* what) : std::runtime_error(what) {}
};

/// Halfspace {x : a.dot(x) <= b}. Canonical form keeps |a| = 1.
struct Halfspace {
  Vec2 a;
  double b = 0.0;

  Halfspace() : a(0, 0) {}
  Halfspace(const Vec2& normal, double offset) : a(normal), b(offset) {}

  double slack(const Vec2& x) const { return b - a.dot(x); }
  Halfspace normalized() const {
    const double n = a.norm();
    return n > 0 ? Halfspace(a / n, b / n) : *this;
  }
};

enum class Axis { Position, Speed };

/// Closed interval on one coordinate axis. Holds the noise segments
/// W, D*W, 2L*W, 2L*i*W, ... which all live on the position axis here.
struct AxisSegment {
  Axis axis = Axis::Position;
  double lo = 0.0;
  double hi = 0.0;

  AxisSegment() = default;
  AxisSegment(double l, double h, Axis ax = Axis::Position) : axis(ax), lo(l), hi(h) {
    if (!(lo <= hi)) throw std::invalid_argument("AxisSegment: lo > hi");
  }

  double width() const { return hi - lo; }
  bool contains(double w, double tol = kTol) const { return w >= lo - tol && w <= hi + tol; }
  AxisSegment scaled(double f) const {
    return f >= 0 ? AxisSegment(f * lo, f * hi, axis) : AxisSegment(f * hi, f * lo, axis);
  }
  Vec2 direction() const { return axis == Axis::Position ? Vec2(1, 0) : Vec2(0, 1); }
};

/// Convex 2-D set with dual representation.
///
/// Bounded sets carry a CCW vertex list plus the matching tight halfspaces.
/// Unbounded regions (the traffic-light halfplanes, collision constraints,
/// target sets G_s/G_p) are stored in halfspace-only form; operations that
/// need vertices reject them.
class Polygon {
 public:
  Polygon() : empty_(true), bounded_(true) {}

  /// Convex hull of a point set (monotone chain). Throws EmptyHull on {}.
  static Polygon from_points(const std::vector<Vec2>& pts);

  /// Intersection of halfspaces. Enumerates vertices when the region is
  /// bounded; otherwise returns a halfspace-only region. May be empty.
  static Polygon from_halfspaces(const std::vector<Halfspace>& hs);

  /// Halfspace-only region, no vertex enumeration attempted. Marked
  /// unbounded unless the constraints are detected empty.
  static Polygon halfspace_region(std::vector<Halfspace> hs);

  static Polygon empty_set() { return Polygon(); }
  static Polygon box(double s_lo, double s_hi, double v_lo, double v_hi);

  bool is_empty() const { return empty_; }
  bool bounded() const { return bounded_; }
  bool has_vertices() const { return !empty_ && bounded_; }

  const std::vector<Vec2>& vertices() const;
  const std::vector<Halfspace>& halfspaces() const { return halfspaces_; }

  bool contains(const Vec2& x, double tol = kTol) const;

  /// Minkowski sum with an axis-aligned segment. Requires a bounded set.
  Polygon minkowski_sum(const AxisSegment& seg) const;

  /// Pontryagin difference with an axis-aligned segment, computed in
  /// halfspace form (exact for segments). Result may be empty.
  Polygon pontryagin_diff(const AxisSegment& seg) const;

  Polygon intersect(const Polygon& other) const;
  Polygon intersect(const Halfspace& h) const;

  size_t num_vertices() const { return vertices_.size(); }

 private:
  static Polygon from_hull_vertices(std::vector<Vec2> hull);
  void derive_halfspaces();

  std::vector<Vec2> vertices_;        // CCW, canonical
  std::vector<Halfspace> halfspaces_; // unit normals
  bool empty_ = true;
  bool bounded_ = true;
};

/// Hull of a point cloud; kept as a free function to mirror conv(X) usage.
Polygon convex_hull(const std::vector<Vec2>& pts);

}  // namespace ecodrive::geom
