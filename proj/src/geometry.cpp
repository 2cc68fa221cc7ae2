#include "ecodrive/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ecodrive::geom {

namespace {

double cross2(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

bool nearly_equal(const Vec2& a, const Vec2& b, double tol) {
  return (a - b).lpNorm<Eigen::Infinity>() <= tol;
}

// Collinearity test scaled by the chord length so the threshold is a
// perpendicular distance in meters.
bool is_left_turn(const Vec2& o, const Vec2& a, const Vec2& b, double tol) {
  const double chord = (a - o).norm();
  return cross2(o, a, b) > tol * std::max(chord, 1.0);
}

std::vector<Vec2> monotone_chain(std::vector<Vec2> pts, double tol) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& p, const Vec2& q) {
    return p.x() < q.x() || (p.x() == q.x() && p.y() < q.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [tol](const Vec2& p, const Vec2& q) { return nearly_equal(p, q, tol); }),
            pts.end());
  if (pts.size() <= 2) return pts;

  std::vector<Vec2> hull(2 * pts.size());
  size_t k = 0;
  for (const auto& p : pts) {  // lower hull
    while (k >= 2 && !is_left_turn(hull[k - 2], hull[k - 1], p, tol)) --k;
    hull[k++] = p;
  }
  const size_t lower = k + 1;
  for (auto it = pts.rbegin() + 1; it != pts.rend(); ++it) {  // upper hull
    while (k >= lower && !is_left_turn(hull[k - 2], hull[k - 1], *it, tol)) --k;
    hull[k++] = *it;
  }
  hull.resize(k - 1);  // last point repeats the first
  return hull;
}

}  // namespace

Polygon Polygon::from_hull_vertices(std::vector<Vec2> hull) {
  Polygon p;
  if (hull.empty()) return p;
  p.empty_ = false;
  p.bounded_ = true;
  p.vertices_ = std::move(hull);
  p.derive_halfspaces();
  return p;
}

Polygon Polygon::from_points(const std::vector<Vec2>& pts) {
  if (pts.empty()) throw EmptyHull();
  for (const auto& p : pts) {
    if (!p.allFinite()) throw std::invalid_argument("convex_hull: non-finite point");
  }
  return from_hull_vertices(monotone_chain(pts, kTol));
}

Polygon convex_hull(const std::vector<Vec2>& pts) { return Polygon::from_points(pts); }

void Polygon::derive_halfspaces() {
  halfspaces_.clear();
  const size_t n = vertices_.size();
  if (n == 1) {
    // Point: pin both coordinates.
    const Vec2& p = vertices_[0];
    halfspaces_ = {Halfspace(Vec2(1, 0), p.x()), Halfspace(Vec2(-1, 0), -p.x()),
                   Halfspace(Vec2(0, 1), p.y()), Halfspace(Vec2(0, -1), -p.y())};
    return;
  }
  if (n == 2) {
    // Segment: two side constraints plus end caps.
    const Vec2 d = (vertices_[1] - vertices_[0]).normalized();
    const Vec2 nrm(-d.y(), d.x());
    halfspaces_ = {Halfspace(nrm, nrm.dot(vertices_[0])),
                   Halfspace(-nrm, -nrm.dot(vertices_[0])),
                   Halfspace(d, d.dot(vertices_[1])),
                   Halfspace(-d, -d.dot(vertices_[0]))};
    return;
  }
  halfspaces_.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    const Vec2& a = vertices_[i];
    const Vec2& b = vertices_[(i + 1) % n];
    const Vec2 e = b - a;
    // CCW order: outward normal is the edge rotated clockwise.
    const Vec2 nrm = Vec2(e.y(), -e.x()).normalized();
    halfspaces_.emplace_back(nrm, nrm.dot(a));
  }
}

const std::vector<Vec2>& Polygon::vertices() const {
  if (!bounded_) throw UnboundedRegion("vertices() on halfspace-only region");
  return vertices_;
}

bool Polygon::contains(const Vec2& x, double tol) const {
  if (empty_) return false;
  for (const auto& h : halfspaces_) {
    if (h.slack(x) < -tol) return false;
  }
  return true;
}

Polygon Polygon::box(double s_lo, double s_hi, double v_lo, double v_hi) {
  return from_points({{s_lo, v_lo}, {s_hi, v_lo}, {s_hi, v_hi}, {s_lo, v_hi}});
}

Polygon Polygon::minkowski_sum(const AxisSegment& seg) const {
  if (empty_) return *this;
  if (!bounded_) throw UnboundedRegion("minkowski_sum on halfspace-only region");
  const Vec2 e = seg.direction();
  std::vector<Vec2> shifted;
  shifted.reserve(2 * vertices_.size());
  for (const auto& v : vertices_) {
    shifted.push_back(v + seg.lo * e);
    shifted.push_back(v + seg.hi * e);
  }
  return from_points(shifted);
}

Polygon Polygon::pontryagin_diff(const AxisSegment& seg) const {
  if (empty_) return *this;
  std::vector<Halfspace> hs;
  hs.reserve(halfspaces_.size());
  const Vec2 e = seg.direction();
  for (const auto& h : halfspaces_) {
    const double ae = h.a.dot(e);
    hs.emplace_back(h.a, h.b - std::max(ae * seg.lo, ae * seg.hi));
  }
  if (!bounded_) return halfspace_region(std::move(hs));
  return from_halfspaces(hs);
}

Polygon Polygon::intersect(const Polygon& other) const {
  if (empty_ || other.empty_) return Polygon::empty_set();
  std::vector<Halfspace> hs = halfspaces_;
  hs.insert(hs.end(), other.halfspaces_.begin(), other.halfspaces_.end());
  if (!bounded_ && !other.bounded_) return halfspace_region(std::move(hs));
  return from_halfspaces(hs);
}

Polygon Polygon::intersect(const Halfspace& h) const {
  if (empty_) return *this;
  std::vector<Halfspace> hs = halfspaces_;
  hs.push_back(h.normalized());
  if (!bounded_) return halfspace_region(std::move(hs));
  return from_halfspaces(hs);
}

namespace {

// Feasibility tolerance for vertex candidates; slightly loose because the
// candidates come out of 2x2 solves on possibly ill-conditioned pairs.
constexpr double kFeasTol = 1e-7;

std::vector<Halfspace> normalize_set(const std::vector<Halfspace>& in, bool* infeasible) {
  std::vector<Halfspace> out;
  *infeasible = false;
  for (const auto& raw : in) {
    const double n = raw.a.norm();
    if (n <= kTol) {
      if (raw.b < -kTol) *infeasible = true;  // 0 <= b violated
      continue;
    }
    Halfspace h = raw.normalized();
    bool dup = false;
    for (auto& g : out) {
      if ((g.a - h.a).norm() <= 1e-12) {
        g.b = std::min(g.b, h.b);  // same direction: keep the tighter one
        dup = true;
        break;
      }
    }
    if (!dup) out.push_back(h);
  }
  return out;
}

// A 2-D halfspace system is bounded iff the normals positively span the
// plane, i.e. the largest angular gap between consecutive normals is < pi.
bool normals_bound_region(const std::vector<Halfspace>& hs) {
  if (hs.size() < 3) return false;
  std::vector<double> ang;
  ang.reserve(hs.size());
  for (const auto& h : hs) ang.push_back(std::atan2(h.a.y(), h.a.x()));
  std::sort(ang.begin(), ang.end());
  double max_gap = ang.front() + 2 * M_PI - ang.back();
  for (size_t i = 1; i < ang.size(); ++i) max_gap = std::max(max_gap, ang[i] - ang[i - 1]);
  return max_gap < M_PI - 1e-12;
}

std::vector<Vec2> feasible_candidates(const std::vector<Halfspace>& hs) {
  std::vector<Vec2> cand;
  const size_t m = hs.size();
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = i + 1; j < m; ++j) {
      const double det = hs[i].a.x() * hs[j].a.y() - hs[i].a.y() * hs[j].a.x();
      if (std::abs(det) <= 1e-10) continue;
      const Vec2 x((hs[i].b * hs[j].a.y() - hs[j].b * hs[i].a.y()) / det,
                   (hs[i].a.x() * hs[j].b - hs[j].a.x() * hs[i].b) / det);
      bool feas = true;
      for (const auto& h : hs) {
        if (h.slack(x) < -kFeasTol * std::max(1.0, x.lpNorm<Eigen::Infinity>())) {
          feas = false;
          break;
        }
      }
      if (feas) cand.push_back(x);
    }
  }
  return cand;
}

// With all normals parallel the region is a slab/halfplane: empty iff two
// opposing constraints contradict.
bool parallel_system_empty(const std::vector<Halfspace>& hs) {
  for (size_t i = 0; i < hs.size(); ++i) {
    for (size_t j = i + 1; j < hs.size(); ++j) {
      if ((hs[i].a + hs[j].a).norm() <= 1e-9 && hs[i].b + hs[j].b < -kTol) return true;
    }
  }
  return false;
}

bool has_independent_pair(const std::vector<Halfspace>& hs) {
  for (size_t i = 0; i < hs.size(); ++i) {
    for (size_t j = i + 1; j < hs.size(); ++j) {
      const double det = hs[i].a.x() * hs[j].a.y() - hs[i].a.y() * hs[j].a.x();
      if (std::abs(det) > 1e-10) return true;
    }
  }
  return false;
}

}  // namespace

Polygon Polygon::from_halfspaces(const std::vector<Halfspace>& raw) {
  bool trivially_empty = false;
  std::vector<Halfspace> hs = normalize_set(raw, &trivially_empty);
  if (trivially_empty) return Polygon::empty_set();
  if (hs.empty()) throw UnboundedRegion("from_halfspaces: whole plane");

  if (!normals_bound_region(hs)) {
    // Unbounded (or possibly empty) region; classify and keep halfspace form.
    return halfspace_region(std::move(hs));
  }
  std::vector<Vec2> cand = feasible_candidates(hs);
  if (cand.empty()) return Polygon::empty_set();
  return from_points(cand);
}

Polygon Polygon::halfspace_region(std::vector<Halfspace> raw) {
  bool trivially_empty = false;
  std::vector<Halfspace> hs = normalize_set(raw, &trivially_empty);
  if (trivially_empty) return Polygon::empty_set();

  // Emptiness: a nonempty 2-D polyhedron with two independent normals has a
  // vertex, so no feasible pairwise intersection means empty. An all-parallel
  // system is an interval check.
  if (has_independent_pair(hs)) {
    if (feasible_candidates(hs).empty()) return Polygon::empty_set();
  } else if (parallel_system_empty(hs)) {
    return Polygon::empty_set();
  }
  Polygon p;
  p.empty_ = false;
  p.bounded_ = false;
  p.halfspaces_ = std::move(hs);
  return p;
}

}  // namespace ecodrive::geom
