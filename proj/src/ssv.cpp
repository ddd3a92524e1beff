#include "dualarm/ssv.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "dualarm/distance_meter.hpp"
#include "dualarm/errors.hpp"

namespace dualarm {

namespace {

using Vec3 = Eigen::Vector3d;
using PointPair = std::pair<Vec3, Vec3>;

constexpr double kEps = 1e-14;

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

Vec3 closest_on_segment(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 <= kEps) return a;
  return a + clamp01((p - a).dot(ab) / len2) * ab;
}

// Closest points of segments p1q1 and p2q2 (Ericson, Real-Time Collision Detection 5.1.9).
PointPair segment_segment(const Vec3& p1, const Vec3& q1, const Vec3& p2, const Vec3& q2) {
  const Vec3 d1 = q1 - p1;
  const Vec3 d2 = q2 - p2;
  const Vec3 r = p1 - p2;
  const double a = d1.squaredNorm();
  const double e = d2.squaredNorm();
  const double f = d2.dot(r);
  double s = 0.0;
  double t = 0.0;
  if (a <= kEps && e <= kEps) {
    return {p1, p2};
  }
  if (a <= kEps) {
    t = clamp01(f / e);
  } else {
    const double c = d1.dot(r);
    if (e <= kEps) {
      s = clamp01(-c / a);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      s = denom > kEps * a * e ? clamp01((b * f - c * e) / denom) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = clamp01(-c / a);
      } else if (t > 1.0) {
        t = 1.0;
        s = clamp01((b - c) / a);
      }
    }
  }
  return {p1 + s * d1, p2 + t * d2};
}

// Closest point of triangle abc to p (Ericson 5.1.5).
Vec3 closest_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  const Vec3 ap = p - a;
  const double d1 = ab.dot(ap);
  const double d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;

  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp);
  const double d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    return a + (d1 / (d1 - d3)) * ab;
  }

  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp);
  const double d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    return a + (d2 / (d2 - d6)) * ac;
  }

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
  }

  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

// Point where segment pq pierces triangle abc, if it does (non-coplanar case).
bool segment_pierces_triangle(const Vec3& p, const Vec3& q, const Vec3& a, const Vec3& b,
                              const Vec3& c, Vec3& hit) {
  const Vec3 n = (b - a).cross(c - a);
  const double dp = n.dot(p - a);
  const double dq = n.dot(q - a);
  if ((dp > 0.0 && dq > 0.0) || (dp < 0.0 && dq < 0.0) || dp == dq) return false;
  const Vec3 x = p + (dp / (dp - dq)) * (q - p);
  // Inside test via edge-normal signs.
  const double s0 = n.dot((b - a).cross(x - a));
  const double s1 = n.dot((c - b).cross(x - b));
  const double s2 = n.dot((a - c).cross(x - c));
  if (s0 >= 0.0 && s1 >= 0.0 && s2 >= 0.0) {
    hit = x;
    return true;
  }
  return false;
}

PointPair point_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  return {p, closest_on_triangle(p, a, b, c)};
}

void keep_closer(PointPair& best, double& best_d2, const PointPair& candidate) {
  const double d2 = (candidate.first - candidate.second).squaredNorm();
  if (d2 < best_d2) {
    best_d2 = d2;
    best = candidate;
  }
}

// (point on segment, point on triangle)
PointPair segment_triangle(const Vec3& p, const Vec3& q, const Vec3& a, const Vec3& b,
                           const Vec3& c) {
  Vec3 hit;
  if (segment_pierces_triangle(p, q, a, b, c, hit)) return {hit, hit};
  PointPair best = point_triangle(p, a, b, c);
  double best_d2 = (best.first - best.second).squaredNorm();
  keep_closer(best, best_d2, point_triangle(q, a, b, c));
  keep_closer(best, best_d2, segment_segment(p, q, a, b));
  keep_closer(best, best_d2, segment_segment(p, q, b, c));
  keep_closer(best, best_d2, segment_segment(p, q, c, a));
  return best;
}

PointPair triangle_triangle(const std::array<Vec3, 3>& s, const std::array<Vec3, 3>& t) {
  PointPair best{s[0], t[0]};
  double best_d2 = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    keep_closer(best, best_d2, segment_triangle(s[i], s[(i + 1) % 3], t[0], t[1], t[2]));
    const PointPair rev = segment_triangle(t[i], t[(i + 1) % 3], s[0], s[1], s[2]);
    keep_closer(best, best_d2, {rev.second, rev.first});
  }
  return best;
}

// Skeleton closest points with kind(a) <= kind(b).
PointPair ordered_closest(const SsvPrimitive& a, const SsvPrimitive& b) {
  using K = SsvPrimitive::Kind;
  const auto& A = a.anchors;
  const auto& B = b.anchors;
  switch (a.kind) {
    case K::point:
      switch (b.kind) {
        case K::point: return {A[0], B[0]};
        case K::line: return {A[0], closest_on_segment(A[0], B[0], B[1])};
        case K::triangle: return point_triangle(A[0], B[0], B[1], B[2]);
      }
      break;
    case K::line:
      if (b.kind == K::line) return segment_segment(A[0], A[1], B[0], B[1]);
      return segment_triangle(A[0], A[1], B[0], B[1], B[2]);
    case K::triangle:
      return triangle_triangle(A, B);
  }
  return {A[0], B[0]};
}

// Strict weak order used to pick a canonical argument order.
bool canonical_less(const SsvPrimitive& a, const SsvPrimitive& b) {
  if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind);
  for (std::size_t i = 0; i < a.anchor_count(); ++i) {
    for (int k = 0; k < 3; ++k) {
      if (a.anchors[i][k] != b.anchors[i][k]) return a.anchors[i][k] < b.anchors[i][k];
    }
  }
  return a.radius < b.radius;
}

Vec3 centroid(const SsvPrimitive& p) {
  Vec3 c = Vec3::Zero();
  for (const auto& x : p.skeleton()) c += x;
  return c / static_cast<double>(p.anchor_count());
}

Vec3 fallback_normal(const SsvPrimitive& a, const SsvPrimitive& b) {
  using K = SsvPrimitive::Kind;
  const Vec3 towards_a = centroid(a) - centroid(b);
  auto plane_normal = [](const SsvPrimitive& t) {
    return (t.anchors[1] - t.anchors[0]).cross(t.anchors[2] - t.anchors[0]).normalized();
  };
  if (b.kind == K::triangle) {
    Vec3 n = plane_normal(b);
    return n.dot(towards_a) < 0.0 ? Vec3(-n) : n;
  }
  if (a.kind == K::triangle) {
    Vec3 n = plane_normal(a);
    return n.dot(towards_a) < 0.0 ? Vec3(-n) : n;
  }
  if (towards_a.norm() > kEps) return towards_a.normalized();
  return Vec3::UnitX();
}

}  // namespace

SsvPrimitive SsvPrimitive::sphere(const Eigen::Vector3d& center, double radius) {
  SsvPrimitive p;
  p.kind = Kind::point;
  p.anchors[0] = center;
  p.radius = radius;
  return p;
}

SsvPrimitive SsvPrimitive::capsule(const Eigen::Vector3d& p0, const Eigen::Vector3d& p1,
                                   double radius) {
  SsvPrimitive p;
  p.kind = Kind::line;
  p.anchors[0] = p0;
  p.anchors[1] = p1;
  p.radius = radius;
  return p;
}

SsvPrimitive SsvPrimitive::rounded_triangle(const Eigen::Vector3d& p0, const Eigen::Vector3d& p1,
                                            const Eigen::Vector3d& p2, double radius) {
  SsvPrimitive p;
  p.kind = Kind::triangle;
  p.anchors = {p0, p1, p2};
  p.radius = radius;
  return p;
}

SsvPrimitive SsvPrimitive::transformed(const Eigen::Isometry3d& pose) const {
  SsvPrimitive out = *this;
  for (std::size_t i = 0; i < anchor_count(); ++i) out.anchors[i] = pose * anchors[i];
  return out;
}

void SsvPrimitive::validate() const {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw InvalidInput("SSV radius must be positive");
  }
  for (const auto& x : skeleton()) {
    if (!x.allFinite()) throw InvalidInput("SSV anchor is not finite");
  }
  if (kind == Kind::line && (anchors[1] - anchors[0]).norm() < 1e-12) {
    throw InvalidInput("SSV segment endpoints coincide");
  }
  if (kind == Kind::triangle &&
      (anchors[1] - anchors[0]).cross(anchors[2] - anchors[0]).norm() < 1e-12) {
    throw InvalidInput("SSV triangle vertices are collinear");
  }
}

std::pair<Eigen::Vector3d, Eigen::Vector3d> closest_skeleton_points(const SsvPrimitive& a,
                                                                    const SsvPrimitive& b) {
  if (canonical_less(b, a)) {
    const PointPair r = ordered_closest(b, a);
    return {r.second, r.first};
  }
  return ordered_closest(a, b);
}

DistanceResult ssv_distance(const SsvPrimitive& a, const SsvPrimitive& b) {
  const DistanceMeter::Scope metered;
  DistanceResult out;
  const auto [wa, wb] = closest_skeleton_points(a, b);
  out.witness_a = wa;
  out.witness_b = wb;
  const Vec3 diff = wa - wb;
  const double gap = diff.norm();
  out.distance = gap - (a.radius + b.radius);
  out.normal = gap > 1e-12 ? Vec3(diff / gap) : fallback_normal(a, b);
  return out;
}

std::pair<Eigen::Vector3d, double> bounding_sphere(const SsvPrimitive& p) {
  const Vec3 c = centroid(p);
  double r = 0.0;
  for (const auto& x : p.skeleton()) r = std::max(r, (x - c).norm());
  return {c, r + p.radius};
}

}  // namespace dualarm
