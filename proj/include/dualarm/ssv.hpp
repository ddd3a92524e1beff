#pragma once

#include <array>
#include <cstddef>
#include <span>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace dualarm {

/// Swept sphere volume: a sphere of `radius` swept over a point, a segment or
/// a triangle skeleton. Rectangles are modelled as two triangles.
struct SsvPrimitive {
  enum class Kind { point = 1, line = 2, triangle = 3 };

  Kind kind{Kind::point};
  std::array<Eigen::Vector3d, 3> anchors{Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero(),
                                         Eigen::Vector3d::Zero()};
  double radius{0.0};

  static SsvPrimitive sphere(const Eigen::Vector3d& center, double radius);
  static SsvPrimitive capsule(const Eigen::Vector3d& p0, const Eigen::Vector3d& p1, double radius);
  static SsvPrimitive rounded_triangle(const Eigen::Vector3d& p0, const Eigen::Vector3d& p1,
                                       const Eigen::Vector3d& p2, double radius);

  std::size_t anchor_count() const { return static_cast<std::size_t>(kind); }
  std::span<const Eigen::Vector3d> skeleton() const { return {anchors.data(), anchor_count()}; }

  /// Primitive with its anchors mapped through `pose`.
  SsvPrimitive transformed(const Eigen::Isometry3d& pose) const;

  /// Throws InvalidInput for radius <= 0, coincident segment ends or collinear
  /// triangle vertices.
  void validate() const;
};

/// Signed SSV distance with the skeleton witness points realizing it.
struct DistanceResult {
  double distance{0.0};  // skeleton distance minus radius sum [m]
  Eigen::Vector3d witness_a{Eigen::Vector3d::Zero()};
  Eigen::Vector3d witness_b{Eigen::Vector3d::Zero()};
  Eigen::Vector3d normal{Eigen::Vector3d::UnitX()};  // unit, from witness_b towards witness_a
};

/// Closed-form distance between two placed primitives. Symmetric: swapping the
/// arguments yields the identical distance with witnesses swapped.
DistanceResult ssv_distance(const SsvPrimitive& a, const SsvPrimitive& b);

/// Closest points between skeletons, returned as (point on a, point on b).
/// Exposed for testing; no radius involved and no metering.
std::pair<Eigen::Vector3d, Eigen::Vector3d> closest_skeleton_points(const SsvPrimitive& a,
                                                                    const SsvPrimitive& b);

/// Bounding sphere (center, radius) enclosing the whole swept volume.
std::pair<Eigen::Vector3d, double> bounding_sphere(const SsvPrimitive& p);

}  // namespace dualarm
