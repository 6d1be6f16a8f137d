#pragma once

#include <optional>
#include <utility>

#include <Eigen/Dense>

#include "linconvex/families.hpp"
#include "linconvex/geometry.hpp"

namespace linconvex {

/// Projective transformation of R^3 as a 4x4 matrix on (x, 1).
class ProjectiveMap {
 public:
  ProjectiveMap() : m_(Eigen::Matrix4d::Identity()), inv_(Eigen::Matrix4d::Identity()) {}
  explicit ProjectiveMap(const Eigen::Matrix4d& m);

  static ProjectiveMap translation(const Coord& t);

  const Eigen::Matrix4d& matrix() const { return m_; }
  ProjectiveMap inverse() const;

  /// Homogeneous weight of the image of x; zero on the plane sent to infinity.
  double weight(const Coord& x) const;
  /// Throws NearSingular when |weight(x)| <= tol.
  Coord apply(const Coord& x, double tol = 1e-12) const;

  /// Plane {x : (n, x) = c} sent to infinity, as (n, c) with |n| = 1.
  /// Empty for affine maps.
  std::optional<std::pair<Coord, double>> singular_plane() const;

 private:
  Eigen::Matrix4d m_;
  Eigen::Matrix4d inv_;
};

struct Normalization {
  ProjectiveMap map;
  /// Lines inside the parallel slices y1 = const.
  Family image_family;
};

/// For a hyperplane delta0 through the pencil axis {x1 = x2 = 0}, a map that
/// sends delta0 to infinity and the pencil planes to the slices y1 = t.
/// With delta0 = {x1 = 0} the map is x -> (x2 / x1, x3 / x1, 1 / x1).
/// Throws PlaneNotInPencil when delta0 does not contain the axis.
Normalization projective_normalize(const Family& pencil, const AffineSubspace& delta0);

/// Target cell occupied iff the preimage of its center lies in an occupied
/// cell of g. Throws NearSingular when an occupied cell of g comes within one
/// cell diameter of the singular plane.
VoxelGrid resample_through_map(const VoxelGrid& g, const ProjectiveMap& map,
                               const GridSpec& target);

}  // namespace linconvex
