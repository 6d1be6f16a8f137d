#include "linconvex/projective.hpp"

#include <cmath>

namespace linconvex {

ProjectiveMap::ProjectiveMap(const Eigen::Matrix4d& m) : m_(m) {
  Eigen::FullPivLU<Eigen::Matrix4d> lu(m);
  if (!lu.isInvertible()) throw Error(ErrorCode::NearSingular, "projective matrix is singular");
  inv_ = lu.inverse();
}

ProjectiveMap ProjectiveMap::translation(const Coord& t) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  for (int i = 0; i < 3; ++i) m(i, 3) = t[i];
  return ProjectiveMap(m);
}

ProjectiveMap ProjectiveMap::inverse() const {
  ProjectiveMap p;
  p.m_ = inv_;
  p.inv_ = m_;
  return p;
}

double ProjectiveMap::weight(const Coord& x) const {
  return m_(3, 0) * x[0] + m_(3, 1) * x[1] + m_(3, 2) * x[2] + m_(3, 3);
}

Coord ProjectiveMap::apply(const Coord& x, double tol) const {
  Eigen::Vector4d h = m_ * Eigen::Vector4d(x[0], x[1], x[2], 1.0);
  if (!(std::abs(h[3]) > tol))
    throw Error(ErrorCode::NearSingular, "point lies on the plane sent to infinity");
  return {h[0] / h[3], h[1] / h[3], h[2] / h[3], 0};
}

std::optional<std::pair<Coord, double>> ProjectiveMap::singular_plane() const {
  Coord n{m_(3, 0), m_(3, 1), m_(3, 2), 0};
  double len = norm(n, 3);
  if (len == 0) return std::nullopt;
  for (int i = 0; i < 3; ++i) n[i] /= len;
  return std::pair{n, -m_(3, 3) / len};
}

Normalization projective_normalize(const Family& pencil, const AffineSubspace& delta0) {
  if (pencil.kind() != FamilyKind::PencilLines3D)
    throw Error(ErrorCode::InvalidArgument, "projective_normalize expects the pencil family");
  if (delta0.dim() != 3 || delta0.codim() != 1)
    throw Error(ErrorCode::PlaneNotInPencil, "delta0 must be a plane in R^3");
  const Coord& nrm = delta0.normals()[0];
  double offset = dot(nrm, delta0.point(), 3);
  if (std::abs(nrm[2]) > 1e-9 || std::abs(offset) > 1e-9)
    throw Error(ErrorCode::PlaneNotInPencil, "delta0 does not contain the pencil axis");

  // Rotate about x3 so delta0 becomes {x1 = 0}, then send x1 = 0 to infinity.
  double c = nrm[0], s = nrm[1];
  double len = std::hypot(c, s);
  c /= len;
  s /= len;
  Eigen::Matrix4d rot = Eigen::Matrix4d::Identity();
  rot(0, 0) = c;
  rot(0, 1) = s;
  rot(1, 0) = -s;
  rot(1, 1) = c;
  Eigen::Matrix4d send;
  send << 0, 1, 0, 0,
          0, 0, 1, 0,
          0, 0, 0, 1,
          1, 0, 0, 0;
  return {ProjectiveMap(send * rot), Family::parallel_codim2(3, 0)};
}

VoxelGrid resample_through_map(const VoxelGrid& g, const ProjectiveMap& map,
                               const GridSpec& target) {
  if (g.dim() != 3 || target.dim() != 3)
    throw Error(ErrorCode::DimMismatch, "projective resampling works in R^3");
  const GridSpec& src = g.spec();
  if (auto plane = map.singular_plane()) {
    auto [pn, pc] = *plane;
    double margin = src.cell_diameter();
    g.for_each_occupied([&](std::size_t idx) {
      Coord x = src.cell_center(src.unlinear(idx));
      if (std::abs(dot(pn, x, 3) - pc) < margin)
        throw Error(ErrorCode::NearSingular, "occupied cell within one cell of the singular plane");
    });
  }

  ProjectiveMap inv = map.inverse();
  VoxelGrid out(target);
  for (std::size_t i = 0; i < target.cell_count(); ++i) {
    Coord y = target.cell_center(target.unlinear(i));
    if (!(std::abs(inv.weight(y)) > 1e-12)) continue;
    auto cell = src.cell_of(inv.apply(y));
    if (cell && g.test(*cell)) out.set(i);
  }
  return out;
}

}  // namespace linconvex
