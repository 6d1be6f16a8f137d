#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "linconvex/error.hpp"

namespace linconvex {

inline constexpr int kMaxDim = 4;

/// Point or vector in R^n, n <= kMaxDim. Entries past the dimension are zero.
using Coord = std::array<double, kMaxDim>;
/// Integer cell index; entries past the dimension are zero.
using CellIndex = std::array<int, kMaxDim>;

double dot(const Coord& a, const Coord& b, int n);
double norm(const Coord& a, int n);

//---------------------------------------------------------------------------//
/// Axis-aligned window [lo, hi] in R^n, 2 <= n <= 4.
class BoundingBox {
 public:
  BoundingBox() = default;
  BoundingBox(int dim, const Coord& lo, const Coord& hi);

  static BoundingBox cube(int dim, double lo, double hi);

  int dim() const { return dim_; }
  const Coord& lo() const { return lo_; }
  const Coord& hi() const { return hi_; }
  double extent(int axis) const { return hi_[axis] - lo_[axis]; }
  Coord center() const;

  bool operator==(const BoundingBox&) const = default;

 private:
  int dim_ = 0;
  Coord lo_{};
  Coord hi_{};
};

//---------------------------------------------------------------------------//
/// A box subdivided into res[0] x ... x res[n-1] equal cells.
///
/// Linear cell order is row-major: the last axis varies fastest. Cell
/// centers are computed as lo + (hi - lo) * (2i + 1) / (2 res) so that
/// lattice points with exact decimal values (e.g. the origin) come out exact.
class GridSpec {
 public:
  GridSpec() = default;
  GridSpec(const BoundingBox& box, const CellIndex& res);

  int dim() const { return box_.dim(); }
  const BoundingBox& box() const { return box_; }
  const CellIndex& res() const { return res_; }
  std::size_t cell_count() const { return count_; }

  double cell_size(int axis) const { return box_.extent(axis) / res_[axis]; }
  double min_cell_edge() const;
  double cell_diameter() const;
  /// Geometric tolerance: 1e-9 of the smallest cell edge.
  double eps() const { return 1e-9 * min_cell_edge(); }

  double center_coord(int axis, int i) const;
  double edge_coord(int axis, int i) const;
  Coord cell_center(const CellIndex& cell) const;
  void cell_bounds(const CellIndex& cell, Coord& lo, Coord& hi) const;

  bool contains(const CellIndex& cell) const;
  std::size_t linear(const CellIndex& cell) const;
  CellIndex unlinear(std::size_t index) const;
  /// Cell whose half-open cube [edge_i, edge_{i+1}) holds p; the upper box
  /// face maps to the last cell. Empty when p lies outside the box.
  std::optional<CellIndex> cell_of(const Coord& p) const;

  bool operator==(const GridSpec&) const = default;

 private:
  BoundingBox box_;
  CellIndex res_{};
  std::size_t count_ = 0;
};

//---------------------------------------------------------------------------//
/// Finite occupancy set over a GridSpec. A cell is occupied iff its center
/// lies in the represented set.
class VoxelGrid {
 public:
  VoxelGrid() = default;
  explicit VoxelGrid(const GridSpec& spec);

  const GridSpec& spec() const { return spec_; }
  int dim() const { return spec_.dim(); }

  bool test(std::size_t index) const {
    return (words_[index >> 6] >> (index & 63)) & 1u;
  }
  bool test(const CellIndex& cell) const { return test(spec_.linear(cell)); }
  void set(std::size_t index, bool value = true) {
    auto bit = std::uint64_t{1} << (index & 63);
    if (value)
      words_[index >> 6] |= bit;
    else
      words_[index >> 6] &= ~bit;
  }
  void set(const CellIndex& cell, bool value = true) {
    set(spec_.linear(cell), value);
  }

  std::size_t count() const;
  bool empty() const;

  std::span<const std::uint64_t> words() const { return words_; }
  std::span<std::uint64_t> words() { return words_; }
  /// Clears bits past cell_count() in the last word.
  void mask_tail();

  void for_each_occupied(const std::function<void(std::size_t)>& fn) const;
  std::vector<CellIndex> occupied_cells() const;

  bool operator==(const VoxelGrid& other) const;

 private:
  GridSpec spec_;
  std::vector<std::uint64_t> words_;
};

// Set algebra. All binary operations require identical GridSpecs and throw
// GridMismatch otherwise; complement is relative to the box.
VoxelGrid complement(const VoxelGrid& a);
VoxelGrid unite(const VoxelGrid& a, const VoxelGrid& b);
VoxelGrid intersect(const VoxelGrid& a, const VoxelGrid& b);
VoxelGrid subtract(const VoxelGrid& a, const VoxelGrid& b);
bool is_subset(const VoxelGrid& a, const VoxelGrid& b);
bool equal(const VoxelGrid& a, const VoxelGrid& b);

void require_same_grid(const GridSpec& a, const GridSpec& b);

/// How the outside of the box is treated when looking for boundary cells.
enum class BoxFaces {
  Exterior,  ///< cells on the box faces count as boundary
  Ignore,    ///< only unoccupied in-box face neighbours count
};

/// Occupied cells with at least one face neighbour that is unoccupied (or
/// outside the box, under BoxFaces::Exterior).
VoxelGrid boundary_cells(const VoxelGrid& d, BoxFaces faces = BoxFaces::Exterior);

/// Face-neighbour (Chebyshev radius 1 when `diagonal`) dilation by `steps`.
VoxelGrid dilate(const VoxelGrid& g, int steps, bool diagonal = true);

//---------------------------------------------------------------------------//
/// Affine flat of codimension c in R^n: { x | normals[i] . (x - point) = 0 }.
///
/// Normals are orthonormal; `directions` completes them to an orthonormal
/// basis of R^n and spans the flat. `point` is the foot of the perpendicular
/// from the origin.
class AffineSubspace {
 public:
  AffineSubspace() = default;

  /// Solution set of rows[i] . x = rhs[i]. Throws DegenerateParams when the
  /// system is inconsistent (empty) or has rank zero (whole space).
  static AffineSubspace from_equations(int dim, std::span<const Coord> rows,
                                       std::span<const double> rhs);
  static AffineSubspace hyperplane(int dim, const Coord& normal, double offset);
  static AffineSubspace through_point(int dim, const Coord& point,
                                      std::span<const Coord> normals);

  int dim() const { return dim_; }
  int codim() const { return codim_; }
  int flat_dim() const { return dim_ - codim_; }
  const Coord& point() const { return point_; }
  std::span<const Coord> normals() const { return {normals_.data(), std::size_t(codim_)}; }
  std::span<const Coord> directions() const {
    return {directions_.data(), std::size_t(dim_ - codim_)};
  }

  /// max_i |normals[i] . (x - point)|.
  double residual(const Coord& x) const;
  bool contains(const Coord& x, double eps) const { return residual(x) <= eps; }

 private:
  int dim_ = 0;
  int codim_ = 0;
  Coord point_{};
  std::array<Coord, kMaxDim> normals_{};
  std::array<Coord, kMaxDim> directions_{};
};

}  // namespace linconvex
