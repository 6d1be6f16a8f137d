#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "linconvex/geometry.hpp"
#include <json.hpp>

namespace linconvex {

enum class FamilyKind {
  AllHyperplanes,   ///< every affine hyperplane of R^n
  ParallelLines3D,  ///< lines of R^3 lying in some slice x3 = d
  PencilLines3D,    ///< lines in planes through the x3 axis, plus planes x3 = t
  SkewOperator,     ///< flats orthogonal to p and Ap in homogeneous coordinates
  ParallelCodim2,   ///< (n-2)-flats lying in some slice x_k = d
  Pullback,         ///< preimages of lines of R^2 under a coordinate projection
};

inline constexpr int kMaxChart = 6;
using ChartCoords = std::array<double, kMaxChart>;

/// A point of a family's chart. Projective factors are stored normalized
/// with their first nonzero entry positive.
struct ParamSample {
  ChartCoords coords{};
  int size = 0;
  /// A chart point where the element drops codimension (pencil planes
  /// perpendicular to the axis, kernel directions of a skew operator).
  bool degenerate = false;

  std::span<const double> values() const { return {coords.data(), std::size_t(size)}; }
  bool operator==(const ParamSample& o) const { return size == o.size && coords == o.coords; }
  auto operator<=>(const ParamSample& o) const {
    if (auto c = size <=> o.size; c != 0) return c <=> 0;
    for (int i = 0; i < size; ++i)
      if (coords[i] != o.coords[i]) return coords[i] < o.coords[i] ? std::strong_ordering::less
                                                                     : std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }
};

/// A parameterized family W of affine flats with a coordinate chart.
class Family {
 public:
  static Family all_hyperplanes(int n);
  static Family parallel_lines_3d();
  static Family pencil_lines_3d();
  /// `a` is an (n+1)x(n+1) skew-symmetric matrix acting on homogeneous
  /// coordinates (x, 1) of R^n.
  static Family skew_operator(const Eigen::MatrixXd& a);
  static Family parallel_codim2(int n, int axis);
  /// Preimage of all lines of R^2 under x -> (x[axis_a], x[axis_b]).
  static Family pullback_lines(int n, int axis_a, int axis_b);

  /// Parses "AllHyperplanes", "ParallelLines3D", "PencilLines3D",
  /// "SkewOperator[:upper-triangle entries]", "ParallelCodim2[:axis]",
  /// "Pullback[:a,b]" for ambient dimension n.
  static Family parse(const std::string& text, int n);

  FamilyKind kind() const { return kind_; }
  int dim() const { return dim_; }
  int axis() const { return axis_; }
  int axis_b() const { return axis_b_; }
  const Eigen::MatrixXd& skew() const { return skew_; }
  std::string name() const;
  int chart_size() const;

  /// Normalizes the projective factors of `c` to the canonical antipodal
  /// representative.
  ParamSample canonical(const ChartCoords& c, bool degenerate = false) const;

  /// The flat named by a chart point. Throws DegenerateParams when the chart
  /// equations describe the empty set or the whole space.
  AffineSubspace element(const ParamSample& p) const;

  /// {variant, params}; callers add budget and seed.
  nlohmann::json descriptor() const;

  bool operator==(const Family& o) const;

 private:
  FamilyKind kind_ = FamilyKind::AllHyperplanes;
  int dim_ = 0;
  int axis_ = 0;
  int axis_b_ = 1;
  Eigen::MatrixXd skew_;
};

/// Deterministic finite surrogate for W. Projective factors come from a
/// near-uniform hemisphere lattice, translational factors are stratified over
/// the range where an element can meet `box`. Sorted, duplicate-free.
std::vector<ParamSample> sample_params(const Family& w, std::size_t budget, const BoundingBox& box,
                                       std::uint64_t seed);

/// Lazily indexed elements of W through a point x. Index i is valid for
/// 0 <= i < size(); some chart points may be degenerate, in which case
/// at(i) reports false. Keeps a reference to `w`.
class ThroughPoint {
 public:
  ThroughPoint(const Family& w, const Coord& x, std::size_t budget, std::uint64_t seed);

  std::size_t size() const { return size_; }
  /// Writes the i-th sample; false when that chart point has no valid element.
  bool at(std::size_t i, ParamSample& out) const;

 private:
  const Family* family_;
  Coord x_;
  std::size_t budget_;
  std::uint64_t seed_;
  std::size_t size_ = 0;
  // Pencil family: x lies on the axis.
  bool on_axis_ = false;
  std::size_t planes_ = 0, per_plane_ = 0;
  // Skew family: orthonormal basis of {x^, Ax^}^perp in R^{n+1}.
  std::vector<Eigen::VectorXd> basis_;
};

/// Elements of W containing x (budget-limited, deterministic). Throws
/// EmptyThroughSet if none exists.
std::vector<ParamSample> elements_through(const Family& w, const Coord& x, std::size_t budget,
                                          std::uint64_t seed);

/// Point i of a near-uniform set of `count` canonical points on the
/// hemisphere of S^m (m + 1 coordinates). m = 1 is an exact angular lattice
/// (seeded phase unless `exact`), m = 2 a Fibonacci lattice, m >= 3 a
/// Kronecker sequence pushed through the Gaussian quantile. With
/// `axes_first` (m >= 2) the coordinate axes take the first m + 1 indices.
std::array<double, kMaxChart> hemisphere_point(int m, std::size_t i, std::size_t count,
                                               std::uint64_t seed, bool exact, bool axes_first);

/// Visit order over [0, count) that spreads consecutive picks across the
/// index range (golden-ratio stride).
std::size_t spread_index(std::size_t j, std::size_t count);

}  // namespace linconvex
