#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "linconvex/geometry.hpp"

namespace linconvex {

/// Elementary cubes of a cell set, in Khalimsky coordinates: cell i spans
/// coordinates 2i..2i+2 and a cube is a point k with k_a odd exactly on the
/// axes it extends along. Cubes are stored per dimension as sorted linear
/// codes over the (2 res + 1)^n lattice.
class CubicalComplex {
 public:
  static constexpr std::size_t kMaxCells = 2'000'000;

  CubicalComplex() = default;
  /// Raw constructor; `cubes[k]` must hold codes of k-dimensional cubes.
  /// Codes are sorted and deduplicated; face closure is not checked here.
  CubicalComplex(int dim, const CellIndex& res, std::array<std::vector<std::uint64_t>, kMaxDim + 1> cubes);

  int dim() const { return dim_; }
  const CellIndex& res() const { return res_; }
  std::size_t count(int k) const { return cubes_[k].size(); }
  std::size_t total() const;
  const std::vector<std::uint64_t>& cubes(int k) const { return cubes_[k]; }
  long long euler_characteristic() const;

  std::uint64_t encode(const CellIndex& k) const;
  CellIndex decode(std::uint64_t code) const;
  int cube_dim(std::uint64_t code) const;
  /// Index of `code` among the cubes of its dimension, or -1.
  long long find(int k, std::uint64_t code) const;
  /// Codes of the 2k facets of a k-cube.
  std::vector<std::uint64_t> facets(std::uint64_t code) const;

  bool is_closed() const;

 private:
  int dim_ = 0;
  CellIndex res_{};
  std::array<std::uint64_t, kMaxDim> stride_{};
  std::array<std::vector<std::uint64_t>, kMaxDim + 1> cubes_;
};

/// Closed elementary cubes of the given cells with all their faces.
CubicalComplex build_complex(const GridSpec& spec, const std::vector<CellIndex>& cells);
CubicalComplex build_complex(const VoxelGrid& g);

struct BettiVector {
  std::vector<std::size_t> b;

  bool operator==(const BettiVector&) const = default;
  /// "(1,2,1)" using the first `len` entries (all when len < 0).
  std::string str(int len = -1) const;
};

struct Homology {
  BettiVector betti;
  /// rank of the boundary map from k-cubes to (k-1)-cubes; rank[0] = 0.
  std::array<std::size_t, kMaxDim + 1> rank{};
  std::array<std::size_t, kMaxDim + 1> cells{};
};

/// Mod-2 homology by sparse column reduction of the boundary maps, top
/// dimension first with clearing. Throws NotClosed when a facet is missing
/// and InvalidArgument above kMaxCells.
Homology homology(const CubicalComplex& k);
BettiVector betti_numbers(const CubicalComplex& k);

enum class Connectivity {
  Vertex,  ///< closed cubes share at least a vertex (matches b0)
  Face,    ///< cubes share an (n-1)-face
};

/// Component label per cell (-1 for unoccupied), labels 0.. in linear order
/// of first appearance. Returns the count.
std::size_t label_components(const VoxelGrid& g, Connectivity c, std::vector<int>* labels = nullptr);
std::size_t connected_components(const VoxelGrid& g, Connectivity c = Connectivity::Vertex);

enum class SphereClass { Sphere, TorusLike, Other };
std::string to_string(SphereClass c);

struct SphereResult {
  SphereClass cls = SphereClass::Other;
  BettiVector betti;
  std::size_t boundary_cells = 0;
  double seconds = 0;
};

/// (1, 0, ..., 0, 1, 0) for an n-dimensional set is a sphere; (1, 2, 1, 0) in
/// 3D is torus-like.
SphereClass classify(const BettiVector& b, int n);

/// Betti numbers of the complex of boundary_cells(d, faces). Throws EmptyGrid
/// on an empty set and NotConnected when d is not face-connected.
SphereResult sphere_test(const VoxelGrid& d, BoxFaces faces = BoxFaces::Exterior);

}  // namespace linconvex
