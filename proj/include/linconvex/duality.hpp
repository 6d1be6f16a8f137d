#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "linconvex/families.hpp"
#include "linconvex/geometry.hpp"

namespace linconvex {

/// Samples of W whose elements miss E (E*), with the settings that produced
/// them.
struct ConjugateSet {
  Family family;
  std::vector<ParamSample> samples;
  GridSpec spec;
  std::size_t budget = 0;
  std::uint64_t seed = 0;
  std::string grid_sha;

  nlohmann::json to_json(bool include_samples = false) const;
};

/// Filters sample_params(W, budget, box(E), seed) by subspace_misses.
/// `threads` = 0 picks the hardware concurrency; the output does not depend
/// on it.
ConjugateSet conjugate(const VoxelGrid& e, const Family& w, std::size_t budget,
                       std::uint64_t seed, unsigned threads = 1);

/// Same filter over a caller-supplied sample list (kept in the given order).
ConjugateSet conjugate_with(const VoxelGrid& e, const Family& w,
                            std::span<const ParamSample> samples, unsigned threads = 1);

/// Box minus the union of the rasterized elements of c.
VoxelGrid double_conjugate(const ConjugateSet& c, const GridSpec& spec, unsigned threads = 1);

/// double_conjugate(conjugate(E)).
VoxelGrid hull_wrt(const VoxelGrid& e, const Family& w, std::size_t budget, std::uint64_t seed,
                   unsigned threads = 1);
VoxelGrid hull_with(const VoxelGrid& e, const Family& w, std::span<const ParamSample> samples,
                    unsigned threads = 1);

struct Verdict {
  std::string kind;  ///< "convex", "weakly_convex" or "component_of_hull"
  bool holds = true;
  std::optional<CellIndex> witness_cell;
  /// Set when the failure was found at a probe point rather than a cell.
  std::optional<Coord> witness_point;
  /// The element that certified a cell, when one was asked for.
  std::optional<ParamSample> witness_sample;
  Family family;
  std::size_t budget = 0;
  std::uint64_t seed = 0;
  std::string grid_sha;
  std::size_t cells_checked = 0;
  /// Informational extras (hull cross-check, slack counts).
  nlohmann::json extra = nlohmann::json::object();

  nlohmann::json to_json(const GridSpec& spec) const;
};

struct ConvexityOptions {
  /// Unoccupied points tested first, in order, with the point itself as the
  /// only anchor. A failure there becomes the witness (cell containing it).
  std::vector<Coord> probes;
  /// Also compare against hull_wrt(E) and report the number of extra cells.
  bool hull_cross_check = false;
};

/// True iff some element through a point of the closed cube of `cell` misses
/// E. Anchors are the center and the inset corners; candidates are visited
/// in spread order. Writes the certifying element to `found`.
bool complement_cell_covered(const VoxelGrid& e, const Family& w, const CellIndex& cell,
                             std::size_t budget, std::uint64_t seed,
                             ParamSample* found = nullptr);

/// True iff some element through x misses E. x must lie in the box.
bool complement_point_covered(const VoxelGrid& e, const Family& w, const Coord& x,
                              std::size_t budget, std::uint64_t seed,
                              ParamSample* found = nullptr);

/// Convex iff every probe and every unoccupied cell is covered. Failure witness: the first
/// uncovered cell (probes first, then linear order).
Verdict is_convex_wrt(const VoxelGrid& e, const Family& w, std::size_t budget, std::uint64_t seed,
                      const ConvexityOptions& opts = {});

/// D minus boundary_cells(D).
VoxelGrid interior_cells(const VoxelGrid& d, BoxFaces faces = BoxFaces::Exterior);

/// True iff an element through a point of the cube of `cell` (center,
/// inset corners, face centers) misses `interior`.
bool boundary_cell_supported(const VoxelGrid& interior, const Family& w, const CellIndex& cell,
                             std::size_t budget, std::uint64_t seed,
                             ParamSample* found = nullptr);

/// Every boundary cell supported. Throws EmptyGrid on an empty D.
Verdict is_weakly_convex(const VoxelGrid& d, const Family& w, std::size_t budget,
                         std::uint64_t seed, BoxFaces faces = BoxFaces::Exterior);

/// Face-connected component of `g` containing `seed_cell` (linear index).
VoxelGrid component_containing(const VoxelGrid& g, std::size_t seed_cell);

/// The component of hull_wrt(D) containing D equals D up to one cell
/// (Chebyshev). Throws NotConnected when D is not face-connected and
/// EmptyGrid when D is empty.
Verdict component_of_hull(const VoxelGrid& d, const Family& w, std::size_t budget,
                          std::uint64_t seed, unsigned threads = 1);

}  // namespace linconvex
