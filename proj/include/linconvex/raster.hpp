#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "linconvex/geometry.hpp"

namespace linconvex {

/// True iff the flat meets the closed box [lo - eps, hi + eps]. Decided by
/// Fourier-Motzkin elimination over the flat's own parameters.
bool flat_meets_box(const AffineSubspace& s, const Coord& lo, const Coord& hi, double eps);

/// True iff the closed cube of `cell` has a point on `s` (tolerance
/// spec.eps()). Generic feasibility solve; rasterize_subspace must agree.
bool subspace_intersects_cell(const AffineSubspace& s, const GridSpec& spec,
                              const CellIndex& cell);

/// Same predicate as subspace_intersects_cell, with closed-form tests for
/// points, lines and hyperplanes.
bool cell_hit(const AffineSubspace& s, const GridSpec& spec, const CellIndex& cell);

/// Calls `visit(linear_index)` for every cell whose closed cube meets `s`;
/// stops early when `visit` returns false. Returns false iff stopped.
/// Each cell is visited once. When `near` is given, line walks start at the
/// layer of that cell and move outwards.
bool for_each_cell_hit(const AffineSubspace& s, const GridSpec& spec,
                       const std::function<bool(std::size_t)>& visit,
                       const std::optional<CellIndex>& near = std::nullopt);

/// Cells met by `s`, sorted by linear index.
std::vector<CellIndex> rasterize_subspace(const AffineSubspace& s, const GridSpec& spec);
std::vector<std::size_t> rasterize_linear(const AffineSubspace& s, const GridSpec& spec);

/// True iff no occupied cell of `e` is met by `s`.
bool subspace_misses(const VoxelGrid& e, const AffineSubspace& s);

/// subspace_misses, checking the neighbourhood of `anchor` first. Same
/// result, faster when the flat passes close to occupied cells there.
bool subspace_misses_near(const VoxelGrid& e, const AffineSubspace& s, const CellIndex& anchor);

}  // namespace linconvex
