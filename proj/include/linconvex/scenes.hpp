#pragma once

#include <map>
#include <string>
#include <vector>

#include "linconvex/duality.hpp"
#include "linconvex/geometry.hpp"

namespace linconvex {

enum class Openness { Open, Closed };

/// Static facts about a named scene.
struct SceneInfo {
  std::string name;
  int dim = 0;
  Openness openness = Openness::Closed;
  bool bounded = true;
  bool standin = false;
  std::string formula;
  /// Points of interest for convexity checks (see ConvexityOptions::probes).
  std::vector<Coord> probes;
};

struct SceneSpec {
  std::string name;
  std::map<std::string, double> params;
  BoundingBox box;
  CellIndex res{};
};

/// fan, fan_union, square_annulus, hyperbola_shell, ball, ellipsoid,
/// slicewise_blob, strip_standin, nonregular_standin.
std::vector<std::string> scene_names();
SceneInfo scene_info(const std::string& name);

/// Default box and parameters for `name`, `res` cells per axis (0 keeps the
/// scene default).
SceneSpec default_scene(const std::string& name, int res = 0);

/// The defining predicate at x with the spec's parameters. Boundary
/// tolerance 1e-12: strict inequalities need a margin above it, non-strict
/// ones accept it.
bool scene_contains(const SceneSpec& spec, const Coord& x);

/// Cell occupied iff its center satisfies the predicate. Throws BoxTooSmall
/// when a bounded scene reaches the outer layer of the box.
VoxelGrid scene(const SceneSpec& spec);

/// (n-1)-grid of layer `index` along `axis`. Throws IndexOutOfRange.
VoxelGrid slice(const VoxelGrid& g, int axis, int index);

/// f = x1^2 - x2^2 (1 - x3^2) + x3^2 - 1 and its gradient.
double hyperbola_f(const Coord& x);
Coord hyperbola_gradient(const Coord& x);

/// Minimum |grad f| over the centers of boundary_cells(g, Ignore).
double gradient_check(const VoxelGrid& g);

struct SliceReport {
  int index = 0;
  double coord = 0;
  std::size_t components = 0;
  /// One verdict per face-connected component, in label order.
  std::vector<Verdict> verdicts;
  bool holds = true;
};

/// Runs is_convex_wrt on every nonempty layer along `axis`, one component at
/// a time when `per_component` (otherwise on the whole layer).
std::vector<SliceReport> slice_convexity_report(const VoxelGrid& g, int axis,
                                                const Family& family_in_slice, std::size_t budget,
                                                std::uint64_t seed, bool per_component = true,
                                                int first = 0, int last = -1,
                                                const ConvexityOptions& opts = {});

}  // namespace linconvex
