#include "linconvex/scenes.hpp"

#include <cmath>

#include "linconvex/topology.hpp"

namespace linconvex {

namespace {

constexpr double kTol = 1e-12;

bool gt(double a, double b) { return a > b + kTol; }   // strict a > b
bool ge(double a, double b) { return a >= b - kTol; }  // a >= b

double param(const SceneSpec& s, const std::string& key, double fallback) {
  auto it = s.params.find(key);
  return it == s.params.end() ? fallback : it->second;
}

}  // namespace

std::vector<std::string> scene_names() {
  return {"fan",      "fan_union",      "square_annulus", "hyperbola_shell",   "ball",
          "ellipsoid", "slicewise_blob", "strip_standin",  "nonregular_standin",
          "pencil_frustum"};
}

SceneInfo scene_info(const std::string& name) {
  SceneInfo i;
  i.name = name;
  if (name == "fan") {
    i = {name, 2, Openness::Closed, false, false, "x >= 0, -n x <= y <= n x", {}};
  } else if (name == "fan_union") {
    i = {name, 2, Openness::Closed, false, false, "union over n of {x >= 0, -n x <= y <= n x}",
         {Coord{0, 1, 0, 0}}};
  } else if (name == "square_annulus") {
    i = {name, 3, Openness::Open, true, false, "1 < |x1| + |x3| < 3, 0 < x2 < 1", {}};
  } else if (name == "hyperbola_shell") {
    i = {name, 3, Openness::Open, false, false, "x1^2 - x2^2 (1 - x3^2) + x3^2 - 1 > 0", {}};
  } else if (name == "ball") {
    i = {name, 3, Openness::Closed, true, false, "|x - c| <= r", {}};
  } else if (name == "ellipsoid") {
    i = {name, 3, Openness::Closed, true, false, "(x1/a)^2 + (x2/b)^2 + (x3/c)^2 <= 1", {}};
  } else if (name == "slicewise_blob") {
    i = {name, 3, Openness::Open, true, false,
         "(x1 - s sin(2 x3))^2 + x2^2 < R^2 (1 - x3^2 / H^2)", {}};
  } else if (name == "strip_standin") {
    i = {name, 2, Openness::Open, false, true, "x1 x2 > 1", {}};
  } else if (name == "nonregular_standin") {
    i = {name, 2, Openness::Open, true, true,
         "0 < |x1| < 2, |x2| < 0.6 |x1| (two open triangles meeting at the origin)", {}};
  } else if (name == "pencil_frustum") {
    i = {name, 3, Openness::Closed, true, false,
         "x1 > 0, a1 <= x2/x1 <= b1, a2 <= x3/x1 <= b2, a3 <= 1/x1 <= b3", {}};
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown scene '" + name + "'");
  }
  return i;
}

SceneSpec default_scene(const std::string& name, int res) {
  SceneInfo info = scene_info(name);
  SceneSpec s;
  s.name = name;
  int r = 64;
  if (name == "fan" || name == "fan_union") {
    // Odd resolution puts a cell center on the origin.
    s.box = BoundingBox::cube(2, -4, 4);
    r = 65;
    if (name == "fan") s.params["n"] = 1;
  } else if (name == "square_annulus") {
    s.box = BoundingBox::cube(3, -4, 4);
    r = 96;
  } else if (name == "hyperbola_shell") {
    s.box = BoundingBox::cube(3, -3, 3);
    r = 96;
  } else if (name == "ball") {
    s.box = BoundingBox::cube(3, -1, 1);
    s.params = {{"r", 0.8}, {"c1", 0}, {"c2", 0}, {"c3", 0}};
    r = 48;
  } else if (name == "ellipsoid") {
    s.box = BoundingBox::cube(3, -1, 1);
    s.params = {{"a", 0.9}, {"b", 0.6}, {"c", 0.4}};
    r = 48;
  } else if (name == "slicewise_blob") {
    s.box = BoundingBox::cube(3, -1.25, 1.25);
    s.params = {{"R", 0.8}, {"H", 0.9}, {"s", 0.25}};
    r = 48;
  } else if (name == "pencil_frustum") {
    // Image of the box [-0.25, 0.25]^2 x [0.5, 0.7] under x -> (x2, x3, 1) / x1.
    s.box = BoundingBox(3, {1.3, -0.6, -0.6, 0}, {2.1, 0.6, 0.6, 0});
    s.params = {{"a1", -0.25}, {"b1", 0.25}, {"a2", -0.25}, {"b2", 0.25}, {"a3", 0.5}, {"b3", 0.7}};
  } else if (name == "strip_standin") {
    s.box = BoundingBox::cube(2, -4, 4);
  } else if (name == "nonregular_standin") {
    s.box = BoundingBox::cube(2, -2.5, 2.5);
  }
  if (res > 0) r = res;
  for (int a = 0; a < info.dim; ++a) s.res[a] = r;
  return s;
}

bool scene_contains(const SceneSpec& s, const Coord& x) {
  const std::string& name = s.name;
  if (name == "fan") {
    double n = param(s, "n", 1);
    return ge(x[0], 0) && ge(n * x[0], std::abs(x[1]));
  }
  if (name == "fan_union") {
    // Every D_n contains the origin; their union is {x > 0} plus the origin.
    bool origin = std::abs(x[0]) <= kTol && std::abs(x[1]) <= kTol;
    return gt(x[0], 0) || origin;
  }
  if (name == "square_annulus") {
    double t = std::abs(x[0]) + std::abs(x[2]);
    return gt(t, 1) && gt(3, t) && gt(x[1], 0) && gt(1, x[1]);
  }
  if (name == "hyperbola_shell") return gt(hyperbola_f(x), 0);
  if (name == "ball") {
    double r = param(s, "r", 0.8);
    double d2 = 0;
    for (int a = 0; a < s.box.dim(); ++a) {
      double c = param(s, "c" + std::to_string(a + 1), 0);
      d2 += (x[a] - c) * (x[a] - c);
    }
    return ge(r * r, d2);
  }
  if (name == "ellipsoid") {
    double a = param(s, "a", 0.9), b = param(s, "b", 0.6), c = param(s, "c", 0.4);
    double q = (x[0] / a) * (x[0] / a) + (x[1] / b) * (x[1] / b) + (x[2] / c) * (x[2] / c);
    return ge(1, q);
  }
  if (name == "slicewise_blob") {
    double R = param(s, "R", 0.8), H = param(s, "H", 0.9), sh = param(s, "s", 0.25);
    double u = x[0] - sh * std::sin(2 * x[2]);
    return gt(R * R * (1 - x[2] * x[2] / (H * H)), u * u + x[1] * x[1]);
  }
  if (name == "pencil_frustum") {
    if (!gt(x[0], 0)) return false;
    double y1 = x[1] / x[0], y2 = x[2] / x[0], y3 = 1 / x[0];
    return ge(y1, param(s, "a1", -0.25)) && ge(param(s, "b1", 0.25), y1) &&
           ge(y2, param(s, "a2", -0.25)) && ge(param(s, "b2", 0.25), y2) &&
           ge(y3, param(s, "a3", 0.5)) && ge(param(s, "b3", 0.7), y3);
  }
  if (name == "strip_standin") return gt(x[0] * x[1], 1);
  if (name == "nonregular_standin") {
    double ax = std::abs(x[0]);
    return gt(ax, 0) && gt(2, ax) && gt(0.6 * ax, std::abs(x[1]));
  }
  throw Error(ErrorCode::InvalidArgument, "unknown scene '" + name + "'");
}

VoxelGrid scene(const SceneSpec& s) {
  SceneInfo info = scene_info(s.name);
  if (s.box.dim() != info.dim && !(s.name == "ball" && s.box.dim() >= 2))
    throw Error(ErrorCode::DimMismatch, s.name + " is a " + std::to_string(info.dim) + "D scene");
  GridSpec spec(s.box, s.res);
  VoxelGrid g(spec);
  for (std::size_t i = 0; i < spec.cell_count(); ++i)
    if (scene_contains(s, spec.cell_center(spec.unlinear(i)))) g.set(i);
  if (info.bounded) {
    g.for_each_occupied([&](std::size_t i) {
      CellIndex c = spec.unlinear(i);
      for (int a = 0; a < spec.dim(); ++a)
        if (c[a] == 0 || c[a] == spec.res()[a] - 1)
          throw Error(ErrorCode::BoxTooSmall, s.name + " reaches the edge of the box");
    });
  }
  return g;
}

VoxelGrid slice(const VoxelGrid& g, int axis, int index) {
  const GridSpec& spec = g.spec();
  const int n = spec.dim();
  if (n < 3) throw Error(ErrorCode::DimMismatch, "slicing needs a grid of dimension >= 3");
  if (axis < 0 || axis >= n) throw Error(ErrorCode::IndexOutOfRange, "slice axis out of range");
  if (index < 0 || index >= spec.res()[axis])
    throw Error(ErrorCode::IndexOutOfRange, "slice index out of range");
  Coord lo{}, hi{};
  CellIndex res{};
  for (int a = 0, b = 0; a < n; ++a) {
    if (a == axis) continue;
    lo[b] = spec.box().lo()[a];
    hi[b] = spec.box().hi()[a];
    res[b] = spec.res()[a];
    ++b;
  }
  GridSpec out_spec(BoundingBox(n - 1, lo, hi), res);
  VoxelGrid out(out_spec);
  for (std::size_t i = 0; i < out_spec.cell_count(); ++i) {
    CellIndex c = out_spec.unlinear(i), full{};
    for (int a = 0, b = 0; a < n; ++a) full[a] = a == axis ? index : c[b++];
    if (g.test(full)) out.set(i);
  }
  return out;
}

double hyperbola_f(const Coord& x) {
  return x[0] * x[0] - x[1] * x[1] * (1 - x[2] * x[2]) + x[2] * x[2] - 1;
}

Coord hyperbola_gradient(const Coord& x) {
  return {2 * x[0], -2 * x[1] * (1 - x[2] * x[2]), 2 * x[2] * (1 + x[1] * x[1]), 0};
}

double gradient_check(const VoxelGrid& g) {
  if (g.dim() != 3) throw Error(ErrorCode::DimMismatch, "gradient check is for the 3D shell");
  VoxelGrid band = boundary_cells(g, BoxFaces::Ignore);
  if (band.empty()) throw Error(ErrorCode::EmptyGrid, "no boundary band");
  double best = INFINITY;
  band.for_each_occupied([&](std::size_t i) {
    Coord x = g.spec().cell_center(g.spec().unlinear(i));
    best = std::min(best, norm(hyperbola_gradient(x), 3));
  });
  return best;
}

std::vector<SliceReport> slice_convexity_report(const VoxelGrid& g, int axis,
                                                const Family& family_in_slice, std::size_t budget,
                                                std::uint64_t seed, bool per_component, int first,
                                                int last, const ConvexityOptions& opts) {
  const GridSpec& spec = g.spec();
  std::vector<SliceReport> out;
  std::vector<VoxelGrid> layers;
  std::vector<int> indices;
  if (spec.dim() == 2) {
    layers.push_back(g);
    indices.push_back(0);
  } else {
    if (axis < 0 || axis >= spec.dim()) throw Error(ErrorCode::IndexOutOfRange, "slice axis out of range");
    if (last < 0 || last >= spec.res()[axis]) last = spec.res()[axis] - 1;
    for (int j = std::max(first, 0); j <= last; ++j) {
      layers.push_back(slice(g, axis, j));
      indices.push_back(j);
    }
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const VoxelGrid& layer = layers[l];
    if (layer.empty()) continue;
    SliceReport r;
    r.index = indices[l];
    r.coord = spec.dim() == 2 ? 0 : spec.center_coord(axis, r.index);
    std::vector<int> labels;
    r.components = label_components(layer, Connectivity::Face, &labels);
    if (per_component) {
      for (std::size_t c = 0; c < r.components; ++c) {
        VoxelGrid part(layer.spec());
        for (std::size_t i = 0; i < labels.size(); ++i)
          if (labels[i] == int(c)) part.set(i);
        r.verdicts.push_back(is_convex_wrt(part, family_in_slice, budget, seed, opts));
      }
    } else {
      r.verdicts.push_back(is_convex_wrt(layer, family_in_slice, budget, seed, opts));
    }
    for (const auto& v : r.verdicts) r.holds = r.holds && v.holds;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace linconvex
