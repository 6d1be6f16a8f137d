#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "linconvex/duality.hpp"
#include "linconvex/error.hpp"
#include "linconvex/props.hpp"
#include "linconvex/raster.hpp"
#include "linconvex/scenes.hpp"

using namespace linconvex;

namespace {

GridSpec grid2(double lo, double hi, int r) { return GridSpec(BoundingBox::cube(2, lo, hi), {r, r, 0, 0}); }

VoxelGrid box_grid(const GridSpec& s, const Coord& lo, const Coord& hi) {
  VoxelGrid g(s);
  for (std::size_t i = 0; i < s.cell_count(); ++i) {
    Coord c = s.cell_center(s.unlinear(i));
    bool in = true;
    for (int a = 0; a < s.dim(); ++a) in &= c[a] >= lo[a] && c[a] <= hi[a];
    if (in) g.set(i);
  }
  return g;
}

// Classical convex hull of the occupied cell cubes (monotone chain over
// cube corners), then cells whose center lies in it.
VoxelGrid classical_hull_2d(const VoxelGrid& e) {
  const GridSpec& s = e.spec();
  using P = std::pair<double, double>;
  std::vector<P> pts;
  for (const auto& c : e.occupied_cells()) {
    Coord lo, hi;
    s.cell_bounds(c, lo, hi);
    for (double x : {lo[0], hi[0]})
      for (double y : {lo[1], hi[1]}) pts.emplace_back(x, y);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  auto cross = [](P o, P a, P b) {
    return (a.first - o.first) * (b.second - o.second) - (a.second - o.second) * (b.first - o.first);
  };
  std::vector<P> h(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i - 1]) <= 0) --k;
    h[k++] = pts[i - 1];
  }
  h.resize(k - 1);
  VoxelGrid out(s);
  for (std::size_t i = 0; i < s.cell_count(); ++i) {
    Coord c = s.cell_center(s.unlinear(i));
    bool in = true;
    for (std::size_t j = 0; j < h.size() && in; ++j)
      in = cross(h[j], h[(j + 1) % h.size()], {c[0], c[1]}) >= -1e-12;
    if (in) out.set(i);
  }
  return out;
}

using Rect = std::array<double, 4>;  // x0, y0, x1, y1

// Bounding rectangle of the occupied cubes with row index in [r0, r1).
Rect bounding_rect(const VoxelGrid& e, int r0, int r1) {
  Rect r{1e300, 1e300, -1e300, -1e300};
  for (const auto& c : e.occupied_cells()) {
    if (c[0] < r0 || c[0] >= r1) continue;
    Coord lo, hi;
    e.spec().cell_bounds(c, lo, hi);
    r = {std::min(r[0], lo[0]), std::min(r[1], lo[1]), std::max(r[2], hi[0]), std::max(r[3], hi[1])};
  }
  return r;
}

// True iff every line through p meets one of the closed rectangles: the
// direction arcs (mod pi) of the rectangles seen from p cover the circle.
bool every_line_hits(double px, double py, const std::vector<Rect>& rects) {
  std::vector<std::pair<double, double>> arcs;
  for (const auto& r : rects) {
    if (r[0] > r[2]) continue;
    if (px >= r[0] && px <= r[2] && py >= r[1] && py <= r[3]) return true;
    double ref = std::atan2(r[1] - py, r[0] - px), mn = 0, mx = 0;
    for (double x : {r[0], r[2]})
      for (double y : {r[1], r[3]}) {
        double d = std::remainder(std::atan2(y - py, x - px) - ref, 2 * M_PI);
        mn = std::min(mn, d);
        mx = std::max(mx, d);
      }
    double lo = std::fmod(ref + mn + 4 * M_PI, M_PI), len = mx - mn;
    if (lo + len <= M_PI) {
      arcs.emplace_back(lo, lo + len);
    } else {
      arcs.emplace_back(lo, M_PI);
      arcs.emplace_back(0, lo + len - M_PI);
    }
  }
  std::sort(arcs.begin(), arcs.end());
  double reach = 0;
  for (const auto& [a, b] : arcs) {
    if (a > reach + 1e-12) return false;
    reach = std::max(reach, b);
  }
  return reach >= M_PI - 1e-12;
}

VoxelGrid line_cover_oracle(const VoxelGrid& e, const std::vector<Rect>& rects) {
  VoxelGrid out(e.spec());
  for (std::size_t i = 0; i < e.spec().cell_count(); ++i) {
    Coord c = e.spec().cell_center(e.spec().unlinear(i));
    if (every_line_hits(c[0], c[1], rects)) out.set(i);
  }
  return out;
}

bool within_cells(const VoxelGrid& a, const VoxelGrid& b, int k) {
  return is_subset(a, dilate(b, k, true)) && is_subset(b, dilate(a, k, true));
}

}  // namespace

TEST(Conjugate, EmptyKeepsEverySample) {
  GridSpec s = grid2(-1, 1, 16);
  Family w = Family::all_hyperplanes(2);
  ConjugateSet c = conjugate(VoxelGrid(s), w, 500, 1);
  EXPECT_EQ(c.samples, sample_params(w, 500, s.box(), 1));
}

TEST(Conjugate, FullBoxKeepsNothing) {
  GridSpec s = grid2(-1, 1, 16);
  EXPECT_TRUE(conjugate(complement(VoxelGrid(s)), Family::all_hyperplanes(2), 500, 1).samples.empty());
}

TEST(Conjugate, FanMatchesPerSampleOracle) {
  SceneSpec spec = default_scene("fan", 33);
  spec.params["n"] = 2;
  VoxelGrid d = scene(spec);
  Family w = Family::all_hyperplanes(2);
  auto samples = sample_params(w, 2000, d.spec().box(), 3);
  ConjugateSet c = conjugate_with(d, w, samples);
  std::vector<ParamSample> oracle;
  for (const auto& p : samples) {
    bool hit = false;
    for (auto i : rasterize_linear(w.element(p), d.spec())) hit |= d.test(i);
    if (!hit) oracle.push_back(p);
  }
  EXPECT_EQ(c.samples, oracle);
  EXPECT_FALSE(oracle.empty());
}

TEST(Conjugate, ParallelRunIsBitIdentical) {
  VoxelGrid d = scene(default_scene("ball", 24));
  Family w = Family::all_hyperplanes(3);
  ConjugateSet seq = conjugate(d, w, 4000, 9, 1);
  for (unsigned t : {2u, 3u, 8u, 0u}) {
    ConjugateSet par = conjugate(d, w, 4000, 9, t);
    EXPECT_EQ(par.samples, seq.samples);
    EXPECT_EQ(double_conjugate(par, d.spec(), t), double_conjugate(seq, d.spec(), 1));
  }
}

TEST(DoubleConjugate, EmptyConjugateIsFullBox) {
  GridSpec s = grid2(-1, 1, 8);
  ConjugateSet c;
  c.family = Family::all_hyperplanes(2);
  c.spec = s;
  EXPECT_EQ(double_conjugate(c, s), complement(VoxelGrid(s)));
}

TEST(Hull, SquareMatchesClassicalHull) {
  GridSpec s = grid2(-1, 1, 32);
  VoxelGrid e = box_grid(s, {-0.4, -0.3, 0, 0}, {0.5, 0.2, 0, 0});
  VoxelGrid h = hull_wrt(e, Family::all_hyperplanes(2), 10000, 42);
  EXPECT_TRUE(is_subset(e, h));
  EXPECT_TRUE(within_cells(h, classical_hull_2d(e), 1));
}

TEST(Hull, TwoSquaresMatchLineCoverOracle) {
  GridSpec s = grid2(-1, 1, 32);
  // Far apart: a line through any gap point misses both squares.
  VoxelGrid apart = unite(box_grid(s, {-0.8, -0.8, 0, 0}, {-0.4, -0.5, 0, 0}),
                          box_grid(s, {0.3, 0.2, 0, 0}, {0.7, 0.75, 0, 0}));
  // Overlapping into an L: the inner corner is partly enclosed.
  VoxelGrid ell = unite(box_grid(s, {-0.8, -0.8, 0, 0}, {-0.1, 0.8, 0, 0}),
                        box_grid(s, {-0.8, -0.8, 0, 0}, {0.8, -0.1, 0, 0}));
  Family w = Family::all_hyperplanes(2);
  for (const VoxelGrid* e : {&apart, &ell}) {
    VoxelGrid h = hull_wrt(*e, w, 10000, 42);
    VoxelGrid oracle = line_cover_oracle(*e, {bounding_rect(*e, 0, s.res()[0] / 2),
                                              bounding_rect(*e, s.res()[0] / 2, s.res()[0])});
    EXPECT_TRUE(is_subset(*e, h));
    EXPECT_TRUE(within_cells(h, oracle, 1));
  }
  EXPECT_TRUE(within_cells(hull_wrt(apart, w, 10000, 42), apart, 1));
  VoxelGrid hl = hull_wrt(ell, w, 10000, 42);
  EXPECT_GT(hl.count(), ell.count());
  // Strictly between E and its classical convex hull.
  EXPECT_LT(hl.count(), classical_hull_2d(ell).count());
}

TEST(Hull, FanUnionGrows) {
  VoxelGrid d = scene(default_scene("fan_union", 33));
  VoxelGrid h = hull_wrt(d, Family::all_hyperplanes(2), 4000, 42);
  EXPECT_TRUE(is_subset(d, h));
  EXPECT_GT(h.count(), d.count());
}

TEST(Hull, ConvexSceneIsFixedUpToSlack) {
  VoxelGrid d = scene(default_scene("ball", 24));
  VoxelGrid h = hull_wrt(d, Family::all_hyperplanes(3), 10000, 42);
  EXPECT_TRUE(is_subset(d, h));
  EXPECT_TRUE(is_subset(h, dilate(d, 1, true)));
}

TEST(Convexity, FansHoldUnionFails) {
  Family w = Family::all_hyperplanes(2);
  for (int n : {1, 2, 4, 8}) {
    SceneSpec spec = default_scene("fan");
    spec.params["n"] = n;
    EXPECT_TRUE(is_convex_wrt(scene(spec), w, 10000, 42).holds) << "n=" << n;
  }
  SceneSpec u = default_scene("fan_union");
  VoxelGrid d = scene(u);
  ConvexityOptions opts;
  opts.probes = scene_info("fan_union").probes;
  Verdict v = is_convex_wrt(d, w, 10000, 42, opts);
  ASSERT_FALSE(v.holds);
  ASSERT_TRUE(v.witness_cell);
  EXPECT_EQ(*v.witness_cell, *d.spec().cell_of(Coord{0, 1, 0, 0}));
}

TEST(Convexity, AxisBoxHolds) {
  GridSpec s(BoundingBox::cube(3, -1, 1), {12, 12, 12, 0});
  VoxelGrid e = box_grid(s, {-0.5, -0.2, -0.6, 0}, {0.4, 0.6, 0.1, 0});
  EXPECT_TRUE(is_convex_wrt(e, Family::all_hyperplanes(3), 2000, 1).holds);
  EXPECT_TRUE(is_convex_wrt(e, Family::parallel_lines_3d(), 2000, 1).holds);
}

TEST(Convexity, VerdictJsonCarriesProvenance) {
  VoxelGrid d = scene(default_scene("fan_union", 33));
  ConvexityOptions opts;
  opts.probes = {Coord{0, 1, 0, 0}};
  Verdict v = is_convex_wrt(d, Family::all_hyperplanes(2), 1000, 7, opts);
  auto j = v.to_json(d.spec());
  EXPECT_EQ(j["status"], "fails");
  EXPECT_EQ(j["budget"], 1000);
  EXPECT_EQ(j["seed"], 7);
  EXPECT_EQ(j["family"]["variant"], "AllHyperplanes");
  EXPECT_EQ(j["grid_sha"].get<std::string>().size(), 64u);
}

TEST(WeakConvexity, BallHolds) {
  VoxelGrid d = scene(default_scene("ball", 24));
  EXPECT_TRUE(is_weakly_convex(d, Family::all_hyperplanes(3), 2000, 1).holds);
}

TEST(WeakConvexity, BallWithCavityFailsOnCavity) {
  SceneSpec spec = default_scene("ball", 32);
  VoxelGrid outer = scene(spec);
  spec.params["r"] = 0.41;
  VoxelGrid d = subtract(outer, scene(spec));
  Verdict v = is_weakly_convex(d, Family::all_hyperplanes(3), 2000, 1);
  ASSERT_FALSE(v.holds);
  ASSERT_TRUE(v.witness_cell);
  // The witness lies on the inner shell, and every sampled plane through its
  // center crosses the interior of D.
  Coord c = d.spec().cell_center(*v.witness_cell);
  EXPECT_LT(norm(c, 3), 0.6);
  VoxelGrid inner = interior_cells(d);
  for (const auto& p : elements_through(Family::all_hyperplanes(3), c, 500, 3))
    EXPECT_FALSE(subspace_misses(inner, Family::all_hyperplanes(3).element(p)));
}

TEST(WeakConvexity, EmptyRejected) {
  try {
    is_weakly_convex(VoxelGrid(grid2(0, 1, 4)), Family::all_hyperplanes(2), 10, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyGrid);
  }
}

TEST(ComponentOfHull, ConvexBodyIsItsOwnComponent) {
  VoxelGrid d = scene(default_scene("ball", 20));
  Verdict v = component_of_hull(d, Family::all_hyperplanes(3), 4000, 2);
  EXPECT_TRUE(v.holds);
}

TEST(ComponentOfHull, EachFanInsideItsHull) {
  Family w = Family::all_hyperplanes(2);
  for (int n : {1, 3}) {
    SceneSpec spec = default_scene("fan", 33);
    spec.params["n"] = n;
    spec.box = BoundingBox(2, {-1, -4, 0, 0}, {3, 4, 0, 0});
    // Bounded fan piece: clip x <= 2.5.
    VoxelGrid d = intersect(scene(spec), box_grid(GridSpec(spec.box, spec.res), {-1, -4, 0, 0},
                                                  {2.5, 4, 0, 0}));
    d = subtract(d, boundary_cells(complement(VoxelGrid(d.spec()))));
    EXPECT_TRUE(component_of_hull(d, w, 4000, 1).holds) << "n=" << n;
  }
}

TEST(ComponentOfHull, DisconnectedRejected) {
  GridSpec s = grid2(0, 1, 8);
  VoxelGrid g(s);
  g.set({1, 1, 0, 0});
  g.set({5, 5, 0, 0});
  try {
    component_of_hull(g, Family::all_hyperplanes(2), 100, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotConnected);
  }
}

TEST(Identities, RandomGridsUnderSharedSamples) {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 100; ++t) {
    int n = t % 2 ? 3 : 2;
    int r = n == 2 ? 14 : 8;
    GridSpec s(BoundingBox::cube(n, -1, 1), {r, r, n == 3 ? r : 0, 0});
    Family w = Family::all_hyperplanes(n);
    auto samples = sample_params(w, 1500, s.box(), t);
    VoxelGrid e = random_grid(s, rng), f = random_grid(s, rng);
    VoxelGrid h = hull_with(e, w, samples);
    ASSERT_TRUE(is_subset(e, h));
    ASSERT_EQ(conjugate_with(h, w, samples).samples, conjugate_with(e, w, samples).samples);
    ASSERT_EQ(hull_with(h, w, samples), h);
    // Monotonicity with E1 = E n F.
    VoxelGrid e1 = intersect(e, f);
    auto ce = conjugate_with(e, w, samples).samples, ce1 = conjugate_with(e1, w, samples).samples;
    ASSERT_TRUE(std::includes(ce1.begin(), ce1.end(), ce.begin(), ce.end()));
    ASSERT_TRUE(is_subset(hull_with(e1, w, samples), h));
  }
}
