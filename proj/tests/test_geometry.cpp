#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "linconvex/error.hpp"
#include "linconvex/geometry.hpp"
#include "linconvex/raster.hpp"
#include "linconvex/scenes.hpp"
#include "linconvex/vxg.hpp"

using namespace linconvex;

namespace {

GridSpec grid2(double lo, double hi, int r) { return GridSpec(BoundingBox::cube(2, lo, hi), {r, r, 0, 0}); }
GridSpec grid3(double lo, double hi, int r) { return GridSpec(BoundingBox::cube(3, lo, hi), {r, r, r, 0}); }

VoxelGrid random_cells(const GridSpec& s, std::mt19937_64& rng, double p) {
  std::bernoulli_distribution coin(p);
  VoxelGrid g(s);
  for (std::size_t i = 0; i < s.cell_count(); ++i)
    if (coin(rng)) g.set(i);
  return g;
}

// Hit oracle for a hyperplane a.x = b: a lattice of 101^2 points per cell,
// corners included, changes sign (or touches zero) on it.
bool sampled_hyperplane_hit(const GridSpec& s, const CellIndex& c, const Coord& a, double b) {
  Coord lo, hi;
  s.cell_bounds(c, lo, hi);
  double mn = 1e300, mx = -1e300;
  for (int i = 0; i <= 100; ++i)
    for (int j = 0; j <= 100; ++j) {
      double x = lo[0] + (hi[0] - lo[0]) * i / 100.0;
      double y = lo[1] + (hi[1] - lo[1]) * j / 100.0;
      double v = a[0] * x + a[1] * y - b;
      mn = std::min(mn, v);
      mx = std::max(mx, v);
    }
  return mn <= 1e-12 && mx >= -1e-12;
}

std::vector<CellIndex> all_cells(const GridSpec& s) {
  std::vector<CellIndex> out;
  for (std::size_t i = 0; i < s.cell_count(); ++i) out.push_back(s.unlinear(i));
  return out;
}

}  // namespace

TEST(Grid, LinearOrderIsRowMajorLastAxisFastest) {
  GridSpec s = grid3(0, 1, 4);
  EXPECT_EQ(s.linear({0, 0, 1, 0}), 1u);
  EXPECT_EQ(s.linear({0, 1, 0, 0}), 4u);
  EXPECT_EQ(s.linear({1, 0, 0, 0}), 16u);
  for (std::size_t i = 0; i < s.cell_count(); ++i) EXPECT_EQ(s.linear(s.unlinear(i)), i);
}

TEST(Grid, CellCentersAndLookup) {
  GridSpec s = grid2(-1, 1, 4);
  Coord c = s.cell_center({0, 3, 0, 0});
  EXPECT_DOUBLE_EQ(c[0], -0.75);
  EXPECT_DOUBLE_EQ(c[1], 0.75);
  auto cell = s.cell_of(Coord{0.1, -0.9, 0, 0});
  ASSERT_TRUE(cell);
  EXPECT_EQ((*cell)[0], 2);
  EXPECT_EQ((*cell)[1], 0);
  EXPECT_FALSE(s.cell_of(Coord{1.5, 0, 0, 0}));
}

TEST(Grid, RejectsBadDimensions) {
  EXPECT_THROW(GridSpec(BoundingBox::cube(1, 0, 1), {4, 0, 0, 0}), Error);
  EXPECT_THROW(GridSpec(BoundingBox::cube(2, 0, 1), {4, 0, 0, 0}), Error);
}

TEST(Raster, HyperplaneThroughCubeIsHit) {
  GridSpec s(BoundingBox::cube(3, -0.5, 0.5), {1, 1, 1, 0});
  auto plane = AffineSubspace::hyperplane(3, {0, 0, 1, 0}, 0);
  EXPECT_TRUE(subspace_intersects_cell(plane, s, {0, 0, 0, 0}));
  EXPECT_TRUE(cell_hit(plane, s, {0, 0, 0, 0}));
}

TEST(Raster, LineOutsideBoxMissesEveryCell) {
  GridSpec s = grid3(0, 1, 4);
  std::array<Coord, 2> rows{Coord{0, 1, 0, 0}, Coord{0, 0, 1, 0}};
  std::array<double, 2> rhs{5, 5};
  auto line = AffineSubspace::from_equations(3, rows, rhs);
  for (const auto& c : all_cells(s)) {
    EXPECT_FALSE(subspace_intersects_cell(line, s, c));
    EXPECT_FALSE(cell_hit(line, s, c));
  }
  EXPECT_TRUE(rasterize_subspace(line, s).empty());
}

TEST(Raster, DiagonalMatchesDenseSampling) {
  GridSpec s = grid2(0, 8, 8);
  Coord a{-1, 1, 0, 0};
  auto diag = AffineSubspace::hyperplane(2, a, 0);
  auto cells = rasterize_subspace(diag, s);
  std::vector<CellIndex> oracle;
  for (const auto& c : all_cells(s))
    if (sampled_hyperplane_hit(s, c, a, 0)) oracle.push_back(c);
  EXPECT_EQ(cells, oracle);
  // The diagonal cells plus the two corner-touching neighbours per step.
  EXPECT_EQ(cells.size(), 8u + 2u * 7u);
}

TEST(Raster, RandomLinesMatchDenseSampling) {
  GridSpec s = grid2(-1, 1, 8);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 40; ++t) {
    Coord a{u(rng), u(rng), 0, 0};
    double b = 0.7 * u(rng);
    auto line = AffineSubspace::hyperplane(2, a, b);
    // The flat is normalized; evaluate the oracle on its own equation.
    Coord n = line.normals()[0];
    double off = dot(n, line.point(), 2);
    std::vector<CellIndex> oracle;
    for (const auto& c : all_cells(s))
      if (sampled_hyperplane_hit(s, c, n, off)) oracle.push_back(c);
    EXPECT_EQ(rasterize_subspace(line, s), oracle) << "trial " << t;
  }
}

TEST(Raster, PlaneInFourCubedBoxHitsOneLayer) {
  GridSpec s = grid3(-1, 1, 4);
  // x3 = 0 is a layer boundary: take a plane inside layer 2.
  auto plane = AffineSubspace::hyperplane(3, {0, 0, 1, 0}, 0.25);
  auto cells = rasterize_subspace(plane, s);
  ASSERT_EQ(cells.size(), 16u);
  for (const auto& c : cells) EXPECT_EQ(c[2], 2);
}

TEST(Raster, AxisLineThroughCenterIn2D) {
  GridSpec s = grid2(-1, 1, 4);
  auto line = AffineSubspace::hyperplane(2, {1, 0, 0, 0}, 0.1);
  EXPECT_EQ(rasterize_subspace(line, s).size(), 4u);
}

TEST(Raster, FastPathsAgreeWithFeasibilitySolve) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int n : {2, 3, 4}) {
    GridSpec s(BoundingBox::cube(n, -1, 1), {5, 5, n >= 3 ? 5 : 0, n >= 4 ? 4 : 0});
    for (int t = 0; t < 12; ++t) {
      int codim = 1 + int(rng() % (n - 1));
      std::vector<Coord> rows(codim);
      std::vector<double> rhs(codim);
      Coord p{};
      for (int a = 0; a < n; ++a) p[a] = 0.8 * u(rng);
      for (int k = 0; k < codim; ++k) {
        for (int a = 0; a < n; ++a) rows[k][a] = u(rng);
        rhs[k] = dot(rows[k], p, n);
      }
      auto flat = AffineSubspace::from_equations(n, rows, rhs);
      std::vector<CellIndex> brute;
      for (const auto& c : all_cells(s)) {
        bool slow = subspace_intersects_cell(flat, s, c);
        ASSERT_EQ(slow, cell_hit(flat, s, c)) << "n=" << n << " codim=" << codim;
        if (slow) brute.push_back(c);
      }
      EXPECT_EQ(rasterize_subspace(flat, s), brute);
    }
  }
}

TEST(Raster, CentersOnFlatAreAlwaysRasterized) {
  GridSpec s = grid3(-1, 1, 6);
  // Line through the centers of the main diagonal cells.
  std::array<Coord, 2> rows{Coord{1, -1, 0, 0}, Coord{0, 1, -1, 0}};
  std::array<double, 2> rhs{0, 0};
  auto line = AffineSubspace::from_equations(3, rows, rhs);
  auto cells = rasterize_subspace(line, s);
  int on_line = 0;
  for (const auto& c : all_cells(s)) {
    if (!line.contains(s.cell_center(c), s.eps())) continue;
    ++on_line;
    EXPECT_TRUE(std::binary_search(cells.begin(), cells.end(), c));
  }
  EXPECT_EQ(on_line, 6);
}

TEST(Raster, MissesAgreesWithRasterIntersection) {
  GridSpec s = grid3(-1, 1, 7);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 60; ++t) {
    VoxelGrid e = random_cells(s, rng, 0.03);
    auto plane = AffineSubspace::hyperplane(3, {u(rng), u(rng), u(rng), 0}, 0.5 * u(rng));
    bool meets = false;
    for (auto i : rasterize_linear(plane, s)) meets |= e.test(i);
    EXPECT_EQ(subspace_misses(e, plane), !meets);
    CellIndex anchor = s.unlinear(rng() % s.cell_count());
    EXPECT_EQ(subspace_misses_near(e, plane, anchor), !meets);
  }
}

TEST(Raster, EmptyAndFullGrids) {
  GridSpec s = grid2(-1, 1, 6);
  auto line = AffineSubspace::hyperplane(2, {1, 2, 0, 0}, 0.3);
  EXPECT_TRUE(subspace_misses(VoxelGrid(s), line));
  EXPECT_FALSE(subspace_misses(complement(VoxelGrid(s)), line));
}

TEST(Raster, VerticalLineMissesFan) {
  SceneSpec spec = default_scene("fan", 64);
  VoxelGrid d = scene(spec);
  auto line = AffineSubspace::hyperplane(2, {1, 0, 0, 0}, -0.5);
  bool oracle = true;
  for (auto i : rasterize_linear(line, d.spec())) oracle &= !d.test(i);
  EXPECT_TRUE(oracle);
  EXPECT_TRUE(subspace_misses(d, line));
}

TEST(SetAlgebra, BooleanIdentities) {
  GridSpec s = grid3(0, 1, 9);
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    VoxelGrid a = random_cells(s, rng, 0.4), b = random_cells(s, rng, 0.6);
    EXPECT_EQ(complement(complement(a)), a);
    EXPECT_TRUE(is_subset(a, unite(a, b)));
    EXPECT_EQ(complement(unite(a, b)), intersect(complement(a), complement(b)));
    EXPECT_EQ(complement(intersect(a, b)), unite(complement(a), complement(b)));
    VoxelGrid meet = intersect(a, b);
    for (std::size_t i = 0; i < s.cell_count(); ++i) ASSERT_EQ(meet.test(i), a.test(i) && b.test(i));
    EXPECT_EQ(subtract(a, b), intersect(a, complement(b)));
    EXPECT_EQ(complement(a).count(), s.cell_count() - a.count());
  }
}

TEST(SetAlgebra, GridMismatchRejected) {
  VoxelGrid a(grid2(0, 1, 4)), b(grid2(0, 1, 5));
  EXPECT_THROW(unite(a, b), Error);
  try {
    intersect(a, b);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GridMismatch);
  }
}

TEST(Boundary, FullThreeCubed) {
  GridSpec s = grid3(0, 1, 3);
  VoxelGrid full = complement(VoxelGrid(s));
  VoxelGrid b = boundary_cells(full);
  EXPECT_EQ(b.count(), 26u);
  EXPECT_FALSE(b.test({1, 1, 1, 0}));
  EXPECT_TRUE(boundary_cells(full, BoxFaces::Ignore).empty());
}

TEST(Boundary, SingleCellAndEmpty) {
  GridSpec s = grid3(0, 1, 5);
  VoxelGrid g(s);
  EXPECT_TRUE(boundary_cells(g).empty());
  g.set({2, 2, 2, 0});
  EXPECT_EQ(boundary_cells(g), g);
}

TEST(Boundary, BallMatchesNeighbourOracle) {
  GridSpec s = grid3(-1, 1, 32);
  VoxelGrid ball(s);
  auto inside = [&](const CellIndex& c) { return norm(s.cell_center(c), 3) <= 0.8; };
  for (std::size_t i = 0; i < s.cell_count(); ++i)
    if (inside(s.unlinear(i))) ball.set(i);
  VoxelGrid b = boundary_cells(ball);
  for (std::size_t i = 0; i < s.cell_count(); ++i) {
    CellIndex c = s.unlinear(i);
    bool oracle = false;
    if (inside(c)) {
      for (int a = 0; a < 3; ++a)
        for (int d : {-1, 1}) {
          CellIndex m = c;
          m[a] += d;
          oracle |= !s.contains(m) || !inside(m);
        }
    }
    ASSERT_EQ(b.test(i), oracle);
  }
  EXPECT_TRUE(is_subset(b, ball));
}

TEST(Dilate, ChebyshevAndFace) {
  GridSpec s = grid3(0, 1, 7);
  VoxelGrid g(s);
  g.set({3, 3, 3, 0});
  EXPECT_EQ(dilate(g, 1, true).count(), 27u);
  EXPECT_EQ(dilate(g, 1, false).count(), 7u);
  EXPECT_EQ(dilate(g, 0, true), g);
}

TEST(Vxg, RoundTripIsBitExact) {
  std::mt19937_64 rng(9);
  for (const GridSpec& s : {grid2(-1, 2, 13), grid3(-1, 1, 7),
                            GridSpec(BoundingBox::cube(4, 0, 1), {3, 4, 5, 2})}) {
    VoxelGrid g = random_cells(s, rng, 0.3);
    std::stringstream ss;
    write_vxg(ss, g);
    VoxelGrid back = read_vxg(ss);
    EXPECT_EQ(back.spec(), s);
    EXPECT_EQ(back, g);
    EXPECT_EQ(grid_sha(back), grid_sha(g));
    std::stringstream again;
    write_vxg(again, back);
    std::stringstream first;
    write_vxg(first, g);
    EXPECT_EQ(again.str(), first.str());
  }
}

TEST(Vxg, RejectsMalformedInput) {
  std::stringstream bad("VXG2\n");
  EXPECT_THROW(read_vxg(bad), Error);
  std::stringstream truncated;
  write_vxg(truncated, VoxelGrid(grid2(0, 1, 4)));
  std::string text = truncated.str();
  std::stringstream cut(text.substr(0, text.size() - 3));
  EXPECT_THROW(read_vxg(cut), Error);
  EXPECT_THROW(load_vxg("/nonexistent/file.vxg"), Error);
}

TEST(Vxg, ShaDependsOnContent) {
  VoxelGrid a(grid2(0, 1, 4)), b(grid2(0, 1, 4));
  EXPECT_EQ(grid_sha(a), grid_sha(b));
  b.set(5);
  EXPECT_NE(grid_sha(a), grid_sha(b));
  EXPECT_EQ(grid_sha(a).size(), 64u);
}
