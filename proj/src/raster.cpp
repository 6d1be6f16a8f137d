#include "linconvex/raster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace linconvex {
namespace {

struct Ineq {
  std::array<double, kMaxDim> a{};
  double b = 0;
};

void require_dim(const AffineSubspace& s, const GridSpec& spec) {
  if (s.dim() != spec.dim())
    throw Error(ErrorCode::DimMismatch, "flat and grid have different dimensions");
}

// Feasibility of { y in R^k | rows[i].a . y <= rows[i].b } by Fourier-Motzkin.
bool fm_feasible(std::vector<Ineq> rows, int k, double slack) {
  constexpr double kTiny = 1e-13;
  for (int var = k - 1; var >= 0; --var) {
    std::vector<Ineq> pos, neg, next;
    for (auto& r : rows) {
      double c = r.a[var];
      if (c > kTiny)
        pos.push_back(r);
      else if (c < -kTiny)
        neg.push_back(r);
      else {
        r.a[var] = 0;
        next.push_back(r);
      }
    }
    for (const auto& p : pos) {
      for (const auto& q : neg) {
        Ineq comb;
        double sp = 1.0 / p.a[var];
        double sq = -1.0 / q.a[var];
        for (int j = 0; j < var; ++j) comb.a[j] = p.a[j] * sp + q.a[j] * sq;
        comb.b = p.b * sp + q.b * sq;
        next.push_back(comb);
      }
    }
    rows = std::move(next);
  }
  for (const auto& r : rows)
    if (r.b < -slack) return false;
  return true;
}

bool point_in_box(const Coord& p, const Coord& lo, const Coord& hi, double eps, int n) {
  for (int i = 0; i < n; ++i)
    if (p[i] < lo[i] - eps || p[i] > hi[i] + eps) return false;
  return true;
}

bool line_hits_box(const Coord& p, const Coord& d, const Coord& lo, const Coord& hi,
                   double eps, int n) {
  double t0 = -std::numeric_limits<double>::infinity();
  double t1 = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    if (d[i] == 0) {
      if (p[i] < lo[i] - eps || p[i] > hi[i] + eps) return false;
      continue;
    }
    double ta = (lo[i] - eps - p[i]) / d[i];
    double tb = (hi[i] + eps - p[i]) / d[i];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return false;
  }
  return true;
}

bool hyperplane_hits_box(const Coord& u, double c, const Coord& lo, const Coord& hi,
                         double eps, int n) {
  double center = 0, half = 0;
  for (int i = 0; i < n; ++i) {
    center += u[i] * 0.5 * (lo[i] + hi[i]);
    half += std::abs(u[i]) * (0.5 * (hi[i] - lo[i]) + eps);
  }
  return std::abs(c - center) <= half;
}

// Index range of cells along `axis` whose eps-expanded extent meets [a, b].
std::pair<int, int> index_range(const GridSpec& spec, int axis, double a, double b, double eps) {
  double lo = spec.box().lo()[axis];
  double h = spec.cell_size(axis);
  // Candidates are widened by a second eps; callers filter exactly.
  double klo = std::ceil((a - 2 * eps - lo) / h - 1.0);
  double khi = std::floor((b + 2 * eps - lo) / h);
  int r = spec.res()[axis];
  klo = std::max(klo, 0.0);
  khi = std::min(khi, static_cast<double>(r - 1));
  if (klo > khi) return {1, 0};
  return {static_cast<int>(klo), static_cast<int>(khi)};
}

// Enumerates all index tuples over `axes` within [ranges.first, ranges.second].
template <class Fn>
bool for_each_product(int count, const std::array<int, kMaxDim>& axes,
                      const std::array<std::pair<int, int>, kMaxDim>& ranges, CellIndex& cell,
                      Fn&& fn, int depth = 0) {
  if (depth == count) return fn(cell);
  int ax = axes[depth];
  for (int i = ranges[depth].first; i <= ranges[depth].second; ++i) {
    cell[ax] = i;
    if (!for_each_product(count, axes, ranges, cell, fn, depth + 1)) return false;
  }
  return true;
}

bool visit_point(const AffineSubspace& s, const GridSpec& spec,
                 const std::function<bool(std::size_t)>& visit) {
  const int n = spec.dim();
  const double eps = spec.eps();
  const Coord& p = s.point();
  std::array<int, kMaxDim> axes{};
  std::array<std::pair<int, int>, kMaxDim> ranges{};
  for (int a = 0; a < n; ++a) {
    axes[a] = a;
    ranges[a] = index_range(spec, a, p[a], p[a], eps);
    if (ranges[a].first > ranges[a].second) return true;
  }
  CellIndex cell{};
  return for_each_product(n, axes, ranges, cell, [&](const CellIndex& c) {
    Coord lo, hi;
    spec.cell_bounds(c, lo, hi);
    if (!point_in_box(p, lo, hi, eps, n)) return true;
    return visit(spec.linear(c));
  });
}

bool visit_line(const AffineSubspace& s, const GridSpec& spec,
                const std::function<bool(std::size_t)>& visit,
                const std::optional<CellIndex>& near) {
  const int n = spec.dim();
  const double eps = spec.eps();
  const Coord& p = s.point();
  const Coord& d = s.directions()[0];
  const auto& box = spec.box();

  double t0 = -std::numeric_limits<double>::infinity();
  double t1 = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    if (d[i] == 0) {
      if (p[i] < box.lo()[i] - eps || p[i] > box.hi()[i] + eps) return true;
      continue;
    }
    double ta = (box.lo()[i] - eps - p[i]) / d[i];
    double tb = (box.hi()[i] + eps - p[i]) / d[i];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
  }
  if (t0 > t1) return true;

  int m = 0;
  for (int i = 1; i < n; ++i)
    if (std::abs(d[i]) > std::abs(d[m])) m = i;

  double xa = p[m] + t0 * d[m];
  double xb = p[m] + t1 * d[m];
  auto [jlo, jhi] = index_range(spec, m, std::min(xa, xb), std::max(xa, xb), eps);
  if (jlo > jhi) return true;

  std::array<int, kMaxDim> axes{};
  int other = 0;
  for (int i = 0; i < n; ++i)
    if (i != m) axes[other++] = i;

  auto do_layer = [&](int j) {
    double ea = (spec.edge_coord(m, j) - eps - p[m]) / d[m];
    double eb = (spec.edge_coord(m, j + 1) + eps - p[m]) / d[m];
    if (ea > eb) std::swap(ea, eb);
    double ta = std::max(ea, t0);
    double tb = std::min(eb, t1);
    if (ta > tb) return true;
    std::array<std::pair<int, int>, kMaxDim> ranges{};
    for (int k = 0; k < other; ++k) {
      int ax = axes[k];
      double va = p[ax] + ta * d[ax];
      double vb = p[ax] + tb * d[ax];
      ranges[k] = index_range(spec, ax, std::min(va, vb), std::max(va, vb), eps);
      if (ranges[k].first > ranges[k].second) return true;
    }
    CellIndex cell{};
    cell[m] = j;
    return for_each_product(other, axes, ranges, cell, [&](const CellIndex& c) {
      Coord lo, hi;
      spec.cell_bounds(c, lo, hi);
      if (!line_hits_box(p, d, lo, hi, eps, n)) return true;
      return visit(spec.linear(c));
    });
  };

  if (!near) {
    for (int j = jlo; j <= jhi; ++j)
      if (!do_layer(j)) return false;
    return true;
  }
  int j0 = std::clamp((*near)[m], jlo, jhi);
  for (int r = 0;; ++r) {
    bool any = false;
    if (j0 + r <= jhi) {
      any = true;
      if (!do_layer(j0 + r)) return false;
    }
    if (r > 0 && j0 - r >= jlo) {
      any = true;
      if (!do_layer(j0 - r)) return false;
    }
    if (!any) break;
  }
  return true;
}

bool visit_hyperplane(const AffineSubspace& s, const GridSpec& spec,
                      const std::function<bool(std::size_t)>& visit) {
  const int n = spec.dim();
  const double eps = spec.eps();
  const Coord& u = s.normals()[0];
  const double c = dot(u, s.point(), n);

  int m = 0;
  for (int i = 1; i < n; ++i)
    if (std::abs(u[i]) > std::abs(u[m])) m = i;

  std::array<int, kMaxDim> axes{};
  std::array<std::pair<int, int>, kMaxDim> ranges{};
  int other = 0;
  for (int i = 0; i < n; ++i)
    if (i != m) {
      axes[other] = i;
      ranges[other] = {0, spec.res()[i] - 1};
      ++other;
    }
  CellIndex column{};
  return for_each_product(other, axes, ranges, column, [&](const CellIndex& col) {
    double smin = 0, smax = 0;
    for (int k = 0; k < other; ++k) {
      int ax = axes[k];
      double lo = spec.edge_coord(ax, col[ax]) - eps;
      double hi = spec.edge_coord(ax, col[ax] + 1) + eps;
      if (u[ax] >= 0) {
        smin += u[ax] * lo;
        smax += u[ax] * hi;
      } else {
        smin += u[ax] * hi;
        smax += u[ax] * lo;
      }
    }
    double xa = (c - smax) / u[m];
    double xb = (c - smin) / u[m];
    auto [jlo, jhi] = index_range(spec, m, std::min(xa, xb), std::max(xa, xb), eps);
    CellIndex cell = col;
    for (int j = jlo; j <= jhi; ++j) {
      cell[m] = j;
      Coord lo, hi;
      spec.cell_bounds(cell, lo, hi);
      if (!hyperplane_hits_box(u, c, lo, hi, eps, n)) continue;
      if (!visit(spec.linear(cell))) return false;
    }
    return true;
  });
}

// Generic flats: recursive bisection of the index range, pruned by the
// feasibility solve on the range's bounding box.
bool visit_subdivide(const AffineSubspace& s, const GridSpec& spec, CellIndex lo, CellIndex hi,
                     const std::function<bool(std::size_t)>& visit) {
  const int n = spec.dim();
  Coord blo{}, bhi{};
  for (int a = 0; a < n; ++a) {
    blo[a] = spec.edge_coord(a, lo[a]);
    bhi[a] = spec.edge_coord(a, hi[a] + 1);
  }
  if (!flat_meets_box(s, blo, bhi, spec.eps())) return true;
  int split = -1, widest = 0;
  for (int a = 0; a < n; ++a)
    if (hi[a] - lo[a] + 1 > widest && hi[a] > lo[a]) {
      widest = hi[a] - lo[a] + 1;
      split = a;
    }
  if (split < 0) return visit(spec.linear(lo));
  int mid = (lo[split] + hi[split]) / 2;
  CellIndex hi1 = hi, lo2 = lo;
  hi1[split] = mid;
  lo2[split] = mid + 1;
  if (!visit_subdivide(s, spec, lo, hi1, visit)) return false;
  return visit_subdivide(s, spec, lo2, hi, visit);
}

}  // namespace

bool flat_meets_box(const AffineSubspace& s, const Coord& lo, const Coord& hi, double eps) {
  const int n = s.dim();
  const int k = s.flat_dim();
  const Coord& p = s.point();
  if (k == 0) return point_in_box(p, lo, hi, eps, n);
  auto dirs = s.directions();
  std::vector<Ineq> rows;
  rows.reserve(2 * n);
  double scale = 1;
  for (int i = 0; i < n; ++i) {
    Ineq up, down;
    for (int j = 0; j < k; ++j) {
      up.a[j] = dirs[j][i];
      down.a[j] = -dirs[j][i];
    }
    up.b = hi[i] + eps - p[i];
    down.b = p[i] - (lo[i] - eps);
    scale = std::max({scale, std::abs(lo[i]), std::abs(hi[i]), std::abs(p[i])});
    rows.push_back(up);
    rows.push_back(down);
  }
  return fm_feasible(std::move(rows), k, 1e-14 * scale);
}

bool subspace_intersects_cell(const AffineSubspace& s, const GridSpec& spec,
                              const CellIndex& cell) {
  require_dim(s, spec);
  if (!spec.contains(cell)) throw Error(ErrorCode::IndexOutOfRange, "cell outside grid");
  Coord lo, hi;
  spec.cell_bounds(cell, lo, hi);
  return flat_meets_box(s, lo, hi, spec.eps());
}

bool cell_hit(const AffineSubspace& s, const GridSpec& spec, const CellIndex& cell) {
  Coord lo, hi;
  spec.cell_bounds(cell, lo, hi);
  const int n = spec.dim();
  const double eps = spec.eps();
  switch (s.flat_dim()) {
    case 0: return point_in_box(s.point(), lo, hi, eps, n);
    case 1: return line_hits_box(s.point(), s.directions()[0], lo, hi, eps, n);
    default: break;
  }
  if (s.codim() == 1)
    return hyperplane_hits_box(s.normals()[0], dot(s.normals()[0], s.point(), n), lo, hi, eps, n);
  return flat_meets_box(s, lo, hi, eps);
}

bool for_each_cell_hit(const AffineSubspace& s, const GridSpec& spec,
                       const std::function<bool(std::size_t)>& visit,
                       const std::optional<CellIndex>& near) {
  require_dim(s, spec);
  switch (s.flat_dim()) {
    case 0: return visit_point(s, spec, visit);
    case 1: return visit_line(s, spec, visit, near);
    default: break;
  }
  if (s.codim() == 1) return visit_hyperplane(s, spec, visit);
  CellIndex lo{}, hi{};
  for (int a = 0; a < spec.dim(); ++a) hi[a] = spec.res()[a] - 1;
  return visit_subdivide(s, spec, lo, hi, visit);
}

std::vector<std::size_t> rasterize_linear(const AffineSubspace& s, const GridSpec& spec) {
  std::vector<std::size_t> out;
  for_each_cell_hit(s, spec, [&](std::size_t i) {
    out.push_back(i);
    return true;
  });
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<CellIndex> rasterize_subspace(const AffineSubspace& s, const GridSpec& spec) {
  std::vector<CellIndex> out;
  for (auto i : rasterize_linear(s, spec)) out.push_back(spec.unlinear(i));
  return out;
}

bool subspace_misses(const VoxelGrid& e, const AffineSubspace& s) {
  return for_each_cell_hit(s, e.spec(), [&](std::size_t i) { return !e.test(i); });
}

bool subspace_misses_near(const VoxelGrid& e, const AffineSubspace& s, const CellIndex& anchor) {
  const auto& spec = e.spec();
  require_dim(s, spec);
  const int n = spec.dim();
  int total = 1;
  for (int a = 0; a < n; ++a) total *= 3;
  for (int k = 0; k < total; ++k) {
    CellIndex nb = anchor;
    int r = k;
    for (int a = 0; a < n; ++a) {
      nb[a] += r % 3 - 1;
      r /= 3;
    }
    if (spec.contains(nb) && e.test(nb) && cell_hit(s, spec, nb)) return false;
  }
  return for_each_cell_hit(s, spec, [&](std::size_t i) { return !e.test(i); }, anchor);
}

}  // namespace linconvex
