#include "linconvex/geometry.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <string>

namespace linconvex {

double dot(const Coord& a, const Coord& b, int n) {
  double s = 0;
  for (int i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double norm(const Coord& a, int n) { return std::sqrt(dot(a, a, n)); }

//---------------------------------------------------------------------------//
// BoundingBox
//---------------------------------------------------------------------------//
BoundingBox::BoundingBox(int dim, const Coord& lo, const Coord& hi)
    : dim_(dim), lo_(lo), hi_(hi) {
  if (dim < 2 || dim > kMaxDim)
    throw Error(ErrorCode::DimMismatch,
                "box dimension " + std::to_string(dim) + " outside [2, 4]");
  for (int i = 0; i < dim; ++i) {
    if (!(lo[i] < hi[i]) || !std::isfinite(lo[i]) || !std::isfinite(hi[i]))
      throw Error(ErrorCode::InvalidArgument,
                  "box needs lo < hi on axis " + std::to_string(i));
  }
  for (int i = dim; i < kMaxDim; ++i) lo_[i] = hi_[i] = 0;
}

BoundingBox BoundingBox::cube(int dim, double lo, double hi) {
  Coord l{}, h{};
  for (int i = 0; i < dim && i < kMaxDim; ++i) {
    l[i] = lo;
    h[i] = hi;
  }
  return BoundingBox(dim, l, h);
}

Coord BoundingBox::center() const {
  Coord c{};
  for (int i = 0; i < dim_; ++i) c[i] = 0.5 * (lo_[i] + hi_[i]);
  return c;
}

//---------------------------------------------------------------------------//
// GridSpec
//---------------------------------------------------------------------------//
GridSpec::GridSpec(const BoundingBox& box, const CellIndex& res) : box_(box), res_(res) {
  count_ = 1;
  for (int i = 0; i < box.dim(); ++i) {
    if (res[i] <= 0)
      throw Error(ErrorCode::InvalidArgument, "resolution must be positive");
    count_ *= static_cast<std::size_t>(res[i]);
    if (count_ > (std::size_t{1} << 31))
      throw Error(ErrorCode::InvalidArgument, "grid too large");
  }
  for (int i = box.dim(); i < kMaxDim; ++i) res_[i] = 0;
}

double GridSpec::min_cell_edge() const {
  double m = cell_size(0);
  for (int i = 1; i < dim(); ++i) m = std::min(m, cell_size(i));
  return m;
}

double GridSpec::cell_diameter() const {
  double s = 0;
  for (int i = 0; i < dim(); ++i) s += cell_size(i) * cell_size(i);
  return std::sqrt(s);
}

double GridSpec::center_coord(int axis, int i) const {
  return box_.lo()[axis] +
         box_.extent(axis) * static_cast<double>(2 * i + 1) / (2.0 * res_[axis]);
}

double GridSpec::edge_coord(int axis, int i) const {
  if (i == res_[axis]) return box_.hi()[axis];
  return box_.lo()[axis] + box_.extent(axis) * static_cast<double>(i) / res_[axis];
}

Coord GridSpec::cell_center(const CellIndex& cell) const {
  Coord c{};
  for (int a = 0; a < dim(); ++a) c[a] = center_coord(a, cell[a]);
  return c;
}

void GridSpec::cell_bounds(const CellIndex& cell, Coord& lo, Coord& hi) const {
  lo = Coord{};
  hi = Coord{};
  for (int a = 0; a < dim(); ++a) {
    lo[a] = edge_coord(a, cell[a]);
    hi[a] = edge_coord(a, cell[a] + 1);
  }
}

bool GridSpec::contains(const CellIndex& cell) const {
  for (int a = 0; a < dim(); ++a)
    if (cell[a] < 0 || cell[a] >= res_[a]) return false;
  return true;
}

std::size_t GridSpec::linear(const CellIndex& cell) const {
  std::size_t idx = 0;
  for (int a = 0; a < dim(); ++a) idx = idx * res_[a] + cell[a];
  return idx;
}

CellIndex GridSpec::unlinear(std::size_t index) const {
  CellIndex c{};
  for (int a = dim() - 1; a >= 0; --a) {
    c[a] = static_cast<int>(index % res_[a]);
    index /= res_[a];
  }
  return c;
}

std::optional<CellIndex> GridSpec::cell_of(const Coord& p) const {
  CellIndex c{};
  for (int a = 0; a < dim(); ++a) {
    if (p[a] < box_.lo()[a] || p[a] > box_.hi()[a]) return std::nullopt;
    int i = static_cast<int>(std::floor((p[a] - box_.lo()[a]) / cell_size(a)));
    c[a] = std::clamp(i, 0, res_[a] - 1);
  }
  return c;
}

//---------------------------------------------------------------------------//
// VoxelGrid
//---------------------------------------------------------------------------//
VoxelGrid::VoxelGrid(const GridSpec& spec)
    : spec_(spec), words_((spec.cell_count() + 63) / 64, 0) {}

std::size_t VoxelGrid::count() const {
  std::size_t n = 0;
  for (auto w : words_) n += std::popcount(w);
  return n;
}

bool VoxelGrid::empty() const {
  return std::all_of(words_.begin(), words_.end(), [](auto w) { return w == 0; });
}

void VoxelGrid::mask_tail() {
  auto rem = spec_.cell_count() & 63;
  if (rem != 0 && !words_.empty()) words_.back() &= (std::uint64_t{1} << rem) - 1;
}

void VoxelGrid::for_each_occupied(const std::function<void(std::size_t)>& fn) const {
  for (std::size_t w = 0; w < words_.size(); ++w) {
    auto bits = words_[w];
    while (bits) {
      int b = std::countr_zero(bits);
      fn(w * 64 + b);
      bits &= bits - 1;
    }
  }
}

std::vector<CellIndex> VoxelGrid::occupied_cells() const {
  std::vector<CellIndex> out;
  out.reserve(count());
  for_each_occupied([&](std::size_t i) { out.push_back(spec_.unlinear(i)); });
  return out;
}

bool VoxelGrid::operator==(const VoxelGrid& other) const {
  return spec_ == other.spec_ && words_ == other.words_;
}

void require_same_grid(const GridSpec& a, const GridSpec& b) {
  if (a.dim() != b.dim())
    throw Error(ErrorCode::DimMismatch, "grids have different dimensions");
  if (!(a == b)) throw Error(ErrorCode::GridMismatch, "grids differ in box or resolution");
}

VoxelGrid complement(const VoxelGrid& a) {
  VoxelGrid out = a;
  for (auto& w : out.words()) w = ~w;
  out.mask_tail();
  return out;
}

namespace {
template <class Op>
VoxelGrid combine(const VoxelGrid& a, const VoxelGrid& b, Op op) {
  require_same_grid(a.spec(), b.spec());
  VoxelGrid out(a.spec());
  auto wa = a.words();
  auto wb = b.words();
  auto wo = out.words();
  for (std::size_t i = 0; i < wo.size(); ++i) wo[i] = op(wa[i], wb[i]);
  out.mask_tail();
  return out;
}
}  // namespace

VoxelGrid unite(const VoxelGrid& a, const VoxelGrid& b) {
  return combine(a, b, [](auto x, auto y) { return x | y; });
}

VoxelGrid intersect(const VoxelGrid& a, const VoxelGrid& b) {
  return combine(a, b, [](auto x, auto y) { return x & y; });
}

VoxelGrid subtract(const VoxelGrid& a, const VoxelGrid& b) {
  return combine(a, b, [](auto x, auto y) { return x & ~y; });
}

bool is_subset(const VoxelGrid& a, const VoxelGrid& b) {
  require_same_grid(a.spec(), b.spec());
  auto wa = a.words();
  auto wb = b.words();
  for (std::size_t i = 0; i < wa.size(); ++i)
    if (wa[i] & ~wb[i]) return false;
  return true;
}

bool equal(const VoxelGrid& a, const VoxelGrid& b) {
  require_same_grid(a.spec(), b.spec());
  return a == b;
}

VoxelGrid boundary_cells(const VoxelGrid& d, BoxFaces faces) {
  const auto& spec = d.spec();
  VoxelGrid out(spec);
  const int n = spec.dim();
  d.for_each_occupied([&](std::size_t idx) {
    CellIndex c = spec.unlinear(idx);
    for (int a = 0; a < n; ++a) {
      for (int step : {-1, 1}) {
        CellIndex nb = c;
        nb[a] += step;
        bool outside = nb[a] < 0 || nb[a] >= spec.res()[a];
        if (outside ? faces == BoxFaces::Exterior : !d.test(nb)) {
          out.set(idx);
          return;
        }
      }
    }
  });
  return out;
}

VoxelGrid dilate(const VoxelGrid& g, int steps, bool diagonal) {
  const auto& spec = g.spec();
  const int n = spec.dim();
  VoxelGrid cur = g;
  for (int s = 0; s < steps; ++s) {
    VoxelGrid next = cur;
    cur.for_each_occupied([&](std::size_t idx) {
      CellIndex c = spec.unlinear(idx);
      if (diagonal) {
        int total = 1;
        for (int a = 0; a < n; ++a) total *= 3;
        for (int k = 0; k < total; ++k) {
          CellIndex nb = c;
          int r = k;
          for (int a = 0; a < n; ++a) {
            nb[a] += r % 3 - 1;
            r /= 3;
          }
          if (spec.contains(nb)) next.set(nb);
        }
      } else {
        for (int a = 0; a < n; ++a)
          for (int step : {-1, 1}) {
            CellIndex nb = c;
            nb[a] += step;
            if (spec.contains(nb)) next.set(nb);
          }
      }
    });
    cur = std::move(next);
  }
  return cur;
}

//---------------------------------------------------------------------------//
// AffineSubspace
//---------------------------------------------------------------------------//
AffineSubspace AffineSubspace::from_equations(int dim, std::span<const Coord> rows,
                                              std::span<const double> rhs) {
  if (dim < 1 || dim > kMaxDim)
    throw Error(ErrorCode::DimMismatch, "flat dimension outside [1, 4]");
  if (rows.size() != rhs.size())
    throw Error(ErrorCode::InvalidArgument, "rows and rhs differ in length");

  AffineSubspace s;
  s.dim_ = dim;
  std::array<double, kMaxDim> beta{};
  int c = 0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    Coord v{};
    for (int i = 0; i < dim; ++i) v[i] = rows[r][i];
    double scale = norm(v, dim);
    double b = rhs[r];
    // Two passes of Gram-Schmidt keep the basis orthonormal to rounding.
    for (int pass = 0; pass < 2; ++pass) {
      for (int j = 0; j < c; ++j) {
        double k = dot(v, s.normals_[j], dim);
        for (int i = 0; i < dim; ++i) v[i] -= k * s.normals_[j][i];
        b -= k * beta[j];
      }
    }
    double len = norm(v, dim);
    if (len <= 1e-10 * std::max(scale, 1e-300) || scale == 0) {
      if (std::abs(b) > 1e-10 * (std::abs(rhs[r]) + scale + 1))
        throw Error(ErrorCode::DegenerateParams, "equations are inconsistent (empty flat)");
      continue;
    }
    if (c == dim)
      continue;
    for (int i = 0; i < dim; ++i) s.normals_[c][i] = v[i] / len;
    beta[c] = b / len;
    ++c;
  }
  if (c == 0)
    throw Error(ErrorCode::DegenerateParams, "equations impose no constraint (whole space)");
  s.codim_ = c;
  for (int j = 0; j < c; ++j)
    for (int i = 0; i < dim; ++i) s.point_[i] += beta[j] * s.normals_[j][i];

  // Complete to an orthonormal basis with the coordinate axes.
  int d = 0;
  std::array<Coord, 2 * kMaxDim> basis{};
  for (int j = 0; j < c; ++j) basis[j] = s.normals_[j];
  int have = c;
  for (int axis = 0; axis < dim && have < dim; ++axis) {
    Coord v{};
    v[axis] = 1;
    for (int pass = 0; pass < 2; ++pass)
      for (int j = 0; j < have; ++j) {
        double k = dot(v, basis[j], dim);
        for (int i = 0; i < dim; ++i) v[i] -= k * basis[j][i];
      }
    double len = norm(v, dim);
    if (len < 1e-6) continue;
    for (int i = 0; i < dim; ++i) v[i] /= len;
    basis[have++] = v;
    s.directions_[d++] = v;
  }
  return s;
}

AffineSubspace AffineSubspace::hyperplane(int dim, const Coord& normal, double offset) {
  std::array<Coord, 1> rows{normal};
  std::array<double, 1> rhs{offset};
  return from_equations(dim, rows, rhs);
}

AffineSubspace AffineSubspace::through_point(int dim, const Coord& point,
                                             std::span<const Coord> normals) {
  std::vector<double> rhs;
  for (const auto& nrm : normals) rhs.push_back(dot(nrm, point, dim));
  return from_equations(dim, normals, rhs);
}

double AffineSubspace::residual(const Coord& x) const {
  double worst = 0;
  for (int j = 0; j < codim_; ++j) {
    double r = 0;
    for (int i = 0; i < dim_; ++i) r += normals_[j][i] * (x[i] - point_[i]);
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

}  // namespace linconvex
