#include "linconvex/topology.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <numeric>

namespace linconvex {

namespace {

struct UnionFind {
  std::vector<std::uint32_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0u); }
  std::uint32_t find(std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[std::max(a, b)] = std::min(a, b);
    return true;
  }
};

// Neighbour offsets over the 3^n block (Vertex) or the 2n face directions.
std::vector<CellIndex> neighbour_offsets(int n, Connectivity c) {
  std::vector<CellIndex> out;
  if (c == Connectivity::Face) {
    for (int a = 0; a < n; ++a)
      for (int s : {-1, 1}) {
        CellIndex d{};
        d[a] = s;
        out.push_back(d);
      }
    return out;
  }
  int total = 1;
  for (int a = 0; a < n; ++a) total *= 3;
  for (int k = 0; k < total; ++k) {
    CellIndex d{};
    int r = k;
    bool zero = true;
    for (int a = 0; a < n; ++a) {
      d[a] = r % 3 - 1;
      zero = zero && d[a] == 0;
      r /= 3;
    }
    if (!zero) out.push_back(d);
  }
  return out;
}

using Column = std::vector<std::uint32_t>;

}  // namespace

//---------------------------------------------------------------------------//
// CubicalComplex
//---------------------------------------------------------------------------//
CubicalComplex::CubicalComplex(int dim, const CellIndex& res,
                               std::array<std::vector<std::uint64_t>, kMaxDim + 1> cubes)
    : dim_(dim), res_(res), cubes_(std::move(cubes)) {
  if (dim < 1 || dim > kMaxDim) throw Error(ErrorCode::DimMismatch, "complex dimension outside [1, 4]");
  std::uint64_t s = 1;
  for (int a = dim - 1; a >= 0; --a) {
    stride_[a] = s;
    s *= std::uint64_t(2 * res[a] + 1);
  }
  for (auto& v : cubes_) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  for (int k = 0; k <= kMaxDim; ++k)
    for (auto code : cubes_[k])
      if (code >= s || cube_dim(code) != k)
        throw Error(ErrorCode::InvalidArgument, "cube code does not match its dimension list");
}

std::size_t CubicalComplex::total() const {
  std::size_t t = 0;
  for (const auto& v : cubes_) t += v.size();
  return t;
}

long long CubicalComplex::euler_characteristic() const {
  long long chi = 0;
  for (int k = 0; k <= dim_; ++k) chi += (k % 2 ? -1 : 1) * (long long)cubes_[k].size();
  return chi;
}

std::uint64_t CubicalComplex::encode(const CellIndex& k) const {
  std::uint64_t code = 0;
  for (int a = 0; a < dim_; ++a) code += std::uint64_t(k[a]) * stride_[a];
  return code;
}

CellIndex CubicalComplex::decode(std::uint64_t code) const {
  CellIndex k{};
  for (int a = 0; a < dim_; ++a) {
    k[a] = int(code / stride_[a]);
    code %= stride_[a];
  }
  return k;
}

int CubicalComplex::cube_dim(std::uint64_t code) const {
  CellIndex k = decode(code);
  int d = 0;
  for (int a = 0; a < dim_; ++a) d += k[a] & 1;
  return d;
}

long long CubicalComplex::find(int k, std::uint64_t code) const {
  const auto& v = cubes_[k];
  auto it = std::lower_bound(v.begin(), v.end(), code);
  if (it == v.end() || *it != code) return -1;
  return it - v.begin();
}

std::vector<std::uint64_t> CubicalComplex::facets(std::uint64_t code) const {
  CellIndex k = decode(code);
  std::vector<std::uint64_t> out;
  for (int a = 0; a < dim_; ++a)
    if (k[a] & 1) {
      out.push_back(code - stride_[a]);
      out.push_back(code + stride_[a]);
    }
  return out;
}

bool CubicalComplex::is_closed() const {
  for (int k = 1; k <= dim_; ++k)
    for (auto code : cubes_[k])
      for (auto f : facets(code))
        if (find(k - 1, f) < 0) return false;
  return true;
}

CubicalComplex build_complex(const GridSpec& spec, const std::vector<CellIndex>& cells) {
  const int n = spec.dim();
  CellIndex kres{};
  std::array<std::uint64_t, kMaxDim> stride{};
  std::uint64_t size = 1;
  for (int a = n - 1; a >= 0; --a) {
    kres[a] = 2 * spec.res()[a] + 1;
    stride[a] = size;
    size *= std::uint64_t(kres[a]);
  }
  std::vector<std::uint64_t> bits((size + 63) / 64, 0);
  int total = 1;
  for (int a = 0; a < n; ++a) total *= 3;
  for (const auto& c : cells) {
    if (!spec.contains(c)) throw Error(ErrorCode::IndexOutOfRange, "cell outside the grid");
    std::uint64_t center = 0;
    for (int a = 0; a < n; ++a) center += std::uint64_t(2 * c[a] + 1) * stride[a];
    for (int k = 0; k < total; ++k) {
      std::uint64_t code = center;
      int r = k;
      for (int a = 0; a < n; ++a) {
        code = code + std::uint64_t(r % 3) * stride[a] - stride[a];
        r /= 3;
      }
      bits[code >> 6] |= std::uint64_t{1} << (code & 63);
    }
  }
  std::array<std::vector<std::uint64_t>, kMaxDim + 1> cubes;
  for (std::size_t w = 0; w < bits.size(); ++w) {
    std::uint64_t word = bits[w];
    while (word) {
      int b = std::countr_zero(word);
      word &= word - 1;
      std::uint64_t code = w * 64 + std::uint64_t(b), rest = code;
      int d = 0;
      for (int a = 0; a < n; ++a) {
        d += int(rest / stride[a]) & 1;
        rest %= stride[a];
      }
      cubes[d].push_back(code);
    }
  }
  return CubicalComplex(n, spec.res(), std::move(cubes));
}

CubicalComplex build_complex(const VoxelGrid& g) {
  return build_complex(g.spec(), g.occupied_cells());
}

//---------------------------------------------------------------------------//
// Homology
//---------------------------------------------------------------------------//
std::string BettiVector::str(int len) const {
  std::size_t m = len < 0 ? b.size() : std::min<std::size_t>(b.size(), std::size_t(len));
  std::string s = "(";
  for (std::size_t i = 0; i < m; ++i) s += (i ? "," : "") + std::to_string(b[i]);
  return s + ")";
}

Homology homology(const CubicalComplex& cx) {
  const int n = cx.dim();
  if (cx.total() > CubicalComplex::kMaxCells)
    throw Error(ErrorCode::InvalidArgument,
                "complex has " + std::to_string(cx.total()) + " cells, above the cap");
  if (!cx.is_closed()) throw Error(ErrorCode::NotClosed, "complex is not closed under faces");

  Homology h;
  for (int k = 0; k <= n; ++k) h.cells[k] = cx.count(k);

  // Rows of the boundary of k-cubes that are already pivots; those (k-1)
  // columns reduce to zero and are skipped.
  std::vector<char> cleared;
  for (int k = n; k >= 2; --k) {
    const auto& cols = cx.cubes(k);
    std::vector<char> next_cleared(cx.count(k - 1), 0);
    std::vector<std::int64_t> owner(cx.count(k - 1), -1);
    std::vector<Column> reduced;
    Column col, tmp;
    std::size_t rank = 0;
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (!cleared.empty() && cleared[j]) continue;
      col.clear();
      for (auto f : cx.facets(cols[j])) col.push_back(std::uint32_t(cx.find(k - 1, f)));
      std::sort(col.begin(), col.end());
      while (!col.empty()) {
        auto o = owner[col.back()];
        if (o < 0) break;
        const Column& other = reduced[std::size_t(o)];
        tmp.clear();
        std::set_symmetric_difference(col.begin(), col.end(), other.begin(), other.end(),
                                      std::back_inserter(tmp));
        col.swap(tmp);
      }
      if (col.empty()) continue;
      owner[col.back()] = std::int64_t(reduced.size());
      next_cleared[col.back()] = 1;
      reduced.push_back(col);
      ++rank;
    }
    h.rank[k] = rank;
    cleared.swap(next_cleared);
  }
  if (n >= 1) {
    UnionFind uf(cx.count(0));
    std::size_t rank = 0;
    for (auto code : cx.cubes(1)) {
      auto f = cx.facets(code);
      if (uf.unite(std::uint32_t(cx.find(0, f[0])), std::uint32_t(cx.find(0, f[1])))) ++rank;
    }
    h.rank[1] = rank;
  }
  h.betti.b.resize(std::size_t(n + 1));
  for (int k = 0; k <= n; ++k) {
    std::size_t up = k + 1 <= n ? h.rank[k + 1] : 0;
    h.betti.b[k] = h.cells[k] - h.rank[k] - up;
  }
  return h;
}

BettiVector betti_numbers(const CubicalComplex& k) { return homology(k).betti; }

//---------------------------------------------------------------------------//
// Components and sphere test
//---------------------------------------------------------------------------//
std::size_t label_components(const VoxelGrid& g, Connectivity c, std::vector<int>* labels) {
  const GridSpec& spec = g.spec();
  const auto offsets = neighbour_offsets(spec.dim(), c);
  std::vector<int> lab(spec.cell_count(), -1);
  int next = 0;
  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < spec.cell_count(); ++i) {
    if (!g.test(i) || lab[i] >= 0) continue;
    lab[i] = next;
    stack.push_back(i);
    while (!stack.empty()) {
      std::size_t idx = stack.back();
      stack.pop_back();
      CellIndex cell = spec.unlinear(idx);
      for (const auto& d : offsets) {
        CellIndex nb = cell;
        for (int a = 0; a < spec.dim(); ++a) nb[a] += d[a];
        if (!spec.contains(nb)) continue;
        std::size_t j = spec.linear(nb);
        if (g.test(j) && lab[j] < 0) {
          lab[j] = next;
          stack.push_back(j);
        }
      }
    }
    ++next;
  }
  if (labels) *labels = std::move(lab);
  return std::size_t(next);
}

std::size_t connected_components(const VoxelGrid& g, Connectivity c) {
  return label_components(g, c);
}

std::string to_string(SphereClass c) {
  switch (c) {
    case SphereClass::Sphere: return "sphere";
    case SphereClass::TorusLike: return "torus_like";
    case SphereClass::Other: return "other";
  }
  return "other";
}

SphereClass classify(const BettiVector& b, int n) {
  if (int(b.b.size()) < n) return SphereClass::Other;
  auto at = [&](int k) { return k < int(b.b.size()) ? b.b[k] : 0; };
  bool sphere = at(0) == 1 && at(n - 1) == 1;
  for (int k = 1; k < n - 1; ++k) sphere = sphere && at(k) == 0;
  for (int k = n; k < int(b.b.size()); ++k) sphere = sphere && at(k) == 0;
  if (sphere) return SphereClass::Sphere;
  if (n == 3 && at(0) == 1 && at(1) == 2 && at(2) == 1 && at(3) == 0) return SphereClass::TorusLike;
  return SphereClass::Other;
}

SphereResult sphere_test(const VoxelGrid& d, BoxFaces faces) {
  auto t0 = std::chrono::steady_clock::now();
  if (d.empty()) throw Error(ErrorCode::EmptyGrid, "sphere test needs a nonempty set");
  if (connected_components(d, Connectivity::Face) != 1)
    throw Error(ErrorCode::NotConnected, "sphere test needs a face-connected set");
  VoxelGrid bnd = boundary_cells(d, faces);
  SphereResult r;
  r.boundary_cells = bnd.count();
  r.betti = betti_numbers(build_complex(bnd));
  r.cls = classify(r.betti, d.dim());
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace linconvex
