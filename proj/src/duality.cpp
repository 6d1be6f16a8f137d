#include "linconvex/duality.hpp"

#include <algorithm>
#include <thread>

#include "linconvex/raster.hpp"
#include "linconvex/vxg.hpp"

namespace linconvex {

namespace {

unsigned resolve_threads(unsigned threads, std::size_t work) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  return unsigned(std::clamp<std::size_t>(work / 64, 1, threads));
}

// Runs fn(begin, end, chunk) over `threads` contiguous chunks of [0, n).
template <class Fn>
void chunked(std::size_t n, unsigned threads, Fn fn) {
  if (threads <= 1) {
    fn(std::size_t{0}, n, 0u);
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    std::size_t b = n * t / threads, e = n * (t + 1) / threads;
    pool.emplace_back([=, &fn] { fn(b, e, t); });
  }
  for (auto& th : pool) th.join();
}

void check_family(const VoxelGrid& e, const Family& w) {
  if (e.dim() != w.dim())
    throw Error(ErrorCode::DimMismatch, "grid dimension " + std::to_string(e.dim()) +
                                            " vs family dimension " + std::to_string(w.dim()));
}

// Center, then the 2^n corners pulled towards the center by a relative 1e-6
// so the anchors stay inside the cube.
std::vector<Coord> cube_anchors(const GridSpec& spec, const CellIndex& cell, bool face_centers) {
  const int n = spec.dim();
  Coord c = spec.cell_center(cell);
  std::vector<Coord> out{c};
  Coord half{};
  for (int a = 0; a < n; ++a) half[a] = 0.5 * spec.cell_size(a) * (1 - 1e-6);
  for (int mask = 0; mask < (1 << n); ++mask) {
    Coord p = c;
    for (int a = 0; a < n; ++a) p[a] += (mask >> a & 1) ? half[a] : -half[a];
    out.push_back(p);
  }
  if (face_centers)
    for (int a = 0; a < n; ++a)
      for (int s : {-1, 1}) {
        Coord p = c;
        p[a] += s * half[a];
        out.push_back(p);
      }
  return out;
}

// Searches elements through the anchors, interleaving anchors so every anchor
// gets its best candidates early.
bool search_anchors(const VoxelGrid& target, const Family& w, const CellIndex& cell,
                    const std::vector<Coord>& anchors, std::size_t budget, std::uint64_t seed,
                    ParamSample* found) {
  std::vector<ThroughPoint> tps;
  tps.reserve(anchors.size());
  std::size_t longest = 0;
  for (const auto& a : anchors) {
    tps.emplace_back(w, a, budget, seed);
    longest = std::max(longest, tps.back().size());
  }
  ParamSample s;
  for (std::size_t j = 0; j < longest; ++j) {
    for (const auto& tp : tps) {
      if (j >= tp.size()) continue;
      if (!tp.at(spread_index(j, tp.size()), s)) continue;
      if (subspace_misses_near(target, w.element(s), cell)) {
        if (found) *found = s;
        return true;
      }
    }
  }
  return false;
}

Verdict make_verdict(const char* kind, const VoxelGrid& g, const Family& w, std::size_t budget,
                     std::uint64_t seed) {
  Verdict v;
  v.kind = kind;
  v.family = w;
  v.budget = budget;
  v.seed = seed;
  v.grid_sha = grid_sha(g);
  return v;
}

nlohmann::json cell_json(const CellIndex& c, int n) {
  nlohmann::json j = nlohmann::json::array();
  for (int a = 0; a < n; ++a) j.push_back(c[a]);
  return j;
}

}  // namespace

nlohmann::json ConjugateSet::to_json(bool include_samples) const {
  nlohmann::json j = {{"family", family.descriptor()},
                      {"budget", budget},
                      {"seed", seed},
                      {"grid_sha", grid_sha},
                      {"count", samples.size()}};
  if (include_samples) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& s : samples) list.push_back(std::vector<double>(s.values().begin(), s.values().end()));
    j["samples"] = list;
  }
  return j;
}

ConjugateSet conjugate_with(const VoxelGrid& e, const Family& w,
                            std::span<const ParamSample> samples, unsigned threads) {
  check_family(e, w);
  ConjugateSet out;
  out.family = w;
  out.spec = e.spec();
  out.grid_sha = grid_sha(e);
  unsigned t = resolve_threads(threads, samples.size());
  std::vector<std::vector<ParamSample>> parts(t);
  chunked(samples.size(), t, [&](std::size_t b, std::size_t end, unsigned k) {
    for (std::size_t i = b; i < end; ++i)
      if (subspace_misses(e, w.element(samples[i]))) parts[k].push_back(samples[i]);
  });
  for (auto& p : parts) out.samples.insert(out.samples.end(), p.begin(), p.end());
  return out;
}

ConjugateSet conjugate(const VoxelGrid& e, const Family& w, std::size_t budget,
                       std::uint64_t seed, unsigned threads) {
  check_family(e, w);
  auto samples = sample_params(w, budget, e.spec().box(), seed);
  ConjugateSet out = conjugate_with(e, w, samples, threads);
  out.budget = budget;
  out.seed = seed;
  return out;
}

VoxelGrid double_conjugate(const ConjugateSet& c, const GridSpec& spec, unsigned threads) {
  require_same_grid(c.spec, spec);
  unsigned t = resolve_threads(threads, c.samples.size());
  std::vector<VoxelGrid> covered(t, VoxelGrid(spec));
  chunked(c.samples.size(), t, [&](std::size_t b, std::size_t end, unsigned k) {
    VoxelGrid& g = covered[k];
    for (std::size_t i = b; i < end; ++i)
      for_each_cell_hit(c.family.element(c.samples[i]), spec, [&](std::size_t idx) {
        g.set(idx);
        return true;
      });
  });
  VoxelGrid all = covered[0];
  for (unsigned k = 1; k < t; ++k) all = unite(all, covered[k]);
  return complement(all);
}

VoxelGrid hull_wrt(const VoxelGrid& e, const Family& w, std::size_t budget, std::uint64_t seed,
                   unsigned threads) {
  return double_conjugate(conjugate(e, w, budget, seed, threads), e.spec(), threads);
}

VoxelGrid hull_with(const VoxelGrid& e, const Family& w, std::span<const ParamSample> samples,
                    unsigned threads) {
  return double_conjugate(conjugate_with(e, w, samples, threads), e.spec(), threads);
}

nlohmann::json Verdict::to_json(const GridSpec& spec) const {
  nlohmann::json j = {{"kind", kind},
                      {"status", holds ? "holds" : "fails"},
                      {"witness_cell", nullptr},
                      {"budget", budget},
                      {"seed", seed},
                      {"family", family.descriptor()},
                      {"grid_sha", grid_sha},
                      {"cells_checked", cells_checked}};
  if (witness_cell) {
    j["witness_cell"] = cell_json(*witness_cell, spec.dim());
    Coord c = spec.cell_center(*witness_cell);
    j["witness_center"] = std::vector<double>(c.begin(), c.begin() + spec.dim());
  }
  if (witness_point)
    j["witness_point"] = std::vector<double>(witness_point->begin(), witness_point->begin() + spec.dim());
  if (witness_sample)
    j["witness_sample"] =
        std::vector<double>(witness_sample->values().begin(), witness_sample->values().end());
  for (auto& [k, v] : extra.items()) j[k] = v;
  return j;
}

bool complement_cell_covered(const VoxelGrid& e, const Family& w, const CellIndex& cell,
                             std::size_t budget, std::uint64_t seed, ParamSample* found) {
  check_family(e, w);
  if (e.test(cell)) return false;
  return search_anchors(e, w, cell, cube_anchors(e.spec(), cell, false), budget, seed, found);
}

bool complement_point_covered(const VoxelGrid& e, const Family& w, const Coord& x,
                              std::size_t budget, std::uint64_t seed, ParamSample* found) {
  check_family(e, w);
  auto cell = e.spec().cell_of(x);
  if (!cell) throw Error(ErrorCode::IndexOutOfRange, "probe point outside the box");
  return search_anchors(e, w, *cell, {x}, budget, seed, found);
}

Verdict is_convex_wrt(const VoxelGrid& e, const Family& w, std::size_t budget, std::uint64_t seed,
                      const ConvexityOptions& opts) {
  check_family(e, w);
  const GridSpec& spec = e.spec();
  Verdict v = make_verdict("convex", e, w, budget, seed);
  auto fail = [&](const CellIndex& c) {
    v.holds = false;
    v.witness_cell = c;
  };
  for (const auto& p : opts.probes) {
    auto c = spec.cell_of(p);
    if (!c || e.test(*c)) continue;
    ++v.cells_checked;
    if (!complement_point_covered(e, w, p, budget, seed)) {
      fail(*c);
      v.witness_point = p;
      break;
    }
  }
  for (std::size_t i = 0; v.holds && i < spec.cell_count(); ++i) {
    if (e.test(i)) continue;
    ++v.cells_checked;
    CellIndex c = spec.unlinear(i);
    if (!complement_cell_covered(e, w, c, budget, seed)) fail(c);
  }
  if (opts.hull_cross_check) {
    VoxelGrid h = hull_wrt(e, w, budget, seed);
    v.extra["hull_excess_cells"] = subtract(h, e).count();
  }
  return v;
}

VoxelGrid interior_cells(const VoxelGrid& d, BoxFaces faces) {
  return subtract(d, boundary_cells(d, faces));
}

bool boundary_cell_supported(const VoxelGrid& interior, const Family& w, const CellIndex& cell,
                             std::size_t budget, std::uint64_t seed, ParamSample* found) {
  check_family(interior, w);
  return search_anchors(interior, w, cell, cube_anchors(interior.spec(), cell, true), budget, seed,
                        found);
}

Verdict is_weakly_convex(const VoxelGrid& d, const Family& w, std::size_t budget,
                         std::uint64_t seed, BoxFaces faces) {
  check_family(d, w);
  if (d.empty()) throw Error(ErrorCode::EmptyGrid, "weak convexity needs a nonempty set");
  Verdict v = make_verdict("weakly_convex", d, w, budget, seed);
  VoxelGrid bnd = boundary_cells(d, faces);
  VoxelGrid inner = subtract(d, bnd);
  const GridSpec& spec = d.spec();
  for (std::size_t i = 0; i < spec.cell_count(); ++i) {
    if (!bnd.test(i)) continue;
    ++v.cells_checked;
    CellIndex c = spec.unlinear(i);
    if (!boundary_cell_supported(inner, w, c, budget, seed)) {
      v.holds = false;
      v.witness_cell = c;
      break;
    }
  }
  v.extra["boundary_cells"] = bnd.count();
  return v;
}

VoxelGrid component_containing(const VoxelGrid& g, std::size_t seed_cell) {
  const GridSpec& spec = g.spec();
  VoxelGrid out(spec);
  if (!g.test(seed_cell)) return out;
  std::vector<std::size_t> stack{seed_cell};
  out.set(seed_cell);
  const int n = spec.dim();
  while (!stack.empty()) {
    std::size_t idx = stack.back();
    stack.pop_back();
    CellIndex c = spec.unlinear(idx);
    for (int a = 0; a < n; ++a)
      for (int s : {-1, 1}) {
        CellIndex nb = c;
        nb[a] += s;
        if (!spec.contains(nb)) continue;
        std::size_t j = spec.linear(nb);
        if (g.test(j) && !out.test(j)) {
          out.set(j);
          stack.push_back(j);
        }
      }
  }
  return out;
}

Verdict component_of_hull(const VoxelGrid& d, const Family& w, std::size_t budget,
                          std::uint64_t seed, unsigned threads) {
  check_family(d, w);
  if (d.empty()) throw Error(ErrorCode::EmptyGrid, "component_of_hull needs a nonempty set");
  std::size_t first = 0;
  while (!d.test(first)) ++first;
  if (component_containing(d, first).count() != d.count())
    throw Error(ErrorCode::NotConnected, "set is not face-connected");

  Verdict v = make_verdict("component_of_hull", d, w, budget, seed);
  VoxelGrid hull = hull_wrt(d, w, budget, seed, threads);
  VoxelGrid comp = component_containing(hull, first);
  VoxelGrid excess = subtract(comp, dilate(d, 1, true));
  v.cells_checked = comp.count();
  v.extra["component_cells"] = comp.count();
  v.extra["set_cells"] = d.count();
  v.extra["cells_beyond_slack"] = excess.count();
  v.extra["hull_cells"] = hull.count();
  if (!excess.empty()) {
    v.holds = false;
    std::size_t i = 0;
    while (!excess.test(i)) ++i;
    v.witness_cell = d.spec().unlinear(i);
  }
  return v;
}

}  // namespace linconvex
