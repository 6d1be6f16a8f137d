#include "linconvex/props.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "linconvex/duality.hpp"
#include "linconvex/families.hpp"
#include "linconvex/scenes.hpp"
#include "linconvex/vxg.hpp"

namespace linconvex {

namespace {

constexpr int kPrefix = 6;

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * (double(rng() >> 11) * 0x1.0p-53);
}

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

using Samples = std::vector<ParamSample>;

Samples set_union(const Samples& a, const Samples& b) {
  Samples out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

Samples set_intersection(const Samples& a, const Samples& b) {
  Samples out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool includes(const Samples& big, const Samples& small) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

std::string to_vxg(const VoxelGrid& g) {
  std::ostringstream os;
  write_vxg(os, g);
  return os.str();
}

// One randomized instance: dimension, grid and family follow from the seed.
struct Instance {
  std::mt19937_64 rng;
  int n;
  GridSpec spec;
  Family family;
  Samples samples;

  Instance(std::uint64_t seed, std::size_t budget, int res2 = 16, int res3 = 10)
      : rng(mix(seed)), n(seed % 2 ? 3 : 2) {
    int r = n == 2 ? res2 : res3;
    spec = GridSpec(BoundingBox::cube(n, -1, 1), {r, r, n == 3 ? r : 0, 0});
    family = (n == 3 && (seed >> 1) % 2) ? Family::parallel_lines_3d() : Family::all_hyperplanes(n);
    samples = sample_params(family, budget, spec.box(), seed);
  }

  Samples conj(const VoxelGrid& e) const { return conjugate_with(e, family, samples).samples; }
  VoxelGrid hull(const VoxelGrid& e) const { return hull_with(e, family, samples); }
};

void record(nlohmann::json* payload, std::uint64_t ts, std::size_t budget, const Family& w,
            const std::vector<VoxelGrid>& grids, nlohmann::json detail) {
  if (!payload) return;
  nlohmann::json g = nlohmann::json::array();
  nlohmann::json shas = nlohmann::json::array();
  for (const auto& x : grids) {
    g.push_back(to_vxg(x));
    shas.push_back(grid_sha(x));
  }
  *payload = {{"trial_seed", ts}, {"budget", budget},   {"family", w.descriptor()},
              {"grids", g},       {"grid_shas", shas}, {"detail", detail}};
}

bool trial_p1(std::uint64_t ts, std::size_t budget, nlohmann::json* payload) {
  Instance in(ts, budget);
  VoxelGrid e = random_grid(in.spec, in.rng);
  VoxelGrid e1 = intersect(e, random_grid(in.spec, in.rng));
  Samples ce = in.conj(e), ce1 = in.conj(e1);
  bool conj_ok = includes(ce1, ce);
  bool hull_ok = is_subset(in.hull(e1), in.hull(e));
  record(payload, ts, budget, in.family, {e, e1},
         {{"conjugate_monotone", conj_ok}, {"hull_monotone", hull_ok}});
  return conj_ok && hull_ok;
}

bool trial_p2(std::uint64_t ts, std::size_t budget, nlohmann::json* payload, bool* nonvacuous) {
  std::mt19937_64 rng(mix(ts));
  const int r = 16, depth = 6;
  GridSpec s2(BoundingBox::cube(2, -1, 1), {r, r, 0, 0});
  VoxelGrid f = (ts % 3 == 0) ? random_grid(s2, rng) : random_convex_grid(s2, rng);
  GridSpec s3(BoundingBox::cube(3, -1, 1), {r, r, depth, 0});
  VoxelGrid e(s3);
  for (std::size_t i = 0; i < s3.cell_count(); ++i) {
    CellIndex c = s3.unlinear(i);
    if (f.test(CellIndex{c[0], c[1], 0, 0})) e.set(i);
  }
  Family lines = Family::all_hyperplanes(2);
  Family pulled = Family::pullback_lines(3, 0, 1);
  bool base = is_convex_wrt(f, lines, budget, ts).holds;
  bool lifted = base ? is_convex_wrt(e, pulled, budget, ts).holds : true;
  if (nonvacuous) *nonvacuous = base;
  record(payload, ts, budget, pulled, {f, e}, {{"base_convex", base}, {"preimage_convex", lifted}});
  return !base || lifted;
}

bool trial_p3(std::uint64_t ts, std::size_t budget, nlohmann::json* payload) {
  Instance in(ts, budget);
  VoxelGrid a = random_grid(in.spec, in.rng), b = random_grid(in.spec, in.rng),
            c = random_grid(in.spec, in.rng);
  Samples lhs = in.conj(unite(unite(a, b), c));
  Samples rhs = set_intersection(set_intersection(in.conj(a), in.conj(b)), in.conj(c));
  record(payload, ts, budget, in.family, {a, b, c},
         {{"lhs", lhs.size()}, {"rhs", rhs.size()}});
  return lhs == rhs;
}

bool trial_p4(std::uint64_t ts, std::size_t budget, nlohmann::json* payload) {
  Instance in(ts, budget);
  VoxelGrid e = random_grid(in.spec, in.rng);
  VoxelGrid h = in.hull(e);
  bool contained = is_subset(e, h);
  bool triple = in.conj(h) == in.conj(e);
  bool idem = in.hull(h) == h;
  record(payload, ts, budget, in.family, {e},
         {{"contained", contained}, {"triple_conjugate", triple}, {"idempotent", idem}});
  return contained && triple && idem;
}

bool trial_p5(std::uint64_t ts, std::size_t budget, nlohmann::json* payload) {
  Instance in(ts, budget);
  VoxelGrid a = in.hull(random_grid(in.spec, in.rng));
  VoxelGrid b = in.hull(random_grid(in.spec, in.rng));
  bool convex_inputs = in.hull(a) == a && in.hull(b) == b;
  VoxelGrid i = intersect(a, b);
  bool closed = in.hull(i) == i;
  record(payload, ts, budget, in.family, {a, b},
         {{"inputs_convex", convex_inputs}, {"intersection_convex", closed}});
  return convex_inputs && closed;
}

// Closed ball (or cube when `cube`) of radius r around c.
VoxelGrid shape_grid(const GridSpec& spec, const Coord& c, double r, bool cube) {
  VoxelGrid g(spec);
  for (std::size_t i = 0; i < spec.cell_count(); ++i) {
    Coord x = spec.cell_center(spec.unlinear(i));
    double d2 = 0, dmax = 0;
    for (int a = 0; a < spec.dim(); ++a) {
      d2 += (x[a] - c[a]) * (x[a] - c[a]);
      dmax = std::max(dmax, std::abs(x[a] - c[a]));
    }
    if (cube ? dmax <= r + 1e-12 : d2 <= r * r + 1e-12) g.set(i);
  }
  return g;
}

bool trial_p6(std::uint64_t ts, std::size_t budget, nlohmann::json* payload) {
  Instance in(ts, budget);
  // Nested compacts E_k = ball or cube (c, rho (1 + 1/k)); trial 0 uses
  // balls with rho = 1 in a larger box.
  Coord c{};
  double rho = 1;
  bool cubes = false;
  GridSpec spec = in.spec;
  Samples samples = in.samples;
  if (ts == 0) {
    int r = in.spec.res()[0];
    spec = GridSpec(BoundingBox::cube(in.n, -2.5, 2.5), {r, r, in.n == 3 ? r : 0, 0});
    samples = sample_params(in.family, budget, spec.box(), ts);
  } else {
    for (int a = 0; a < in.n; ++a) c[a] = uniform(in.rng, -0.2, 0.2);
    rho = uniform(in.rng, 0.25, 0.4);
    cubes = in.rng() % 2;
  }
  std::vector<VoxelGrid> ek;
  VoxelGrid meet = complement(VoxelGrid(spec));
  Samples joined;
  for (int k = 1; k <= kPrefix; ++k) {
    ek.push_back(shape_grid(spec, c, rho * (1 + 1.0 / k), cubes));
    meet = intersect(meet, ek.back());
    joined = set_union(joined, conjugate_with(ek.back(), in.family, samples).samples);
  }
  Samples lhs = conjugate_with(meet, in.family, samples).samples;
  record(payload, ts, budget, in.family, {ek.front(), ek.back()},
         {{"lhs", lhs.size()}, {"rhs", joined.size()}});
  return lhs == joined;
}

bool trial_p7(std::uint64_t ts, std::size_t budget, nlohmann::json* payload) {
  Instance in(ts, budget);
  VoxelGrid e = random_grid(in.spec, in.rng);
  // D_k = E dilated by K - k cells: a decreasing sequence of neighbourhoods
  // ending at E.
  Samples joined;
  VoxelGrid meet = complement(VoxelGrid(in.spec));
  for (int k = 1; k <= kPrefix; ++k) {
    VoxelGrid d = dilate(e, kPrefix - k, true);
    joined = set_union(joined, in.conj(d));
    meet = intersect(meet, in.hull(d));
  }
  bool conj_ok = in.conj(e) == joined;
  bool hull_ok = in.hull(e) == meet;
  record(payload, ts, budget, in.family, {e}, {{"conjugate_union", conj_ok}, {"hull_meet", hull_ok}});
  return conj_ok && hull_ok;
}

bool trial_p8(std::uint64_t ts, std::size_t budget, nlohmann::json* payload) {
  if (ts == 0) {
    VoxelGrid d = scene(default_scene("square_annulus", 32));
    Family w = Family::parallel_lines_3d();
    std::size_t b = std::max<std::size_t>(budget, 100000);
    bool weak = is_weakly_convex(d, w, b, 42).holds;
    Verdict v = component_of_hull(d, w, b, 42);
    record(payload, ts, b, w, {d}, {{"weakly_convex", weak}, {"component", v.to_json(d.spec())}});
    return weak && v.holds;
  }
  std::mt19937_64 rng(mix(ts));
  int n = ts % 2 ? 3 : 2;
  int r = n == 2 ? 24 : 12;
  GridSpec spec(BoundingBox::cube(n, -1, 1), {r, r, n == 3 ? r : 0, 0});
  VoxelGrid d = random_convex_grid(spec, rng);
  Family w = Family::all_hyperplanes(n);
  bool weak = is_weakly_convex(d, w, budget, ts).holds;
  Verdict v = component_of_hull(d, w, budget, ts);
  record(payload, ts, budget, w, {d}, {{"weakly_convex", weak}, {"component", v.to_json(spec)}});
  return weak && v.holds;
}

std::uint64_t trial_seed(std::uint64_t seed, int t) {
  return t == 0 ? 0 : mix(seed * 1000003ULL + std::uint64_t(t));
}

}  // namespace

VoxelGrid random_grid(const GridSpec& spec, std::mt19937_64& rng) {
  const int n = spec.dim();
  const auto& box = spec.box();
  VoxelGrid g(spec);
  int parts = 1 + int(rng() % 4);
  for (int p = 0; p < parts; ++p) {
    Coord lo{}, hi{}, normal{};
    for (int a = 0; a < n; ++a) {
      double u = uniform(rng, box.lo()[a], box.hi()[a]);
      double v = uniform(rng, box.lo()[a], box.hi()[a]);
      lo[a] = std::min(u, v);
      hi[a] = std::max(u, v);
      normal[a] = uniform(rng, -1, 1);
    }
    bool cut = rng() % 2;
    Coord mid{};
    for (int a = 0; a < n; ++a) mid[a] = 0.5 * (lo[a] + hi[a]) + uniform(rng, -0.2, 0.2);
    for (std::size_t i = 0; i < spec.cell_count(); ++i) {
      Coord x = spec.cell_center(spec.unlinear(i));
      bool in = true;
      for (int a = 0; a < n && in; ++a) in = x[a] >= lo[a] && x[a] <= hi[a];
      if (in && cut) {
        double s = 0;
        for (int a = 0; a < n; ++a) s += normal[a] * (x[a] - mid[a]);
        in = s <= 0;
      }
      if (in) g.set(i);
    }
  }
  return g;
}

VoxelGrid random_convex_grid(const GridSpec& spec, std::mt19937_64& rng, double core) {
  const int n = spec.dim();
  Coord c = spec.box().center();
  VoxelGrid g = complement(VoxelGrid(spec));
  int cuts = 3 + int(rng() % 4);
  for (int k = 0; k < cuts; ++k) {
    Coord u{};
    double len = 0;
    for (int a = 0; a < n; ++a) {
      u[a] = uniform(rng, -1, 1);
      len += u[a] * u[a];
    }
    len = std::sqrt(len);
    if (len < 1e-9) continue;
    double off = uniform(rng, core, 0.8);
    for (std::size_t i = 0; i < spec.cell_count(); ++i) {
      Coord x = spec.cell_center(spec.unlinear(i));
      double s = 0;
      for (int a = 0; a < n; ++a) s += u[a] / len * (x[a] - c[a]);
      if (s > off) g.set(i, false);
    }
  }
  // Keep the set off the box faces so it is a bounded body.
  VoxelGrid shell = boundary_cells(complement(VoxelGrid(spec)), BoxFaces::Exterior);
  return subtract(g, shell);
}

nlohmann::json PropertyReport::to_json() const {
  nlohmann::json j = {{"id", id},
                      {"trials", trials},
                      {"failures", failures},
                      {"nonvacuous", nonvacuous},
                      {"finite_prefix", finite_prefix},
                      {"status", pass() ? "pass" : "fail"}};
  if (!counterexample.is_null()) j["counterexample"] = counterexample;
  return j;
}

std::vector<std::string> property_ids() { return {"P1", "P2", "P3", "P4", "P5", "P6", "P7", "P8"}; }

bool property_trial(const std::string& id, std::uint64_t ts, std::size_t budget,
                    nlohmann::json* payload) {
  bool ok;
  if (id == "P1") ok = trial_p1(ts, budget, payload);
  else if (id == "P2") ok = trial_p2(ts, budget, payload, nullptr);
  else if (id == "P3") ok = trial_p3(ts, budget, payload);
  else if (id == "P4") ok = trial_p4(ts, budget, payload);
  else if (id == "P5") ok = trial_p5(ts, budget, payload);
  else if (id == "P6") ok = trial_p6(ts, budget, payload);
  else if (id == "P7") ok = trial_p7(ts, budget, payload);
  else if (id == "P8") ok = trial_p8(ts, budget, payload);
  else throw Error(ErrorCode::InvalidArgument, "unknown property '" + id + "'");
  if (payload) (*payload)["property"] = id;
  return ok;
}

PropertyReport run_property(const std::string& id, int trials, std::size_t budget,
                            std::uint64_t seed) {
  if (trials < 1) throw Error(ErrorCode::InvalidArgument, "trials must be at least 1");
  auto t0 = std::chrono::steady_clock::now();
  PropertyReport r;
  r.id = id;
  r.finite_prefix = id == "P6" || id == "P7";
  // P8: the annulus plus at most ten random convex bodies.
  int count = id == "P8" ? 1 + std::min(trials, 10) : trials;
  for (int t = 0; t < count; ++t) {
    std::uint64_t ts = trial_seed(seed, t);
    nlohmann::json payload;
    bool ok;
    if (id == "P2") {
      bool used = false;
      ok = trial_p2(ts, budget, &payload, &used);
      payload["property"] = id;
      r.nonvacuous += used;
    } else {
      ok = property_trial(id, ts, budget, &payload);
      r.nonvacuous += 1;
    }
    ++r.trials;
    if (!ok) {
      if (r.failures == 0) r.counterexample = payload;
      ++r.failures;
    }
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

void replay_counterexample(const nlohmann::json& cx) {
  if (!cx.contains("property") || !cx.contains("trial_seed"))
    throw Error(ErrorCode::ReplayMismatch, "counterexample payload is incomplete");
  nlohmann::json again;
  bool ok = property_trial(cx["property"].get<std::string>(), cx["trial_seed"].get<std::uint64_t>(),
                           cx["budget"].get<std::size_t>(), &again);
  if (again["grid_shas"] != cx["grid_shas"])
    throw Error(ErrorCode::ReplayMismatch, "replay regenerated different grids");
  if (ok) throw Error(ErrorCode::ReplayMismatch, "recorded counterexample passes on replay");
}

}  // namespace linconvex
