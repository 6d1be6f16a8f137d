// One PASS/FAIL line per acceptance criterion. Exit status 1 when any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "linconvex/duality.hpp"
#include "linconvex/error.hpp"
#include "linconvex/lab.hpp"
#include "linconvex/projective.hpp"
#include "linconvex/props.hpp"
#include "linconvex/raster.hpp"
#include "linconvex/scenes.hpp"
#include "linconvex/topology.hpp"
#include "linconvex/vxg.hpp"

using namespace linconvex;

namespace {

// Wall-clock limits in seconds.
constexpr double kTorusLimit = 300;
constexpr double kUnionLimit = 60;
constexpr double kPropsLimit = 600;
// Finite-difference agreement for the hyperbola gradient.
constexpr double kGradTol = 1e-6;
constexpr std::size_t kBudget = 10000;
constexpr std::uint64_t kSeed = 42;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

RunConfig config(const std::string& command, const std::string& scene, int res = 0) {
  RunConfig c;
  c.command = command;
  c.scene = scene;
  if (res > 0) c.res = {res};
  return c;
}

nlohmann::json report(const RunConfig& c) { return nlohmann::json::parse(run_command(c).report); }

std::vector<std::size_t> betti_of(const nlohmann::json& j) {
  return j["betti"].get<std::vector<std::size_t>>();
}

std::string show(const std::vector<std::size_t>& b) {
  std::string s = "(";
  for (std::size_t i = 0; i < b.size(); ++i) s += (i ? "," : "") + std::to_string(b[i]);
  return s + ")";
}

bool euler_poincare(const Homology& h) {
  long long chi_cells = 0, chi_betti = 0;
  for (std::size_t k = 0; k < h.cells.size(); ++k) {
    long long sign = k % 2 ? -1 : 1;
    chi_cells += sign * static_cast<long long>(h.cells[k]);
    if (k < h.betti.b.size()) chi_betti += sign * static_cast<long long>(h.betti.b[k]);
  }
  return chi_cells == chi_betti;
}

Outcome torus() {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  auto b = report(config("betti", "square_annulus", 96));
  std::vector<std::size_t> want{1, 2, 1, 0};
  o.require(betti_of(b) == want, "betti " + show(betti_of(b)));
  o.require(b["class"] == "torus_like", "class " + b["class"].get<std::string>());
  RunConfig c = config("check", "square_annulus", 96);
  c.family = "ParallelLines3D";
  c.budget = kBudget;
  auto v = report(c);
  o.require(v["verdict"]["status"] == "holds", "check " + v["verdict"]["status"].get<std::string>());
  double s = since(t0);
  o.require(s < kTorusLimit, "runtime " + format_float(s) + "s");
  o.detail = o.pass ? "betti (1,2,1,0) torus_like, ParallelLines3D holds, " + format_float(s) + "s"
                    : o.detail;
  return o;
}

Outcome spheres() {
  Outcome o;
  for (const std::string name : {"ball", "slicewise_blob"}) {
    std::vector<std::vector<std::size_t>> seen;
    for (int res : {48, 96}) {
      auto j = report(config("betti", name, res));
      seen.push_back(betti_of(j));
      o.require(betti_of(j) == std::vector<std::size_t>{1, 0, 1, 0},
                name + "@" + std::to_string(res) + " betti " + show(betti_of(j)));
      o.require(j["class"] == "sphere", name + "@" + std::to_string(res) + " class");
    }
    o.require(seen[0] == seen[1], name + " unstable across resolutions");
  }
  if (o.pass) o.detail = "ball, slicewise_blob at 48^3 and 96^3: (1,0,1,0) sphere";
  return o;
}

Outcome union_counterexample() {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  for (int n : {1, 2, 4, 8}) {
    RunConfig c = config("check", "fan");
    c.params["n"] = n;
    c.budget = kBudget;
    auto j = report(c);
    o.require(j["verdict"]["status"] == "holds", "fan n=" + std::to_string(n) + " fails");
  }
  RunConfig c = config("check", "fan_union");
  c.budget = kBudget;
  auto j = report(c);
  o.require(j["verdict"]["status"] == "fails", "fan_union holds");
  VoxelGrid d = scene(default_scene("fan_union"));
  const GridSpec& s = d.spec();
  bool contains = false;
  if (j["verdict"].contains("witness_cell")) {
    auto w = j["verdict"]["witness_cell"];
    Coord lo, hi;
    s.cell_bounds({w[0].get<int>(), w[1].get<int>(), 0, 0}, lo, hi);
    contains = lo[0] <= 0 && hi[0] >= 0 && lo[1] <= 1 && hi[1] >= 1;
  }
  o.require(contains, "witness cell does not contain (0,1)");
  int reported = j.contains("witness_replay") ? j["witness_replay"]["hitting"].get<int>() : 0;
  o.require(reported >= 180, "replay " + std::to_string(reported) + "/180");
  // Independent replay: 180 lines through (0,1) with evenly spaced normals.
  int hits = 0;
  for (int k = 0; k < 180; ++k) {
    double t = (k + 0.5) * M_PI / 180;
    Coord nrm{std::cos(t), std::sin(t), 0, 0};
    bool hit = false;
    for (auto i : rasterize_linear(AffineSubspace::hyperplane(2, nrm, nrm[1]), s)) hit |= d.test(i);
    hits += hit;
  }
  o.require(hits == 180, "direct replay " + std::to_string(hits) + "/180");
  double sec = since(t0);
  o.require(sec < kUnionLimit, "runtime " + format_float(sec) + "s");
  if (o.pass)
    o.detail = "fan 1,2,4,8 hold; fan_union fails at (0,1); replay " + std::to_string(reported) +
               "/180 and " + std::to_string(hits) + "/180; " + format_float(sec) + "s";
  return o;
}

Outcome algebra() {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  std::string summary;
  for (const std::string id : {"P1", "P3", "P4", "P5", "P6", "P7", "P8"}) {
    PropertyReport r = run_property(id, 100, 2000, kSeed);
    o.require(r.pass(), id + " failures " + std::to_string(r.failures) + "/" + std::to_string(r.trials));
    if (id == "P6" || id == "P7") o.require(r.finite_prefix, id + " finite prefix");
    if (id == "P8") o.require(r.trials >= 11, "P8 instances " + std::to_string(r.trials));
    summary += id + " " + std::to_string(r.trials) + "/" + std::to_string(r.failures) + " ";
  }
  double sec = since(t0);
  o.require(sec < kPropsLimit, "runtime " + format_float(sec) + "s");
  if (o.pass) o.detail = summary + "(trials/failures), " + format_float(sec) + "s";
  return o;
}

Outcome hyperbola() {
  Outcome o;
  VoxelGrid g = scene(default_scene("hyperbola_shell", 96));
  const GridSpec& s = g.spec();
  auto rep = slice_convexity_report(g, 2, Family::all_hyperplanes(2), kBudget, kSeed, true);
  int nonempty = 0;
  for (const auto& r : rep) {
    if (std::abs(r.coord) >= 1) continue;
    ++nonempty;
    o.require(r.components == 2, "slice " + std::to_string(r.index) + " has " +
                                     std::to_string(r.components) + " components");
    o.require(r.holds, "slice " + std::to_string(r.index) + " not convex");
  }
  o.require(nonempty >= 30, "only " + std::to_string(nonempty) + " slices with |d| < 1");
  // For |x3| >= 1 the shell crosses x1 = 0; only the split slices count.
  for (const auto& c : g.occupied_cells()) {
    Coord lo, hi;
    s.cell_bounds(c, lo, hi);
    if (std::abs(s.center_coord(2, c[2])) < 1 && lo[0] <= 0 && hi[0] >= 0) {
      o.require(false, "cell touches x1 = 0");
      break;
    }
  }
  double gmin = gradient_check(g);
  o.require(gmin > 0, "gradient min " + format_float(gmin));
  std::mt19937_64 rng(kSeed);
  std::uniform_real_distribution<double> u(s.box().lo()[0], s.box().hi()[0]);
  double worst = 0;
  const double h = 1e-5;
  for (int t = 0; t < 1000; ++t) {
    Coord x{u(rng), u(rng), u(rng), 0};
    Coord sym = hyperbola_gradient(x);
    for (int a = 0; a < 3; ++a) {
      Coord p = x, m = x;
      p[a] += h;
      m[a] -= h;
      worst = std::max(worst, std::abs((hyperbola_f(p) - hyperbola_f(m)) / (2 * h) - sym[a]));
    }
  }
  o.require(worst <= kGradTol, "finite difference gap " + format_float(worst));
  if (o.pass)
    o.detail = std::to_string(nonempty) + " slices with 2 convex components, gradient min " +
               format_float(gmin) + ", fd gap " + format_float(worst);
  return o;
}

Outcome pipeline() {
  Outcome o;
  VoxelGrid src = scene(default_scene("pencil_frustum", 128));
  Normalization nm =
      projective_normalize(Family::pencil_lines_3d(), AffineSubspace::hyperplane(3, {1, 0, 0, 0}, 0));
  GridSpec target(BoundingBox(3, {-0.5, -0.5, 0.4, 0}, {0.5, 0.5, 0.8, 0}), {64, 64, 64, 0});
  VoxelGrid img = resample_through_map(src, nm.map, target);
  o.require(img.count() > 0, "empty image");
  Verdict v = is_convex_wrt(img, nm.image_family, kBudget, kSeed);
  o.require(v.holds, "image not convex under " + nm.image_family.name());
  SphereResult pre = sphere_test(scene(default_scene("pencil_frustum", 64)));
  SphereResult post = sphere_test(img);
  o.require(pre.cls == post.cls, "class " + to_string(pre.cls) + " vs " + to_string(post.cls));
  if (o.pass)
    o.detail = "image convex under " + nm.image_family.name() + ", class " + to_string(post.cls) +
               " " + post.betti.str() + " matches pre-image";
  return o;
}

Outcome kernel() {
  Outcome o;
  GridSpec c3(BoundingBox::cube(3, 0, 1), {1, 1, 1, 0});
  VoxelGrid cube(c3);
  cube.set(0);
  Homology hc = homology(build_complex(cube));
  o.require(hc.betti.b == std::vector<std::size_t>{1, 0, 0, 0}, "cube " + show(hc.betti.b));

  GridSpec r2(BoundingBox::cube(2, 0, 1), {8, 8, 0, 0});
  VoxelGrid ring(r2);
  for (int i = 1; i < 7; ++i)
    for (int j = 1; j < 7; ++j)
      if (i < 3 || i > 4 || j < 3 || j > 4) ring.set({i, j, 0, 0});
  Homology hr = homology(build_complex(ring));
  o.require(hr.betti.b.size() >= 2 && hr.betti.b[0] == 1 && hr.betti.b[1] == 1,
            "ring " + show(hr.betti.b));

  std::vector<VoxelGrid> suite{cube, ring, scene(default_scene("ball", 32)),
                               scene(default_scene("square_annulus", 48)),
                               scene(default_scene("slicewise_blob", 32))};
  for (std::size_t i = 0; i < suite.size(); ++i)
    o.require(euler_poincare(homology(build_complex(suite[i]))), "Euler-Poincare on #" + std::to_string(i));

  for (const auto& g : suite) {
    std::stringstream buf;
    write_vxg(buf, g);
    std::string first = buf.str();
    VoxelGrid back = read_vxg(buf);
    std::stringstream again;
    write_vxg(again, back);
    o.require(back == g && again.str() == first, "VXG round-trip");
  }

  VoxelGrid ball = scene(default_scene("ball", 32));
  Family w = Family::all_hyperplanes(3);
  ConjugateSet seq = conjugate(ball, w, kBudget, kSeed, 1);
  ConjugateSet par = conjugate(ball, w, kBudget, kSeed, 8);
  o.require(seq.samples == par.samples, "parallel conjugate differs");
  o.require(double_conjugate(seq, ball.spec(), 1) == double_conjugate(par, ball.spec(), 8),
            "parallel double conjugate differs");
  if (o.pass) o.detail = "cube (1,0,0,0), ring (1,1), Euler-Poincare, VXG, parallel == sequential";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"AC1 torus counterexample", torus},
      {"AC2 sphere positive control", spheres},
      {"AC3 union counterexample", union_counterexample},
      {"AC4 duality algebra", algebra},
      {"AC5 hyperbola shell", hyperbola},
      {"AC6 projective pipeline", pipeline},
      {"AC7 kernel checks", kernel},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += !o.pass;
    std::printf("%s %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(),
                since(t0));
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
