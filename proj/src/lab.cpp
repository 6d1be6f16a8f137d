#include "linconvex/lab.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "linconvex/duality.hpp"
#include "linconvex/families.hpp"
#include "linconvex/props.hpp"
#include "linconvex/raster.hpp"
#include "linconvex/scenes.hpp"
#include "linconvex/topology.hpp"
#include "linconvex/vxg.hpp"

namespace linconvex {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// A grid plus what is known about where it came from.
struct Loaded {
  std::string name;
  VoxelGrid grid;
  SceneInfo info;
  std::optional<SceneSpec> spec;
};

SceneSpec scene_spec(const RunConfig& cfg, const std::string& name, int cubic_res = 0) {
  SceneSpec s = default_scene(name, cubic_res);
  int n = s.box.dim();
  if (!cfg.res.empty() && cubic_res == 0) {
    if (cfg.res.size() == 1) {
      for (int a = 0; a < n; ++a) s.res[a] = cfg.res[0];
    } else {
      int m = int(cfg.res.size());
      if (m > kMaxDim) throw Error(ErrorCode::InvalidArgument, "too many --res entries");
      if (m != n) {
        // Same scene in another dimension (ball accepts 2D): keep the default
        // extent on the first axes.
        Coord lo{}, hi{};
        for (int a = 0; a < m; ++a) {
          lo[a] = s.box.lo()[std::min(a, n - 1)];
          hi[a] = s.box.hi()[std::min(a, n - 1)];
        }
        s.box = BoundingBox(m, lo, hi);
        n = m;
      }
      s.res = {};
      for (int a = 0; a < m; ++a) s.res[a] = cfg.res[a];
    }
  }
  if (cfg.box) s.box = BoundingBox::cube(n, cfg.box->first, cfg.box->second);
  for (const auto& [k, v] : cfg.params) s.params[k] = v;
  return s;
}

Loaded load(const RunConfig& cfg) {
  Loaded l;
  if (!cfg.input.empty()) {
    l.grid = load_vxg(cfg.input);
    std::string stem = cfg.input.substr(cfg.input.find_last_of('/') + 1);
    l.name = stem.substr(0, stem.find('.'));
    l.info.name = l.name;
    l.info.dim = l.grid.dim();
    return l;
  }
  if (cfg.scene.empty()) throw Error(ErrorCode::InvalidArgument, "--scene or --in is required");
  l.name = cfg.scene;
  l.info = scene_info(cfg.scene);
  l.spec = scene_spec(cfg, cfg.scene);
  l.grid = scene(*l.spec);
  return l;
}

Family family_for(const RunConfig& cfg, const Loaded& l) {
  std::string name = cfg.family.empty() ? default_family(l.name) : cfg.family;
  return Family::parse(name, l.grid.dim());
}

BoxFaces faces_for(const SceneInfo& info) {
  return info.bounded ? BoxFaces::Exterior : BoxFaces::Ignore;
}

std::string res_string(const GridSpec& s) {
  std::string out;
  for (int a = 0; a < s.dim(); ++a) out += (a ? "x" : "") + std::to_string(s.res()[a]);
  return out;
}

std::string caveat(const SceneInfo& info) {
  std::string c;
  if (!info.bounded) c = "unbounded";
  if (info.standin) c += std::string(c.empty() ? "" : ";") + "standin";
  return c;
}

nlohmann::json scene_flags(const Loaded& l) {
  return {{"scene", l.name},
          {"res", res_string(l.grid.spec())},
          {"openness", l.info.openness == Openness::Open ? "open" : "closed"},
          {"unbounded_caveat", !l.info.bounded},
          {"standin", l.info.standin}};
}

std::string dump(nlohmann::json j) {
  round_floats(j);
  return j.dump(2) + "\n";
}

std::string csv_cell_index(const std::optional<CellIndex>& c, int n) {
  if (!c) return "";
  std::string out;
  for (int a = 0; a < n; ++a) out += (a ? " " : "") + std::to_string((*c)[a]);
  return out;
}

int verdict_exit(bool holds, bool expect_fail) { return holds != expect_fail ? 0 : 1; }

Verdict run_check(const RunConfig& cfg, const Loaded& l, const Family& w) {
  if (cfg.weak) return is_weakly_convex(l.grid, w, cfg.budget, cfg.seed, faces_for(l.info));
  ConvexityOptions opts;
  opts.probes = l.info.probes;
  opts.probes.insert(opts.probes.end(), cfg.probes.begin(), cfg.probes.end());
  return is_convex_wrt(l.grid, w, cfg.budget, cfg.seed, opts);
}

// Lines through a failure point and how many of them meet D.
nlohmann::json witness_replay(const VoxelGrid& d, const Family& w, const Coord& p,
                              std::uint64_t seed) {
  std::vector<ParamSample> through = elements_through(w, p, 180, seed);
  std::size_t hit = 0;
  for (const auto& s : through)
    if (!subspace_misses(d, w.element(s))) ++hit;
  return {{"sampled", through.size()}, {"hitting", hit}};
}

std::string betti_cells(const BettiVector& b) {
  std::string out;
  for (int k = 0; k < 4; ++k) {
    out += std::to_string(k < int(b.b.size()) ? b.b[k] : 0);
    out += k < 3 ? "," : "";
  }
  return out;
}

int bump_odd(const std::string& scene, int r) {
  return (scene == "fan" || scene == "fan_union") && r % 2 == 0 ? r + 1 : r;
}

}  // namespace

std::string default_family(const std::string& scene) {
  if (scene == "square_annulus") return "ParallelLines3D";
  if (scene == "hyperbola_shell") return "ParallelCodim2:2";
  if (scene == "pencil_frustum") return "PencilLines3D";
  return "AllHyperplanes";
}

std::string format_float(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

void round_floats(nlohmann::json& j) {
  if (j.is_number_float()) {
    j = std::strtod(format_float(j.get<double>()).c_str(), nullptr);
  } else if (j.is_structured()) {
    for (auto& v : j) round_floats(v);
  }
}

std::string to_pgm(const VoxelGrid& g) {
  if (g.dim() != 2) throw Error(ErrorCode::DimMismatch, "PGM needs a 2D grid");
  const auto& r = g.spec().res();
  std::string out = "P5\n" + std::to_string(r[1]) + " " + std::to_string(r[0]) + "\n255\n";
  for (std::size_t i = 0; i < g.spec().cell_count(); ++i) out.push_back(g.test(i) ? char(255) : 0);
  return out;
}

CommandResult cmd_scene(const RunConfig& cfg) {
  Loaded l = load(cfg);
  CommandResult r;
  std::ostringstream vxg;
  write_vxg(vxg, l.grid);
  r.files.push_back({l.name + ".vxg", vxg.str()});
  const GridSpec& s = l.grid.spec();
  int layers = 0;
  if (cfg.slices) {
    if (l.grid.dim() == 2) {
      r.files.push_back({l.name + ".pgm", to_pgm(l.grid)});
      layers = 1;
    } else {
      int axis = l.grid.dim() - 1;
      for (int k = 0; k < s.res()[axis]; ++k)
        r.files.push_back({l.name + "_slice_" + std::to_string(k) + ".pgm",
                           to_pgm(l.grid.dim() == 3 ? slice(l.grid, axis, k)
                                                    : slice(slice(l.grid, axis, k), axis - 1, 0))});
      layers = s.res()[axis];
    }
  }
  nlohmann::json box_lo = nlohmann::json::array(), box_hi = nlohmann::json::array();
  for (int a = 0; a < s.dim(); ++a) {
    box_lo.push_back(s.box().lo()[a]);
    box_hi.push_back(s.box().hi()[a]);
  }
  nlohmann::json j = scene_flags(l);
  j["command"] = "scene";
  j["box"] = {{"lo", box_lo}, {"hi", box_hi}};
  j["params"] = l.spec ? nlohmann::json(l.spec->params) : nlohmann::json::object();
  j["formula"] = l.info.formula;
  j["cells"] = l.grid.count();
  j["grid_sha"] = grid_sha(l.grid);
  j["pgm_layers"] = layers;
  if (cfg.format == "csv") {
    r.report = "scene,res,cells,grid_sha\n" + l.name + "," + res_string(s) + "," +
               std::to_string(l.grid.count()) + "," + grid_sha(l.grid) + "\n";
  } else {
    r.report = dump(j);
  }
  return r;
}

CommandResult cmd_check(const RunConfig& cfg) {
  auto t0 = Clock::now();
  Loaded l = load(cfg);
  Family w = family_for(cfg, l);
  Verdict v = run_check(cfg, l, w);
  CommandResult r;
  r.exit_code = verdict_exit(v.holds, cfg.expect_fail);
  nlohmann::json j = scene_flags(l);
  j["command"] = "check";
  j["expect"] = cfg.expect_fail ? "fail" : "holds";
  j["verdict"] = v.to_json(l.grid.spec());
  if (!v.holds && v.witness_point)
    j["witness_replay"] = witness_replay(l.grid, w, *v.witness_point, cfg.seed);
  if (cfg.timing) j["seconds"] = since(t0);
  if (cfg.format == "csv") {
    r.report = "scene,res,kind,family,budget,seed,status,witness_cell,grid_sha\n" + l.name + "," +
               res_string(l.grid.spec()) + "," + v.kind + "," + w.name() + "," +
               std::to_string(cfg.budget) + "," + std::to_string(cfg.seed) + "," +
               (v.holds ? "holds" : "fails") + "," +
               csv_cell_index(v.witness_cell, l.grid.dim()) + "," + v.grid_sha + "\n";
  } else {
    r.report = dump(j);
  }
  return r;
}

CommandResult cmd_hull(const RunConfig& cfg) {
  Loaded l = load(cfg);
  Family w = family_for(cfg, l);
  VoxelGrid h = hull_wrt(l.grid, w, cfg.budget, cfg.seed, cfg.threads);
  // Chebyshev distance from the input, capped at 4 (-1 beyond).
  int slack = -1;
  for (int k = 0; k <= 4 && !l.grid.empty(); ++k)
    if (is_subset(h, dilate(l.grid, k, true))) {
      slack = k;
      break;
    }
  CommandResult r;
  std::ostringstream vxg;
  write_vxg(vxg, h);
  r.files.push_back({l.name + "_hull.vxg", vxg.str()});
  std::size_t added = subtract(h, l.grid).count();
  if (cfg.format == "csv") {
    r.report = "scene,res,family,budget,seed,input_cells,hull_cells,added_cells,slack,hull_sha\n" +
               l.name + "," + res_string(l.grid.spec()) + "," + w.name() + "," +
               std::to_string(cfg.budget) + "," + std::to_string(cfg.seed) + "," +
               std::to_string(l.grid.count()) + "," + std::to_string(h.count()) + "," +
               std::to_string(added) + "," + std::to_string(slack) + "," + grid_sha(h) + "\n";
  } else {
    nlohmann::json j = scene_flags(l);
    j["command"] = "hull";
    j["family"] = w.descriptor();
    j["budget"] = cfg.budget;
    j["seed"] = cfg.seed;
    j["input_sha"] = grid_sha(l.grid);
    j["hull_sha"] = grid_sha(h);
    j["input_cells"] = l.grid.count();
    j["hull_cells"] = h.count();
    j["added_cells"] = added;
    j["contains_input"] = is_subset(l.grid, h);
    j["slack_cells"] = slack;
    r.report = dump(j);
  }
  return r;
}

CommandResult cmd_betti(const RunConfig& cfg) {
  Loaded l = load(cfg);
  SphereResult s = sphere_test(l.grid, faces_for(l.info));
  CommandResult r;
  std::string cls = to_string(s.cls);
  if (cfg.format == "csv") {
    r.report = std::string("scene,res,b0,b1,b2,b3,class,caveat") + (cfg.timing ? ",seconds" : "") +
               "\n" + l.name + "," + res_string(l.grid.spec()) + "," + betti_cells(s.betti) + "," +
               cls + "," + caveat(l.info) + (cfg.timing ? "," + format_float(s.seconds) : "") +
               "\n";
  } else {
    nlohmann::json j = scene_flags(l);
    j["command"] = "betti";
    j["betti"] = s.betti.b;
    j["class"] = cls;
    j["caveat"] = caveat(l.info);
    j["boundary_cells"] = s.boundary_cells;
    j["grid_sha"] = grid_sha(l.grid);
    if (cfg.timing) j["seconds"] = s.seconds;
    r.report = dump(j);
  }
  return r;
}

CommandResult cmd_sweep(const RunConfig& cfg) {
  if (cfg.scene.empty()) throw Error(ErrorCode::InvalidArgument, "sweep needs --scene");
  if (cfg.res_list.empty() || cfg.budget_list.empty())
    throw Error(ErrorCode::InvalidArgument, "sweep needs at least one res and one budget");
  SceneInfo info = scene_info(cfg.scene);
  struct Row {
    int res;
    std::string res_text;
    std::size_t budget;
    bool holds;
    std::string betti;
    std::string cls;
  };
  std::vector<Row> rows;
  for (int res0 : cfg.res_list) {
    int res = bump_odd(cfg.scene, res0);
    Loaded l;
    l.name = cfg.scene;
    l.info = info;
    l.spec = scene_spec(cfg, cfg.scene, res);
    l.grid = scene(*l.spec);
    std::string betti = ",,,", cls = "n/a";
    try {
      SphereResult s = sphere_test(l.grid, faces_for(info));
      betti = betti_cells(s.betti);
      cls = to_string(s.cls);
    } catch (const Error& e) {
      // Disconnected sets have no single boundary to classify.
      if (e.code() != ErrorCode::NotConnected) throw;
    }
    Family w = family_for(cfg, l);
    for (std::size_t b : cfg.budget_list) {
      RunConfig c = cfg;
      c.budget = b;
      Verdict v = run_check(c, l, w);
      rows.push_back({res, res_string(l.grid.spec()), b, v.holds, betti, cls});
    }
  }
  const Row& finest = rows.back();
  CommandResult r;
  bool all_expected = true;
  for (const auto& row : rows) all_expected &= verdict_exit(row.holds, cfg.expect_fail) == 0;
  r.exit_code = all_expected ? 0 : 1;
  auto stable = [&](const Row& row) { return row.holds == finest.holds && row.cls == finest.cls; };
  std::string family = cfg.family.empty() ? default_family(cfg.scene) : cfg.family;
  if (cfg.format == "csv") {
    std::string out = "scene,res,budget,seed,family,status,b0,b1,b2,b3,class,stable\n";
    for (const auto& row : rows)
      out += cfg.scene + "," + row.res_text + "," + std::to_string(row.budget) + "," +
             std::to_string(cfg.seed) + "," + family + "," + (row.holds ? "holds" : "fails") + "," +
             row.betti + "," + row.cls + "," + (stable(row) ? "yes" : "no") + "\n";
    r.report = out;
  } else {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& row : rows)
      arr.push_back({{"res", row.res_text},
                     {"budget", row.budget},
                     {"status", row.holds ? "holds" : "fails"},
                     {"betti", row.betti},
                     {"class", row.cls},
                     {"stable", stable(row)}});
    r.report = dump({{"command", "sweep"},
                     {"scene", cfg.scene},
                     {"family", family},
                     {"seed", cfg.seed},
                     {"caveat", caveat(info)},
                     {"rows", arr}});
  }
  return r;
}

CommandResult cmd_props(const RunConfig& cfg) {
  std::vector<std::string> ids = cfg.props.empty() ? property_ids() : cfg.props;
  CommandResult r;
  std::vector<PropertyReport> reports;
  for (const auto& id : ids) {
    reports.push_back(run_property(id, cfg.trials, cfg.budget, cfg.seed));
    const auto& p = reports.back();
    if (!p.pass()) {
      r.exit_code = 1;
      r.files.push_back({id + "_counterexample.json", dump(p.counterexample)});
    }
  }
  if (cfg.format == "csv") {
    std::string out = std::string("id,trials,failures,nonvacuous,finite_prefix,budget,seed,status") +
                      (cfg.timing ? ",seconds" : "") + "\n";
    for (const auto& p : reports)
      out += p.id + "," + std::to_string(p.trials) + "," + std::to_string(p.failures) + "," +
             std::to_string(p.nonvacuous) + "," + (p.finite_prefix ? "yes" : "no") + "," +
             std::to_string(cfg.budget) + "," + std::to_string(cfg.seed) + "," +
             (p.pass() ? "pass" : "fail") + (cfg.timing ? "," + format_float(p.seconds) : "") +
             "\n";
    r.report = out;
  } else {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& p : reports) {
      nlohmann::json j = p.to_json();
      j.erase("counterexample");
      if (!p.pass()) j["counterexample_file"] = p.id + "_counterexample.json";
      if (cfg.timing) j["seconds"] = p.seconds;
      arr.push_back(j);
    }
    r.report = dump({{"command", "props"},
                     {"budget", cfg.budget},
                     {"seed", cfg.seed},
                     {"trials", cfg.trials},
                     {"properties", arr}});
  }
  return r;
}

CommandResult run_command(const RunConfig& cfg) {
  if (cfg.format != "json" && cfg.format != "csv")
    throw Error(ErrorCode::InvalidArgument, "--format must be csv or json");
  if (cfg.budget == 0) throw Error(ErrorCode::InvalidArgument, "--budget must be positive");
  if (cfg.command == "scene") return cmd_scene(cfg);
  if (cfg.command == "check") return cmd_check(cfg);
  if (cfg.command == "hull") return cmd_hull(cfg);
  if (cfg.command == "betti") return cmd_betti(cfg);
  if (cfg.command == "sweep") return cmd_sweep(cfg);
  if (cfg.command == "props") return cmd_props(cfg);
  throw Error(ErrorCode::InvalidArgument, "unknown command '" + cfg.command + "'");
}

}  // namespace linconvex
