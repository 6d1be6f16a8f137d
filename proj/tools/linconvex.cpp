// linconvex scene|check|hull|betti|sweep|props

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "linconvex/error.hpp"
#include "linconvex/lab.hpp"

namespace {

using linconvex::Coord;
using linconvex::Error;
using linconvex::ErrorCode;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, sep)) out.push_back(part);
  return out;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  double v = std::stod(s, &used);
  if (used != s.size()) throw Error(ErrorCode::ParseError, "bad number '" + s + "'");
  return v;
}

template <class T>
std::vector<T> parse_list(const std::string& s) {
  std::vector<T> out;
  for (const auto& p : split(s, ',')) {
    double v = to_double(p);
    if (v < 1 || v != std::floor(v)) throw Error(ErrorCode::ParseError, "bad count '" + p + "'");
    out.push_back(T(v));
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear convexity lab"};
  app.require_subcommand(1);
  linconvex::RunConfig cfg;
  std::vector<std::string> params, probes;
  std::string res, box, res_list, budget_list, expect, out_dir, budget_text = "10000";

  const std::pair<const char*, const char*> commands[] = {
      {"scene", "Voxelize a scene to VXG1"},
      {"check", "Convexity verdict with witness"},
      {"hull", "Hull with respect to a family"},
      {"betti", "Betti numbers of the boundary layer"},
      {"sweep", "Verdict and Betti numbers over a resolution x budget grid"},
      {"props", "Randomized property suite P1..P8"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--scene", cfg.scene, "Scene name");
    sub->add_option("--param", params, "Scene parameter k=v (repeatable)");
    sub->add_option("--res", res, "Cells per axis: R or R,R[,R]");
    sub->add_option("--box", box, "Cube box lo..hi");
    sub->add_option("--in", cfg.input, "VXG1 input instead of a scene");
    sub->add_option("--family", cfg.family, "Family name");
    sub->add_option("--budget", budget_text, "Sample budget (default 10000)");
    sub->add_option("--seed", cfg.seed, "Seed (default 42)");
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--expect", expect, "fail inverts the exit code")
        ->check(CLI::IsMember({"fail", "holds"}));
    sub->add_option("--probe", probes, "Probe point x,y[,z] (repeatable)");
    sub->add_flag("--weak", cfg.weak, "Weak convexity instead of convexity");
    sub->add_flag("--slices", cfg.slices, "Write one PGM per layer");
    sub->add_flag("--timing", cfg.timing, "Add seconds to the report");
    sub->add_option("--trials", cfg.trials, "Trials per property");
    sub->add_option("--prop", cfg.props, "Property id P1..P8 (repeatable)");
    sub->add_option("--res-list", res_list, "Sweep resolutions");
    sub->add_option("--budget-list", budget_list, "Sweep budgets");
    sub->add_option("--threads", cfg.threads, "Worker threads (0 = all cores)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    cfg.command = app.get_subcommands().front()->get_name();
    if (to_double(budget_text) < 1) throw Error(ErrorCode::InvalidArgument, "--budget must be positive");
    cfg.budget = std::size_t(to_double(budget_text));
    cfg.expect_fail = expect == "fail";
    for (const auto& kv : params) {
      auto eq = kv.find('=');
      if (eq == std::string::npos) throw Error(ErrorCode::ParseError, "--param needs k=v");
      cfg.params[kv.substr(0, eq)] = to_double(kv.substr(eq + 1));
    }
    if (!res.empty()) cfg.res = parse_list<int>(res);
    if (!box.empty()) {
      auto dots = box.find("..");
      if (dots == std::string::npos) throw Error(ErrorCode::ParseError, "--box needs lo..hi");
      cfg.box = {to_double(box.substr(0, dots)), to_double(box.substr(dots + 2))};
    }
    for (const auto& p : probes) {
      auto parts = split(p, ',');
      if (parts.empty() || parts.size() > 4) throw Error(ErrorCode::ParseError, "bad --probe");
      Coord c{};
      for (std::size_t a = 0; a < parts.size(); ++a) c[a] = to_double(parts[a]);
      cfg.probes.push_back(c);
    }
    if (!res_list.empty()) cfg.res_list = parse_list<int>(res_list);
    if (!budget_list.empty()) cfg.budget_list = parse_list<std::size_t>(budget_list);

    linconvex::CommandResult r = linconvex::run_command(cfg);
    std::cout << r.report;
    if (!out_dir.empty()) {
      std::filesystem::create_directories(out_dir);
      for (const auto& f : r.files) write_file(std::filesystem::path(out_dir) / f.name, f.content);
      write_file(std::filesystem::path(out_dir) / (cfg.command + "." + cfg.format), r.report);
    }
    return r.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "linconvex: " << e.what() << "\n";
    return 2;
  }
}
