#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "linconvex/geometry.hpp"

namespace linconvex {

/// Everything a command depends on. Identical configs give byte-identical
/// reports and files.
struct RunConfig {
  std::string command;  ///< scene | check | hull | betti | sweep | props
  std::string scene;
  std::map<std::string, double> params;
  /// One entry (cubic) or one per axis; empty keeps the scene default.
  std::vector<int> res;
  /// Cube [lo, hi]^n replacing the scene box.
  std::optional<std::pair<double, double>> box;
  /// VXG1 file used instead of a scene (check, hull, betti).
  std::string input;
  /// Family::parse name; empty picks the scene default.
  std::string family;
  std::size_t budget = 10000;
  std::uint64_t seed = 42;
  std::string format = "json";  ///< json | csv
  bool expect_fail = false;
  std::vector<Coord> probes;
  bool weak = false;
  bool slices = false;  ///< scene: also emit one PGM per layer
  bool timing = false;  ///< add wall-clock seconds (breaks byte-identity)
  int trials = 100;
  std::vector<std::string> props;  ///< empty runs P1..P8
  std::vector<int> res_list{32, 48, 64, 96};
  std::vector<std::size_t> budget_list{1000, 10000, 100000};
  unsigned threads = 0;
};

struct OutputFile {
  std::string name;
  std::string content;
};

struct CommandResult {
  /// 0 all assertions hold, 1 a verdict failed, 2 usage or IO error.
  int exit_code = 0;
  std::string report;
  std::vector<OutputFile> files;
};

CommandResult cmd_scene(const RunConfig& cfg);
CommandResult cmd_check(const RunConfig& cfg);
CommandResult cmd_hull(const RunConfig& cfg);
CommandResult cmd_betti(const RunConfig& cfg);
CommandResult cmd_sweep(const RunConfig& cfg);
CommandResult cmd_props(const RunConfig& cfg);

/// Dispatches on cfg.command. Library errors propagate.
CommandResult run_command(const RunConfig& cfg);

/// Default family name for a scene ("AllHyperplanes" for unknown names).
std::string default_family(const std::string& scene);

/// "%.9g".
std::string format_float(double x);

/// Rounds every floating-point number in `j` to 9 significant digits.
void round_floats(nlohmann::json& j);

/// Binary PGM (P5) of a 2D grid: rows follow axis 0, columns axis 1;
/// 0 empty, 255 occupied.
std::string to_pgm(const VoxelGrid& g);

}  // namespace linconvex
