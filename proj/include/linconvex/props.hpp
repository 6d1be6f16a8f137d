#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "linconvex/geometry.hpp"

namespace linconvex {

/// Union of 1-4 random axis-aligned boxes, each optionally cut by a random
/// half-space.
VoxelGrid random_grid(const GridSpec& spec, std::mt19937_64& rng);

/// Intersection of 3-6 random half-spaces, each keeping a ball of radius
/// `core` around the box center.
VoxelGrid random_convex_grid(const GridSpec& spec, std::mt19937_64& rng, double core = 0.3);

struct PropertyReport {
  std::string id;  ///< "P1".."P8"
  int trials = 0;
  int failures = 0;
  /// Sequence statements checked on a finite prefix (K = 6).
  bool finite_prefix = false;
  /// Trials whose hypothesis held (P2, P8); equals trials elsewhere.
  int nonvacuous = 0;
  /// First failing trial: {property, trial_seed, budget, grids, detail}.
  nlohmann::json counterexample;
  double seconds = 0;

  bool pass() const { return failures == 0; }
  nlohmann::json to_json() const;
};

std::vector<std::string> property_ids();

/// Runs one property on `trials` seeded instances with a shared sample list
/// per instance.
PropertyReport run_property(const std::string& id, int trials, std::size_t budget,
                            std::uint64_t seed);

/// Re-runs a single instance. True when the property holds on it; fills
/// `payload` with the instance description.
bool property_trial(const std::string& id, std::uint64_t trial_seed, std::size_t budget,
                    nlohmann::json* payload = nullptr);

/// Re-runs the recorded counterexample. Throws ReplayMismatch when it no
/// longer fails or regenerates different grids.
void replay_counterexample(const nlohmann::json& counterexample);

}  // namespace linconvex
