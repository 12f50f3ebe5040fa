#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hydra/core.hpp"

namespace hydra {

struct RunConfig {
  int max_iterations = 3;
  int vote_threshold = 2;
  TiePolicy tie_policy = TiePolicy::ConservativeNo;
  DefenseKind defense = DefenseKind::None;
  int default_timeout_ms = 30000;
  int default_max_retries = 1;
  int max_in_flight = 4;  // concurrent backend requests per fan-out
  int attribute_cap = 2;  // attribute questions per loop iteration
  int workers = 0;        // 0 = available parallelism
  std::uint64_t seed = 0;
};

struct ConfigValidation {
  RunConfig config;
  std::vector<std::string> errors;

  bool ok() const { return errors.empty(); }
};

// Checks RunConfig invariants against the number of models the discovery
// step will query, and fills `workers` when left at 0.
ConfigValidation validate_config(const RunConfig& config, int discovery_fanout = 3);

}  // namespace hydra
