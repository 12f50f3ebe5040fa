#include "hydra/config.hpp"

#include <thread>

namespace hydra {

ConfigValidation validate_config(const RunConfig& config, int discovery_fanout) {
  ConfigValidation out{config, {}};
  auto& c = out.config;
  if (c.max_iterations < 1) out.errors.push_back("iteration limit must be ≥ 1");
  if (c.vote_threshold < 1) out.errors.push_back("vote threshold must be ≥ 1");
  if (c.vote_threshold > discovery_fanout)
    out.errors.push_back("vote threshold " + std::to_string(c.vote_threshold) +
                         " exceeds the " + std::to_string(discovery_fanout) +
                         " models queried in discovery");
  if (c.default_timeout_ms < 1) out.errors.push_back("backend timeout must be positive");
  if (c.default_max_retries < 0) out.errors.push_back("max retries must be non-negative");
  if (c.max_in_flight < 1) out.errors.push_back("max in-flight requests must be ≥ 1");
  if (c.attribute_cap < 1) out.errors.push_back("attribute cap must be ≥ 1");
  if (c.workers < 0) out.errors.push_back("worker count must be non-negative");
  if (c.workers == 0) c.workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  return out;
}

}  // namespace hydra
