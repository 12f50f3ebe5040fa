#pragma once

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

#include "hydra/core.hpp"

namespace hydra {

using MemoryEntry = std::variant<ModelResponse, Critique, DecisionRecord>;

enum class EntryKind { Response, Critique, Decision };

EntryKind kind_of(const MemoryEntry& e);
int iteration_of(const MemoryEntry& e);
std::optional<ModelRole> role_of(const MemoryEntry& e);

// Unset fields match everything. Decision entries carry no role, so a role
// selector never matches them.
struct MemoryFilter {
  std::optional<EntryKind> kind;
  std::optional<ModelRole> role;
  std::optional<int> iteration;

  bool matches(const MemoryEntry& e) const;
};

struct MemoryRecord {
  std::size_t ordinal = 0;
  MemoryEntry entry;
};

/// Append-only log of everything the agent retrieved, judged and decided for
/// one benchmark item. Ordinals are assigned densely from 0 in append order.
class AgentMemory {
 public:
  std::size_t append(MemoryEntry entry);

  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const MemoryEntry& at(std::size_t ordinal) const;
  const std::vector<MemoryRecord>& records() const { return records_; }

  std::vector<MemoryEntry> filter(const MemoryFilter& selector) const;

  std::vector<ModelResponse> responses() const;
  std::vector<Critique> critiques() const;
  std::vector<DecisionRecord> decisions() const;

 private:
  std::vector<MemoryRecord> records_;
};

}  // namespace hydra
