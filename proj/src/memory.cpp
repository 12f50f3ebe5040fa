#include "hydra/memory.hpp"

#include <stdexcept>

namespace hydra {

EntryKind kind_of(const MemoryEntry& e) {
  switch (e.index()) {
    case 0:
      return EntryKind::Response;
    case 1:
      return EntryKind::Critique;
    default:
      return EntryKind::Decision;
  }
}

int iteration_of(const MemoryEntry& e) {
  return std::visit([](const auto& v) { return v.iteration; }, e);
}

std::optional<ModelRole> role_of(const MemoryEntry& e) {
  if (const auto* r = std::get_if<ModelResponse>(&e)) return r->role;
  if (const auto* c = std::get_if<Critique>(&e)) return c->source;
  return std::nullopt;
}

bool MemoryFilter::matches(const MemoryEntry& e) const {
  if (kind && kind_of(e) != *kind) return false;
  if (iteration && iteration_of(e) != *iteration) return false;
  if (role && role_of(e) != role) return false;
  return true;
}

std::size_t AgentMemory::append(MemoryEntry entry) {
  const std::size_t ordinal = records_.size();
  records_.push_back({ordinal, std::move(entry)});
  return ordinal;
}

const MemoryEntry& AgentMemory::at(std::size_t ordinal) const {
  if (ordinal >= records_.size())
    throw std::out_of_range("memory ordinal " + std::to_string(ordinal) + " not present");
  return records_[ordinal].entry;
}

std::vector<MemoryEntry> AgentMemory::filter(const MemoryFilter& selector) const {
  std::vector<MemoryEntry> out;
  for (const auto& r : records_)
    if (selector.matches(r.entry)) out.push_back(r.entry);
  return out;
}

namespace {
template <typename T>
std::vector<T> collect(const std::vector<MemoryRecord>& records) {
  std::vector<T> out;
  for (const auto& r : records)
    if (const auto* v = std::get_if<T>(&r.entry)) out.push_back(*v);
  return out;
}
}  // namespace

std::vector<ModelResponse> AgentMemory::responses() const { return collect<ModelResponse>(records_); }
std::vector<Critique> AgentMemory::critiques() const { return collect<Critique>(records_); }
std::vector<DecisionRecord> AgentMemory::decisions() const {
  return collect<DecisionRecord>(records_);
}

}  // namespace hydra
