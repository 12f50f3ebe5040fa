#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hydra/config.hpp"
#include "hydra/core.hpp"
#include "hydra/memory.hpp"
#include "hydra/reasoner.hpp"
#include "hydra/suite.hpp"

namespace hydra {

struct CaptionResult {
  std::string text;
  ObjectSet objects;
};

struct FinalAnswer {
  std::string item_id;
  TaskKind task = TaskKind::Vqa;
  std::variant<Answer, CaptionResult> answer;
  std::string target;  // VQA only
  int iterations_used = 0;
  bool degraded = false;  // no usable evidence; the answer came from the tie policy
  AgentMemory trace;

  std::size_t query_count() const;
};

enum class LoopPhase { InitialQuery, Critique, Decide, Inquiry, Discovery, Done };

struct LoopState {
  TaskKind task = TaskKind::Vqa;
  LoopPhase phase = LoopPhase::InitialQuery;
  int iteration = 1;
  // VQA: questions for the next discovery round. Captioning: objects still
  // flagged for verification.
  std::vector<std::string> pending;
  std::map<std::string, std::vector<std::pair<ModelRole, Decision>>> votes;
};

// Uncertain votes are dropped; a strict majority of the rest wins; ties and
// empty input fall to the tie policy.
Answer aggregate_votes(std::span<const Decision> votes, TiePolicy tie_policy);

// Finalize when the current iteration's critiques settle the question, when
// nothing is left to verify (captioning), or at the iteration limit.
//   iteration 1 (VQA): every critique equal and not Uncertain.
//   later iterations (VQA): usable votes have a strict majority with at least
//   vote_threshold votes behind it.
DecisionRecord decide_next(std::span<const Critique> critiques, const LoopState& state,
                           const RunConfig& config);

FinalAnswer run_vqa(const BenchmarkItem& item, const SuiteRegistry& registry,
                    const Reasoner& reasoner, const RunConfig& config);

FinalAnswer run_caption(const BenchmarkItem& item, const SuiteRegistry& registry,
                        const Reasoner& reasoner, const RunConfig& config);

// Dispatches on item.task.
FinalAnswer run_item(const BenchmarkItem& item, const SuiteRegistry& registry,
                     const Reasoner& reasoner, const RunConfig& config);

}  // namespace hydra
