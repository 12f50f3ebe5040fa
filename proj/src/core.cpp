#include "hydra/core.hpp"

#include <array>
#include <utility>

namespace hydra {

ParseError::ParseError(const std::string& what, std::size_t line)
    : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

ParseError ParseError::in(const std::string& where) const {
  return ParseError(Raw{}, where + ": " + what(), line_);
}

namespace {

template <typename E, std::size_t N>
using NameTable = std::array<std::pair<E, std::string_view>, N>;

constexpr NameTable<TaskKind, 2> kTaskNames{{
    {TaskKind::Vqa, "vqa"},
    {TaskKind::Captioning, "caption"},
}};

constexpr NameTable<ModelRole, 6> kRoleNames{{
    {ModelRole::PlugInLvlm, "plugin_lvlm"},
    {ModelRole::ObjectDetector, "object_detector"},
    {ModelRole::AuxLvlmA, "aux_lvlm_a"},
    {ModelRole::AuxLvlmB, "aux_lvlm_b"},
    {ModelRole::VlpVqa, "vlp_vqa"},
    {ModelRole::Captioner, "captioner"},
}};

constexpr NameTable<Decision, 3> kDecisionNames{{
    {Decision::Yes, "yes"},
    {Decision::No, "no"},
    {Decision::Uncertain, "uncertain"},
}};

constexpr NameTable<Answer, 2> kAnswerNames{{
    {Answer::Yes, "yes"},
    {Answer::No, "no"},
}};

constexpr NameTable<ImageOrigin, 3> kOriginNames{{
    {ImageOrigin::Clean, "clean"},
    {ImageOrigin::Defended, "defended"},
    {ImageOrigin::Adversarial, "adversarial"},
}};

constexpr NameTable<TiePolicy, 2> kTieNames{{
    {TiePolicy::ConservativeNo, "conservative_no"},
    {TiePolicy::OptimisticYes, "optimistic_yes"},
}};

constexpr NameTable<DefenseKind, 3> kDefenseNames{{
    {DefenseKind::None, "none"},
    {DefenseKind::Jpeg, "jpeg"},
    {DefenseKind::FeatSq, "featsq"},
}};

constexpr NameTable<DecisionKind, 2> kDecisionKindNames{{
    {DecisionKind::Finalize, "finalize"},
    {DecisionKind::Continue, "continue"},
}};

template <typename E, std::size_t N>
std::string_view name_of(const NameTable<E, N>& table, E value) {
  for (const auto& [v, name] : table)
    if (v == value) return name;
  return "?";
}

template <typename E, std::size_t N>
E parse_name(const NameTable<E, N>& table, std::string_view s, std::string_view what) {
  for (const auto& [v, name] : table)
    if (name == s) return v;
  throw Error("unknown " + std::string(what) + " '" + std::string(s) + "'");
}

}  // namespace

std::string_view to_string(TaskKind t) { return name_of(kTaskNames, t); }
std::string_view to_string(ModelRole r) { return name_of(kRoleNames, r); }
std::string_view to_string(Decision d) { return name_of(kDecisionNames, d); }
std::string_view to_string(Answer a) { return name_of(kAnswerNames, a); }
std::string_view to_string(ImageOrigin o) { return name_of(kOriginNames, o); }
std::string_view to_string(TiePolicy p) { return name_of(kTieNames, p); }
std::string_view to_string(DefenseKind d) { return name_of(kDefenseNames, d); }
std::string_view to_string(DecisionKind k) { return name_of(kDecisionKindNames, k); }

TaskKind task_from_string(std::string_view s) { return parse_name(kTaskNames, s, "task"); }
ModelRole role_from_string(std::string_view s) { return parse_name(kRoleNames, s, "role"); }
Decision decision_from_string(std::string_view s) {
  return parse_name(kDecisionNames, s, "decision");
}
Answer answer_from_string(std::string_view s) { return parse_name(kAnswerNames, s, "answer"); }
ImageOrigin origin_from_string(std::string_view s) {
  return parse_name(kOriginNames, s, "image origin");
}
TiePolicy tie_policy_from_string(std::string_view s) {
  return parse_name(kTieNames, s, "tie policy");
}
DefenseKind defense_from_string(std::string_view s) {
  return parse_name(kDefenseNames, s, "defense");
}

}  // namespace hydra
