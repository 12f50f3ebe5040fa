#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hydra {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. `line` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0);
  std::size_t line() const { return line_; }

  // Same error with "<where>: " in front; keeps the line number.
  ParseError in(const std::string& where) const;

 private:
  struct Raw {};
  ParseError(Raw, const std::string& message, std::size_t line) : Error(message), line_(line) {}

  std::size_t line_;
};

enum class TaskKind { Vqa, Captioning };

enum class ModelRole {
  PlugInLvlm,
  ObjectDetector,
  AuxLvlmA,
  AuxLvlmB,
  VlpVqa,
  Captioner,
};

inline constexpr ModelRole kAllRoles[] = {
    ModelRole::PlugInLvlm, ModelRole::ObjectDetector, ModelRole::AuxLvlmA,
    ModelRole::AuxLvlmB,   ModelRole::VlpVqa,         ModelRole::Captioner,
};

enum class Decision { Yes, No, Uncertain };

// Binary answer / ground truth for presence questions.
enum class Answer { No, Yes };

enum class ImageOrigin { Clean, Defended, Adversarial };

enum class TiePolicy { ConservativeNo, OptimisticYes };

enum class DefenseKind { None, Jpeg, FeatSq };

std::string_view to_string(TaskKind t);
std::string_view to_string(ModelRole r);
std::string_view to_string(Decision d);
std::string_view to_string(Answer a);
std::string_view to_string(ImageOrigin o);
std::string_view to_string(TiePolicy p);
std::string_view to_string(DefenseKind d);

// Inverse of to_string; throw hydra::Error on unknown names.
TaskKind task_from_string(std::string_view s);
ModelRole role_from_string(std::string_view s);
Decision decision_from_string(std::string_view s);
Answer answer_from_string(std::string_view s);
ImageOrigin origin_from_string(std::string_view s);
TiePolicy tie_policy_from_string(std::string_view s);
DefenseKind defense_from_string(std::string_view s);

inline Decision to_decision(Answer a) {
  return a == Answer::Yes ? Decision::Yes : Decision::No;
}

using ObjectSet = std::set<std::string>;

// Encoded image bytes as handed to suite backends. Reads are counted so tests
// can check which code paths touch the payload.
class ImagePayload {
 public:
  explicit ImagePayload(std::vector<std::uint8_t> bytes) : bytes_(std::move(bytes)) {}

  std::span<const std::uint8_t> read() const {
    reads_.fetch_add(1, std::memory_order_relaxed);
    return bytes_;
  }
  std::size_t size() const { return bytes_.size(); }
  std::size_t reads() const { return reads_.load(std::memory_order_relaxed); }

 private:
  std::vector<std::uint8_t> bytes_;
  mutable std::atomic<std::size_t> reads_{0};
};

struct ImageRef {
  std::string id;
  std::shared_ptr<const ImagePayload> payload;  // null until the harness attaches it
  ImageOrigin origin = ImageOrigin::Clean;
};

struct AnnotationSet {
  ObjectSet truth;
  ObjectSet hallucination_lexicon;
};

struct BenchmarkItem {
  std::string item_id;
  ImageRef image;
  std::string query;
  TaskKind task = TaskKind::Vqa;
  std::variant<Answer, AnnotationSet> ground_truth;
};

struct ModelResponse {
  ModelRole role = ModelRole::PlugInLvlm;
  std::string model_id;
  std::string prompt;
  std::string text;
  int iteration = 1;
  std::uint64_t latency_ms = 0;
  bool failed = false;  // retries exhausted; text is empty
  int attempts = 1;
  std::string error;  // last transport error when failed
};

struct Critique {
  ModelRole source = ModelRole::PlugInLvlm;
  std::string target;  // VQA target or verified object; empty for caption critiques
  ObjectSet objects;   // caption critiques: objects extracted from that caption
  Decision decision = Decision::Uncertain;
  std::string rationale;
  int iteration = 1;
};

enum class DecisionKind { Finalize, Continue };

struct DecisionRecord {
  DecisionKind kind = DecisionKind::Continue;
  int iteration = 1;
  std::string reason;
};

std::string_view to_string(DecisionKind k);

}  // namespace hydra
