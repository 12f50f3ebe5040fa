#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hydra/core.hpp"
#include "hydra/vocabulary.hpp"

namespace hydra {

// Words within this many preceding tokens (same clause) negate a mention.
inline constexpr std::size_t kNegationWindow = 3;
// A caption whose object set has Jaccard similarity below this against the
// union of the other captions is flagged as potentially compromised.
inline constexpr double kCompromisedJaccard = 0.2;

inline constexpr std::string_view kDescribePrompt = "Describe the image.";
inline constexpr std::string_view kDetailedCaptionPrompt = "Describe the image in detail.";
inline constexpr std::string_view kDetectorPrompt = "List the objects in the image.";

struct AttributeHint {
  std::string attribute;
  std::string source_phrase;
};

struct CaptionSummary {
  std::string text;
  ObjectSet objects;
  std::vector<ObjectSet> caption_objects;  // per input caption
  std::vector<double> jaccard;             // per caption, against the union of the rest
  std::vector<bool> compromised;
};

// "Is there a {object} in the image?"
std::string presence_question(std::string_view object);

// Throws hydra::Error("not a presence question") when the template does not match.
std::string extract_target_object(std::string_view question);

// Total: never throws.
Decision parse_binary_answer(std::string_view text);

Critique critique_existence(std::string_view target, const ModelResponse& response,
                            const ObjectVocabulary& vocab);

std::vector<AttributeHint> extract_attributes(std::span<const std::string> texts,
                                              std::string_view target,
                                              const DescriptorLexicon& lexicon,
                                              const ObjectVocabulary& vocab, std::size_t cap = 2,
                                              std::span<const std::string> exclude = {});

// Throws std::invalid_argument on an empty attribute.
std::string formulate_attribute_question(const AttributeHint& hint);

ObjectSet extract_objects(std::string_view caption, const ObjectVocabulary& vocab);

// Throws hydra::Error with fewer than two captions.
CaptionSummary summarize_captions(std::span<const std::string> captions,
                                  const ObjectVocabulary& vocab);

// "The image contains: a, b, c." in sorted order.
std::string summary_text(const ObjectSet& objects);

Decision judge_object_in_answer(std::string_view object, std::string_view answer,
                                const ObjectVocabulary& vocab);

/// The text-only judgments the loop delegates to its agent. The agent never
/// sees image bytes, so nothing here takes an ImageRef.
class Reasoner {
 public:
  virtual ~Reasoner() = default;

  virtual std::string extract_target_object(std::string_view question) const = 0;
  virtual Decision parse_binary_answer(std::string_view text) const = 0;
  virtual Critique critique_existence(std::string_view target,
                                      const ModelResponse& response) const = 0;
  virtual std::vector<AttributeHint> extract_attributes(
      std::span<const std::string> texts, std::string_view target,
      std::span<const std::string> exclude) const = 0;
  virtual std::string formulate_attribute_question(const AttributeHint& hint) const = 0;
  virtual ObjectSet extract_objects(std::string_view caption) const = 0;
  virtual CaptionSummary summarize_captions(std::span<const std::string> captions) const = 0;
  virtual Decision judge_object_in_answer(std::string_view object,
                                          std::string_view answer) const = 0;
};

// Deterministic reference reasoner built on the free functions above.
class RuleReasoner final : public Reasoner {
 public:
  explicit RuleReasoner(ObjectVocabulary vocab = ObjectVocabulary::coco(),
                        DescriptorLexicon lexicon = DescriptorLexicon::standard(),
                        std::size_t attribute_cap = 2)
      : vocab_(std::move(vocab)), lexicon_(std::move(lexicon)), attribute_cap_(attribute_cap) {}

  const ObjectVocabulary& vocabulary() const { return vocab_; }

  std::string extract_target_object(std::string_view question) const override {
    return hydra::extract_target_object(question);
  }
  Decision parse_binary_answer(std::string_view text) const override {
    return hydra::parse_binary_answer(text);
  }
  Critique critique_existence(std::string_view target,
                              const ModelResponse& response) const override {
    return hydra::critique_existence(target, response, vocab_);
  }
  std::vector<AttributeHint> extract_attributes(std::span<const std::string> texts,
                                                std::string_view target,
                                                std::span<const std::string> exclude) const override {
    return hydra::extract_attributes(texts, target, lexicon_, vocab_, attribute_cap_, exclude);
  }
  std::string formulate_attribute_question(const AttributeHint& hint) const override {
    return hydra::formulate_attribute_question(hint);
  }
  ObjectSet extract_objects(std::string_view caption) const override {
    return hydra::extract_objects(caption, vocab_);
  }
  CaptionSummary summarize_captions(std::span<const std::string> captions) const override {
    return hydra::summarize_captions(captions, vocab_);
  }
  Decision judge_object_in_answer(std::string_view object,
                                  std::string_view answer) const override {
    return hydra::judge_object_in_answer(object, answer, vocab_);
  }

 private:
  ObjectVocabulary vocab_;
  DescriptorLexicon lexicon_;
  std::size_t attribute_cap_;
};

}  // namespace hydra
