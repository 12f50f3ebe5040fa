#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "hydra/reasoner.hpp"

using namespace hydra;

namespace {

const ObjectVocabulary& coco() {
  static const ObjectVocabulary v = ObjectVocabulary::coco();
  return v;
}

ModelResponse reply(ModelRole role, std::string text, std::string prompt = "Is there a dog in the image?") {
  ModelResponse r;
  r.role = role;
  r.text = std::move(text);
  r.prompt = std::move(prompt);
  return r;
}

std::vector<std::string> attrs(const std::vector<AttributeHint>& hints) {
  std::vector<std::string> out;
  for (const auto& h : hints) out.push_back(h.attribute);
  return out;
}

}  // namespace

TEST(ExtractTarget, SimpleSlot) { EXPECT_EQ(extract_target_object("Is there a dog in the image?"), "dog"); }

TEST(ExtractTarget, MultiwordSlot) {
  EXPECT_EQ(extract_target_object("Is there an orange umbrella in the image?"), "orange umbrella");
}

TEST(ExtractTarget, WrongTask) {
  try {
    extract_target_object("Describe the image.");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("not a presence question"), std::string::npos);
  }
}

TEST(ExtractTarget, Variants) {
  EXPECT_EQ(extract_target_object("is there a Traffic Light in this picture? Please answer yes or no."),
            "traffic light");
  EXPECT_EQ(extract_target_object(presence_question("kite")), "kite");
}

TEST(BinaryAnswer, Examples) {
  EXPECT_EQ(parse_binary_answer("Yes, there is a dog."), Decision::Yes);
  EXPECT_EQ(parse_binary_answer("no"), Decision::No);
  EXPECT_EQ(parse_binary_answer("The image shows a park."), Decision::Uncertain);
  EXPECT_EQ(parse_binary_answer(""), Decision::Uncertain);
  EXPECT_EQ(parse_binary_answer("I think no, there isn't."), Decision::No);
}

TEST(BinaryAnswer, TotalOnRandomText) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    std::string s(rng() % 40, '\0');
    for (auto& c : s) c = static_cast<char>(rng() % 256);
    EXPECT_NO_THROW(parse_binary_answer(s));
    EXPECT_NO_THROW(extract_objects(s, coco()));
  }
}

TEST(Critique, DetectorListsTarget) {
  const auto c = critique_existence("dog", reply(ModelRole::ObjectDetector, "person, bicycle, dog"), coco());
  EXPECT_EQ(c.decision, Decision::Yes);
  EXPECT_EQ(c.rationale, "detector listed 'dog'");
  EXPECT_EQ(c.source, ModelRole::ObjectDetector);
}

TEST(Critique, NegationWindow) {
  const auto c = critique_existence("dog", reply(ModelRole::PlugInLvlm, "There is no dog, only a cat."), coco());
  EXPECT_EQ(c.decision, Decision::No);
}

TEST(Critique, SynonymNormalization) {
  const auto c = critique_existence("bike", reply(ModelRole::ObjectDetector, "person, bicycle"), coco());
  EXPECT_EQ(c.decision, Decision::Yes);
  EXPECT_EQ(c.target, "bicycle");
}

TEST(Critique, DetectorOmission) {
  EXPECT_EQ(critique_existence("dog", reply(ModelRole::ObjectDetector, "person, cat"), coco()).decision,
            Decision::No);
}

TEST(Critique, CaptionWithoutTargetIsNo) {
  const auto c = critique_existence(
      "dog", reply(ModelRole::PlugInLvlm, "A cat on a sofa.", std::string(kDetailedCaptionPrompt)), coco());
  EXPECT_EQ(c.decision, Decision::No);
}

TEST(Critique, FailedResponseIsUncertain) {
  auto r = reply(ModelRole::AuxLvlmA, "");
  r.failed = true;
  EXPECT_EQ(critique_existence("dog", r, coco()).decision, Decision::Uncertain);
}

TEST(Critique, NegationDoesNotCrossClause) {
  const auto c = critique_existence("dog", reply(ModelRole::AuxLvlmA, "No cat. A dog sleeps."), coco());
  EXPECT_EQ(c.decision, Decision::Yes);
}

TEST(Attributes, ColorHit) {
  const std::vector<std::string> t = {"A red fire hydrant on the sidewalk"};
  EXPECT_EQ(attrs(extract_attributes(t, "fire hydrant", DescriptorLexicon::standard(), coco())),
            (std::vector<std::string>{"red"}));
}

TEST(Attributes, NoLexiconWords) {
  const std::vector<std::string> t = {"A dog and a cat"};
  EXPECT_TRUE(extract_attributes(t, "dog", DescriptorLexicon::standard(), coco()).empty());
}

TEST(Attributes, ScanOrderWithCap) {
  const std::vector<std::string> t = {"a large red truck near a small dog"};
  EXPECT_EQ(attrs(extract_attributes(t, "truck", DescriptorLexicon::standard(), coco(), 2)),
            (std::vector<std::string>{"red", "large"}));
}

TEST(Attributes, ExcludeSkipsAskedAttributes) {
  const std::vector<std::string> t = {"a large red truck near a small dog"};
  const std::vector<std::string> asked = {"red", "large"};
  EXPECT_EQ(attrs(extract_attributes(t, "truck", DescriptorLexicon::standard(), coco(), 2, asked)),
            (std::vector<std::string>{"small", "near"}));
}

TEST(Attributes, OrderInsensitiveOverTexts) {
  std::vector<std::string> t = {"a small blue car", "a red truck on the left", "a big dog"};
  const auto ref = attrs(extract_attributes(t, "truck", DescriptorLexicon::standard(), coco(), 3));
  std::sort(t.begin(), t.end());
  do {
    EXPECT_EQ(attrs(extract_attributes(t, "truck", DescriptorLexicon::standard(), coco(), 3)), ref);
  } while (std::next_permutation(t.begin(), t.end()));
}

TEST(Question, Templates) {
  EXPECT_EQ(formulate_attribute_question({"red", ""}), "What objects are red in the image?");
  EXPECT_EQ(formulate_attribute_question({"large", ""}), "What objects are large in the image?");
  EXPECT_THROW(formulate_attribute_question({"", ""}), std::invalid_argument);
}

TEST(Objects, Examples) {
  EXPECT_EQ(extract_objects("A dog chases a bicycle.", coco()), (ObjectSet{"dog", "bicycle"}));
  EXPECT_TRUE(extract_objects("", coco()).empty());
}

TEST(Objects, NegatedBenchExcluded) {
  const std::string s = "There is no bench, just grass and a kite.";
  EXPECT_EQ(extract_objects(s, coco()), (ObjectSet{"kite"}));
  const ObjectVocabulary with_grass({"bench", "grass", "kite"}, {});
  EXPECT_EQ(extract_objects(s, with_grass), (ObjectSet{"grass", "kite"}));
}

TEST(Objects, Idempotent) {
  const std::string s = "Two dogs and a bike near a bench.";
  const auto once = extract_objects(s, coco());
  EXPECT_EQ(extract_objects(summary_text(once), coco()), once);
}

TEST(Summary, MajorityOverThree) {
  const std::vector<std::string> c = {"A dog under a tree... really, a potted plant? no: a dog and a tree.",
                                      "A dog by a tree.", "A dog near a car."};
  const std::vector<std::string> simple = {"A dog by a tree.", "A dog by a tree.", "A dog near a car."};
  const auto s = summarize_captions(simple, ObjectVocabulary({"dog", "tree", "car"}, {}));
  EXPECT_EQ(s.objects, (ObjectSet{"dog", "tree"}));
  EXPECT_EQ(s.text, "The image contains: dog, tree.");
  EXPECT_NO_THROW(summarize_captions(c, coco()));
}

TEST(Summary, UnanimousPair) {
  const std::vector<std::string> c = {"A cat on a couch.", "A cat on a couch."};
  const auto s = summarize_captions(c, coco());
  EXPECT_EQ(s.objects, extract_objects(c[0], coco()));
  EXPECT_EQ(s.compromised, (std::vector<bool>{false, false}));
}

TEST(Summary, DisjointCaptionFlagged) {
  const ObjectVocabulary v({"dog", "tree", "spaceship"}, {});
  const std::vector<std::string> c = {"A dog and a tree.", "A dog and a tree.", "A spaceship."};
  const auto s = summarize_captions(c, v);
  EXPECT_EQ(s.compromised, (std::vector<bool>{false, false, true}));
  EXPECT_DOUBLE_EQ(s.jaccard[2], 0.0);
}

TEST(Summary, NeedsTwoCaptions) {
  const std::vector<std::string> one = {"A dog."};
  EXPECT_THROW(summarize_captions(one, coco()), Error);
}

TEST(Summary, OrderInsensitiveObjects) {
  std::vector<std::string> c = {"A dog and a kite.", "A dog and a car.", "A kite, a dog and a car.",
                                "A person flying a kite."};
  const auto ref = summarize_captions(c, coco()).objects;
  std::sort(c.begin(), c.end());
  do {
    EXPECT_EQ(summarize_captions(c, coco()).objects, ref);
  } while (std::next_permutation(c.begin(), c.end()));
}

TEST(JudgeObject, Examples) {
  EXPECT_EQ(judge_object_in_answer("kite", "Yes, a kite is visible.", coco()), Decision::Yes);
  EXPECT_EQ(judge_object_in_answer("kite", "No.", coco()), Decision::No);
  EXPECT_EQ(judge_object_in_answer("kite", "Possibly near the left edge.", coco()), Decision::Uncertain);
}

TEST(RuleReasoner, Deterministic) {
  const RuleReasoner a;
  const RuleReasoner b;
  const std::vector<std::string> texts = {"a small white dog on the left"};
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(attrs(a.extract_attributes(texts, "dog", {})), attrs(b.extract_attributes(texts, "dog", {})));
    EXPECT_EQ(a.critique_existence("dog", reply(ModelRole::AuxLvlmA, "maybe")).rationale,
              b.critique_existence("dog", reply(ModelRole::AuxLvlmA, "maybe")).rationale);
  }
}
