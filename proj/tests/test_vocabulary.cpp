#include <gtest/gtest.h>

#include "hydra/vocabulary.hpp"

using namespace hydra;

TEST(Tokenize, LowercasesAndSplitsClauses) {
  const auto t = tokenize("A Dog, and a CAT. Isn't it?");
  EXPECT_EQ(t.words, (std::vector<std::string>{"a", "dog", "and", "a", "cat", "isn't", "it"}));
  EXPECT_EQ(t.clause, (std::vector<int>{0, 0, 1, 1, 1, 2, 2}));
}

TEST(Tokenize, CurlyApostrophe) {
  EXPECT_EQ(tokenize("don’t").words, (std::vector<std::string>{"don't"}));
}

TEST(CleanPhrase, CollapsesWhitespace) { EXPECT_EQ(clean_phrase("  Fire \t Hydrant "), "fire hydrant"); }

TEST(Coco, HasEightyObjects) {
  const auto v = ObjectVocabulary::coco();
  EXPECT_EQ(v.objects().size(), 80u);
  EXPECT_TRUE(v.contains("fire hydrant"));
  EXPECT_TRUE(v.contains("kite"));
}

TEST(Coco, SynonymsAndPlurals) {
  const auto v = ObjectVocabulary::coco();
  EXPECT_EQ(v.canonical("bike"), "bicycle");
  EXPECT_EQ(v.canonical("Dogs"), "dog");
  EXPECT_EQ(v.canonical("buses"), "bus");
  EXPECT_EQ(v.canonical("fire hydrants"), "fire hydrant");
  EXPECT_FALSE(v.canonical("spaceship"));
  EXPECT_EQ(v.normalize("Spaceship "), "spaceship");
}

TEST(Vocabulary, CustomPluralY) {
  const ObjectVocabulary v({"pony"}, {});
  EXPECT_EQ(v.canonical("ponies"), "pony");
}

TEST(Vocabulary, RejectsDanglingSynonym) {
  EXPECT_THROW(ObjectVocabulary({"dog"}, {{"puppy", "hound"}}), Error);
}

TEST(Vocabulary, FromJson) {
  const auto v = ObjectVocabulary::from_json(
      nlohmann::json::parse(R"({"objects": ["grass", "kite"], "synonyms": {"lawn": "grass"}})"));
  EXPECT_EQ(v.canonical("lawn"), "grass");
  EXPECT_EQ(v.objects().size(), 2u);
}

TEST(Mentions, LongestMatchWins) {
  const auto v = ObjectVocabulary::coco();
  const auto m = v.find_mentions(tokenize("a red fire hydrant next to a hot dog"));
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[0].object, "fire hydrant");
  EXPECT_EQ(m[1].object, "hot dog");
}

TEST(Mentions, UnknownTargetMatchedLiterally) {
  const auto v = ObjectVocabulary::coco();
  const auto m = v.find_target(tokenize("an orange umbrella and a spaceship"), "spaceship");
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0].begin, 5u);
}

TEST(Lexicon, ScanOrder) {
  const auto lex = DescriptorLexicon::standard();
  ASSERT_TRUE(lex.rank("red") && lex.rank("large") && lex.rank("left"));
  EXPECT_LT(*lex.rank("red"), *lex.rank("large"));
  EXPECT_LT(*lex.rank("large"), *lex.rank("left"));
  EXPECT_FALSE(lex.rank("dog"));
}
