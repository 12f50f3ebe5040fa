#include <gtest/gtest.h>

#include "hydra/core.hpp"
#include "hydra/parallel.hpp"

using namespace hydra;

TEST(Names, RoundTripEveryRole) {
  for (ModelRole r : kAllRoles) EXPECT_EQ(role_from_string(to_string(r)), r);
}

TEST(Names, RoundTripSmallEnums) {
  for (auto t : {TaskKind::Vqa, TaskKind::Captioning}) EXPECT_EQ(task_from_string(to_string(t)), t);
  for (auto d : {Decision::Yes, Decision::No, Decision::Uncertain})
    EXPECT_EQ(decision_from_string(to_string(d)), d);
  for (auto a : {Answer::Yes, Answer::No}) EXPECT_EQ(answer_from_string(to_string(a)), a);
  for (auto o : {ImageOrigin::Clean, ImageOrigin::Defended, ImageOrigin::Adversarial})
    EXPECT_EQ(origin_from_string(to_string(o)), o);
  for (auto p : {TiePolicy::ConservativeNo, TiePolicy::OptimisticYes})
    EXPECT_EQ(tie_policy_from_string(to_string(p)), p);
  for (auto d : {DefenseKind::None, DefenseKind::Jpeg, DefenseKind::FeatSq})
    EXPECT_EQ(defense_from_string(to_string(d)), d);
}

TEST(Names, UnknownNameThrows) {
  EXPECT_THROW(role_from_string("oracle"), Error);
  EXPECT_THROW(task_from_string(""), Error);
  EXPECT_THROW(defense_from_string("blur"), Error);
}

TEST(ParseError, PrefixesLine) {
  ParseError e("bad label", 7);
  EXPECT_EQ(e.line(), 7u);
  EXPECT_STREQ(e.what(), "line 7: bad label");
  EXPECT_STREQ(ParseError("plain").what(), "plain");
}

TEST(Payload, CountsReads) {
  ImagePayload p({1, 2, 3});
  EXPECT_EQ(p.reads(), 0u);
  EXPECT_EQ(p.read().size(), 3u);
  p.read();
  EXPECT_EQ(p.reads(), 2u);
  EXPECT_EQ(p.size(), 3u);
}

TEST(ParallelFor, VisitsEveryIndexOnce) {
  std::vector<std::atomic<int>> hits(257);
  parallel_for(hits.size(), 8, [&](std::size_t i) { ++hits[i]; });
  for (auto& h : hits) EXPECT_EQ(h.load(), 1);
}

TEST(ParallelFor, RethrowsLowestIndexAfterRunningAll) {
  std::atomic<int> ran{0};
  try {
    parallel_for(20, 4, [&](std::size_t i) {
      ++ran;
      if (i == 5 || i == 13) throw std::runtime_error("boom " + std::to_string(i));
    });
    FAIL() << "expected throw";
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "boom 5");
  }
  EXPECT_EQ(ran.load(), 20);
}
