#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "hydra/metrics.hpp"

using namespace hydra;

namespace {

constexpr Answer Y = Answer::Yes;
constexpr Answer N = Answer::No;

// Independent oracle: count by brute force and compare cross-multiplied fractions.
bool same_fraction(const Ratio& r, std::int64_t num, std::int64_t den) {
  if (den == 0) return r.num() == 0;
  return static_cast<__int128>(r.num()) * den == static_cast<__int128>(num) * r.den();
}

}  // namespace

TEST(Ratio, ReducesAndRounds) {
  const Ratio r(4, 6);
  EXPECT_EQ(r.num(), 2);
  EXPECT_EQ(r.den(), 3);
  EXPECT_DOUBLE_EQ(r.percent(), 66.7);
  EXPECT_DOUBLE_EQ(Ratio(1, 8).percent(), 12.5);
  EXPECT_DOUBLE_EQ(Ratio(1, 2000).percent(), 0.1);
  EXPECT_DOUBLE_EQ(Ratio(1, 2001).percent(), 0.0);
  EXPECT_EQ(Ratio(1, 3) + Ratio(1, 6), Ratio(1, 2));
  EXPECT_THROW(Ratio(1, 0), std::invalid_argument);
}

TEST(Pope, PerfectBalanced) {
  std::vector<Answer> labels(300);
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = i % 2 ? Y : N;
  const auto s = pope_scores(labels, labels);
  EXPECT_DOUBLE_EQ(s.accuracy.percent(), 100.0);
  EXPECT_DOUBLE_EQ(s.f1.percent(), 100.0);
  EXPECT_DOUBLE_EQ(s.yes_ratio.percent(), 50.0);
}

TEST(Pope, OneOfEach) {
  const std::vector<Answer> labels = {Y, Y, N, N};
  const std::vector<Answer> preds = {Y, N, Y, N};
  const auto c = confusion(preds, labels);
  EXPECT_EQ(c.tp, 1);
  EXPECT_EQ(c.fp, 1);
  EXPECT_EQ(c.fn, 1);
  EXPECT_EQ(c.tn, 1);
  const auto s = pope_scores(preds, labels);
  EXPECT_DOUBLE_EQ(s.accuracy.percent(), 50.0);
  EXPECT_DOUBLE_EQ(s.f1.percent(), 50.0);
  EXPECT_DOUBLE_EQ(s.yes_ratio.percent(), 50.0);
}

TEST(Pope, AllNoDegenerateF1) {
  const std::vector<Answer> labels = {Y, N, Y, N};
  const std::vector<Answer> preds = {N, N, N, N};
  const auto s = pope_scores(preds, labels);
  EXPECT_DOUBLE_EQ(s.f1.percent(), 0.0);
  EXPECT_DOUBLE_EQ(s.yes_ratio.percent(), 0.0);
  EXPECT_DOUBLE_EQ(s.accuracy.percent(), 50.0);
}

TEST(Pope, Errors) {
  const std::vector<Answer> a = {Y};
  const std::vector<Answer> b = {Y, N};
  EXPECT_THROW(pope_scores(a, b), Error);
  EXPECT_THROW(pope_scores({}, {}), Error);
}

TEST(Pope, BruteForceOracle) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng() % 60;
    std::vector<Answer> preds(n), labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      preds[i] = rng() % 2 ? Y : N;
      labels[i] = rng() % 2 ? Y : N;
    }
    std::int64_t tp = 0, fp = 0, fn = 0, correct = 0, pred_yes = 0;
    for (std::size_t i = 0; i < n; ++i) {
      correct += preds[i] == labels[i];
      pred_yes += preds[i] == Y;
      tp += preds[i] == Y && labels[i] == Y;
      fp += preds[i] == Y && labels[i] == N;
      fn += preds[i] == N && labels[i] == Y;
    }
    const auto s = pope_scores(preds, labels);
    ASSERT_TRUE(same_fraction(s.accuracy, correct, n));
    ASSERT_TRUE(same_fraction(s.yes_ratio, pred_yes, n));
    // F1 = 2PR/(P+R) with P = tp/(tp+fp), R = tp/(tp+fn); 0 when undefined
    if (tp == 0) {
      ASSERT_EQ(s.f1.num(), 0);
    } else {
      const std::int64_t pn = tp, pd = tp + fp, rn = tp, rd = tp + fn;
      // 2 (pn/pd)(rn/rd) / (pn/pd + rn/rd) = 2 pn rn / (pn rd + rn pd)
      ASSERT_TRUE(same_fraction(s.f1, 2 * pn * rn, pn * rd + rn * pd));
    }
    // permutation invariance
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    std::vector<Answer> p2, l2;
    for (auto i : idx) {
      p2.push_back(preds[i]);
      l2.push_back(labels[i]);
    }
    const auto s2 = pope_scores(p2, l2);
    ASSERT_EQ(s2.accuracy, s.accuracy);
    ASSERT_EQ(s2.f1, s.f1);
  }
}

TEST(Mme, AllCorrect) {
  const std::vector<MmeImage> imgs = {{{Y, Y}, {N, N}}, {{N, N}, {Y, Y}}};
  const auto s = mme_scores(imgs);
  EXPECT_DOUBLE_EQ(s.acc.percent(), 100.0);
  EXPECT_DOUBLE_EQ(s.acc_plus.percent(), 100.0);
  EXPECT_DOUBLE_EQ(s.total.percent(), 200.0);
}

TEST(Mme, ThreePairExample) {
  // per-image correct counts 2, 2, 0
  const std::vector<MmeImage> imgs = {{{Y, Y}, {N, N}}, {{Y, Y}, {N, N}}, {{N, Y}, {Y, N}}};
  const auto s = mme_scores(imgs);
  EXPECT_EQ(s.acc, Ratio(4, 6));
  EXPECT_EQ(s.acc_plus, Ratio(2, 3));
  EXPECT_DOUBLE_EQ(s.acc.percent(), 66.7);
  EXPECT_DOUBLE_EQ(s.acc_plus.percent(), 66.7);
  EXPECT_DOUBLE_EQ(s.total.percent(), 133.3);
}

TEST(Mme, HalfCorrectSingleImage) {
  const std::vector<MmeImage> imgs = {{{Y, Y}, {Y, N}}};
  const auto s = mme_scores(imgs);
  EXPECT_DOUBLE_EQ(s.acc.percent(), 50.0);
  EXPECT_DOUBLE_EQ(s.acc_plus.percent(), 0.0);
  EXPECT_DOUBLE_EQ(s.total.percent(), 50.0);
}

TEST(Mme, RandomInvariants) {
  std::mt19937_64 rng(6);
  auto a = [&] { return rng() % 2 ? Y : N; };
  for (int t = 0; t < 500; ++t) {
    std::vector<MmeImage> imgs(1 + rng() % 20);
    for (auto& im : imgs) im = {{a(), a()}, {a(), a()}};
    const auto s = mme_scores(imgs);
    ASSERT_EQ(s.total, s.acc + s.acc_plus);
    ASSERT_TRUE(s.acc_plus <= s.acc);
  }
  EXPECT_THROW(mme_scores({}), Error);
}

TEST(Amber, HandExample) {
  const std::vector<ObjectSet> m = {{"dog", "bench"}};
  const std::vector<AnnotationSet> a = {{{"dog", "tree"}, {"bench"}}};
  const auto s = amber_scores(m, a);
  EXPECT_DOUBLE_EQ(s.chair.percent(), 50.0);
  EXPECT_DOUBLE_EQ(s.cover.percent(), 50.0);
  EXPECT_DOUBLE_EQ(s.hal.percent(), 100.0);
  EXPECT_DOUBLE_EQ(s.cog.percent(), 50.0);
}

TEST(Amber, SubsetMeansNoHallucination) {
  const std::vector<ObjectSet> m = {{"dog"}, {"tree", "dog"}};
  const std::vector<AnnotationSet> a = {{{"dog", "tree"}, {}}, {{"dog", "tree", "car"}, {}}};
  const auto s = amber_scores(m, a);
  EXPECT_DOUBLE_EQ(s.chair.percent(), 0.0);
  EXPECT_DOUBLE_EQ(s.hal.percent(), 0.0);
}

TEST(Amber, EmptyMention) {
  const std::vector<ObjectSet> m = {{}};
  const std::vector<AnnotationSet> a = {{{"dog"}, {}}};
  const auto s = amber_scores(m, a);
  EXPECT_DOUBLE_EQ(s.chair.percent(), 0.0);
  EXPECT_DOUBLE_EQ(s.cover.percent(), 0.0);
  EXPECT_DOUBLE_EQ(s.hal.percent(), 0.0);
  EXPECT_DOUBLE_EQ(s.cog.percent(), 0.0);
}

TEST(Amber, Errors) {
  const std::vector<ObjectSet> m = {{}};
  EXPECT_THROW(amber_scores(m, {}), Error);
  EXPECT_THROW(amber_scores({}, {}), Error);
}

TEST(Amber, RandomProperties) {
  std::mt19937_64 rng(12);
  const std::vector<std::string> pool = {"a", "b", "c", "d", "e", "f"};
  auto subset = [&] {
    ObjectSet s;
    for (const auto& o : pool)
      if (rng() % 2) s.insert(o);
    return s;
  };
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 1 + rng() % 6;
    std::vector<ObjectSet> m(n);
    std::vector<AnnotationSet> a(n);
    std::int64_t hallucinating = 0;
    for (std::size_t i = 0; i < n; ++i) {
      m[i] = subset();
      a[i] = {subset(), subset()};
      hallucinating += std::any_of(m[i].begin(), m[i].end(), [&](const auto& o) { return !a[i].truth.count(o); });
    }
    const auto s = amber_scores(m, a);
    ASSERT_EQ(s.hal, Ratio(hallucinating, static_cast<std::int64_t>(n)));
    if (s.hal.num() > 0) ASSERT_GT(s.chair.num(), 0);

    // adding a hallucinated object never lowers chair or hal
    auto m2 = m;
    m2[rng() % n].insert("zz-not-annotated");
    const auto s2 = amber_scores(m2, a);
    ASSERT_TRUE(s.chair <= s2.chair);
    ASSERT_TRUE(s.hal <= s2.hal);
    ASSERT_EQ(s.cover, s2.cover);

    std::reverse(m.begin(), m.end());
    std::reverse(a.begin(), a.end());
    const auto s3 = amber_scores(m, a);
    ASSERT_EQ(s3.chair, s.chair);
    ASSERT_EQ(s3.cog, s.cog);
  }
}
