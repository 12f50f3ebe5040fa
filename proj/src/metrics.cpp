#include "hydra/metrics.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace hydra {

namespace {

std::int64_t narrow(__int128 v) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
    throw std::overflow_error("metric fraction overflow");
  return static_cast<std::int64_t>(v);
}

Ratio reduce(__int128 num, __int128 den) {
  __int128 a = num < 0 ? -num : num;
  __int128 b = den;
  while (b != 0) {
    const __int128 t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) {
    num /= a;
    den /= a;
  }
  return Ratio(narrow(num), narrow(den));
}

}  // namespace

Ratio::Ratio(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
  if (den <= 0) throw std::invalid_argument("ratio denominator must be positive");
  if (num < 0) throw std::invalid_argument("ratio must be non-negative");
  const std::int64_t g = std::gcd(num, den);
  if (g > 1) {
    num_ /= g;
    den_ /= g;
  }
}

double Ratio::percent() const {
  // tenths of a percent = round(1000 * num / den), half away from zero
  const __int128 scaled = static_cast<__int128>(num_) * 1000;
  const __int128 tenths = (2 * scaled + den_) / (2 * static_cast<__int128>(den_));
  return static_cast<double>(static_cast<std::int64_t>(tenths)) / 10.0;
}

Ratio Ratio::operator+(const Ratio& o) const {
  return reduce(static_cast<__int128>(num_) * o.den_ + static_cast<__int128>(o.num_) * den_,
                static_cast<__int128>(den_) * o.den_);
}

Ratio Ratio::operator*(const Ratio& o) const {
  return reduce(static_cast<__int128>(num_) * o.num_, static_cast<__int128>(den_) * o.den_);
}

bool Ratio::operator<=(const Ratio& o) const {
  return static_cast<__int128>(num_) * o.den_ <= static_cast<__int128>(o.num_) * den_;
}

Confusion confusion(std::span<const Answer> predictions, std::span<const Answer> labels) {
  if (predictions.size() != labels.size())
    throw Error("prediction/label length mismatch: " + std::to_string(predictions.size()) +
                " vs " + std::to_string(labels.size()));
  Confusion c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool pred_yes = predictions[i] == Answer::Yes;
    const bool label_yes = labels[i] == Answer::Yes;
    if (pred_yes && label_yes) ++c.tp;
    else if (pred_yes) ++c.fp;
    else if (label_yes) ++c.fn;
    else ++c.tn;
  }
  return c;
}

PopeScore pope_scores(std::span<const Answer> predictions, std::span<const Answer> labels) {
  const Confusion c = confusion(predictions, labels);
  if (c.total() == 0) throw Error("no predictions to score");
  PopeScore s;
  s.accuracy = Ratio(c.tp + c.tn, c.total());
  // 2PR/(P+R) = 2TP / (2TP + FP + FN); 0 when there are no positives at all
  const std::int64_t f1_den = 2 * c.tp + c.fp + c.fn;
  s.f1 = f1_den == 0 ? Ratio(0, 1) : Ratio(2 * c.tp, f1_den);
  s.yes_ratio = Ratio(c.tp + c.fp, c.total());
  return s;
}

MmeScore mme_scores(std::span<const MmeImage> images) {
  if (images.empty()) throw Error("no images to score");
  std::int64_t correct = 0;
  std::int64_t both = 0;
  for (const auto& [q1, q2] : images) {
    const int hits = (q1.first == q1.second) + (q2.first == q2.second);
    correct += hits;
    both += hits == 2;
  }
  const auto n = static_cast<std::int64_t>(images.size());
  MmeScore s;
  s.acc = Ratio(correct, 2 * n);
  s.acc_plus = Ratio(both, n);
  s.total = s.acc + s.acc_plus;
  return s;
}

AmberScore amber_scores(std::span<const ObjectSet> mentioned,
                        std::span<const AnnotationSet> annotations) {
  if (mentioned.size() != annotations.size())
    throw Error("response/annotation length mismatch: " + std::to_string(mentioned.size()) +
                " vs " + std::to_string(annotations.size()));
  if (mentioned.empty()) throw Error("no responses to score");
  Ratio chair, cover, hal, cog;
  for (std::size_t i = 0; i < mentioned.size(); ++i) {
    const auto& m = mentioned[i];
    const auto& truth = annotations[i].truth;
    const auto& lexicon = annotations[i].hallucination_lexicon;
    std::int64_t outside = 0;
    std::int64_t covered = 0;
    std::int64_t cognitive = 0;
    for (const auto& o : m) {
      if (truth.count(o)) ++covered;
      else ++outside;
      cognitive += static_cast<std::int64_t>(lexicon.count(o));
    }
    const auto size = static_cast<std::int64_t>(m.size());
    if (size > 0) {
      chair = chair + Ratio(outside, size);
      cog = cog + Ratio(cognitive, size);
    }
    if (!truth.empty()) cover = cover + Ratio(covered, static_cast<std::int64_t>(truth.size()));
    if (outside > 0) hal = hal + Ratio(1, 1);
  }
  const Ratio inv(1, static_cast<std::int64_t>(mentioned.size()));
  return {chair * inv, cover * inv, hal * inv, cog * inv};
}

}  // namespace hydra
