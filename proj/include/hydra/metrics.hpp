#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hydra/core.hpp"

namespace hydra {

/// Exact non-negative fraction, always reduced. Metric values are kept exact
/// until they are rounded for display.
class Ratio {
 public:
  Ratio() = default;
  Ratio(std::int64_t num, std::int64_t den);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  // value * 100 rounded half away from zero to one decimal.
  double percent() const;

  Ratio operator+(const Ratio& o) const;
  Ratio operator*(const Ratio& o) const;
  bool operator==(const Ratio&) const = default;
  bool operator<=(const Ratio& o) const;

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

// Confusion counts with Yes as the positive class.
struct Confusion {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t tn = 0;
  std::int64_t fn = 0;

  std::int64_t total() const { return tp + fp + tn + fn; }
};

Confusion confusion(std::span<const Answer> predictions, std::span<const Answer> labels);

// Fractions in [0, 1]; percent() gives the reported figure.
struct PopeScore {
  Ratio accuracy;
  Ratio f1;
  Ratio yes_ratio;
};

struct MmeScore {
  Ratio acc;
  Ratio acc_plus;
  Ratio total;  // acc + acc_plus, in [0, 2]
};

struct AmberScore {
  Ratio chair;
  Ratio cover;
  Ratio hal;
  Ratio cog;
};

// Throws hydra::Error on empty input or a length mismatch.
PopeScore pope_scores(std::span<const Answer> predictions, std::span<const Answer> labels);

// One (prediction, label) pair per question; every image contributes two.
using MmeImage = std::pair<std::pair<Answer, Answer>, std::pair<Answer, Answer>>;
MmeScore mme_scores(std::span<const MmeImage> images);

// Per response: the object set mentioned by the final caption and its annotations.
AmberScore amber_scores(std::span<const ObjectSet> mentioned,
                        std::span<const AnnotationSet> annotations);

}  // namespace hydra
