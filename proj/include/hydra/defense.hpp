#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "hydra/core.hpp"
#include "hydra/image.hpp"

namespace hydra {

inline constexpr int kDefaultJpegQuality = 50;
inline constexpr int kDefaultSqueezeBits = 4;

// Encode to baseline 4:2:0 JPEG at `quality` and decode back.
// Throws std::invalid_argument for quality outside [1, 100] or an empty image.
ImageBuffer jpeg_compress(const ImageBuffer& image, int quality = kDefaultJpegQuality);

// Quantizes one channel value to 2^bits levels; both rounding steps round
// half away from zero, in exact integer arithmetic.
std::uint8_t squeeze_value(std::uint8_t v, int bits);

// Throws std::invalid_argument for bits outside [1, 8].
ImageBuffer feature_squeeze(const ImageBuffer& image, int bits = kDefaultSqueezeBits);

ImageBuffer apply_defense(const ImageBuffer& image, DefenseKind defense);

// L-infinity budget as a fraction of the 8-bit range, e.g. 16/255.
struct Epsilon {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// Accepts "p/q" or a plain non-negative integer. Throws hydra::Error when the
// value is malformed or outside [0, 1].
Epsilon parse_epsilon(std::string_view text);

struct BudgetCheck {
  bool pass = false;
  int max_delta = 0;  // largest absolute channel difference, 0..255

  double max_normalized() const { return max_delta / 255.0; }
};

// Pass iff max |clean - perturbed| / 255 <= epsilon (inclusive). Throws
// std::invalid_argument on a dimension mismatch.
BudgetCheck verify_budget(const ImageBuffer& clean, const ImageBuffer& perturbed,
                          const Epsilon& epsilon);

}  // namespace hydra
