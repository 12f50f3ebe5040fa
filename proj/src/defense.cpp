#include "hydra/defense.hpp"

#include <charconv>
#include <cstdlib>
#include <stdexcept>

namespace hydra {

namespace {

// round(num / den) with ties away from zero, num >= 0, den > 0.
constexpr std::uint32_t round_div(std::uint32_t num, std::uint32_t den) {
  return (2 * num + den) / (2 * den);
}

std::int64_t parse_int(std::string_view s, std::string_view whole) {
  std::int64_t v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty())
    throw Error("malformed epsilon '" + std::string(whole) + "' (expected p/q)");
  return v;
}

}  // namespace

ImageBuffer jpeg_compress(const ImageBuffer& image, int quality) {
  if (quality < 1 || quality > 100)
    throw std::invalid_argument("JPEG quality must be in [1, 100], got " + std::to_string(quality));
  if (image.empty()) throw std::invalid_argument("cannot compress a zero-sized image");
  return decode_image(encode_jpeg(image, quality));
}

std::uint8_t squeeze_value(std::uint8_t v, int bits) {
  const std::uint32_t levels = (1u << bits) - 1;
  const std::uint32_t level = round_div(static_cast<std::uint32_t>(v) * levels, 255);
  return static_cast<std::uint8_t>(round_div(level * 255, levels));
}

ImageBuffer feature_squeeze(const ImageBuffer& image, int bits) {
  if (bits < 1 || bits > 8)
    throw std::invalid_argument("bit depth must be in [1, 8], got " + std::to_string(bits));
  std::array<std::uint8_t, 256> table{};
  for (int v = 0; v < 256; ++v) table[v] = squeeze_value(static_cast<std::uint8_t>(v), bits);
  ImageBuffer out = image;
  for (auto& p : out.pixels()) p = table[p];
  return out;
}

ImageBuffer apply_defense(const ImageBuffer& image, DefenseKind defense) {
  switch (defense) {
    case DefenseKind::Jpeg:
      return jpeg_compress(image, kDefaultJpegQuality);
    case DefenseKind::FeatSq:
      return feature_squeeze(image, kDefaultSqueezeBits);
    case DefenseKind::None:
      break;
  }
  return image;
}

Epsilon parse_epsilon(std::string_view text) {
  Epsilon e;
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) {
    e.num = parse_int(text, text);
    e.den = 1;
  } else {
    e.num = parse_int(text.substr(0, slash), text);
    e.den = parse_int(text.substr(slash + 1), text);
  }
  if (e.den <= 0 || e.num < 0 || e.num > e.den)
    throw Error("epsilon '" + std::string(text) + "' must lie in [0, 1]");
  return e;
}

BudgetCheck verify_budget(const ImageBuffer& clean, const ImageBuffer& perturbed,
                          const Epsilon& epsilon) {
  if (clean.width() != perturbed.width() || clean.height() != perturbed.height())
    throw std::invalid_argument("budget check needs images of equal size: " +
                                std::to_string(clean.width()) + "x" +
                                std::to_string(clean.height()) + " vs " +
                                std::to_string(perturbed.width()) + "x" +
                                std::to_string(perturbed.height()));
  BudgetCheck out;
  const auto a = clean.pixels();
  const auto b = perturbed.pixels();
  for (std::size_t i = 0; i < a.size(); ++i)
    out.max_delta = std::max(out.max_delta, std::abs(int{a[i]} - int{b[i]}));
  // max_delta / 255 <= num / den
  out.pass = static_cast<std::int64_t>(out.max_delta) * epsilon.den <= 255 * epsilon.num;
  return out;
}

}  // namespace hydra
