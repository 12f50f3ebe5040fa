#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace hydra {

/// 8-bit RGB image, row-major, channels interleaved.
class ImageBuffer {
 public:
  static constexpr int kChannels = 3;

  ImageBuffer() = default;
  // Zero-filled. Throws std::invalid_argument unless width, height >= 1.
  ImageBuffer(int width, int height);
  // Throws std::invalid_argument when pixels.size() != width * height * 3.
  ImageBuffer(int width, int height, std::vector<std::uint8_t> pixels);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return pixels_.empty(); }

  std::uint8_t& at(int x, int y, int c) { return pixels_[index(x, y, c)]; }
  std::uint8_t at(int x, int y, int c) const { return pixels_[index(x, y, c)]; }

  std::span<std::uint8_t> pixels() { return pixels_; }
  std::span<const std::uint8_t> pixels() const { return pixels_; }

  bool operator==(const ImageBuffer&) const = default;

 private:
  std::size_t index(int x, int y, int c) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(x)) * kChannels + static_cast<std::size_t>(c);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

enum class ImageFormat { Png, Jpeg, Unknown };

ImageFormat sniff_format(std::span<const std::uint8_t> bytes);

// PNG or JPEG bytes -> RGB. Alpha is dropped, gray expanded. Throws hydra::Error.
ImageBuffer decode_image(std::span<const std::uint8_t> bytes);
ImageBuffer read_image(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_png(const ImageBuffer& image);
// Baseline JPEG, 4:2:0 chroma subsampling.
std::vector<std::uint8_t> encode_jpeg(const ImageBuffer& image, int quality);

void write_png(const ImageBuffer& image, const std::filesystem::path& path);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace hydra
