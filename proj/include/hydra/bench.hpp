#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "hydra/core.hpp"
#include "hydra/vocabulary.hpp"

namespace hydra {

// POPE's "adversarial" subset is co-occurrence based, not an image attack.
enum class PopeSubset { Random, Popular, Adversarial };

std::string_view to_string(PopeSubset s);
PopeSubset pope_subset_from_string(std::string_view s);

// JSON lines: {"question_id", "image", "text", "label": "yes"|"no"}.
// Throws ParseError with the line number for malformed lines.
std::vector<BenchmarkItem> load_pope(const std::filesystem::path& path, PopeSubset subset);
std::vector<BenchmarkItem> parse_pope(std::string_view text, PopeSubset subset);

// Per selected image: per_image/2 Yes and per_image/2 No questions, taken in
// file order. Images are visited in seeded-shuffle order and the first
// `images` eligible ones are kept.
std::vector<BenchmarkItem> sample_pope(const std::vector<BenchmarkItem>& items,
                                       std::size_t images = 50, std::size_t per_image = 6,
                                       std::uint64_t seed = 0);

struct MmePair {
  BenchmarkItem first;
  BenchmarkItem second;
};

// Tab-separated: image_id, question, Yes|No. Exactly two lines per image.
std::vector<MmePair> load_mme_existence(const std::filesystem::path& path);
std::vector<MmePair> parse_mme_existence(std::string_view text);

// JSON list of {"id", "image", "truth": [...], "hallu": [...]}. With a sample
// size, a seeded subset is kept in file order; nullopt keeps everything.
std::vector<BenchmarkItem> load_amber_generative(const std::filesystem::path& path,
                                                 const ObjectVocabulary& vocab,
                                                 std::optional<std::size_t> sample = 50,
                                                 std::uint64_t seed = 0);
std::vector<BenchmarkItem> parse_amber_generative(std::string_view text,
                                                  const ObjectVocabulary& vocab,
                                                  std::optional<std::size_t> sample = 50,
                                                  std::uint64_t seed = 0);

struct ManifestEntry {
  std::filesystem::path path;
  ImageOrigin origin = ImageOrigin::Clean;
  std::optional<std::filesystem::path> clean_path;  // attacked images: the unperturbed source
  std::optional<std::string> epsilon;               // attacked images: budget, "p/q"
};

// {"images": {id: "path" | {"path", "origin", "clean", "epsilon"}}}; relative
// paths resolve against the manifest's directory.
std::map<std::string, ManifestEntry> load_manifest(const std::filesystem::path& path);

// Portable seeded helpers; std::shuffle output differs across standard libraries.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);
template <typename T>
void seeded_shuffle(std::vector<T>& v, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_below(rng, i)]);
}

}  // namespace hydra
