#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

#include "hydra/image.hpp"
#include "test_util.hpp"

namespace hydra::testing {

// One synthetic image: the objects it shows and the ones it does not.
struct SyntheticImage {
  std::string id;
  std::vector<std::string> present;
  std::vector<std::string> absent;
};

using CaptionScript = std::function<std::string(const SyntheticImage&)>;
using AnswerScript = std::function<std::string(const SyntheticImage&, const std::string& object, bool present)>;

inline std::string list_objects(const std::vector<std::string>& objects, const char* sep = ", ") {
  std::string out;
  for (const auto& o : objects) out += (out.empty() ? "" : sep) + o;
  return out;
}

struct PopeScripts {
  CaptionScript plugin_caption = [](const SyntheticImage& im) {
    std::string s = "A photo with";
    for (const auto& o : im.present) s += " a " + o + ",";
    s.back() = '.';
    return s;
  };
  CaptionScript detector = [](const SyntheticImage& im) { return list_objects(im.present); };
  AnswerScript plugin = truthful();
  AnswerScript aux_a = truthful();
  AnswerScript aux_b = truthful();
  // reply for anything else the discovery models are asked
  std::string fallback = "I am not sure.";

  static AnswerScript truthful() {
    return [](const SyntheticImage&, const std::string&, bool present) { return present ? "Yes." : "No."; };
  }
  static AnswerScript inverted() {
    return [](const SyntheticImage&, const std::string&, bool present) { return present ? "No." : "Yes."; };
  }
};

inline const std::vector<std::string>& object_pool() {
  static const std::vector<std::string> pool = {"dog", "cat", "car", "kite", "bench", "bus",
                                                "cup", "tie", "horse", "boat", "clock", "vase"};
  return pool;
}

// `images` images, three present and three absent objects each.
inline std::vector<SyntheticImage> synthetic_images(int images) {
  std::vector<SyntheticImage> out;
  const auto& pool = object_pool();
  for (int i = 0; i < images; ++i) {
    SyntheticImage im;
    im.id = "img_" + std::to_string(i) + ".png";
    for (std::size_t k = 0; k < 6; ++k) {
      const auto& o = pool[(static_cast<std::size_t>(i) + k * 2) % pool.size()];
      (k < 3 ? im.present : im.absent).push_back(o);
    }
    out.push_back(std::move(im));
  }
  return out;
}

inline void write_json(const std::filesystem::path& p, const nlohmann::json& j) {
  write_text(p, j.dump(2) + "\n");
}

inline void write_images_and_manifest(const std::filesystem::path& dir,
                                      const std::vector<SyntheticImage>& images) {
  nlohmann::json manifest = {{"images", nlohmann::json::object()}};
  std::filesystem::create_directories(dir / "images");
  for (std::size_t i = 0; i < images.size(); ++i) {
    ImageBuffer img(8, 8);
    for (std::size_t p = 0; p < img.pixels().size(); ++p)
      img.pixels()[p] = static_cast<std::uint8_t>((i * 37 + p * 11) & 0xff);
    write_png(img, dir / "images" / images[i].id);
    manifest["images"][images[i].id] = "images/" + images[i].id;
  }
  write_json(dir / "manifest.json", manifest);
}

inline nlohmann::json backend(const char* role, const std::string& fixture) {
  return {{"role", role}, {"endpoint", "mock:" + fixture}, {"model_id", std::string(role) + "-mock"}};
}

// Writes pope_<subset>.jsonl, manifest.json, images/, fixtures and suite.json.
// Returns the suite config path.
inline std::filesystem::path write_pope_dataset(const std::filesystem::path& dir,
                                                const std::vector<SyntheticImage>& images,
                                                const PopeScripts& scripts = {},
                                                const std::string& subset = "random") {
  std::string lines;
  int qid = 1;
  nlohmann::json plugin = nlohmann::json::array(), detector = nlohmann::json::array(),
                 aux_a = nlohmann::json::array(), aux_b = nlohmann::json::array();
  for (const auto& im : images) {
    plugin.push_back({{"role", "plugin_lvlm"}, {"image_id", im.id}, {"prompt_contains", "describe"},
                      {"reply", scripts.plugin_caption(im)}});
    detector.push_back({{"image_id", im.id}, {"reply", scripts.detector(im)}});
    for (int k = 0; k < 6; ++k) {
      const bool present = k % 2 == 0;
      const auto& object = present ? im.present[static_cast<std::size_t>(k / 2)]
                                   : im.absent[static_cast<std::size_t>(k / 2)];
      lines += nlohmann::json{{"question_id", qid++},
                              {"image", im.id},
                              {"text", "Is there a " + object + " in the image?"},
                              {"label", present ? "yes" : "no"}}
                   .dump() +
               "\n";
      const std::string needle = "there a " + object + " in";
      plugin.push_back({{"image_id", im.id}, {"prompt_contains", needle}, {"reply", scripts.plugin(im, object, present)}});
      aux_a.push_back({{"image_id", im.id}, {"prompt_contains", needle}, {"reply", scripts.aux_a(im, object, present)}});
      aux_b.push_back({{"image_id", im.id}, {"prompt_contains", needle}, {"reply", scripts.aux_b(im, object, present)}});
    }
  }
  for (auto* f : {&plugin, &aux_a, &aux_b}) f->push_back({{"default", scripts.fallback}});
  write_text(dir / ("pope_" + subset + ".jsonl"), lines);
  write_images_and_manifest(dir, images);
  write_json(dir / "fixtures" / "plugin.json", plugin);
  write_json(dir / "fixtures" / "detector.json", detector);
  write_json(dir / "fixtures" / "aux_a.json", aux_a);
  write_json(dir / "fixtures" / "aux_b.json", aux_b);
  const nlohmann::json suite = {
      {"backends",
       {backend("plugin_lvlm", "fixtures/plugin.json"), backend("object_detector", "fixtures/detector.json"),
        backend("aux_lvlm_a", "fixtures/aux_a.json"), backend("aux_lvlm_b", "fixtures/aux_b.json")}},
      {"run", {{"max_iterations", 3}, {"vote_threshold", 2}, {"tie_policy", "conservative_no"}}},
  };
  write_json(dir / "suite.json", suite);
  return dir / "suite.json";
}

}  // namespace hydra::testing
