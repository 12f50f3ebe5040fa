#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>

#include "hydra/image.hpp"
#include "hydra/suite.hpp"

namespace hydra::testing {

inline std::shared_ptr<const ImagePayload> tiny_png(std::uint8_t shade = 128) {
  ImageBuffer img(4, 4);
  for (auto& v : img.pixels()) v = shade;
  return std::make_shared<const ImagePayload>(encode_png(img));
}

inline BenchmarkItem vqa_item(const std::string& id, const std::string& object, Answer truth,
                              std::shared_ptr<const ImagePayload> payload = tiny_png()) {
  BenchmarkItem item;
  item.item_id = id;
  item.image = ImageRef{"img-" + id, std::move(payload), ImageOrigin::Clean};
  item.query = "Is there a " + object + " in the image?";
  item.task = TaskKind::Vqa;
  item.ground_truth = truth;
  return item;
}

inline BenchmarkItem caption_item(const std::string& id, AnnotationSet truth = {},
                                  std::shared_ptr<const ImagePayload> payload = tiny_png()) {
  BenchmarkItem item;
  item.item_id = id;
  item.image = ImageRef{"img-" + id, std::move(payload), ImageOrigin::Clean};
  item.query = "Describe the image.";
  item.task = TaskKind::Captioning;
  item.ground_truth = std::move(truth);
  return item;
}

inline BackendDescriptor descriptor(ModelRole role, int max_retries = 1) {
  BackendDescriptor d;
  d.role = role;
  d.endpoint = "mock:inline";
  d.model_id = std::string(to_string(role)) + "-test";
  d.max_retries = max_retries;
  return d;
}

// Backend answering from a callable, counting calls and touching the image like a real client.
class ScriptedBackend : public Backend {
 public:
  using Fn = std::function<std::string(const WireRequest&)>;
  explicit ScriptedBackend(Fn fn) : fn_(std::move(fn)) {}

  WireReply generate(const WireRequest& req, std::chrono::milliseconds) override {
    ++calls;
    if (req.image && req.image->payload) req.image->payload->read();
    WireReply r;
    r.ok = true;
    r.text = fn_(req);
    return r;
  }

  std::atomic<int> calls{0};

 private:
  Fn fn_;
};

inline std::shared_ptr<ScriptedBackend> scripted(ScriptedBackend::Fn fn) {
  return std::make_shared<ScriptedBackend>(std::move(fn));
}

inline std::shared_ptr<ScriptedBackend> constant(std::string text) {
  return scripted([text](const WireRequest&) { return text; });
}

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("hydra-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << text;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace hydra::testing
