#include <openssl/evp.h>

#include "httplib.h"

#include "hydra/suite.hpp"

namespace hydra {

namespace {

std::string base64(std::span<const std::uint8_t> bytes) {
  if (bytes.empty()) return {};
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

}  // namespace

nlohmann::json to_wire_json(const WireRequest& req) {
  std::string image_b64;
  if (req.image && req.image->payload) image_b64 = base64(req.image->payload->read());
  return {
      {"role", std::string(to_string(req.role))},
      {"task", std::string(to_string(req.task))},
      {"prompt", req.prompt},
      {"image_b64", std::move(image_b64)},
      {"params", req.params.is_null() ? nlohmann::json::object() : req.params},
  };
}

HttpBackend::HttpBackend(std::string endpoint) {
  const auto scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos) throw Error("invalid endpoint '" + endpoint + "'");
  const auto path_start = endpoint.find('/', scheme_end + 3);
  origin_ = endpoint.substr(0, path_start);
  std::string base = path_start == std::string::npos ? "" : endpoint.substr(path_start);
  while (!base.empty() && base.back() == '/') base.pop_back();
  path_ = base + "/v1/generate";
}

WireReply HttpBackend::generate(const WireRequest& req, std::chrono::milliseconds timeout) {
  const auto start = std::chrono::steady_clock::now();
  WireReply reply;
  auto finish = [&](WireReply r) {
    r.latency_ms = static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                              start)
            .count());
    return r;
  };

  httplib::Client client(origin_);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  const auto body = to_wire_json(req).dump();
  auto res = client.Post(path_, body, "application/json");
  if (!res) {
    reply.error = "transport error: " + httplib::to_string(res.error());
    return finish(std::move(reply));
  }
  if (res->status != 200) {
    reply.error = "HTTP status " + std::to_string(res->status);
    return finish(std::move(reply));
  }
  auto doc = nlohmann::json::parse(res->body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("text") || !doc["text"].is_string()) {
    reply.error = "malformed response body";
    return finish(std::move(reply));
  }
  reply.ok = true;
  reply.text = doc["text"].get<std::string>();
  if (doc.contains("model_id") && doc["model_id"].is_string())
    reply.model_id = doc["model_id"].get<std::string>();
  return finish(std::move(reply));
}

}  // namespace hydra
