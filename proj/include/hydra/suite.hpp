#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "hydra/core.hpp"

namespace hydra {

struct BackendDescriptor {
  ModelRole role = ModelRole::PlugInLvlm;
  std::string endpoint;  // http://..., https://... or mock:<fixture path>
  std::string model_id;
  int timeout_ms = 30000;
  int max_retries = 1;
};

// Throws hydra::Error when the scheme is not http, https or mock, or a field
// is out of range.
void validate_descriptor(const BackendDescriptor& d);

// What goes over the wire for one attempt.
struct WireRequest {
  ModelRole role = ModelRole::PlugInLvlm;
  TaskKind task = TaskKind::Vqa;
  std::string prompt;
  const ImageRef* image = nullptr;
  nlohmann::json params = nlohmann::json::object();
};

struct WireReply {
  bool ok = false;
  std::string text;
  std::string model_id;  // empty: fall back to the descriptor's model_id
  std::string error;
  std::uint64_t latency_ms = 0;
};

nlohmann::json to_wire_json(const WireRequest& req);

class Backend {
 public:
  virtual ~Backend() = default;
  // One attempt. Transport-level failures come back as ok=false; exceptions
  // are reserved for configuration errors that retrying cannot fix.
  virtual WireReply generate(const WireRequest& req, std::chrono::milliseconds timeout) = 0;
};

// POST {endpoint}/v1/generate with the JSON body from to_wire_json().
class HttpBackend : public Backend {
 public:
  explicit HttpBackend(std::string endpoint);
  WireReply generate(const WireRequest& req, std::chrono::milliseconds timeout) override;

 private:
  std::string origin_;  // scheme://host[:port]
  std::string path_;    // base path + /v1/generate
};

struct FixtureRule {
  std::string role = "*";
  std::string image_id = "*";
  std::string prompt_contains = "*";
  std::string reply;
  std::uint64_t latency_ms = 0;
  bool fail = false;
};

struct MockFixture {
  std::vector<FixtureRule> rules;
  std::optional<std::string> default_reply;
};

MockFixture parse_mock_fixture(const std::string& text);
MockFixture load_mock_fixture(const std::filesystem::path& path);

/// Scripted backend: the first rule matching (role, image id, prompt) answers.
/// Unmatched queries get the default reply, or a hard error without one.
class MockBackend : public Backend {
 public:
  explicit MockBackend(MockFixture fixture) : fixture_(std::move(fixture)) {}
  WireReply generate(const WireRequest& req, std::chrono::milliseconds timeout) override;

 private:
  MockFixture fixture_;
};

// Backend defined by a callable; used for fault injection and embedding.
class FunctionBackend : public Backend {
 public:
  using Fn = std::function<WireReply(const WireRequest&)>;
  explicit FunctionBackend(Fn fn) : fn_(std::move(fn)) {}
  WireReply generate(const WireRequest& req, std::chrono::milliseconds) override { return fn_(req); }

 private:
  Fn fn_;
};

// Builds the backend an endpoint names. Relative mock fixture paths resolve
// against `base_dir`.
std::shared_ptr<Backend> make_backend(const BackendDescriptor& d,
                                      const std::filesystem::path& base_dir = {});

struct QueryRequest {
  ModelRole role = ModelRole::PlugInLvlm;
  TaskKind task = TaskKind::Vqa;
  std::string prompt;
  ImageRef image;
  nlohmann::json params = nlohmann::json::object();
  int iteration = 1;
};

/// Role -> backend map. Populate it up front, then share it read-only.
class SuiteRegistry {
 public:
  struct Entry {
    BackendDescriptor descriptor;
    std::shared_ptr<Backend> backend;
  };

  // Re-registering a role replaces the previous entry. Without an explicit
  // backend one is built from the descriptor's endpoint.
  void add(const BackendDescriptor& descriptor, std::shared_ptr<Backend> backend = nullptr,
           const std::filesystem::path& base_dir = {});

  bool contains(ModelRole role) const { return entries_.count(role) > 0; }
  const Entry& at(ModelRole role) const;
  std::size_t size() const { return entries_.size(); }
  std::vector<ModelRole> roles() const;

  // Throws naming the first missing role.
  void require(std::span<const ModelRole> roles) const;

 private:
  std::map<ModelRole, Entry> entries_;
};

// Mandatory roles per task.
std::vector<ModelRole> required_roles(TaskKind task);
// Roles the discovery step queries given what is registered.
std::vector<ModelRole> discovery_roles(TaskKind task, const SuiteRegistry& registry);

/// Sends one request, retrying up to max_retries times. An unregistered role
/// is a hard error; exhausted retries give a response with failed=true and
/// empty text. The caller owns appending the response to memory.
ModelResponse query_model(const SuiteRegistry& registry, const QueryRequest& request);

// Runs the requests concurrently (at most max_in_flight at once) and returns
// responses in input order.
std::vector<ModelResponse> query_each(const SuiteRegistry& registry,
                                      std::span<const QueryRequest> requests,
                                      int max_in_flight = 4);

// Same prompt to several roles.
std::vector<ModelResponse> query_many(const SuiteRegistry& registry,
                                      std::span<const ModelRole> roles,
                                      const QueryRequest& request_template,
                                      int max_in_flight = 4);

}  // namespace hydra
