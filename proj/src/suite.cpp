#include "hydra/suite.hpp"

#include <algorithm>

#include "hydra/parallel.hpp"

namespace hydra {

void validate_descriptor(const BackendDescriptor& d) {
  const auto& ep = d.endpoint;
  const bool known = ep.starts_with("http://") || ep.starts_with("https://") ||
                     ep.starts_with("mock:");
  if (!known)
    throw Error("invalid endpoint scheme for " + std::string(to_string(d.role)) + ": '" + ep +
                "' (expected http, https or mock)");
  if (d.model_id.empty())
    throw Error("model_id must be non-empty for " + std::string(to_string(d.role)));
  if (d.timeout_ms < 1) throw Error("timeout_ms must be positive");
  if (d.max_retries < 0) throw Error("max_retries must be non-negative");
}

std::shared_ptr<Backend> make_backend(const BackendDescriptor& d,
                                      const std::filesystem::path& base_dir) {
  validate_descriptor(d);
  if (d.endpoint.starts_with("mock:")) {
    std::filesystem::path fixture = d.endpoint.substr(5);
    if (fixture.is_relative() && !base_dir.empty()) fixture = base_dir / fixture;
    return std::make_shared<MockBackend>(load_mock_fixture(fixture));
  }
  return std::make_shared<HttpBackend>(d.endpoint);
}

void SuiteRegistry::add(const BackendDescriptor& descriptor, std::shared_ptr<Backend> backend,
                        const std::filesystem::path& base_dir) {
  validate_descriptor(descriptor);
  if (!backend) backend = make_backend(descriptor, base_dir);
  entries_.insert_or_assign(descriptor.role, Entry{descriptor, std::move(backend)});
}

const SuiteRegistry::Entry& SuiteRegistry::at(ModelRole role) const {
  auto it = entries_.find(role);
  if (it == entries_.end())
    throw Error("role not registered: " + std::string(to_string(role)));
  return it->second;
}

std::vector<ModelRole> SuiteRegistry::roles() const {
  std::vector<ModelRole> out;
  for (const auto& [role, _] : entries_) out.push_back(role);
  return out;
}

void SuiteRegistry::require(std::span<const ModelRole> roles) const {
  for (ModelRole r : roles)
    if (!contains(r)) throw Error("role not registered: " + std::string(to_string(r)));
}

std::vector<ModelRole> required_roles(TaskKind task) {
  if (task == TaskKind::Vqa) return {ModelRole::PlugInLvlm, ModelRole::ObjectDetector};
  return {ModelRole::PlugInLvlm, ModelRole::AuxLvlmA, ModelRole::AuxLvlmB, ModelRole::Captioner,
          ModelRole::VlpVqa};
}

std::vector<ModelRole> discovery_roles(TaskKind task, const SuiteRegistry& registry) {
  const std::vector<ModelRole> wanted =
      task == TaskKind::Vqa
          ? std::vector{ModelRole::PlugInLvlm, ModelRole::AuxLvlmA, ModelRole::AuxLvlmB}
          : std::vector{ModelRole::PlugInLvlm, ModelRole::AuxLvlmA, ModelRole::VlpVqa};
  std::vector<ModelRole> out;
  std::copy_if(wanted.begin(), wanted.end(), std::back_inserter(out),
               [&](ModelRole r) { return registry.contains(r); });
  return out;
}

ModelResponse query_model(const SuiteRegistry& registry, const QueryRequest& request) {
  const auto& entry = registry.at(request.role);
  const auto& desc = entry.descriptor;

  WireRequest wire{request.role, request.task, request.prompt, &request.image, request.params};
  ModelResponse out;
  out.role = request.role;
  out.model_id = desc.model_id;
  out.prompt = request.prompt;
  out.iteration = request.iteration;

  const int max_attempts = 1 + desc.max_retries;
  std::uint64_t latency = 0;
  std::string last_error;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    WireReply reply = entry.backend->generate(wire, std::chrono::milliseconds(desc.timeout_ms));
    latency += reply.latency_ms;
    out.attempts = attempt;
    if (reply.ok) {
      out.text = std::move(reply.text);
      if (!reply.model_id.empty()) out.model_id = std::move(reply.model_id);
      out.latency_ms = latency;
      return out;
    }
    last_error = std::move(reply.error);
  }
  out.failed = true;
  out.text.clear();
  out.error = std::move(last_error);
  out.latency_ms = latency;
  return out;
}

std::vector<ModelResponse> query_each(const SuiteRegistry& registry,
                                      std::span<const QueryRequest> requests,
                                      int max_in_flight) {
  for (const auto& r : requests) registry.at(r.role);
  std::vector<ModelResponse> out(requests.size());
  parallel_for(requests.size(), static_cast<std::size_t>(std::max(1, max_in_flight)),
               [&](std::size_t i) { out[i] = query_model(registry, requests[i]); });
  return out;
}

std::vector<ModelResponse> query_many(const SuiteRegistry& registry,
                                      std::span<const ModelRole> roles,
                                      const QueryRequest& request_template, int max_in_flight) {
  std::vector<QueryRequest> requests;
  requests.reserve(roles.size());
  for (ModelRole r : roles) {
    requests.push_back(request_template);
    requests.back().role = r;
  }
  return query_each(registry, requests, max_in_flight);
}

}  // namespace hydra
