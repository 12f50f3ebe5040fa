#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "hydra/suite.hpp"

namespace hydra {

namespace {

using nlohmann::json;

std::size_t line_at(const std::string& text, std::size_t byte_offset) {
  byte_offset = std::min(byte_offset, text.size());
  return 1 + static_cast<std::size_t>(
                 std::count(text.begin(), text.begin() + static_cast<long>(byte_offset), '\n'));
}

// Line of every '{' whose enclosing container is an array, in document order.
// Rules are exactly those objects in both accepted fixture layouts.
std::vector<std::size_t> array_element_lines(const std::string& text) {
  std::vector<std::size_t> lines;
  std::vector<char> stack;
  std::size_t line = 1;
  bool in_string = false;
  bool escaped = false;
  for (char c : text) {
    if (c == '\n') ++line;
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    switch (c) {
      case '"':
        in_string = true;
        break;
      case '{':
        if (!stack.empty() && stack.back() == '[') lines.push_back(line);
        stack.push_back('{');
        break;
      case '[':
        stack.push_back('[');
        break;
      case '}':
      case ']':
        if (!stack.empty()) stack.pop_back();
        break;
      default:
        break;
    }
  }
  return lines;
}

std::string string_field(const json& obj, const char* key, std::size_t line, bool required) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    if (required) throw ParseError(std::string("rule is missing \"") + key + "\"", line);
    return "*";
  }
  if (!it->is_string()) throw ParseError(std::string("\"") + key + "\" must be a string", line);
  return it->get<std::string>();
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

MockFixture parse_mock_fixture(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed fixture: ") + e.what(), line_at(text, e.byte));
  }

  MockFixture fixture;
  json elements;
  if (doc.is_array()) {
    elements = doc;
  } else if (doc.is_object()) {
    if (doc.contains("default")) {
      if (!doc["default"].is_string()) throw ParseError("\"default\" must be a string", 1);
      fixture.default_reply = doc["default"].get<std::string>();
    }
    elements = doc.value("rules", json::array());
    if (!elements.is_array()) throw ParseError("\"rules\" must be a list", 1);
  } else {
    throw ParseError("fixture must be a JSON list of rules", 1);
  }

  const auto lines = array_element_lines(text);
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const json& el = elements[i];
    const std::size_t line = i < lines.size() ? lines[i] : 0;
    if (!el.is_object()) throw ParseError("fixture rule must be an object", line);
    if (el.size() == 1 && el.contains("default")) {
      if (!el["default"].is_string()) throw ParseError("\"default\" must be a string", line);
      fixture.default_reply = el["default"].get<std::string>();
      continue;
    }
    FixtureRule rule;
    rule.role = string_field(el, "role", line, false);
    rule.image_id = string_field(el, "image_id", line, false);
    rule.prompt_contains = string_field(el, "prompt_contains", line, false);
    rule.fail = el.value("fail", false);
    if (!rule.fail) rule.reply = string_field(el, "reply", line, true);
    if (el.contains("latency_ms")) {
      if (!el["latency_ms"].is_number_unsigned())
        throw ParseError("\"latency_ms\" must be a non-negative integer", line);
      rule.latency_ms = el["latency_ms"].get<std::uint64_t>();
    }
    if (rule.role != "*") {
      try {
        role_from_string(rule.role);
      } catch (const Error& e) {
        throw ParseError(e.what(), line);
      }
    }
    fixture.rules.push_back(std::move(rule));
  }
  return fixture;
}

MockFixture load_mock_fixture(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open mock fixture " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_mock_fixture(ss.str());
  } catch (const ParseError& e) {
    throw e.in(path.string());
  }
}

WireReply MockBackend::generate(const WireRequest& req, std::chrono::milliseconds) {
  // A real backend would upload the image; touch it the same way.
  if (req.image && req.image->payload) req.image->payload->read();

  const std::string role(to_string(req.role));
  const std::string image_id = req.image ? req.image->id : std::string();
  const std::string prompt = lower(req.prompt);
  for (const auto& rule : fixture_.rules) {
    if (rule.role != "*" && rule.role != role) continue;
    if (rule.image_id != "*" && rule.image_id != image_id) continue;
    if (rule.prompt_contains != "*" && prompt.find(lower(rule.prompt_contains)) == std::string::npos)
      continue;
    WireReply reply;
    reply.latency_ms = rule.latency_ms;
    if (rule.fail) {
      reply.error = "scripted failure";
      return reply;
    }
    reply.ok = true;
    reply.text = rule.reply;
    return reply;
  }
  if (fixture_.default_reply) return WireReply{true, *fixture_.default_reply, {}, {}, 0};
  throw Error("no rule matched (role " + role + ", image '" + image_id + "', prompt '" +
              req.prompt + "')");
}

}  // namespace hydra
