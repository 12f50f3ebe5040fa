#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "hydra/core.hpp"

namespace hydra {

// Lowercased word tokens. Clause punctuation (, ; : . ! ?) starts a new
// clause; `clause[i]` is the clause index of `words[i]`.
struct Tokens {
  std::vector<std::string> words;
  std::vector<int> clause;

  std::size_t size() const { return words.size(); }
};

Tokens tokenize(std::string_view text);

// Lowercase, trim, collapse internal whitespace.
std::string clean_phrase(std::string_view phrase);

struct Mention {
  std::string object;  // canonical name (or the literal phrase searched for)
  std::size_t begin = 0;
  std::size_t end = 0;  // one past the last token
};

/// Canonical object names plus an alias table. Lookups are case-insensitive
/// and retry with the last word singularized (dogs -> dog, buses -> bus,
/// ponies -> pony).
class ObjectVocabulary {
 public:
  ObjectVocabulary() = default;
  // Throws hydra::Error when a synonym targets a name outside `objects`.
  ObjectVocabulary(const std::vector<std::string>& objects,
                   const std::map<std::string, std::string>& synonyms);

  // {"objects": [...], "synonyms": {alias: canonical}}
  static ObjectVocabulary from_json(const nlohmann::json& doc);
  static ObjectVocabulary load(const std::filesystem::path& path);
  // The 80 COCO categories with common aliases.
  static ObjectVocabulary coco();

  std::optional<std::string> canonical(std::string_view phrase) const;
  // Canonical name when known, otherwise the cleaned phrase itself.
  std::string normalize(std::string_view phrase) const;
  bool contains(std::string_view canonical_name) const {
    return objects_.count(std::string(canonical_name)) > 0;
  }
  const ObjectSet& objects() const { return objects_; }
  const std::map<std::string, std::string>& synonyms() const { return synonyms_; }

  // Greedy longest-match scan for vocabulary objects.
  std::vector<Mention> find_mentions(const Tokens& tokens) const;
  // Mentions of one target; unknown targets are matched literally.
  std::vector<Mention> find_target(const Tokens& tokens, std::string_view target) const;

 private:
  std::optional<std::string> lookup_exact(const std::string& phrase) const;

  ObjectSet objects_;
  std::map<std::string, std::string> synonyms_;
  std::size_t max_words_ = 1;
};

// Descriptor words attribute questions are built from. Scan order is colors,
// then sizes, then spatial terms, each in list order.
struct DescriptorLexicon {
  std::vector<std::string> colors;
  std::vector<std::string> sizes;
  std::vector<std::string> spatial;

  // {"colors": [...], "sizes": [...], "spatial": [...]}
  static DescriptorLexicon from_json(const nlohmann::json& doc);
  static DescriptorLexicon load(const std::filesystem::path& path);
  static DescriptorLexicon standard();

  // Position in scan order, or nullopt when the word is not a descriptor.
  std::optional<std::size_t> rank(std::string_view word) const;
};

}  // namespace hydra
