#include "hydra/vocabulary.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

namespace hydra {

namespace {

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '\'';
}

bool is_clause_break(char c) {
  return c == ',' || c == ';' || c == ':' || c == '.' || c == '!' || c == '?';
}

// Candidate singular forms of the last word, most specific first.
std::vector<std::string> singular_forms(const std::string& word) {
  std::vector<std::string> out;
  if (word.size() > 4 && word.ends_with("ies")) out.push_back(word.substr(0, word.size() - 3) + "y");
  if (word.size() > 3 && word.ends_with("es")) out.push_back(word.substr(0, word.size() - 2));
  if (word.size() > 2 && word.ends_with('s') && !word.ends_with("ss"))
    out.push_back(word.substr(0, word.size() - 1));
  return out;
}

std::string join(const std::vector<std::string>& words, std::size_t begin, std::size_t end) {
  std::string out;
  for (std::size_t i = begin; i < end; ++i) {
    if (i > begin) out += ' ';
    out += words[i];
  }
  return out;
}

std::size_t word_count(const std::string& phrase) {
  return static_cast<std::size_t>(std::count(phrase.begin(), phrase.end(), ' ')) + 1;
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::vector<std::string> string_list(const nlohmann::json& doc, const char* key) {
  if (!doc.contains(key)) return {};
  const auto& v = doc.at(key);
  if (!v.is_array()) throw ParseError(std::string("\"") + key + "\" must be a list of strings");
  std::vector<std::string> out;
  for (const auto& s : v) {
    if (!s.is_string()) throw ParseError(std::string("\"") + key + "\" must be a list of strings");
    out.push_back(clean_phrase(s.get<std::string>()));
  }
  return out;
}

}  // namespace

Tokens tokenize(std::string_view text) {
  Tokens out;
  int clause = 0;
  std::string word;
  auto flush = [&] {
    while (!word.empty() && word.front() == '\'') word.erase(word.begin());
    while (!word.empty() && word.back() == '\'') word.pop_back();
    if (!word.empty()) {
      out.words.push_back(word);
      out.clause.push_back(clause);
    }
    word.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    // U+2019 right single quotation mark, common in model output
    if (c == '\xE2' && i + 2 < text.size() && text[i + 1] == '\x80' && text[i + 2] == '\x99') {
      word += '\'';
      i += 2;
      continue;
    }
    if (is_word_char(c)) {
      word += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      continue;
    }
    flush();
    if (is_clause_break(c) && !out.words.empty() && out.clause.back() == clause) ++clause;
  }
  flush();
  return out;
}

std::string clean_phrase(std::string_view phrase) {
  std::string out;
  bool pending_space = false;
  for (char c : phrase) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

ObjectVocabulary::ObjectVocabulary(const std::vector<std::string>& objects,
                                   const std::map<std::string, std::string>& synonyms) {
  for (const auto& o : objects) {
    auto name = clean_phrase(o);
    if (name.empty()) throw Error("empty object name in vocabulary");
    max_words_ = std::max(max_words_, word_count(name));
    objects_.insert(std::move(name));
  }
  for (const auto& [alias, target] : synonyms) {
    auto a = clean_phrase(alias);
    auto t = clean_phrase(target);
    if (!objects_.count(t))
      throw Error("synonym '" + a + "' maps to '" + t + "', which is not a vocabulary object");
    max_words_ = std::max(max_words_, word_count(a));
    synonyms_[a] = t;
  }
}

ObjectVocabulary ObjectVocabulary::from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ParseError("vocabulary must be a JSON object");
  std::map<std::string, std::string> synonyms;
  if (doc.contains("synonyms")) {
    const auto& s = doc.at("synonyms");
    if (!s.is_object()) throw ParseError("\"synonyms\" must be an object");
    for (const auto& [alias, target] : s.items()) {
      if (!target.is_string()) throw ParseError("synonym targets must be strings");
      synonyms[alias] = target.get<std::string>();
    }
  }
  return ObjectVocabulary(string_list(doc, "objects"), synonyms);
}

ObjectVocabulary ObjectVocabulary::load(const std::filesystem::path& path) {
  return from_json(read_json_file(path));
}

ObjectVocabulary ObjectVocabulary::coco() {
  static const std::vector<std::string> objects = {
      "person",        "bicycle",      "car",          "motorcycle",    "airplane",
      "bus",           "train",        "truck",        "boat",          "traffic light",
      "fire hydrant",  "stop sign",    "parking meter", "bench",        "bird",
      "cat",           "dog",          "horse",        "sheep",         "cow",
      "elephant",      "bear",         "zebra",        "giraffe",       "backpack",
      "umbrella",      "handbag",      "tie",          "suitcase",      "frisbee",
      "skis",          "snowboard",    "sports ball",  "kite",          "baseball bat",
      "baseball glove", "skateboard",  "surfboard",    "tennis racket", "bottle",
      "wine glass",    "cup",          "fork",         "knife",         "spoon",
      "bowl",          "banana",       "apple",        "sandwich",      "orange",
      "broccoli",      "carrot",       "hot dog",      "pizza",         "donut",
      "cake",          "chair",        "couch",        "potted plant",  "bed",
      "dining table",  "toilet",       "tv",           "laptop",        "mouse",
      "remote",        "keyboard",     "cell phone",   "microwave",     "oven",
      "toaster",       "sink",         "refrigerator", "book",          "clock",
      "vase",          "scissors",     "teddy bear",   "hair drier",    "toothbrush",
  };
  static const std::map<std::string, std::string> synonyms = {
      {"bike", "bicycle"},        {"motorbike", "motorcycle"}, {"plane", "airplane"},
      {"aeroplane", "airplane"},  {"man", "person"},           {"men", "person"},
      {"woman", "person"},        {"women", "person"},         {"people", "person"},
      {"child", "person"},        {"children", "person"},      {"boy", "person"},
      {"girl", "person"},         {"kid", "person"},           {"sofa", "couch"},
      {"table", "dining table"},  {"television", "tv"},        {"phone", "cell phone"},
      {"cellphone", "cell phone"}, {"doughnut", "donut"},      {"fridge", "refrigerator"},
      {"ball", "sports ball"},    {"hydrant", "fire hydrant"}, {"racket", "tennis racket"},
      {"puppy", "dog"},           {"kitten", "cat"},           {"hair dryer", "hair drier"},
      {"ski", "skis"},            {"teddy", "teddy bear"},     {"automobile", "car"},
  };
  return ObjectVocabulary(objects, synonyms);
}

std::optional<std::string> ObjectVocabulary::lookup_exact(const std::string& phrase) const {
  if (objects_.count(phrase)) return phrase;
  if (auto it = synonyms_.find(phrase); it != synonyms_.end()) return it->second;
  return std::nullopt;
}

std::optional<std::string> ObjectVocabulary::canonical(std::string_view phrase) const {
  const std::string p = clean_phrase(phrase);
  if (p.empty()) return std::nullopt;
  if (auto hit = lookup_exact(p)) return hit;
  const auto last_space = p.rfind(' ');
  const std::string head = last_space == std::string::npos ? "" : p.substr(0, last_space + 1);
  const std::string last = last_space == std::string::npos ? p : p.substr(last_space + 1);
  for (const auto& s : singular_forms(last))
    if (auto hit = lookup_exact(head + s)) return hit;
  return std::nullopt;
}

std::string ObjectVocabulary::normalize(std::string_view phrase) const {
  if (auto c = canonical(phrase)) return *c;
  return clean_phrase(phrase);
}

std::vector<Mention> ObjectVocabulary::find_mentions(const Tokens& tokens) const {
  std::vector<Mention> out;
  std::size_t i = 0;
  while (i < tokens.size()) {
    std::size_t clause_end = i;
    while (clause_end < tokens.size() && tokens.clause[clause_end] == tokens.clause[i]) ++clause_end;
    bool matched = false;
    for (std::size_t n = std::min(max_words_, clause_end - i); n >= 1; --n) {
      if (auto c = canonical(join(tokens.words, i, i + n))) {
        out.push_back({*c, i, i + n});
        i += n;
        matched = true;
        break;
      }
    }
    if (!matched) ++i;
  }
  return out;
}

std::vector<Mention> ObjectVocabulary::find_target(const Tokens& tokens,
                                                   std::string_view target) const {
  const std::string name = normalize(target);
  std::vector<Mention> out;
  if (contains(name)) {
    for (auto& m : find_mentions(tokens))
      if (m.object == name) out.push_back(std::move(m));
    return out;
  }
  const auto want = tokenize(name).words;
  if (want.empty()) return out;
  const std::size_t n = want.size();
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    if (tokens.clause[i] != tokens.clause[i + n - 1]) continue;
    bool same = true;
    for (std::size_t k = 0; k + 1 < n && same; ++k) same = tokens.words[i + k] == want[k];
    if (!same) continue;
    const auto& last = tokens.words[i + n - 1];
    bool last_ok = last == want.back();
    for (const auto& s : singular_forms(last)) last_ok = last_ok || s == want.back();
    if (last_ok) out.push_back({name, i, i + n});
  }
  return out;
}

DescriptorLexicon DescriptorLexicon::from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ParseError("descriptor lexicon must be a JSON object");
  return {string_list(doc, "colors"), string_list(doc, "sizes"), string_list(doc, "spatial")};
}

DescriptorLexicon DescriptorLexicon::load(const std::filesystem::path& path) {
  return from_json(read_json_file(path));
}

DescriptorLexicon DescriptorLexicon::standard() {
  return {
      {"red", "orange", "yellow", "green", "blue", "purple", "pink", "brown", "black", "white",
       "gray", "grey", "silver", "gold"},
      {"large", "big", "small", "little", "tiny", "huge", "tall", "short", "long"},
      {"left", "right", "top", "bottom", "front", "behind", "near", "center", "middle",
       "background", "foreground", "above", "below"},
  };
}

std::optional<std::size_t> DescriptorLexicon::rank(std::string_view word) const {
  std::size_t base = 0;
  for (const auto* list : {&colors, &sizes, &spatial}) {
    auto it = std::find(list->begin(), list->end(), word);
    if (it != list->end()) return base + static_cast<std::size_t>(it - list->begin());
    base += list->size();
  }
  return std::nullopt;
}

}  // namespace hydra
