#include "hydra/reasoner.hpp"

#include <algorithm>
#include <map>
#include <regex>
#include <stdexcept>

namespace hydra {

namespace {

bool is_negation(const std::string& w) {
  static const std::set<std::string> words = {
      "no",     "not",     "without", "never",    "none",  "nothing", "neither",
      "nor",    "cannot",  "lacks",   "lacking",  "absent", "nobody",
  };
  return words.count(w) > 0 || w.ends_with("n't");
}

bool is_yes_word(const std::string& w) {
  return w == "yes" || w == "yeah" || w == "yep" || w == "yup" || w == "affirmative";
}

bool is_no_word(const std::string& w) { return w == "no" || w == "nope" || w == "negative"; }

// The negation word governing a mention, if any.
std::optional<std::string> negated_by(const Tokens& tokens, const Mention& m) {
  for (std::size_t k = 1; k <= kNegationWindow && k <= m.begin; ++k) {
    const std::size_t j = m.begin - k;
    if (tokens.clause[j] != tokens.clause[m.begin]) break;
    if (is_negation(tokens.words[j])) return tokens.words[j];
  }
  return std::nullopt;
}

bool is_question(std::string_view prompt) {
  while (!prompt.empty() && std::isspace(static_cast<unsigned char>(prompt.back())))
    prompt.remove_suffix(1);
  return !prompt.empty() && prompt.back() == '?';
}

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

struct Judgment {
  Decision decision;
  std::string rationale;
};

// Shared rule for free-text answers. A mention with no negation nearby wins;
// otherwise a negated mention means No; otherwise the yes/no keywords decide.
// `description` responses (captions) that never name the target count as No.
Judgment judge_text(std::string_view target, std::string_view text, bool description,
                    const ObjectVocabulary& vocab) {
  const std::string name = vocab.normalize(target);
  if (blank(text)) return {Decision::Uncertain, "empty response"};
  const Tokens tokens = tokenize(text);
  const auto mentions = vocab.find_target(tokens, name);
  std::optional<std::string> negation;
  for (const auto& m : mentions) {
    auto neg = negated_by(tokens, m);
    if (!neg) return {Decision::Yes, "response mentions '" + name + "'"};
    if (!negation) negation = neg;
  }
  if (negation) return {Decision::No, "response negates '" + name + "' ('" + *negation + "')"};
  const Decision binary = parse_binary_answer(text);
  if (binary != Decision::Uncertain)
    return {binary, "answer parsed as '" + std::string(to_string(binary)) + "'"};
  if (description) return {Decision::No, "caption does not mention '" + name + "'"};
  return {Decision::Uncertain, "no mention of '" + name + "' and no yes/no answer"};
}

}  // namespace

std::string presence_question(std::string_view object) {
  return "Is there a " + std::string(object) + " in the image?";
}

std::string extract_target_object(std::string_view question) {
  static const std::regex pattern(
      R"(^\s*is\s+there\s+(?:(?:a|an)\s+)?(.+?)\s+in\s+(?:the|this)\s+(?:image|picture|photo)\b[\s\S]*$)",
      std::regex::icase | std::regex::ECMAScript);
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_match(question.begin(), question.end(), m, pattern))
    throw Error("not a presence question: '" + std::string(question) + "'");
  std::string phrase = clean_phrase(m[1].str());
  while (!phrase.empty() && std::ispunct(static_cast<unsigned char>(phrase.back())))
    phrase.pop_back();
  if (phrase.empty()) throw Error("not a presence question: '" + std::string(question) + "'");
  return phrase;
}

Decision parse_binary_answer(std::string_view text) {
  const Tokens tokens = tokenize(text);
  if (tokens.words.empty()) return Decision::Uncertain;
  const auto& lead = tokens.words.front();
  if (is_yes_word(lead)) return Decision::Yes;
  if (is_no_word(lead)) return Decision::No;
  for (const auto& w : tokens.words) {
    if (is_yes_word(w)) return Decision::Yes;
    if (is_no_word(w)) return Decision::No;
  }
  return Decision::Uncertain;
}

Critique critique_existence(std::string_view target, const ModelResponse& response,
                            const ObjectVocabulary& vocab) {
  Critique c;
  c.source = response.role;
  c.target = vocab.normalize(target);
  c.iteration = response.iteration;
  if (response.failed) {
    c.decision = Decision::Uncertain;
    c.rationale = "backend failure" + (response.error.empty() ? "" : ": " + response.error);
    return c;
  }
  if (response.role == ModelRole::ObjectDetector) {
    const Tokens tokens = tokenize(response.text);
    if (!vocab.find_target(tokens, c.target).empty()) {
      c.decision = Decision::Yes;
      c.rationale = "detector listed '" + c.target + "'";
    } else {
      c.decision = Decision::No;
      c.rationale = "detector did not list '" + c.target + "'";
    }
    return c;
  }
  auto j = judge_text(c.target, response.text, !is_question(response.prompt), vocab);
  c.decision = j.decision;
  c.rationale = std::move(j.rationale);
  return c;
}

std::vector<AttributeHint> extract_attributes(std::span<const std::string> texts,
                                              std::string_view target,
                                              const DescriptorLexicon& lexicon,
                                              const ObjectVocabulary& vocab, std::size_t cap,
                                              std::span<const std::string> exclude) {
  // rank -> hint; one map for descriptors next to the target, one for the rest
  std::map<std::size_t, AttributeHint> near_target;
  std::map<std::size_t, AttributeHint> elsewhere;
  const std::string name = vocab.normalize(target);

  for (const auto& text : texts) {
    const Tokens tokens = tokenize(text);
    std::vector<bool> adjacent(tokens.size(), false);
    for (const auto& m : vocab.find_target(tokens, name)) {
      for (std::size_t k = 1; k <= kNegationWindow && k <= m.begin; ++k) {
        const std::size_t j = m.begin - k;
        if (tokens.clause[j] != tokens.clause[m.begin]) break;
        adjacent[j] = true;
      }
    }
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      const auto rank = lexicon.rank(tokens.words[i]);
      if (!rank) continue;
      const std::size_t lo = i >= 2 ? i - 2 : 0;
      const std::size_t hi = std::min(tokens.size(), i + 3);
      std::string phrase;
      for (std::size_t k = lo; k < hi; ++k) {
        if (tokens.clause[k] != tokens.clause[i]) continue;
        if (!phrase.empty()) phrase += ' ';
        phrase += tokens.words[k];
      }
      auto& bucket = adjacent[i] ? near_target : elsewhere;
      bucket.try_emplace(*rank, AttributeHint{tokens.words[i], phrase});
    }
  }

  std::vector<AttributeHint> out;
  auto take = [&](const std::map<std::size_t, AttributeHint>& bucket) {
    for (const auto& [_, hint] : bucket) {
      if (out.size() >= cap) return;
      if (std::find(exclude.begin(), exclude.end(), hint.attribute) != exclude.end()) continue;
      const bool seen = std::any_of(out.begin(), out.end(), [&](const AttributeHint& h) {
        return h.attribute == hint.attribute;
      });
      if (!seen) out.push_back(hint);
    }
  };
  take(near_target);
  take(elsewhere);
  return out;
}

std::string formulate_attribute_question(const AttributeHint& hint) {
  if (clean_phrase(hint.attribute).empty())
    throw std::invalid_argument("attribute hint must name an attribute");
  return "What objects are " + hint.attribute + " in the image?";
}

ObjectSet extract_objects(std::string_view caption, const ObjectVocabulary& vocab) {
  ObjectSet out;
  const Tokens tokens = tokenize(caption);
  for (const auto& m : vocab.find_mentions(tokens))
    if (!negated_by(tokens, m)) out.insert(m.object);
  return out;
}

std::string summary_text(const ObjectSet& objects) {
  if (objects.empty()) return "The image contains no recognized objects.";
  std::string out = "The image contains: ";
  bool first = true;
  for (const auto& o : objects) {
    if (!first) out += ", ";
    out += o;
    first = false;
  }
  return out + ".";
}

CaptionSummary summarize_captions(std::span<const std::string> captions,
                                  const ObjectVocabulary& vocab) {
  if (captions.size() < 2)
    throw Error("summarize_captions needs at least 2 captions, got " +
                std::to_string(captions.size()));
  CaptionSummary s;
  std::map<std::string, std::size_t> counts;
  for (const auto& c : captions) {
    s.caption_objects.push_back(extract_objects(c, vocab));
    for (const auto& o : s.caption_objects.back()) ++counts[o];
  }
  for (const auto& [object, n] : counts)
    if (2 * n > captions.size()) s.objects.insert(object);
  s.text = summary_text(s.objects);

  for (std::size_t i = 0; i < captions.size(); ++i) {
    ObjectSet others;
    for (std::size_t k = 0; k < captions.size(); ++k)
      if (k != i) others.insert(s.caption_objects[k].begin(), s.caption_objects[k].end());
    const auto& mine = s.caption_objects[i];
    std::size_t inter = 0;
    for (const auto& o : mine) inter += others.count(o);
    const std::size_t uni = mine.size() + others.size() - inter;
    const double j = uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
    s.jaccard.push_back(j);
    s.compromised.push_back(j < kCompromisedJaccard);
  }
  return s;
}

Decision judge_object_in_answer(std::string_view object, std::string_view answer,
                                const ObjectVocabulary& vocab) {
  return judge_text(object, answer, false, vocab).decision;
}

}  // namespace hydra
