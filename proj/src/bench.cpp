#include "hydra/bench.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "hydra/reasoner.hpp"

namespace hydra {

namespace {

using nlohmann::json;

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <typename Fn>
auto with_path(const std::filesystem::path& path, Fn&& fn) {
  try {
    return fn(slurp(path));
  } catch (const ParseError& e) {
    throw e.in(path.string());
  }
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (end == text.size()) break;
    start = end + 1;
  }
  return lines;
}

bool blank(std::string_view s) {
  return s.find_first_not_of(" \t") == std::string_view::npos;
}

// Numeric ids are zero-padded so item ids sort in numeric order.
std::string id_string(const json& v) {
  if (v.is_number_unsigned() || v.is_number_integer()) {
    std::string s = std::to_string(v.get<std::int64_t>());
    if (s.size() < 6 && s.front() != '-') s.insert(0, 6 - s.size(), '0');
    return s;
  }
  if (v.is_string()) return v.get<std::string>();
  throw ParseError("id must be a string or integer");
}

}  // namespace

std::string_view to_string(PopeSubset s) {
  switch (s) {
    case PopeSubset::Random:
      return "random";
    case PopeSubset::Popular:
      return "popular";
    case PopeSubset::Adversarial:
      return "adversarial";
  }
  return "?";
}

PopeSubset pope_subset_from_string(std::string_view s) {
  if (s == "random") return PopeSubset::Random;
  if (s == "popular") return PopeSubset::Popular;
  if (s == "adversarial") return PopeSubset::Adversarial;
  throw Error("unknown POPE subset '" + std::string(s) + "'");
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % bound;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % bound;
}

std::vector<BenchmarkItem> parse_pope(std::string_view text, PopeSubset subset) {
  std::vector<BenchmarkItem> items;
  std::set<std::string> seen;
  const auto lines = split_lines(text);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const auto line = lines[n];
    if (blank(line)) continue;
    const std::size_t lineno = n + 1;
    json doc = json::parse(line, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw ParseError("malformed JSON", lineno);
    for (const char* key : {"question_id", "image", "text", "label"})
      if (!doc.contains(key)) throw ParseError(std::string("missing field \"") + key + "\"", lineno);
    if (!doc["image"].is_string() || !doc["text"].is_string() || !doc["label"].is_string())
      throw ParseError("image, text and label must be strings", lineno);

    BenchmarkItem item;
    try {
      item.item_id = "pope-" + std::string(to_string(subset)) + "-" + id_string(doc["question_id"]);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), lineno);
    }
    if (!seen.insert(item.item_id).second)
      throw ParseError("duplicate question_id in " + item.item_id, lineno);
    item.image.id = doc["image"].get<std::string>();
    item.query = doc["text"].get<std::string>();
    item.task = TaskKind::Vqa;
    const auto label = doc["label"].get<std::string>();
    if (label == "yes") item.ground_truth = Answer::Yes;
    else if (label == "no") item.ground_truth = Answer::No;
    else throw ParseError("label must be \"yes\" or \"no\", got \"" + label + "\"", lineno);
    try {
      extract_target_object(item.query);
    } catch (const Error&) {
      throw ParseError("item " + item.item_id + ": no target object in \"" + item.query + "\"",
                       lineno);
    }
    items.push_back(std::move(item));
  }
  return items;
}

std::vector<BenchmarkItem> load_pope(const std::filesystem::path& path, PopeSubset subset) {
  return with_path(path, [&](const std::string& text) { return parse_pope(text, subset); });
}

std::vector<BenchmarkItem> sample_pope(const std::vector<BenchmarkItem>& items,
                                       std::size_t images, std::size_t per_image,
                                       std::uint64_t seed) {
  if (per_image == 0 || per_image % 2 != 0)
    throw Error("per_image must be a positive even number, got " + std::to_string(per_image));
  // image id -> indices, in first-appearance order
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::size_t>> by_image;
  for (std::size_t i = 0; i < items.size(); ++i) {
    auto [it, fresh] = by_image.try_emplace(items[i].image.id);
    if (fresh) order.push_back(items[i].image.id);
    it->second.push_back(i);
  }
  seeded_shuffle(order, seed);

  const std::size_t half = per_image / 2;
  std::vector<BenchmarkItem> out;
  std::size_t taken = 0;
  for (const auto& image : order) {
    if (taken == images) break;
    std::vector<std::size_t> yes, no;
    for (std::size_t i : by_image[image]) {
      const auto* a = std::get_if<Answer>(&items[i].ground_truth);
      if (!a) continue;
      (*a == Answer::Yes ? yes : no).push_back(i);
    }
    if (yes.size() < half || no.size() < half) continue;
    std::vector<std::size_t> chosen(yes.begin(), yes.begin() + static_cast<long>(half));
    chosen.insert(chosen.end(), no.begin(), no.begin() + static_cast<long>(half));
    std::sort(chosen.begin(), chosen.end());
    for (std::size_t i : chosen) out.push_back(items[i]);
    ++taken;
  }
  if (taken < images)
    throw Error("insufficient eligible images: need " + std::to_string(images) + " with " +
                std::to_string(half) + " yes and " + std::to_string(half) +
                " no questions each, found " + std::to_string(taken));
  return out;
}

std::vector<MmePair> parse_mme_existence(std::string_view text) {
  struct Pending {
    std::vector<BenchmarkItem> items;
    std::size_t first_line = 0;
  };
  std::vector<std::string> order;
  std::map<std::string, Pending> groups;
  const auto lines = split_lines(text);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const auto line = lines[n];
    if (blank(line)) continue;
    const std::size_t lineno = n + 1;
    std::vector<std::string> cols;
    std::size_t start = 0;
    while (true) {
      const auto tab = line.find('\t', start);
      cols.emplace_back(line.substr(start, tab == std::string_view::npos ? line.npos : tab - start));
      if (tab == std::string_view::npos) break;
      start = tab + 1;
    }
    if (cols.size() != 3) throw ParseError("expected 3 tab-separated columns", lineno);
    BenchmarkItem item;
    item.image.id = cols[0];
    item.query = cols[1];
    item.task = TaskKind::Vqa;
    if (cols[2] == "Yes") item.ground_truth = Answer::Yes;
    else if (cols[2] == "No") item.ground_truth = Answer::No;
    else throw ParseError("answer must be Yes or No, got \"" + cols[2] + "\"", lineno);
    try {
      extract_target_object(item.query);
    } catch (const Error&) {
      throw ParseError("no target object in \"" + item.query + "\"", lineno);
    }
    auto [it, fresh] = groups.try_emplace(cols[0]);
    if (fresh) {
      order.push_back(cols[0]);
      it->second.first_line = lineno;
    }
    item.item_id = "mme-" + cols[0] + "-q" + std::to_string(it->second.items.size() + 1);
    it->second.items.push_back(std::move(item));
  }
  std::vector<MmePair> out;
  for (const auto& id : order) {
    auto& g = groups[id];
    if (g.items.size() != 2)
      throw ParseError("image " + id + " has " + std::to_string(g.items.size()) +
                           " questions, expected 2",
                       g.first_line);
    out.push_back({std::move(g.items[0]), std::move(g.items[1])});
  }
  return out;
}

std::vector<MmePair> load_mme_existence(const std::filesystem::path& path) {
  return with_path(path, [](const std::string& text) { return parse_mme_existence(text); });
}

std::vector<BenchmarkItem> parse_amber_generative(std::string_view text,
                                                  const ObjectVocabulary& vocab,
                                                  std::optional<std::size_t> sample,
                                                  std::uint64_t seed) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_array())
    throw ParseError("AMBER annotations must be a JSON list");

  std::vector<BenchmarkItem> pool;
  std::set<std::string> offenders;
  for (const auto& entry : doc) {
    if (!entry.is_object() || !entry.contains("id") || !entry.contains("image"))
      throw ParseError("each AMBER entry needs \"id\" and \"image\"");
    BenchmarkItem item;
    item.item_id = "amber-" + id_string(entry["id"]);
    if (!entry["image"].is_string()) throw ParseError(item.item_id + ": image must be a string");
    item.image.id = entry["image"].get<std::string>();
    item.query = std::string(kDescribePrompt);
    item.task = TaskKind::Captioning;
    AnnotationSet ann;
    auto collect = [&](const char* key, ObjectSet& into) {
      if (!entry.contains(key)) return;
      if (!entry[key].is_array()) throw ParseError(item.item_id + ": \"" + key + "\" must be a list");
      for (const auto& o : entry[key]) {
        if (!o.is_string()) throw ParseError(item.item_id + ": object names must be strings");
        if (auto c = vocab.canonical(o.get<std::string>())) into.insert(*c);
        else offenders.insert(o.get<std::string>());
      }
    };
    collect("truth", ann.truth);
    collect("hallu", ann.hallucination_lexicon);
    item.ground_truth = std::move(ann);
    pool.push_back(std::move(item));
  }
  if (!offenders.empty()) {
    std::string list;
    for (const auto& o : offenders) list += (list.empty() ? "" : ", ") + o;
    throw Error("objects outside the vocabulary: " + list);
  }

  if (!sample) return pool;
  if (*sample > pool.size())
    throw Error("sample of " + std::to_string(*sample) + " exceeds the " +
                std::to_string(pool.size()) + " available entries");
  std::vector<std::size_t> idx(pool.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  seeded_shuffle(idx, seed);
  idx.resize(*sample);
  std::sort(idx.begin(), idx.end());
  std::vector<BenchmarkItem> out;
  for (std::size_t i : idx) out.push_back(std::move(pool[i]));
  return out;
}

std::vector<BenchmarkItem> load_amber_generative(const std::filesystem::path& path,
                                                 const ObjectVocabulary& vocab,
                                                 std::optional<std::size_t> sample,
                                                 std::uint64_t seed) {
  return with_path(path, [&](const std::string& text) {
    return parse_amber_generative(text, vocab, sample, seed);
  });
}

std::map<std::string, ManifestEntry> load_manifest(const std::filesystem::path& path) {
  const std::string text = slurp(path);
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("images") ||
      !doc["images"].is_object())
    throw ParseError(path.string() + ": manifest must be {\"images\": {id: path}}");
  const auto base = path.parent_path();
  auto resolve = [&](const std::string& p) {
    std::filesystem::path fp(p);
    return fp.is_relative() ? base / fp : fp;
  };
  std::map<std::string, ManifestEntry> out;
  for (const auto& [id, v] : doc["images"].items()) {
    ManifestEntry e;
    if (v.is_string()) {
      e.path = resolve(v.get<std::string>());
    } else if (v.is_object() && v.contains("path") && v["path"].is_string()) {
      e.path = resolve(v["path"].get<std::string>());
      if (v.contains("origin")) e.origin = origin_from_string(v["origin"].get<std::string>());
      if (v.contains("clean")) e.clean_path = resolve(v["clean"].get<std::string>());
      if (v.contains("epsilon")) e.epsilon = v["epsilon"].get<std::string>();
    } else {
      throw ParseError(path.string() + ": bad manifest entry for '" + id + "'");
    }
    out.emplace(id, std::move(e));
  }
  return out;
}

}  // namespace hydra
