#include "hydra/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <map>

#include "hydra/parallel.hpp"

namespace hydra {

using nlohmann::json;

namespace {

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string ratio_string(const Ratio& r) {
  return std::to_string(r.num()) + "/" + std::to_string(r.den());
}

json object_list(const ObjectSet& s) { return json(std::vector<std::string>(s.begin(), s.end())); }

ObjectSet object_set(const json& j) {
  ObjectSet out;
  for (const auto& v : j) out.insert(v.get<std::string>());
  return out;
}

TaskKind task_for(BenchKind b) { return b == BenchKind::Amber ? TaskKind::Captioning : TaskKind::Vqa; }

int get_int(const json& obj, const char* key, int fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_integer()) throw ParseError(std::string("\"") + key + "\" must be an integer");
  return obj[key].get<int>();
}

json config_echo(const RunOptions& o, const SuiteConfig& sc, const RunConfig& cfg) {
  json backends = json::array();
  for (const auto& d : sc.backends)
    backends.push_back({{"role", to_string(d.role)},
                        {"endpoint", d.endpoint},
                        {"model_id", d.model_id},
                        {"timeout_ms", d.timeout_ms},
                        {"max_retries", d.max_retries}});
  return {
      {"task", to_string(o.task)},
      {"bench", to_string(o.bench)},
      {"subset", o.bench == BenchKind::Pope ? json(to_string(o.subset)) : json(nullptr)},
      {"defense", to_string(o.defense)},
      {"seed", o.seed},
      {"sample", o.sample ? json(*o.sample) : json(nullptr)},
      {"max_iterations", cfg.max_iterations},
      {"vote_threshold", cfg.vote_threshold},
      {"tie_policy", to_string(cfg.tie_policy)},
      {"attribute_cap", cfg.attribute_cap},
      {"backends", backends},
  };
}

std::vector<BenchmarkItem> load_items(const RunOptions& o, const ObjectVocabulary& vocab) {
  switch (o.bench) {
    case BenchKind::Pope: {
      auto items = load_pope(o.data / ("pope_" + std::string(to_string(o.subset)) + ".jsonl"),
                             o.subset);
      if (o.sample) items = sample_pope(items, *o.sample, 6, o.seed);
      return items;
    }
    case BenchKind::Mme: {
      auto pairs = load_mme_existence(o.data / "mme_existence.tsv");
      if (o.sample) {
        if (*o.sample > pairs.size())
          throw Error("sample of " + std::to_string(*o.sample) + " exceeds the " +
                      std::to_string(pairs.size()) + " MME images");
        std::vector<std::size_t> idx(pairs.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        seeded_shuffle(idx, o.seed);
        idx.resize(*o.sample);
        std::sort(idx.begin(), idx.end());
        std::vector<MmePair> kept;
        for (std::size_t i : idx) kept.push_back(std::move(pairs[i]));
        pairs = std::move(kept);
      }
      std::vector<BenchmarkItem> items;
      for (auto& p : pairs) {
        items.push_back(std::move(p.first));
        items.push_back(std::move(p.second));
      }
      return items;
    }
    case BenchKind::Amber:
      return load_amber_generative(o.data / "amber_generative.json", vocab, o.sample, o.seed);
  }
  return {};
}

void attach_images(std::vector<BenchmarkItem>& items, const std::filesystem::path& manifest_path,
                   DefenseKind defense) {
  const auto manifest = load_manifest(manifest_path);
  struct Prepared {
    std::shared_ptr<const ImagePayload> payload;
    ImageOrigin origin;
  };
  std::map<std::string, Prepared> cache;
  for (auto& item : items) {
    auto it = cache.find(item.image.id);
    if (it == cache.end()) {
      auto m = manifest.find(item.image.id);
      if (m == manifest.end()) throw Error("image '" + item.image.id + "' is not in the manifest");
      const auto& entry = m->second;
      auto bytes = read_file(entry.path);
      ImageBuffer image;
      try {
        image = decode_image(bytes);
      } catch (const Error& e) {
        throw Error(entry.path.string() + ": " + e.what());
      }
      ImageOrigin origin = entry.origin;
      if (origin == ImageOrigin::Adversarial && entry.clean_path) {
        if (!entry.epsilon)
          throw Error("adversarial image '" + item.image.id + "' names a clean source but no epsilon");
        const Epsilon eps = parse_epsilon(*entry.epsilon);
        const auto check = verify_budget(read_image(*entry.clean_path), image, eps);
        if (!check.pass)
          throw Error("adversarial image '" + item.image.id + "' exceeds its budget: max delta " +
                      std::to_string(check.max_delta) + "/255 > " + *entry.epsilon);
      }
      if (defense != DefenseKind::None) {
        bytes = encode_png(apply_defense(image, defense));
        origin = ImageOrigin::Defended;
      }
      it = cache.emplace(item.image.id,
                         Prepared{std::make_shared<const ImagePayload>(std::move(bytes)), origin})
               .first;
    }
    item.image.payload = it->second.payload;
    item.image.origin = it->second.origin;
  }
}

json latency_summary(const std::vector<ItemRecord>& records) {
  std::uint64_t total = 0;
  std::uint64_t max_item = 0;
  for (const auto& r : records) {
    total += r.latency_ms;
    max_item = std::max(max_item, r.latency_ms);
  }
  const double mean =
      records.empty() ? 0.0 : Ratio(static_cast<std::int64_t>(total),
                                    static_cast<std::int64_t>(records.size()))
                                      .percent() / 100.0;
  return {{"total_ms", total}, {"max_item_ms", max_item}, {"mean_item_ms", mean}};
}

}  // namespace

std::string_view to_string(BenchKind b) {
  switch (b) {
    case BenchKind::Pope:
      return "pope";
    case BenchKind::Mme:
      return "mme";
    case BenchKind::Amber:
      return "amber";
  }
  return "?";
}

BenchKind bench_from_string(std::string_view s) {
  if (s == "pope") return BenchKind::Pope;
  if (s == "mme") return BenchKind::Mme;
  if (s == "amber") return BenchKind::Amber;
  throw Error("unknown benchmark '" + std::string(s) + "'");
}

SuiteConfig parse_suite_config(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ParseError("suite config must be a JSON object");
  SuiteConfig sc;
  sc.base_dir = base_dir;
  if (doc.contains("run")) {
    const auto& r = doc["run"];
    if (!r.is_object()) throw ParseError("\"run\" must be an object");
    auto& c = sc.run;
    c.max_iterations = get_int(r, "max_iterations", c.max_iterations);
    c.vote_threshold = get_int(r, "vote_threshold", c.vote_threshold);
    c.max_in_flight = get_int(r, "max_in_flight", c.max_in_flight);
    c.attribute_cap = get_int(r, "attribute_cap", c.attribute_cap);
    c.default_timeout_ms = get_int(r, "timeout_ms", c.default_timeout_ms);
    c.default_max_retries = get_int(r, "max_retries", c.default_max_retries);
    if (r.contains("tie_policy")) c.tie_policy = tie_policy_from_string(r["tie_policy"].get<std::string>());
  }
  if (!doc.contains("backends") || !doc["backends"].is_array())
    throw ParseError("suite config needs a \"backends\" list");
  for (const auto& b : doc["backends"]) {
    if (!b.is_object() || !b.contains("role") || !b.contains("endpoint") || !b.contains("model_id"))
      throw ParseError("each backend needs \"role\", \"endpoint\" and \"model_id\"");
    BackendDescriptor d;
    d.role = role_from_string(b["role"].get<std::string>());
    d.endpoint = b["endpoint"].get<std::string>();
    d.model_id = b["model_id"].get<std::string>();
    d.timeout_ms = get_int(b, "timeout_ms", sc.run.default_timeout_ms);
    d.max_retries = get_int(b, "max_retries", sc.run.default_max_retries);
    validate_descriptor(d);
    sc.backends.push_back(std::move(d));
  }
  auto resolve = [&](const char* key) -> std::optional<std::filesystem::path> {
    if (!doc.contains(key)) return std::nullopt;
    std::filesystem::path p = doc[key].get<std::string>();
    return p.is_relative() ? base_dir / p : p;
  };
  sc.vocabulary = resolve("vocabulary");
  sc.lexicon = resolve("lexicon");
  return sc;
}

SuiteConfig load_suite_config(const std::filesystem::path& path) {
  const json doc = read_json(path);
  try {
    return parse_suite_config(doc, path.parent_path());
  } catch (const ParseError& e) {
    throw e.in(path.string());
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

SuiteRegistry build_registry(const SuiteConfig& config) {
  SuiteRegistry registry;
  for (const auto& d : config.backends) registry.add(d, nullptr, config.base_dir);
  return registry;
}

json trace_to_json(const AgentMemory& memory) {
  json out = json::array();
  for (const auto& rec : memory.records()) {
    json e = {{"ordinal", rec.ordinal}};
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          e["iteration"] = v.iteration;
          if constexpr (std::is_same_v<T, ModelResponse>) {
            e["kind"] = "response";
            e["role"] = to_string(v.role);
            e["model_id"] = v.model_id;
            e["prompt"] = v.prompt;
            e["text"] = v.text;
            e["latency_ms"] = v.latency_ms;
            e["attempts"] = v.attempts;
            e["failed"] = v.failed;
            if (v.failed) e["error"] = v.error;
          } else if constexpr (std::is_same_v<T, Critique>) {
            e["kind"] = "critique";
            e["source"] = to_string(v.source);
            e["target"] = v.target;
            e["objects"] = object_list(v.objects);
            e["decision"] = to_string(v.decision);
            e["rationale"] = v.rationale;
          } else {
            e["kind"] = "decision";
            e["decision"] = to_string(v.kind);
            e["reason"] = v.reason;
          }
        },
        rec.entry);
    out.push_back(std::move(e));
  }
  return out;
}

ItemRecord make_record(const BenchmarkItem& item, const FinalAnswer& answer) {
  ItemRecord r;
  r.item_id = item.item_id;
  r.image_id = item.image.id;
  r.query = item.query;
  r.task = item.task;
  r.prediction = answer.answer;
  r.ground_truth = item.ground_truth;
  r.iterations_used = answer.iterations_used;
  r.query_count = answer.query_count();
  r.degraded = answer.degraded;
  for (const auto& resp : answer.trace.responses()) r.latency_ms += resp.latency_ms;
  r.trace = trace_to_json(answer.trace);
  return r;
}

MetricBlock compute_metrics(BenchKind bench, const std::vector<ItemRecord>& records) {
  if (records.empty()) throw Error("no items");
  auto answer_of = [](const auto& v, const std::string& id, const char* what) {
    if (const auto* a = std::get_if<Answer>(&v)) return *a;
    throw Error("record " + id + " has no yes/no " + what);
  };
  switch (bench) {
    case BenchKind::Pope: {
      std::vector<Answer> preds, labels;
      for (const auto& r : records) {
        preds.push_back(answer_of(r.prediction, r.item_id, "prediction"));
        labels.push_back(answer_of(r.ground_truth, r.item_id, "label"));
      }
      return pope_scores(preds, labels);
    }
    case BenchKind::Mme: {
      std::map<std::string, std::vector<const ItemRecord*>> by_image;
      for (const auto& r : records) by_image[r.image_id].push_back(&r);
      std::vector<MmeImage> images;
      for (auto& [image, rs] : by_image) {
        if (rs.size() != 2)
          throw Error("unpaired MME image " + image + ": " + std::to_string(rs.size()) +
                      " records");
        std::sort(rs.begin(), rs.end(),
                  [](const ItemRecord* a, const ItemRecord* b) { return a->item_id < b->item_id; });
        auto q = [&](const ItemRecord* r) {
          return std::pair{answer_of(r->prediction, r->item_id, "prediction"),
                           answer_of(r->ground_truth, r->item_id, "label")};
        };
        images.emplace_back(q(rs[0]), q(rs[1]));
      }
      return mme_scores(images);
    }
    case BenchKind::Amber: {
      std::vector<ObjectSet> mentioned;
      std::vector<AnnotationSet> annotations;
      for (const auto& r : records) {
        const auto* p = std::get_if<CaptionResult>(&r.prediction);
        const auto* a = std::get_if<AnnotationSet>(&r.ground_truth);
        if (!p || !a) throw Error("record " + r.item_id + " is not a captioning record");
        mentioned.push_back(p->objects);
        annotations.push_back(*a);
      }
      return amber_scores(mentioned, annotations);
    }
  }
  throw Error("unknown benchmark");
}

json metrics_to_json(const MetricBlock& m) {
  json out;
  json exact;
  auto put = [&](const char* name, const Ratio& r) {
    out[name] = r.percent();
    exact[name] = ratio_string(r);
  };
  if (const auto* p = std::get_if<PopeScore>(&m)) {
    out["kind"] = "pope";
    put("accuracy", p->accuracy);
    put("f1", p->f1);
    put("yes_ratio", p->yes_ratio);
  } else if (const auto* s = std::get_if<MmeScore>(&m)) {
    out["kind"] = "mme";
    put("acc", s->acc);
    put("acc_plus", s->acc_plus);
    put("total", s->total);
  } else if (const auto* a = std::get_if<AmberScore>(&m)) {
    out["kind"] = "amber";
    put("chair", a->chair);
    put("cover", a->cover);
    put("hal", a->hal);
    put("cog", a->cog);
  }
  out["exact"] = exact;
  return out;
}

json report_to_json(const RunReport& report) {
  json records = json::array();
  for (const auto& r : report.records) {
    json rec = {
        {"item_id", r.item_id},
        {"image_id", r.image_id},
        {"query", r.query},
        {"task", to_string(r.task)},
    };
    if (const auto* a = std::get_if<Answer>(&r.prediction)) {
      rec["prediction"] = to_string(*a);
    } else {
      const auto& c = std::get<CaptionResult>(r.prediction);
      rec["prediction"] = {{"caption", c.text}, {"objects", object_list(c.objects)}};
    }
    if (const auto* a = std::get_if<Answer>(&r.ground_truth)) {
      rec["ground_truth"] = to_string(*a);
    } else {
      const auto& g = std::get<AnnotationSet>(r.ground_truth);
      rec["ground_truth"] = {{"truth", object_list(g.truth)},
                             {"hallu", object_list(g.hallucination_lexicon)}};
    }
    rec["iterations_used"] = r.iterations_used;
    rec["query_count"] = r.query_count;
    rec["degraded"] = r.degraded;
    rec["latency_ms"] = r.latency_ms;
    rec["trace"] = r.trace;
    records.push_back(std::move(rec));
  }
  json out = {
      {"schema_version", kReportSchemaVersion},
      {"config", report.config},
      {"records", records},
      {"metrics", metrics_to_json(report.metrics)},
      {"latency", latency_summary(report.records)},
  };
  if (report.wall_clock_ms) out["wall_clock_ms"] = *report.wall_clock_ms;
  return out;
}

RunReport report_from_json(const json& doc) {
  try {
    if (!doc.is_object() || doc.value("schema_version", 0) != kReportSchemaVersion)
      throw Error("unsupported report schema");
    RunReport report;
    report.config = doc.at("config");
    report.bench = bench_from_string(doc.at("metrics").at("kind").get<std::string>());
    for (const auto& rec : doc.at("records")) {
      ItemRecord r;
      r.item_id = rec.at("item_id").get<std::string>();
      r.image_id = rec.at("image_id").get<std::string>();
      r.query = rec.at("query").get<std::string>();
      r.task = task_from_string(rec.at("task").get<std::string>());
      const auto& pred = rec.at("prediction");
      if (pred.is_string()) {
        r.prediction = answer_from_string(pred.get<std::string>());
      } else {
        r.prediction = CaptionResult{pred.at("caption").get<std::string>(),
                                     object_set(pred.at("objects"))};
      }
      const auto& gt = rec.at("ground_truth");
      if (gt.is_string()) {
        r.ground_truth = answer_from_string(gt.get<std::string>());
      } else {
        r.ground_truth = AnnotationSet{object_set(gt.at("truth")), object_set(gt.at("hallu"))};
      }
      r.iterations_used = rec.at("iterations_used").get<int>();
      r.query_count = rec.at("query_count").get<std::size_t>();
      r.degraded = rec.at("degraded").get<bool>();
      r.latency_ms = rec.at("latency_ms").get<std::uint64_t>();
      r.trace = rec.at("trace");
      report.records.push_back(std::move(r));
    }
    if (report.records.empty()) throw Error("no items");
    report.metrics = compute_metrics(report.bench, report.records);
    if (doc.contains("wall_clock_ms")) report.wall_clock_ms = doc["wall_clock_ms"].get<double>();
    return report;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed report: ") + e.what());
  }
}

RunReport run_benchmark(const RunOptions& options, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  RunOptions o = options;
  if (const char* env = std::getenv("HYDRA_SUITE"); env && *env) o.suite = env;
  if (task_for(o.bench) != o.task)
    throw Error("benchmark " + std::string(to_string(o.bench)) + " needs --task " +
                std::string(to_string(task_for(o.bench))));

  const SuiteConfig sc = load_suite_config(o.suite);
  const SuiteRegistry registry = build_registry(sc);
  const auto required = required_roles(o.task);
  registry.require(required);

  RunConfig requested = sc.run;
  requested.seed = o.seed;
  requested.defense = o.defense;
  requested.workers = o.workers;
  const auto fanout = static_cast<int>(discovery_roles(o.task, registry).size());
  const auto validated = validate_config(requested, fanout);
  if (!validated.ok()) {
    std::string msg = "invalid run configuration:";
    for (const auto& e : validated.errors) msg += " " + e + ";";
    throw Error(msg);
  }
  const RunConfig& cfg = validated.config;

  const ObjectVocabulary vocab = sc.vocabulary ? ObjectVocabulary::load(*sc.vocabulary)
                                               : ObjectVocabulary::coco();
  const DescriptorLexicon lexicon = sc.lexicon ? DescriptorLexicon::load(*sc.lexicon)
                                               : DescriptorLexicon::standard();
  const RuleReasoner reasoner(vocab, lexicon, static_cast<std::size_t>(cfg.attribute_cap));

  auto items = load_items(o, vocab);
  attach_images(items, o.data / "manifest.json", o.defense);
  log << "running " << items.size() << " " << to_string(o.bench) << " items with "
      << cfg.workers << " worker(s)\n";

  std::vector<ItemRecord> records(items.size());
  parallel_for(items.size(), static_cast<std::size_t>(cfg.workers), [&](std::size_t i) {
    records[i] = make_record(items[i], run_item(items[i], registry, reasoner, cfg));
  });
  std::sort(records.begin(), records.end(),
            [](const ItemRecord& a, const ItemRecord& b) { return a.item_id < b.item_id; });

  RunReport report;
  report.config = config_echo(o, sc, cfg);
  report.bench = o.bench;
  report.metrics = compute_metrics(o.bench, records);
  report.records = std::move(records);
  if (o.timings)
    report.wall_clock_ms = std::chrono::duration<double, std::milli>(
                               std::chrono::steady_clock::now() - start)
                               .count();
  return report;
}

void write_report(const RunReport& report, const std::filesystem::path& path) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << report_to_json(report).dump(2) << '\n';
    if (!out) throw Error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

RescoreResult rescore(const json& report_doc) {
  const RunReport report = report_from_json(report_doc);
  RescoreResult result{report.metrics, {}};
  const json fresh = metrics_to_json(report.metrics);
  const json& embedded = report_doc.at("metrics");
  for (const auto& [name, value] : fresh.items()) {
    if (name == "kind" || name == "exact") continue;
    const bool same = embedded.contains(name) && embedded[name] == value &&
                      embedded.contains("exact") && embedded["exact"].contains(name) &&
                      embedded["exact"][name] == fresh["exact"][name];
    if (!same) result.mismatches.push_back(name);
  }
  return result;
}

RescoreResult rescore_file(const std::filesystem::path& path) {
  const json doc = read_json(path);
  try {
    return rescore(doc);
  } catch (const ParseError& e) {
    throw e.in(path.string());
  }
}

DefendSummary defend(const DefendOptions& options, std::ostream& log) {
  if (options.defense == DefenseKind::None) throw Error("defend needs --defense jpeg or featsq");
  if (!std::filesystem::is_directory(options.input))
    throw Error("input directory " + options.input.string() + " does not exist");
  std::filesystem::create_directories(options.output);

  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(options.input))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());

  DefendSummary summary;
  json budget_log = json::array();
  for (const auto& file : files) {
    ImageBuffer image;
    try {
      image = read_image(file);
    } catch (const Error& e) {
      summary.undecodable.push_back(file.filename().string());
      log << "skip " << file.filename().string() << ": " << e.what() << "\n";
      continue;
    }
    const ImageBuffer defended = apply_defense(image, options.defense);
    const auto target = options.output / (file.stem().string() + ".png");
    write_png(defended, target);
    ++summary.written;
    if (options.verify_epsilon) {
      const auto check = verify_budget(image, defended, *options.verify_epsilon);
      budget_log.push_back({{"file", file.filename().string()},
                            {"max_delta", std::to_string(check.max_delta) + "/255"},
                            {"pass", check.pass}});
      log << (check.pass ? "pass " : "FAIL ") << file.filename().string()
          << " max delta " << check.max_delta << "/255\n";
      if (!check.pass) summary.over_budget.push_back(file.filename().string());
    }
  }
  if (options.verify_epsilon) {
    std::ofstream out(options.output / "budget_log.json", std::ios::trunc);
    out << budget_log.dump(2) << '\n';
  }
  return summary;
}

int run_command(const RunOptions& options, std::ostream& out, std::ostream& err) {
  try {
    const RunReport report = run_benchmark(options, err);
    write_report(report, options.out);
    out << "wrote " << options.out.string() << " (" << report.records.size() << " items): "
        << metrics_to_json(report.metrics).dump() << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int rescore_command(const std::filesystem::path& report, std::ostream& out, std::ostream& err) {
  try {
    const auto result = rescore_file(report);
    out << metrics_to_json(result.recomputed).dump() << "\n";
    if (result.match()) {
      out << "metrics match\n";
      return 0;
    }
    for (const auto& m : result.mismatches) err << "mismatch: " << m << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int defend_command(const DefendOptions& options, std::ostream& out, std::ostream& err) {
  try {
    const auto summary = defend(options, err);
    out << "wrote " << summary.written << " image(s) to " << options.output.string() << "\n";
    for (const auto& f : summary.undecodable) err << "undecodable: " << f << "\n";
    for (const auto& f : summary.over_budget) err << "over budget: " << f << "\n";
    return summary.ok() ? 0 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace hydra
