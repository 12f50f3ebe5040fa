#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "hydra/bench.hpp"
#include "hydra/config.hpp"
#include "hydra/defense.hpp"
#include "hydra/loop.hpp"
#include "hydra/metrics.hpp"
#include "hydra/suite.hpp"

namespace hydra {

inline constexpr int kReportSchemaVersion = 1;

// Suite config file:
//   {"backends": [{"role", "endpoint", "model_id", "timeout_ms"?, "max_retries"?}],
//    "run": {"max_iterations", "vote_threshold", "tie_policy", "max_in_flight",
//            "attribute_cap", "timeout_ms", "max_retries"},
//    "vocabulary"?: path, "lexicon"?: path}
struct SuiteConfig {
  std::vector<BackendDescriptor> backends;
  RunConfig run;
  std::optional<std::filesystem::path> vocabulary;
  std::optional<std::filesystem::path> lexicon;
  std::filesystem::path base_dir;  // mock fixtures resolve against this
};

SuiteConfig parse_suite_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);
SuiteConfig load_suite_config(const std::filesystem::path& path);

SuiteRegistry build_registry(const SuiteConfig& config);

enum class BenchKind { Pope, Mme, Amber };
std::string_view to_string(BenchKind b);
BenchKind bench_from_string(std::string_view s);

struct RunOptions {
  TaskKind task = TaskKind::Vqa;
  BenchKind bench = BenchKind::Pope;
  PopeSubset subset = PopeSubset::Random;
  DefenseKind defense = DefenseKind::None;
  std::filesystem::path suite;
  std::filesystem::path data;
  std::filesystem::path out;
  std::uint64_t seed = 0;
  int workers = 0;                    // 0 = available parallelism
  std::optional<std::size_t> sample;  // images to sample; unset = every item
  bool timings = false;               // add wall-clock to the report
};

struct ItemRecord {
  std::string item_id;
  std::string image_id;
  std::string query;
  TaskKind task = TaskKind::Vqa;
  std::variant<Answer, CaptionResult> prediction;
  std::variant<Answer, AnnotationSet> ground_truth;
  int iterations_used = 0;
  std::size_t query_count = 0;
  bool degraded = false;
  std::uint64_t latency_ms = 0;
  nlohmann::json trace = nlohmann::json::array();
};

ItemRecord make_record(const BenchmarkItem& item, const FinalAnswer& answer);

using MetricBlock = std::variant<PopeScore, MmeScore, AmberScore>;

// Records must all belong to `bench`. Throws hydra::Error("no items") when empty.
MetricBlock compute_metrics(BenchKind bench, const std::vector<ItemRecord>& records);

struct RunReport {
  nlohmann::json config;
  BenchKind bench = BenchKind::Pope;
  std::vector<ItemRecord> records;  // sorted by item_id
  MetricBlock metrics;
  std::optional<double> wall_clock_ms;
};

nlohmann::json trace_to_json(const AgentMemory& memory);
nlohmann::json metrics_to_json(const MetricBlock& m);
nlohmann::json report_to_json(const RunReport& report);
RunReport report_from_json(const nlohmann::json& doc);

// Runs every item once; throws on any hard error. `log` receives progress.
RunReport run_benchmark(const RunOptions& options, std::ostream& log);

// Writes to a temp file in the same directory and renames it into place.
void write_report(const RunReport& report, const std::filesystem::path& path);

struct RescoreResult {
  MetricBlock recomputed;
  std::vector<std::string> mismatches;  // metric names whose values differ

  bool match() const { return mismatches.empty(); }
};

RescoreResult rescore(const nlohmann::json& report_doc);
RescoreResult rescore_file(const std::filesystem::path& path);

struct DefendOptions {
  DefenseKind defense = DefenseKind::FeatSq;
  std::filesystem::path input;
  std::filesystem::path output;
  std::optional<Epsilon> verify_epsilon;
};

struct DefendSummary {
  std::size_t written = 0;
  std::vector<std::string> undecodable;
  std::vector<std::string> over_budget;

  bool ok() const { return undecodable.empty() && over_budget.empty(); }
};

// Writes <output>/<stem>.png per decodable input file, plus budget_log.json
// when a budget is being verified.
DefendSummary defend(const DefendOptions& options, std::ostream& log);

// CLI entry points; return the process exit status.
int run_command(const RunOptions& options, std::ostream& out, std::ostream& err);
int rescore_command(const std::filesystem::path& report, std::ostream& out, std::ostream& err);
int defend_command(const DefendOptions& options, std::ostream& out, std::ostream& err);

}  // namespace hydra
