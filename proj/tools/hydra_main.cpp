#include <iostream>

#include "CLI11.hpp"
#include "hydra/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"hydra: multi-model verification against object hallucination"};
  app.require_subcommand(1);

  std::string task = "vqa", bench = "pope", subset = "random", defense = "none";
  std::string suite, data, out;
  std::uint64_t seed = 0;
  int workers = 0;
  std::size_t sample = 0;
  bool timings = false;
  auto* run = app.add_subcommand("run", "run a benchmark and write a report");
  run->add_option("--task", task)->check(CLI::IsMember({"vqa", "caption"}));
  run->add_option("--bench", bench)->check(CLI::IsMember({"pope", "mme", "amber"}));
  run->add_option("--subset", subset)->check(CLI::IsMember({"random", "popular", "adversarial"}));
  run->add_option("--defense", defense)->check(CLI::IsMember({"none", "jpeg", "featsq"}));
  run->add_option("--suite", suite, "suite config (HYDRA_SUITE overrides)");
  run->add_option("--data", data)->required();
  run->add_option("--out", out)->required();
  run->add_option("--seed", seed);
  run->add_option("--workers", workers)->check(CLI::NonNegativeNumber);
  auto* sample_opt = run->add_option("--sample", sample, "images to sample (default: all)")
                         ->check(CLI::PositiveNumber);
  run->add_flag("--timings", timings, "record wall-clock time in the report");

  std::string report;
  auto* rescore = app.add_subcommand("rescore", "recompute metrics from a report");
  rescore->add_option("report", report)->required();

  std::string defend_kind = "featsq", epsilon, in_dir, out_dir;
  auto* defend = app.add_subcommand("defend", "apply an input-purification defense to a directory");
  defend->add_option("--defense", defend_kind)->check(CLI::IsMember({"jpeg", "featsq"}));
  defend->add_option("--verify-epsilon", epsilon, "check outputs stay within p/q of the inputs");
  defend->add_option("input", in_dir)->required();
  defend->add_option("output", out_dir)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      hydra::RunOptions o;
      o.task = hydra::task_from_string(task);
      o.bench = hydra::bench_from_string(bench);
      o.subset = hydra::pope_subset_from_string(subset);
      o.defense = hydra::defense_from_string(defense);
      o.suite = suite;
      o.data = data;
      o.out = out;
      o.seed = seed;
      o.workers = workers;
      if (*sample_opt) o.sample = sample;
      o.timings = timings;
      if (o.suite.empty() && !std::getenv("HYDRA_SUITE")) {
        std::cerr << "error: --suite or HYDRA_SUITE is required\n";
        return 1;
      }
      return hydra::run_command(o, std::cout, std::cerr);
    }
    if (*rescore) return hydra::rescore_command(report, std::cout, std::cerr);
    hydra::DefendOptions o;
    o.defense = hydra::defense_from_string(defend_kind);
    o.input = in_dir;
    o.output = out_dir;
    if (!epsilon.empty()) o.verify_epsilon = hydra::parse_epsilon(epsilon);
    return hydra::defend_command(o, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
