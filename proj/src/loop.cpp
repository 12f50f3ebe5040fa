#include "hydra/loop.hpp"

#include <algorithm>
#include <cstdio>

namespace hydra {

namespace {

struct Tally {
  int yes = 0;
  int no = 0;
};

Tally tally(std::span<const Critique> critiques) {
  Tally t;
  for (const auto& c : critiques) {
    if (c.decision == Decision::Yes) ++t.yes;
    if (c.decision == Decision::No) ++t.no;
  }
  return t;
}

bool initial_consistent(std::span<const Critique> critiques) {
  if (critiques.empty()) return false;
  const Decision first = critiques.front().decision;
  return first != Decision::Uncertain &&
         std::all_of(critiques.begin(), critiques.end(),
                     [&](const Critique& c) { return c.decision == first; });
}

std::optional<Answer> confident_majority(std::span<const Critique> critiques, int threshold) {
  const Tally t = tally(critiques);
  if (t.yes > t.no && t.yes >= threshold) return Answer::Yes;
  if (t.no > t.yes && t.no >= threshold) return Answer::No;
  return std::nullopt;
}

std::vector<Decision> decisions_of(std::span<const Critique> critiques) {
  std::vector<Decision> out;
  out.reserve(critiques.size());
  for (const auto& c : critiques) out.push_back(c.decision);
  return out;
}

QueryRequest make_request(const BenchmarkItem& item, ModelRole role, std::string prompt,
                          int iteration) {
  QueryRequest r;
  r.role = role;
  r.task = item.task;
  r.prompt = std::move(prompt);
  r.image = item.image;
  r.iteration = iteration;
  return r;
}

std::string format_ratio(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::size_t FinalAnswer::query_count() const {
  std::size_t n = 0;
  for (const auto& r : trace.records()) n += kind_of(r.entry) == EntryKind::Response;
  return n;
}

Answer aggregate_votes(std::span<const Decision> votes, TiePolicy tie_policy) {
  int yes = 0;
  int no = 0;
  for (Decision d : votes) {
    yes += d == Decision::Yes;
    no += d == Decision::No;
  }
  if (yes > no) return Answer::Yes;
  if (no > yes) return Answer::No;
  return tie_policy == TiePolicy::OptimisticYes ? Answer::Yes : Answer::No;
}

DecisionRecord decide_next(std::span<const Critique> critiques, const LoopState& state,
                           const RunConfig& config) {
  DecisionRecord d;
  d.iteration = state.iteration;
  const bool at_limit = state.iteration >= config.max_iterations;

  if (state.task == TaskKind::Captioning) {
    if (state.pending.empty()) {
      d.kind = DecisionKind::Finalize;
      d.reason = "no flagged objects remain";
    } else if (at_limit) {
      d.kind = DecisionKind::Finalize;
      d.reason = "iteration limit reached with " + std::to_string(state.pending.size()) +
                 " object(s) unverified";
    } else {
      d.kind = DecisionKind::Continue;
      d.reason = std::to_string(state.pending.size()) + " object(s) flagged for verification";
    }
    return d;
  }

  if (state.iteration == 1) {
    if (initial_consistent(critiques)) {
      d.kind = DecisionKind::Finalize;
      d.reason = "initial critiques consistent: " +
                 std::string(to_string(critiques.front().decision));
      return d;
    }
  } else if (auto m = confident_majority(critiques, config.vote_threshold)) {
    d.kind = DecisionKind::Finalize;
    d.reason = "discovery majority: " + std::string(to_string(*m));
    return d;
  }
  if (at_limit) {
    d.kind = DecisionKind::Finalize;
    d.reason = "iteration limit reached; aggregating all votes";
  } else {
    d.kind = DecisionKind::Continue;
    d.reason = state.iteration == 1 ? "initial critiques inconsistent"
                                    : "discovery votes inconclusive";
  }
  return d;
}

FinalAnswer run_vqa(const BenchmarkItem& item, const SuiteRegistry& registry,
                    const Reasoner& reasoner, const RunConfig& config) {
  if (item.task != TaskKind::Vqa) throw Error("run_vqa called on a captioning item");
  const auto required = required_roles(TaskKind::Vqa);
  registry.require(required);
  const auto discovery = discovery_roles(TaskKind::Vqa, registry);

  FinalAnswer out;
  out.item_id = item.item_id;
  out.task = TaskKind::Vqa;
  out.target = reasoner.extract_target_object(item.query);
  AgentMemory& memory = out.trace;

  LoopState state;
  state.task = TaskKind::Vqa;

  // Initial perceptual query: detailed caption + detector list.
  const std::vector<QueryRequest> initial = {
      make_request(item, ModelRole::PlugInLvlm, std::string(kDetailedCaptionPrompt), 1),
      make_request(item, ModelRole::ObjectDetector, std::string(kDetectorPrompt), 1),
  };
  std::vector<Critique> round;
  for (auto& r : query_each(registry, initial, config.max_in_flight)) memory.append(r);
  state.phase = LoopPhase::Critique;
  for (const auto& r : memory.responses()) {
    round.push_back(reasoner.critique_existence(out.target, r));
    memory.append(round.back());
    state.votes[out.target].emplace_back(r.role, round.back().decision);
  }

  std::vector<std::string> asked;
  std::optional<Answer> settled;
  while (true) {
    state.phase = LoopPhase::Decide;
    DecisionRecord decision = decide_next(round, state, config);
    memory.append(decision);
    if (decision.kind == DecisionKind::Finalize) {
      if (state.iteration == 1 && initial_consistent(round)) {
        settled = round.front().decision == Decision::Yes ? Answer::Yes : Answer::No;
      } else if (state.iteration > 1) {
        settled = confident_majority(round, config.vote_threshold);
      }
      break;
    }

    ++state.iteration;
    state.phase = LoopPhase::Inquiry;
    std::vector<std::string> texts;
    for (const auto& r : memory.responses())
      if (r.role != ModelRole::ObjectDetector && !r.failed) texts.push_back(r.text);
    const auto hints = reasoner.extract_attributes(texts, out.target, asked);
    state.pending.clear();
    for (const auto& h : hints) {
      state.pending.push_back(reasoner.formulate_attribute_question(h));
      asked.push_back(h.attribute);
    }
    if (state.pending.empty()) state.pending.push_back(item.query);

    state.phase = LoopPhase::Discovery;
    round.clear();
    for (const auto& question : state.pending) {
      const auto responses = query_many(registry, discovery,
                                        make_request(item, discovery.front(), question,
                                                     state.iteration),
                                        config.max_in_flight);
      for (const auto& r : responses) memory.append(r);
      state.phase = LoopPhase::Critique;
      for (const auto& r : responses) {
        round.push_back(reasoner.critique_existence(out.target, r));
        memory.append(round.back());
        state.votes[out.target].emplace_back(r.role, round.back().decision);
      }
    }
  }
  state.phase = LoopPhase::Done;

  const auto all = memory.critiques();
  const Tally t = tally(all);
  out.degraded = t.yes + t.no == 0;
  out.answer = settled ? *settled : aggregate_votes(decisions_of(all), config.tie_policy);
  out.iterations_used = state.iteration;
  return out;
}

FinalAnswer run_caption(const BenchmarkItem& item, const SuiteRegistry& registry,
                        const Reasoner& reasoner, const RunConfig& config) {
  if (item.task != TaskKind::Captioning) throw Error("run_caption called on a VQA item");
  const auto required = required_roles(TaskKind::Captioning);
  registry.require(required);
  const auto discovery = discovery_roles(TaskKind::Captioning, registry);

  FinalAnswer out;
  out.item_id = item.item_id;
  out.task = TaskKind::Captioning;
  AgentMemory& memory = out.trace;

  LoopState state;
  state.task = TaskKind::Captioning;

  const std::vector<ModelRole> captioners = {ModelRole::PlugInLvlm, ModelRole::AuxLvlmA,
                                             ModelRole::AuxLvlmB, ModelRole::Captioner};
  const auto captions = query_many(registry, captioners,
                                   make_request(item, ModelRole::PlugInLvlm, item.query, 1),
                                   config.max_in_flight);
  for (const auto& r : captions) memory.append(r);

  // Critique: summarize the usable captions and flag outliers.
  state.phase = LoopPhase::Critique;
  std::vector<std::size_t> usable;
  std::vector<std::string> texts;
  for (std::size_t i = 0; i < captions.size(); ++i) {
    const auto& text = captions[i].text;
    if (captions[i].failed || text.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    usable.push_back(i);
    texts.push_back(text);
  }

  ObjectSet summary;
  std::vector<Critique> round;
  std::vector<Critique> per_caption(captions.size());
  for (std::size_t i = 0; i < captions.size(); ++i) {
    per_caption[i].source = captions[i].role;
    per_caption[i].iteration = 1;
    per_caption[i].decision = Decision::Uncertain;
    per_caption[i].rationale = captions[i].failed ? "backend failure" : "empty caption";
  }
  if (usable.size() >= 2) {
    const CaptionSummary s = reasoner.summarize_captions(texts);
    summary = s.objects;
    std::map<std::string, std::size_t> support;
    for (std::size_t k = 0; k < usable.size(); ++k) {
      auto& c = per_caption[usable[k]];
      c.objects = s.caption_objects[k];
      for (const auto& o : c.objects) ++support[o];
      if (s.compromised[k]) {
        c.decision = Decision::No;
        c.rationale = "potential compromised model: Jaccard " + format_ratio(s.jaccard[k]) +
                      " against the other captions";
      } else {
        c.decision = Decision::Yes;
        c.rationale = "consistent with the other captions: Jaccard " + format_ratio(s.jaccard[k]);
      }
    }
    for (const auto& [object, n] : support)
      if (n >= 2 && !summary.count(object)) state.pending.push_back(object);
  } else {
    out.degraded = true;
    for (std::size_t k : usable) {
      auto& c = per_caption[k];
      c.objects = reasoner.extract_objects(captions[k].text);
      c.decision = Decision::Uncertain;
      c.rationale = "only usable caption; nothing to cross-check against";
    }
  }
  for (const auto& c : per_caption) {
    memory.append(c);
    round.push_back(c);
  }

  while (true) {
    state.phase = LoopPhase::Decide;
    DecisionRecord decision = decide_next(round, state, config);
    memory.append(decision);
    if (decision.kind == DecisionKind::Finalize) break;

    ++state.iteration;
    state.phase = LoopPhase::Discovery;
    round.clear();
    std::vector<std::string> still_flagged;
    for (const auto& object : state.pending) {
      const auto responses =
          query_many(registry, discovery,
                     make_request(item, discovery.front(), presence_question(object),
                                  state.iteration),
                     config.max_in_flight);
      for (const auto& r : responses) memory.append(r);
      int yes = 0;
      int no = 0;
      for (const auto& r : responses) {
        Critique c = reasoner.critique_existence(object, r);
        c.target = object;
        c.decision = r.failed ? Decision::Uncertain : reasoner.judge_object_in_answer(object, r.text);
        if (!r.failed) c.rationale = "verification answer judged " + std::string(to_string(c.decision));
        yes += c.decision == Decision::Yes;
        no += c.decision == Decision::No;
        state.votes[object].emplace_back(r.role, c.decision);
        memory.append(c);
        round.push_back(std::move(c));
      }
      if (yes >= config.vote_threshold) {
        summary.insert(object);
      } else if (no < config.vote_threshold) {
        still_flagged.push_back(object);
      }
    }
    state.pending = std::move(still_flagged);
  }
  state.phase = LoopPhase::Done;

  out.answer = CaptionResult{summary_text(summary), summary};
  out.iterations_used = state.iteration;
  return out;
}

FinalAnswer run_item(const BenchmarkItem& item, const SuiteRegistry& registry,
                     const Reasoner& reasoner, const RunConfig& config) {
  return item.task == TaskKind::Vqa ? run_vqa(item, registry, reasoner, config)
                                    : run_caption(item, registry, reasoner, config);
}

}  // namespace hydra
