#include "lta/eval_metric.hpp"

#include <limits>

namespace lta {

std::string_view to_string(MatchAxis axis) {
  switch (axis) {
    case MatchAxis::verb:
      return "verb";
    case MatchAxis::noun:
      return "noun";
    case MatchAxis::action:
      return "action";
  }
  return {};
}

namespace {

std::vector<std::size_t> project(std::span<const Action> seq, MatchAxis axis) {
  std::vector<std::size_t> out(seq.size());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    out[i] = axis == MatchAxis::verb ? seq[i].verb : seq[i].noun;
  }
  return out;
}

}  // namespace

std::size_t pattern_distance(std::span<const Action> pattern, std::span<const Action> truth,
                             MatchAxis axis, bool allow_transposition) {
  if (axis == MatchAxis::action) return edit_distance(pattern, truth, allow_transposition);
  const auto p = project(pattern, axis);
  const auto t = project(truth, axis);
  return edit_distance(p, t, allow_transposition);
}

double ed_at_k(const PredictionSet& preds, const ActionSequence& truth, MatchAxis axis,
               bool allow_transposition) {
  const std::size_t steps = truth.actions.size();
  if (steps == 0) throw Error("ed_at_k: empty truth for '" + truth.episode_id + "'");
  if (preds.patterns.empty()) throw Error("ed_at_k: no patterns for '" + preds.example_id + "'");
  std::size_t best = std::numeric_limits<std::size_t>::max();
  for (std::size_t k = 0; k < preds.patterns.size(); ++k) {
    const auto& pattern = preds.patterns[k];
    if (pattern.size() != steps) {
      throw Error("'" + preds.example_id + "': pattern " + std::to_string(k) + " has length " +
                  std::to_string(pattern.size()) + ", truth has " + std::to_string(steps));
    }
    best = std::min(best, pattern_distance(pattern, truth.actions, axis, allow_transposition));
  }
  return static_cast<double>(best) / static_cast<double>(steps);
}

EvalReport evaluate_corpus(const std::vector<PredictionSet>& preds,
                           const std::map<std::string, ActionSequence>& truths,
                           const EvalFlags& flags) {
  EvalReport report;
  double sum_verb = 0.0, sum_noun = 0.0, sum_action = 0.0;
  for (const auto& p : preds) {
    auto it = truths.find(p.example_id);
    if (it == truths.end()) {
      ++report.unmatched;
      report.unmatched_ids.push_back(p.example_id);
      continue;
    }
    ExampleScore s{p.example_id,
                   ed_at_k(p, it->second, MatchAxis::verb, flags.allow_transposition),
                   ed_at_k(p, it->second, MatchAxis::noun, flags.allow_transposition),
                   ed_at_k(p, it->second, MatchAxis::action, flags.allow_transposition)};
    sum_verb += s.verb;
    sum_noun += s.noun;
    sum_action += s.action;
    ++report.n_examples;
    if (flags.keep_per_example) report.per_example.push_back(std::move(s));
  }
  if (report.n_examples == 0) throw Error("no predictions matched a ground-truth sequence");
  const double n = static_cast<double>(report.n_examples);
  report.ed_verb = sum_verb / n;
  report.ed_noun = sum_noun / n;
  report.ed_action = sum_action / n;
  return report;
}

std::map<std::string, ActionSequence> key_by_episode(const std::vector<ActionSequence>& corpus) {
  std::map<std::string, ActionSequence> out;
  for (const auto& seq : corpus) {
    if (!out.emplace(seq.episode_id, seq).second) {
      throw Error("duplicate episode_id '" + seq.episode_id + "'");
    }
  }
  return out;
}

}  // namespace lta
