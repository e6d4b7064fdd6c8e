#include "lta/refine.hpp"

#include <algorithm>
#include <cmath>

#include "lta/rng.hpp"

namespace lta {

std::string_view to_string(Tier tier) {
  switch (tier) {
    case Tier::raw_argmax:
      return "raw_argmax";
    case Tier::refined_argmax:
      return "refined_argmax";
    case Tier::refined_sampled:
      return "refined_sampled";
  }
  return {};
}

Tier tier_from_string(std::string_view s) {
  if (s == "raw_argmax") return Tier::raw_argmax;
  if (s == "refined_argmax") return Tier::refined_argmax;
  if (s == "refined_sampled") return Tier::refined_sampled;
  throw Error("unknown tier '" + std::string(s) + "'");
}

void PredictionConfig::check() const {
  if (steps == 0) throw Error("Z must be at least 1");
  if (patterns == 0) throw Error("K must be at least 1");
}

Refined apply_gates(std::span<const double> probs, std::span<const double> gates) {
  if (probs.size() != gates.size()) throw Error("apply_gates: length mismatch");
  Refined out;
  out.probs.resize(probs.size());
  double sum = 0.0;
  for (std::size_t c = 0; c < probs.size(); ++c) {
    out.probs[c] = probs[c] * std::max(0.0, gates[c]);
    sum += out.probs[c];
  }
  if (sum > 0.0) {
    for (double& p : out.probs) p /= sum;
  } else {
    out.probs.assign(probs.begin(), probs.end());
    out.fallback_used = true;
  }
  return out;
}

Refined refine_noun_step(std::span<const double> noun_probs, std::size_t prev_noun,
                         const CoocStats& stats, IndicatorMode mode) {
  if (noun_probs.size() != stats.num_nouns()) {
    throw Error("refine_noun_step: distribution has " + std::to_string(noun_probs.size()) +
                " classes, stats have " + std::to_string(stats.num_nouns()));
  }
  std::vector<double> gates(noun_probs.size());
  for (std::size_t n = 0; n < gates.size(); ++n) {
    gates[n] = transition_score(stats, prev_noun, n, Axis::noun, mode);
  }
  return apply_gates(noun_probs, gates);
}

Refined refine_verb_step(std::span<const double> verb_probs, std::size_t prev_verb,
                         std::size_t selected_noun, const CoocStats& stats, IndicatorMode mode) {
  if (verb_probs.size() != stats.num_verbs()) {
    throw Error("refine_verb_step: distribution has " + std::to_string(verb_probs.size()) +
                " classes, stats have " + std::to_string(stats.num_verbs()));
  }
  if (selected_noun >= stats.num_nouns()) throw Error("refine_verb_step: noun out of range");
  std::vector<double> gates(verb_probs.size());
  for (std::size_t v = 0; v < gates.size(); ++v) {
    // ReLU applies to the indicator only; g is already nonnegative.
    gates[v] = std::max(0.0, transition_score(stats, prev_verb, v, Axis::verb, mode)) *
               verb_given_noun(stats, v, selected_noun);
  }
  return apply_gates(verb_probs, gates);
}

std::size_t argmax(std::span<const double> values) {
  return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) -
                                  values.begin());
}

std::size_t sample_index(std::span<const double> probs, double u) {
  double total = 0.0;
  for (double p : probs) total += p;
  const double target = u * total;
  double cum = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t c = 0; c < probs.size(); ++c) {
    if (probs[c] <= 0.0) continue;
    cum += probs[c];
    last_positive = c;
    if (target < cum) return c;
  }
  // Rounding left target at or above the final cumulative sum.
  return last_positive;
}

namespace {

std::vector<Action> raw_argmax_pattern(const StepDistributions& d) {
  std::vector<Action> out(d.steps());
  for (std::size_t z = 0; z < d.steps(); ++z) {
    out[z] = {argmax(d.verb_probs.row(z)), argmax(d.noun_probs.row(z))};
  }
  return out;
}

// One refined chain. `rng` is null for the greedy tier.
std::vector<Action> refined_pattern(const StepDistributions& d, const CoocStats& stats,
                                    const PredictionConfig& cfg, CounterRng* rng) {
  auto pick = [rng](std::span<const double> probs) {
    return rng ? sample_index(probs, rng->uniform()) : argmax(probs);
  };
  std::vector<Action> out(d.steps());
  std::optional<Action> prev = cfg.first_step_seed;
  for (std::size_t z = 0; z < d.steps(); ++z) {
    Action a;
    if (prev) {
      a.noun = pick(refine_noun_step(d.noun_probs.row(z), prev->noun, stats, cfg.mode).probs);
      a.verb =
          pick(refine_verb_step(d.verb_probs.row(z), prev->verb, a.noun, stats, cfg.mode).probs);
    } else {
      a.noun = pick(d.noun_probs.row(z));
      a.verb = pick(d.verb_probs.row(z));
    }
    out[z] = a;
    prev = a;
  }
  return out;
}

}  // namespace

PredictionSet generate_patterns(const StepDistributions& dists, const CoocStats& stats,
                                const PredictionConfig& cfg) {
  cfg.check();
  if (dists.verb_probs.rows() != cfg.steps || dists.noun_probs.rows() != cfg.steps) {
    throw Error("'" + dists.example_id + "': distributions have " +
                std::to_string(dists.verb_probs.rows()) + " verb and " +
                std::to_string(dists.noun_probs.rows()) + " noun steps, expected Z = " +
                std::to_string(cfg.steps));
  }

  PredictionSet set;
  set.example_id = dists.example_id;
  set.patterns.push_back(raw_argmax_pattern(dists));
  set.tiers.push_back(Tier::raw_argmax);
  if (cfg.patterns == 1) return set;

  if (dists.verb_probs.cols() != stats.num_verbs() ||
      dists.noun_probs.cols() != stats.num_nouns()) {
    throw Error("'" + dists.example_id + "': distributions are verb " +
                dists.verb_probs.shape_string() + ", noun " + dists.noun_probs.shape_string() +
                " but stats cover " + std::to_string(stats.num_verbs()) + " verbs and " +
                std::to_string(stats.num_nouns()) + " nouns");
  }
  if (cfg.first_step_seed &&
      (cfg.first_step_seed->verb >= stats.num_verbs() ||
       cfg.first_step_seed->noun >= stats.num_nouns())) {
    throw Error("first-step seed action out of range");
  }

  set.patterns.push_back(refined_pattern(dists, stats, cfg, nullptr));
  set.tiers.push_back(Tier::refined_argmax);

  CounterRng rng(cfg.rng_seed);
  for (std::size_t k = 2; k < cfg.patterns; ++k) {
    set.patterns.push_back(refined_pattern(dists, stats, cfg, &rng));
    set.tiers.push_back(Tier::refined_sampled);
  }
  return set;
}

}  // namespace lta
