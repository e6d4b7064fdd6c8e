#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lta/cooc_stats.hpp"
#include "lta/ensemble.hpp"
#include "lta/vocab.hpp"

namespace lta {

/// Which selection strategy produced a pattern.
enum class Tier { raw_argmax, refined_argmax, refined_sampled };

std::string_view to_string(Tier tier);
Tier tier_from_string(std::string_view s);

struct PredictionConfig {
  std::size_t steps = 20;     // Z
  std::size_t patterns = 5;   // K
  std::uint64_t rng_seed = 0;
  IndicatorMode mode = IndicatorMode::as_written;
  /// Action treated as step 0 for refined patterns. When empty, step 1 of
  /// refined patterns uses the raw distributions.
  std::optional<Action> first_step_seed;

  void check() const;
};

struct PredictionSet {
  std::string example_id;
  std::vector<std::vector<Action>> patterns;
  std::vector<Tier> tiers;

  bool operator==(const PredictionSet&) const = default;
};

struct Refined {
  std::vector<double> probs;
  bool fallback_used = false;
};

/// probs[c] * max(0, gates[c]), renormalized. When nothing survives the
/// gating, returns probs unchanged with fallback_used set.
Refined apply_gates(std::span<const double> probs, std::span<const double> gates);

/// Noun refinement at one step given the previous noun of the same pattern.
Refined refine_noun_step(std::span<const double> noun_probs, std::size_t prev_noun,
                         const CoocStats& stats, IndicatorMode mode);

/// Verb refinement at one step given the previous verb and the noun already
/// chosen at this step.
Refined refine_verb_step(std::span<const double> verb_probs, std::size_t prev_verb,
                         std::size_t selected_noun, const CoocStats& stats, IndicatorMode mode);

/// Lowest index among the maxima.
std::size_t argmax(std::span<const double> values);

/// Inverse-CDF draw over class index order with u in [0, 1).
std::size_t sample_index(std::span<const double> probs, double u);

/// Builds K patterns: pattern 0 is the unrefined per-step argmax, pattern 1
/// the greedy refined chain, the rest are sampled refined chains drawn from
/// one stream seeded by cfg.rng_seed (pattern order, step order, noun before
/// verb).
PredictionSet generate_patterns(const StepDistributions& dists, const CoocStats& stats,
                                const PredictionConfig& cfg);

}  // namespace lta
