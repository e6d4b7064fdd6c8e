#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lta/cooc_stats.hpp"
#include "lta/ensemble.hpp"
#include "lta/eval_metric.hpp"
#include "lta/refine.hpp"
#include "lta/rng.hpp"
#include "lta/vocab.hpp"

namespace lta {

struct SynthConfig {
  std::size_t num_verbs = 10;
  std::size_t num_nouns = 10;
  std::size_t num_sequences = 200;
  std::size_t seq_len = 20;
  /// Weight of the designated successor relative to each other class; 1
  /// means uniform rows.
  double transition_sharpness = 1.0;
  /// Mass moved from uniform onto each noun's designated verb.
  double verb_noun_coupling = 0.0;
  double logit_noise_sigma = 1.0;
  double logit_scale = 1.0;
  std::uint64_t rng_seed = 0;

  void check() const;
};

/// Sharpness that puts `mass` on the designated successor of a C-class row.
double sharpness_for_mass(double mass, std::size_t num_classes);

/// Ground truth behind a generated corpus.
///
/// Nouns follow a Markov chain with noun_transition. The first verb is drawn
/// from verb_given_noun[noun]; later verbs from the normalized product
/// verb_transition[prev_verb] * verb_given_noun[noun]. `expected` holds the
/// exact position-pooled statistics of that process (the large-corpus limit
/// of build_stats with add_k = 0).
struct PlantedStructure {
  Matrix verb_transition;
  Matrix noun_transition;
  Matrix verb_given_noun;  // [noun][verb]
  std::vector<std::size_t> verb_successor;
  std::vector<std::size_t> noun_successor;
  std::vector<std::size_t> noun_verb;
  CoocStats expected;
};

struct SynthCorpus {
  std::vector<ActionSequence> corpus;
  PlantedStructure planted;
};

SynthCorpus gen_markov_corpus(const SynthConfig& cfg);

/// Z x C logits per axis: scale on the true class plus N(0, sigma^2) noise,
/// verb rows drawn before noun rows.
LogitsTensor corrupt_to_logits(const ActionSequence& truth, std::size_t num_verbs,
                               std::size_t num_nouns, double sigma, double scale,
                               std::uint64_t seed);

/// Sequences with even index train the statistics; odd ones are evaluated.
struct SplitCorpus {
  std::vector<ActionSequence> train;
  std::vector<ActionSequence> eval;
};

SplitCorpus split_by_parity(const std::vector<ActionSequence>& corpus);

/// Held-out truths trimmed to their last `steps` actions.
std::vector<ActionSequence> eval_truths(const std::vector<ActionSequence>& eval,
                                        std::size_t steps);

/// Logits seed for held-out episode i.
inline std::uint64_t logits_seed(std::uint64_t seed, std::size_t episode) {
  return derive_seed(seed ^ 0x6c6f67697473ULL, episode);
}

struct EpisodeRow {
  std::string episode_id;
  std::uint64_t logits_seed = 0;
  std::uint64_t pattern_seed = 0;
  double raw_action = 0.0;
  double refined_action = 0.0;
  double full_action = 0.0;
};

struct ExperimentReport {
  EvalReport raw_argmax;      // pattern 0 alone
  EvalReport refined_argmax;  // pattern 1 alone
  EvalReport full_set;        // all K patterns
  double delta_action = 0.0;       // raw_argmax - refined_argmax (positive = refinement helps)
  double delta_full_action = 0.0;  // raw_argmax - full_set
  std::vector<EpisodeRow> episodes;
};

/// Generates a corpus, builds statistics on the even split, corrupts the odd
/// split into logits and compares pattern tiers. Requires K >= 2.
ExperimentReport run_refinement_experiment(const SynthConfig& cfg,
                                           const PredictionConfig& pred_cfg,
                                           const SmoothingConfig& smoothing = {});

}  // namespace lta
