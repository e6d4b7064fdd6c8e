#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "lta/common.hpp"
#include "lta/vocab.hpp"

namespace lta {

/// How a conditional row with zero observations is handled when add_k = 0.
enum class EmptyRowPolicy {
  uniform,  // fill with 1/C
  error,    // throw "unnormalizable row"
};

struct SmoothingConfig {
  double add_k = 1.0;
  double prob_clamp_min = 1e-6;
  double prob_clamp_max = 1.0 - 1e-6;
  EmptyRowPolicy empty_rows = EmptyRowPolicy::uniform;

  /// Throws lta::Error when a field is out of range.
  void check() const;
  double clamp(double p) const;

  bool operator==(const SmoothingConfig&) const = default;
};

/// Variant of the consecutive-class indicator.
enum class IndicatorMode {
  /// Conditional p(next|prev) in the PMI numerator and the normalizer.
  as_written,
  /// Joint p(prev, next) in both places (textbook NPMI).
  standard_npmi,
};

std::string_view to_string(IndicatorMode mode);
IndicatorMode indicator_mode_from_string(std::string_view s);

/// Co-occurrence statistics of a label corpus. Marginals are pooled over
/// all positions; transition rows are indexed by the previous class;
/// verb_given_noun rows are indexed by noun.
struct CoocStats {
  std::vector<double> verb_marginal;
  std::vector<double> noun_marginal;
  Matrix verb_transition;  // C_verb x C_verb
  Matrix noun_transition;  // C_noun x C_noun
  Matrix verb_given_noun;  // C_noun x C_verb
  SmoothingConfig smoothing;
  std::string corpus_fingerprint;

  std::size_t num_verbs() const { return verb_marginal.size(); }
  std::size_t num_nouns() const { return noun_marginal.size(); }
  std::size_t num_classes(Axis axis) const {
    return axis == Axis::verb ? num_verbs() : num_nouns();
  }
  const std::vector<double>& marginal(Axis axis) const {
    return axis == Axis::verb ? verb_marginal : noun_marginal;
  }
  const Matrix& transition(Axis axis) const {
    return axis == Axis::verb ? verb_transition : noun_transition;
  }

  /// Shape and normalization checks (sums within 1e-9).
  void check() const;

  bool operator==(const CoocStats&) const = default;
};

/// Raw counts, kept separate so tests and tools can recompute from them.
struct CoocCounts {
  std::vector<double> verb_unigram;
  std::vector<double> noun_unigram;
  Matrix verb_bigram;  // [prev][next]
  Matrix noun_bigram;
  Matrix noun_verb;    // [noun][verb]
  std::size_t num_sequences = 0;
  std::size_t num_actions = 0;
  std::size_t num_bigrams = 0;
};

CoocCounts count_corpus(const std::vector<ActionSequence>& corpus, std::size_t num_verbs,
                        std::size_t num_nouns);

/// Builds statistics from a corpus. Throws "empty corpus" for an empty
/// corpus and "unnormalizable row" for an empty row under add_k = 0 with
/// EmptyRowPolicy::error.
CoocStats build_stats(const std::vector<ActionSequence>& corpus, std::size_t num_verbs,
                      std::size_t num_nouns, const SmoothingConfig& cfg = {});

inline CoocStats build_stats(const std::vector<ActionSequence>& corpus, const Vocabulary& verbs,
                             const Vocabulary& nouns, const SmoothingConfig& cfg = {}) {
  return build_stats(corpus, verbs.size(), nouns.size(), cfg);
}

/// Normalized PMI-style score for class `next` following class `prev` on
/// one axis. Every probability is clamped into the configured range first,
/// so the result is always finite.
double transition_score(const CoocStats& stats, std::size_t prev, std::size_t next, Axis axis,
                        IndicatorMode mode);

/// Stored p(V = verb | N = noun), unclamped.
inline double verb_given_noun(const CoocStats& stats, std::size_t verb, std::size_t noun) {
  return stats.verb_given_noun(noun, verb);
}

}  // namespace lta
