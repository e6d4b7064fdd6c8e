#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lta/refine.hpp"
#include "lta/vocab.hpp"

namespace lta {

enum class MatchAxis { verb, noun, action };

std::string_view to_string(MatchAxis axis);

/// Levenshtein distance, or the restricted Damerau-Levenshtein (optimal
/// string alignment) distance when allow_transposition is set. Unit costs.
template <typename T>
std::size_t edit_distance(std::span<const T> a, std::span<const T> b, bool allow_transposition) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  // Three rolling rows: i-2, i-1, i.
  std::vector<std::size_t> prev2(m + 1), prev(m + 1), cur(m + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
      std::size_t best = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost});
      if (allow_transposition && i > 1 && j > 1 && a[i - 1] == b[j - 2] &&
          a[i - 2] == b[j - 1]) {
        best = std::min(best, prev2[j - 2] + 1);
      }
      cur[j] = best;
    }
    std::swap(prev2, prev);
    std::swap(prev, cur);
  }
  return prev[m];
}

template <typename T>
std::size_t edit_distance(const std::vector<T>& a, const std::vector<T>& b,
                          bool allow_transposition) {
  return edit_distance(std::span<const T>(a), std::span<const T>(b), allow_transposition);
}

/// Unnormalized distance between one pattern and the truth on one axis.
std::size_t pattern_distance(std::span<const Action> pattern, std::span<const Action> truth,
                             MatchAxis axis, bool allow_transposition);

/// min over patterns of edit_distance / Z, Z = truth length.
double ed_at_k(const PredictionSet& preds, const ActionSequence& truth, MatchAxis axis,
               bool allow_transposition = true);

struct EvalFlags {
  bool allow_transposition = true;
  bool keep_per_example = false;
};

struct ExampleScore {
  std::string example_id;
  double verb = 0.0;
  double noun = 0.0;
  double action = 0.0;
};

struct EvalReport {
  double ed_verb = 0.0;
  double ed_noun = 0.0;
  double ed_action = 0.0;
  std::size_t n_examples = 0;
  std::size_t unmatched = 0;
  std::vector<std::string> unmatched_ids;
  std::vector<ExampleScore> per_example;  // filled when keep_per_example
};

/// Scores every prediction whose example_id has a truth. Predictions without
/// a truth are counted in `unmatched`. Throws when nothing matched.
EvalReport evaluate_corpus(const std::vector<PredictionSet>& preds,
                           const std::map<std::string, ActionSequence>& truths,
                           const EvalFlags& flags = {});

std::map<std::string, ActionSequence> key_by_episode(const std::vector<ActionSequence>& corpus);

}  // namespace lta
