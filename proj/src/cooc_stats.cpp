#include "lta/cooc_stats.hpp"

#include <algorithm>
#include <cmath>

#include "lta/io.hpp"

namespace lta {

namespace {

constexpr double kSumTolerance = 1e-9;

void check_distribution(std::span<const double> p, const std::string& what) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0 && v <= 1.0)) throw Error(what + " has entry outside [0, 1]");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw Error(what + " sums to " + std::to_string(sum));
  }
}

// Normalizes `counts` (+ add_k each) into `out`.
void normalize_row(std::span<const double> counts, std::span<double> out,
                   const SmoothingConfig& cfg, const std::string& what) {
  double total = 0.0;
  for (double c : counts) total += c + cfg.add_k;
  if (total <= 0.0) {
    if (cfg.empty_rows == EmptyRowPolicy::error) throw Error("unnormalizable row: " + what);
    std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(out.size()));
    return;
  }
  for (std::size_t i = 0; i < counts.size(); ++i) out[i] = (counts[i] + cfg.add_k) / total;
}

Matrix normalize_rows(const Matrix& counts, const SmoothingConfig& cfg, const std::string& name,
                      std::string_view row_axis) {
  Matrix out(counts.rows(), counts.cols());
  for (std::size_t r = 0; r < counts.rows(); ++r) {
    normalize_row(counts.row(r), out.row(r), cfg,
                  name + " row for " + std::string(row_axis) + " class " + std::to_string(r));
  }
  return out;
}

}  // namespace

void SmoothingConfig::check() const {
  if (!(add_k >= 0.0) || !std::isfinite(add_k)) throw Error("add_k must be >= 0");
  if (!(prob_clamp_min > 0.0 && prob_clamp_min < 0.5)) {
    throw Error("prob_clamp_min must lie in (0, 0.5)");
  }
  if (!(prob_clamp_max > 0.5 && prob_clamp_max < 1.0)) {
    throw Error("prob_clamp_max must lie in (0.5, 1)");
  }
}

double SmoothingConfig::clamp(double p) const {
  return std::clamp(p, prob_clamp_min, prob_clamp_max);
}

std::string_view to_string(IndicatorMode mode) {
  return mode == IndicatorMode::as_written ? "as_written" : "standard_npmi";
}

IndicatorMode indicator_mode_from_string(std::string_view s) {
  if (s == "as_written") return IndicatorMode::as_written;
  if (s == "standard_npmi") return IndicatorMode::standard_npmi;
  throw Error("unknown indicator mode '" + std::string(s) + "'");
}

void CoocStats::check() const {
  const std::size_t nv = num_verbs();
  const std::size_t nn = num_nouns();
  if (nv == 0 || nn == 0) throw Error("stats: empty vocabulary");
  if (verb_transition.rows() != nv || verb_transition.cols() != nv) {
    throw Error("stats: verb_transition is " + verb_transition.shape_string() + ", expected " +
                std::to_string(nv) + "x" + std::to_string(nv));
  }
  if (noun_transition.rows() != nn || noun_transition.cols() != nn) {
    throw Error("stats: noun_transition is " + noun_transition.shape_string() + ", expected " +
                std::to_string(nn) + "x" + std::to_string(nn));
  }
  if (verb_given_noun.rows() != nn || verb_given_noun.cols() != nv) {
    throw Error("stats: verb_given_noun is " + verb_given_noun.shape_string() + ", expected " +
                std::to_string(nn) + "x" + std::to_string(nv));
  }
  smoothing.check();
  check_distribution(verb_marginal, "verb_marginal");
  check_distribution(noun_marginal, "noun_marginal");
  for (std::size_t r = 0; r < nv; ++r) {
    check_distribution(verb_transition.row(r), "verb_transition row " + std::to_string(r));
  }
  for (std::size_t r = 0; r < nn; ++r) {
    check_distribution(noun_transition.row(r), "noun_transition row " + std::to_string(r));
    check_distribution(verb_given_noun.row(r), "verb_given_noun row " + std::to_string(r));
  }
}

CoocCounts count_corpus(const std::vector<ActionSequence>& corpus, std::size_t num_verbs,
                        std::size_t num_nouns) {
  CoocCounts c;
  c.verb_unigram.assign(num_verbs, 0.0);
  c.noun_unigram.assign(num_nouns, 0.0);
  c.verb_bigram = Matrix(num_verbs, num_verbs);
  c.noun_bigram = Matrix(num_nouns, num_nouns);
  c.noun_verb = Matrix(num_nouns, num_verbs);
  for (const auto& seq : corpus) {
    ++c.num_sequences;
    for (std::size_t i = 0; i < seq.actions.size(); ++i) {
      const Action& a = seq.actions[i];
      c.verb_unigram[a.verb] += 1.0;
      c.noun_unigram[a.noun] += 1.0;
      c.noun_verb(a.noun, a.verb) += 1.0;
      ++c.num_actions;
      if (i > 0) {
        const Action& p = seq.actions[i - 1];
        c.verb_bigram(p.verb, a.verb) += 1.0;
        c.noun_bigram(p.noun, a.noun) += 1.0;
        ++c.num_bigrams;
      }
    }
  }
  return c;
}

CoocStats build_stats(const std::vector<ActionSequence>& corpus, std::size_t num_verbs,
                      std::size_t num_nouns, const SmoothingConfig& cfg) {
  if (corpus.empty()) throw Error("empty corpus");
  cfg.check();
  require_valid(corpus, num_verbs, num_nouns);

  const CoocCounts counts = count_corpus(corpus, num_verbs, num_nouns);

  CoocStats s;
  s.smoothing = cfg;
  s.verb_marginal.resize(num_verbs);
  s.noun_marginal.resize(num_nouns);
  // Marginal totals are never zero: every sequence holds at least one action.
  normalize_row(counts.verb_unigram, s.verb_marginal, cfg, "verb_marginal");
  normalize_row(counts.noun_unigram, s.noun_marginal, cfg, "noun_marginal");
  s.verb_transition = normalize_rows(counts.verb_bigram, cfg, "verb_transition", "verb");
  s.noun_transition = normalize_rows(counts.noun_bigram, cfg, "noun_transition", "noun");
  s.verb_given_noun = normalize_rows(counts.noun_verb, cfg, "verb_given_noun", "noun");
  s.corpus_fingerprint = io::sha256_hex(io::corpus_to_jsonl(corpus));
  return s;
}

double transition_score(const CoocStats& stats, std::size_t prev, std::size_t next, Axis axis,
                        IndicatorMode mode) {
  const auto& marginal = stats.marginal(axis);
  const Matrix& transition = stats.transition(axis);
  if (prev >= marginal.size() || next >= marginal.size()) {
    throw Error("transition_score: class index out of range on " + std::string(to_string(axis)) +
                " axis");
  }
  const SmoothingConfig& cfg = stats.smoothing;
  const double m_prev = cfg.clamp(marginal[prev]);
  const double m_next = cfg.clamp(marginal[next]);
  const double p = mode == IndicatorMode::as_written
                       ? cfg.clamp(transition(prev, next))
                       : cfg.clamp(transition(prev, next) * marginal[prev]);
  return std::log(p / (m_prev * m_next)) / -std::log(p);
}

}  // namespace lta
