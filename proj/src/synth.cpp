#include "lta/synth.hpp"

#include <cmath>
#include <cstdio>

namespace lta {

namespace {

// Stream index reserved for drawing the planted tables; sequences use 0..N-1.
constexpr std::uint64_t kTableStream = ~std::uint64_t{0};

Matrix planted_transition(std::span<const std::size_t> successor, double sharpness) {
  const std::size_t c = successor.size();
  Matrix t(c, c);
  const double denom = sharpness + static_cast<double>(c - 1);
  for (std::size_t r = 0; r < c; ++r) {
    for (std::size_t k = 0; k < c; ++k) t(r, k) = (k == successor[r] ? sharpness : 1.0) / denom;
  }
  return t;
}

Matrix planted_verb_given_noun(std::span<const std::size_t> noun_verb, std::size_t num_verbs,
                               double coupling) {
  Matrix g(noun_verb.size(), num_verbs);
  const double base = (1.0 - coupling) / static_cast<double>(num_verbs);
  for (std::size_t n = 0; n < noun_verb.size(); ++n) {
    for (std::size_t v = 0; v < num_verbs; ++v) g(n, v) = base + (v == noun_verb[n] ? coupling : 0.0);
  }
  return g;
}

// Unnormalized verb weights for the step after `prev_verb` when the noun is `noun`.
void verb_weights(const PlantedStructure& p, std::size_t prev_verb, std::size_t noun,
                  std::span<double> out) {
  for (std::size_t v = 0; v < out.size(); ++v) {
    out[v] = p.verb_transition(prev_verb, v) * p.verb_given_noun(noun, v);
  }
}

void normalize_rows_or_uniform(Matrix& m) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    double sum = 0.0;
    for (double v : row) sum += v;
    for (double& v : row) v = sum > 0.0 ? v / sum : 1.0 / static_cast<double>(row.size());
  }
}

// Exact position-pooled statistics of the generating process, by forward
// propagation of the (verb, noun) state distribution.
CoocStats expected_stats(const PlantedStructure& p, std::size_t seq_len) {
  const std::size_t nv = p.verb_transition.rows();
  const std::size_t nn = p.noun_transition.rows();
  Matrix state(nv, nn);  // P(v_z = v, n_z = n)
  for (std::size_t n = 0; n < nn; ++n) {
    for (std::size_t v = 0; v < nv; ++v) {
      state(v, n) = p.verb_given_noun(n, v) / static_cast<double>(nn);
    }
  }
  Matrix unigram(nv, nn);
  Matrix verb_bigram(nv, nv);
  Matrix noun_bigram(nn, nn);
  std::vector<double> w(nv);
  for (std::size_t z = 0; z < seq_len; ++z) {
    for (std::size_t i = 0; i < state.values().size(); ++i) {
      unigram.values()[i] += state.values()[i];
    }
    if (z + 1 == seq_len) break;
    Matrix next(nv, nn);
    for (std::size_t a = 0; a < nv; ++a) {
      for (std::size_t m = 0; m < nn; ++m) {
        const double mass = state(a, m);
        if (mass == 0.0) continue;
        for (std::size_t n = 0; n < nn; ++n) {
          const double pn = mass * p.noun_transition(m, n);
          if (pn == 0.0) continue;
          verb_weights(p, a, n, w);
          double total = 0.0;
          for (double x : w) total += x;
          for (std::size_t b = 0; b < nv; ++b) {
            const double q = pn * w[b] / total;
            next(b, n) += q;
            verb_bigram(a, b) += q;
            noun_bigram(m, n) += q;
          }
        }
      }
    }
    state = std::move(next);
  }

  CoocStats s;
  s.smoothing.add_k = 0.0;
  s.corpus_fingerprint = "planted";
  const double len = static_cast<double>(seq_len);
  s.verb_marginal.assign(nv, 0.0);
  s.noun_marginal.assign(nn, 0.0);
  s.verb_given_noun = Matrix(nn, nv);
  for (std::size_t v = 0; v < nv; ++v) {
    for (std::size_t n = 0; n < nn; ++n) {
      s.verb_marginal[v] += unigram(v, n) / len;
      s.noun_marginal[n] += unigram(v, n) / len;
      s.verb_given_noun(n, v) = unigram(v, n);
    }
  }
  normalize_rows_or_uniform(s.verb_given_noun);
  normalize_rows_or_uniform(verb_bigram);
  normalize_rows_or_uniform(noun_bigram);
  s.verb_transition = std::move(verb_bigram);
  s.noun_transition = std::move(noun_bigram);
  return s;
}

}  // namespace

void SynthConfig::check() const {
  if (num_verbs == 0 || num_nouns == 0 || num_sequences == 0) {
    throw Error("synth: class and sequence counts must be at least 1");
  }
  if (seq_len < 2) throw Error("synth: seq_len must be at least 2");
  if (!(transition_sharpness >= 1.0) || !std::isfinite(transition_sharpness)) {
    throw Error("synth: transition_sharpness must be a finite value >= 1");
  }
  if (!(verb_noun_coupling >= 0.0 && verb_noun_coupling <= 1.0)) {
    throw Error("synth: verb_noun_coupling must lie in [0, 1]");
  }
  if (!(logit_noise_sigma >= 0.0)) throw Error("synth: logit_noise_sigma must be >= 0");
  if (!(logit_scale > 0.0)) throw Error("synth: logit_scale must be positive");
}

double sharpness_for_mass(double mass, std::size_t num_classes) {
  if (num_classes < 2) return 1.0;
  const double others = static_cast<double>(num_classes - 1);
  if (!(mass >= 1.0 / static_cast<double>(num_classes) && mass < 1.0)) {
    throw Error("designated mass must lie in [1/C, 1)");
  }
  return mass * others / (1.0 - mass);
}

SynthCorpus gen_markov_corpus(const SynthConfig& cfg) {
  cfg.check();
  SynthCorpus out;
  PlantedStructure& p = out.planted;

  CounterRng tables(derive_seed(cfg.rng_seed, kTableStream));
  p.verb_successor.resize(cfg.num_verbs);
  p.noun_successor.resize(cfg.num_nouns);
  p.noun_verb.resize(cfg.num_nouns);
  for (auto& s : p.verb_successor) s = tables.below(cfg.num_verbs);
  for (auto& s : p.noun_successor) s = tables.below(cfg.num_nouns);
  for (auto& s : p.noun_verb) s = tables.below(cfg.num_verbs);
  p.verb_transition = planted_transition(p.verb_successor, cfg.transition_sharpness);
  p.noun_transition = planted_transition(p.noun_successor, cfg.transition_sharpness);
  p.verb_given_noun = planted_verb_given_noun(p.noun_verb, cfg.num_verbs, cfg.verb_noun_coupling);

  const std::vector<double> uniform_nouns(cfg.num_nouns, 1.0 / static_cast<double>(cfg.num_nouns));
  std::vector<double> w(cfg.num_verbs);
  out.corpus.reserve(cfg.num_sequences);
  for (std::size_t i = 0; i < cfg.num_sequences; ++i) {
    CounterRng rng(derive_seed(cfg.rng_seed, i));
    char id[32];
    std::snprintf(id, sizeof id, "synth-%06zu", i);
    ActionSequence seq{id, {}};
    seq.actions.reserve(cfg.seq_len);
    Action a;
    a.noun = sample_index(uniform_nouns, rng.uniform());
    a.verb = sample_index(p.verb_given_noun.row(a.noun), rng.uniform());
    seq.actions.push_back(a);
    for (std::size_t z = 1; z < cfg.seq_len; ++z) {
      Action next;
      next.noun = sample_index(p.noun_transition.row(a.noun), rng.uniform());
      verb_weights(p, a.verb, next.noun, w);
      next.verb = sample_index(w, rng.uniform());
      seq.actions.push_back(next);
      a = next;
    }
    out.corpus.push_back(std::move(seq));
  }
  p.expected = expected_stats(p, cfg.seq_len);
  return out;
}

LogitsTensor corrupt_to_logits(const ActionSequence& truth, std::size_t num_verbs,
                               std::size_t num_nouns, double sigma, double scale,
                               std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw Error("corrupt_to_logits: sigma must be >= 0");
  if (!(scale > 0.0)) throw Error("corrupt_to_logits: scale must be positive");
  const std::size_t steps = truth.actions.size();
  LogitsTensor t{truth.episode_id, Matrix(steps, num_verbs), Matrix(steps, num_nouns)};
  CounterRng rng(seed);
  for (std::size_t z = 0; z < steps; ++z) {
    for (std::size_t c = 0; c < num_verbs; ++c) {
      t.verb_logits(z, c) = (c == truth.actions[z].verb ? scale : 0.0) + sigma * rng.normal();
    }
  }
  for (std::size_t z = 0; z < steps; ++z) {
    for (std::size_t c = 0; c < num_nouns; ++c) {
      t.noun_logits(z, c) = (c == truth.actions[z].noun ? scale : 0.0) + sigma * rng.normal();
    }
  }
  return t;
}

SplitCorpus split_by_parity(const std::vector<ActionSequence>& corpus) {
  SplitCorpus s;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    (i % 2 == 0 ? s.train : s.eval).push_back(corpus[i]);
  }
  return s;
}

std::vector<ActionSequence> eval_truths(const std::vector<ActionSequence>& eval,
                                        std::size_t steps) {
  std::vector<ActionSequence> out;
  out.reserve(eval.size());
  for (const auto& seq : eval) {
    if (seq.actions.size() < steps) {
      throw Error("episode '" + seq.episode_id + "' has " + std::to_string(seq.actions.size()) +
                  " actions, fewer than Z = " + std::to_string(steps));
    }
    out.push_back({seq.episode_id,
                   std::vector<Action>(seq.actions.end() - static_cast<std::ptrdiff_t>(steps),
                                       seq.actions.end())});
  }
  return out;
}

ExperimentReport run_refinement_experiment(const SynthConfig& cfg,
                                           const PredictionConfig& pred_cfg,
                                           const SmoothingConfig& smoothing) {
  cfg.check();
  pred_cfg.check();
  if (pred_cfg.patterns < 2) throw Error("experiment needs K >= 2 to compare tiers");

  const SynthCorpus synth = gen_markov_corpus(cfg);
  const SplitCorpus split = split_by_parity(synth.corpus);
  if (split.eval.empty()) throw Error("experiment needs at least two sequences");
  const CoocStats stats = build_stats(split.train, cfg.num_verbs, cfg.num_nouns, smoothing);
  const std::vector<ActionSequence> truths = eval_truths(split.eval, pred_cfg.steps);

  std::vector<PredictionSet> raw, refined, full;
  ExperimentReport report;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    EpisodeRow row;
    row.episode_id = truths[i].episode_id;
    row.logits_seed = logits_seed(cfg.rng_seed, i);
    row.pattern_seed = derive_seed(pred_cfg.rng_seed, i);
    const LogitsTensor logits = corrupt_to_logits(truths[i], cfg.num_verbs, cfg.num_nouns,
                                                  cfg.logit_noise_sigma, cfg.logit_scale,
                                                  row.logits_seed);
    PredictionConfig pc = pred_cfg;
    pc.rng_seed = row.pattern_seed;
    PredictionSet set = generate_patterns(softmax_rows(logits), stats, pc);
    raw.push_back({set.example_id, {set.patterns[0]}, {set.tiers[0]}});
    refined.push_back({set.example_id, {set.patterns[1]}, {set.tiers[1]}});
    full.push_back(std::move(set));
    report.episodes.push_back(std::move(row));
  }

  const auto keyed = key_by_episode(truths);
  const EvalFlags flags{true, true};
  report.raw_argmax = evaluate_corpus(raw, keyed, flags);
  report.refined_argmax = evaluate_corpus(refined, keyed, flags);
  report.full_set = evaluate_corpus(full, keyed, flags);
  for (std::size_t i = 0; i < report.episodes.size(); ++i) {
    report.episodes[i].raw_action = report.raw_argmax.per_example[i].action;
    report.episodes[i].refined_action = report.refined_argmax.per_example[i].action;
    report.episodes[i].full_action = report.full_set.per_example[i].action;
  }
  report.delta_action = report.raw_argmax.ed_action - report.refined_argmax.ed_action;
  report.delta_full_action = report.raw_argmax.ed_action - report.full_set.ed_action;
  return report;
}

}  // namespace lta
