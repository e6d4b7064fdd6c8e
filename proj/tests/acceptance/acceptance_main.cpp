// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "gradcheck.hpp"
#include "lta/cooc_stats.hpp"
#include "lta/ensemble.hpp"
#include "lta/eval_metric.hpp"
#include "lta/io.hpp"
#include "lta/refine.hpp"
#include "lta/smooth_train.hpp"
#include "lta/synth.hpp"
#include "oracles.hpp"

namespace {

using namespace lta;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

LogitsTensor random_tensor(std::mt19937_64& gen, std::size_t z, std::size_t cv, std::size_t cn) {
  std::normal_distribution<double> d(0.0, 3.0);
  LogitsTensor t{"ex", Matrix(z, cv), Matrix(z, cn)};
  for (double& v : t.verb_logits.values()) v = d(gen);
  for (double& v : t.noun_logits.values()) v = d(gen);
  return t;
}

Outcome edit_distance_oracle() {
  const auto t0 = Clock::now();
  const auto all = oracle::all_sequences(4, 3);
  std::size_t pairs = 0, mismatches = 0;
  for (bool t : {false, true}) {
    for (const auto& a : all) {
      for (const auto& b : all) {
        ++pairs;
        mismatches += edit_distance(a, b, t) != oracle::recursive_edit_distance(a, b, t);
      }
    }
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < 10.0,
          fmt("%.0f pairs, %.0f mismatches, %.2f s", static_cast<double>(pairs),
              static_cast<double>(mismatches), secs)};
}

Outcome label_smoothing() {
  std::mt19937_64 gen(2);
  std::uniform_int_distribution<std::size_t> zs(1, 20), cs(1, 50);
  double worst_sum = 0.0;
  std::size_t argmax_breaks = 0, fixed_breaks = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t z = zs(gen), c = cs(gen);
    std::uniform_int_distribution<std::size_t> pick(0, c - 1);
    std::vector<std::size_t> classes(z);
    for (auto& k : classes) k = pick(gen);
    const Matrix s = smooth_labels(one_hot_rows(classes, c));
    for (std::size_t r = 0; r < z; ++r) {
      const auto row = s.row(r);
      worst_sum = std::max(worst_sum, std::abs(std::accumulate(row.begin(), row.end(), 0.0) - 1));
      for (std::size_t k = 0; k < c; ++k) argmax_breaks += k != classes[r] && row[k] >= row[classes[r]];
    }
    const std::vector<std::size_t> constant(z, pick(gen));
    const Matrix y = one_hot_rows(constant, c);
    fixed_breaks += !(smooth_labels(y) == y);
  }
  return {worst_sum <= 1e-9 && argmax_breaks == 0 && fixed_breaks == 0,
          fmt("max |row sum - 1| %.1e, argmax breaks %.0f, fixed-point breaks %.0f", worst_sum,
              static_cast<double>(argmax_breaks), static_cast<double>(fixed_breaks))};
}

Outcome gradient_check() {
  std::mt19937_64 gen(3);
  double worst[2] = {0.0, 0.0};
  for (bool smooth : {false, true}) {
    for (int point = 0; point < 20; ++point) {
      worst[smooth] = std::max(worst[smooth], oracle::grad_check_point(gen, smooth).max_rel_error);
    }
  }
  return {worst[0] <= 1e-4 && worst[1] <= 1e-4,
          fmt("max relative error one-hot %.2e, smoothed %.2e (20 points each, h=1e-5)", worst[0],
              worst[1])};
}

Outcome ensemble_identity_linearity() {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> w(-2.0, 2.0);
  bool identity = true;
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = random_tensor(gen, 20, 8, 9);
    const auto b = random_tensor(gen, 20, 8, 9);
    identity = identity && combine_logits(a, b, {1.0, 0.0}) == a;
    const EnsembleWeights w1{w(gen), w(gen)}, w2{w(gen), w(gen)};
    const auto sum = combine_logits(a, b, {w1.alpha + w2.alpha, w1.beta + w2.beta});
    const auto c1 = combine_logits(a, b, w1);
    const auto c2 = combine_logits(a, b, w2);
    for (Axis axis : {Axis::verb, Axis::noun}) {
      for (std::size_t i = 0; i < sum.axis(axis).values().size(); ++i) {
        worst = std::max(worst, std::abs(c1.axis(axis).values()[i] + c2.axis(axis).values()[i] -
                                         sum.axis(axis).values()[i]));
      }
    }
  }
  return {identity && worst <= 1e-9,
          std::string(identity ? "identity bit-exact" : "identity NOT bit-exact") +
              fmt(", max linearity error %.1e", worst)};
}

bool is_distribution(const std::vector<double>& p) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) return false;
    sum += v;
  }
  return std::abs(sum - 1.0) <= 1e-9;
}

Outcome refinement_contract() {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 1.0), scale(1e-3, 1e3);
  std::size_t bad = 0, fallbacks = 0;
  double worst_scale = 0.0;
  for (int draw = 0; draw < 10000; ++draw) {
    const std::size_t c = 2 + draw % 5;
    SmoothingConfig cfg;
    cfg.add_k = draw % 3 == 0 ? 0.0 : 1.0;
    const CoocStats s = build_stats(oracle::random_markov_corpus(gen, c, 4, 5), c, c, cfg);
    std::vector<double> p(c);
    double total = 0.0;
    for (double& v : p) total += (v = u(gen) * u(gen));
    for (double& v : p) v /= total;
    const std::size_t prev = gen() % c, noun = gen() % c;
    const IndicatorMode mode = draw % 2 ? IndicatorMode::as_written : IndicatorMode::standard_npmi;
    for (const Refined& r : {refine_noun_step(p, prev, s, mode),
                             refine_verb_step(p, prev, noun, s, mode)}) {
      fallbacks += r.fallback_used;
      bad += r.fallback_used ? !(r.probs == p) : !is_distribution(r.probs);
    }
    std::vector<double> gates(c), scaled(c);
    const double k = scale(gen);
    for (std::size_t n = 0; n < c; ++n) {
      gates[n] = std::max(0.0, transition_score(s, prev, n, Axis::verb, mode)) *
                 verb_given_noun(s, n, noun);
      scaled[n] = k * gates[n];
    }
    const auto a = apply_gates(p, gates), b = apply_gates(p, scaled);
    for (std::size_t n = 0; n < c; ++n) worst_scale = std::max(worst_scale, std::abs(a.probs[n] - b.probs[n]));
  }
  std::size_t nonzero = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const double a = 0.01 + 0.98 * u(gen), b = 0.01 + 0.98 * u(gen);
    CoocStats s;
    s.verb_marginal = {a, b};
    s.noun_marginal = {1.0};
    s.verb_transition = Matrix::from_rows({{1.0 - a * b, a * b}, {0.5, 0.5}});
    s.noun_transition = Matrix(1, 1, 1.0);
    s.verb_given_noun = Matrix::from_rows({{0.5, 0.5}});
    nonzero += transition_score(s, 0, 1, Axis::verb, IndicatorMode::as_written) != 0.0;
  }
  return {bad == 0 && worst_scale <= 1e-9 && nonzero == 0,
          fmt("20000 steps: %.0f contract violations (%.0f fallbacks); scaling error %.1e; "
              "%.0f/1000 nonzero at independence",
              static_cast<double>(bad), static_cast<double>(fallbacks), worst_scale,
              static_cast<double>(nonzero))};
}

Outcome statistics_correctness() {
  SmoothingConfig raw;
  raw.add_k = 0.0;
  const std::vector<ActionSequence> two{{"ep", {{0, 0}, {1, 0}}}};
  const CoocStats s0 = build_stats(two, 2, 1, raw);
  const CoocStats s1 = build_stats(two, 2, 1);
  bool examples = s0.verb_marginal == std::vector<double>{0.5, 0.5} &&
                  s0.verb_transition(0, 0) == 0.0 && s0.verb_transition(0, 1) == 1.0 &&
                  s0.verb_given_noun(0, 0) == 0.5 && s0.verb_given_noun(0, 1) == 0.5 &&
                  s1.verb_transition(0, 0) == 1.0 / 3.0 && s1.verb_transition(0, 1) == 2.0 / 3.0;
  const CoocStats single = build_stats({{"a", {{0, 0}, {0, 0}, {0, 0}}}}, 3, 2, raw);
  examples = examples && single.verb_marginal == std::vector<double>{1.0, 0.0, 0.0} &&
             single.verb_transition(0, 0) == 1.0;
  const CoocStats only = build_stats({{"a", {{1, 0}, {1, 0}}}}, 2, 1, raw);
  examples = examples && verb_given_noun(only, 1, 0) == 1.0;

  std::mt19937_64 gen(6);
  bool rows = true, order = true;
  for (int trial = 0; trial < 100; ++trial) {
    auto corpus = oracle::random_markov_corpus(gen, 2 + trial % 6, 20, 8);
    const std::size_t c = 2 + trial % 6;
    SmoothingConfig cfg;
    cfg.add_k = (trial % 3) * 0.5;
    const CoocStats s = build_stats(corpus, c, c, cfg);
    try {
      s.check();
    } catch (const Error&) {
      rows = false;
    }
    std::shuffle(corpus.begin(), corpus.end(), gen);
    const CoocStats t = build_stats(corpus, c, c, cfg);
    order = order && t.verb_marginal == s.verb_marginal && t.noun_marginal == s.noun_marginal &&
            t.verb_transition == s.verb_transition && t.noun_transition == s.noun_transition &&
            t.verb_given_noun == s.verb_given_noun;
  }
  return {examples && rows && order,
          std::string("hand-counted examples ") + (examples ? "exact" : "WRONG") +
              ", row sums " + (rows ? "ok" : "off") + ", order invariance " +
              (order ? "ok" : "broken")};
}

Outcome synthetic_direction() {
  const auto t0 = Clock::now();
  auto make = [](double mass, double coupling) {
    SynthConfig cfg;
    cfg.num_verbs = cfg.num_nouns = 10;
    cfg.num_sequences = 200;
    cfg.seq_len = 20;
    cfg.transition_sharpness = sharpness_for_mass(mass, 10);
    cfg.verb_noun_coupling = coupling;
    cfg.logit_noise_sigma = 1.0;
    cfg.logit_scale = 1.0;
    cfg.rng_seed = 2024;
    return cfg;
  };
  PredictionConfig pred;
  pred.steps = 20;
  pred.patterns = 5;
  pred.rng_seed = 7;
  const auto strong = run_refinement_experiment(make(0.9, 0.9), pred);
  const auto none = run_refinement_experiment(make(0.1, 0.0), pred);
  const double secs = seconds_since(t0);
  const bool pass = strong.raw_argmax.n_examples == 100 && strong.delta_full_action > 0.0 &&
                    strong.delta_action > 0.0 && std::abs(none.delta_full_action) < 0.05 &&
                    std::abs(none.delta_action) < 0.05 && secs < 120.0;
  return {pass, fmt("planted: raw %.4f, refined top-1 %.4f, K=5 set %.4f; ",
                    strong.raw_argmax.ed_action, strong.refined_argmax.ed_action,
                    strong.full_set.ed_action) +
                    fmt("unplanted deltas top-1 %+.4f, K=5 set %+.4f; %.2f s", none.delta_action,
                        none.delta_full_action, secs)};
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "lta");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  if (code != 0) std::fprintf(stderr, "%s", err.str().c_str());
  return code;
}

Outcome pipeline_determinism() {
  const fs::path root = fs::temp_directory_path() / "lta_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);
  io::write_file_atomic(root / "synth.json",
                        R"({"num_verbs": 10, "num_nouns": 10, "num_sequences": 200,
                            "seq_len": 20, "designated_mass": 0.9, "verb_noun_coupling": 0.9,
                            "logit_noise_sigma": 1.0, "rng_seed": 11, "z": 20})");
  std::string digests[2][2];
  for (int run = 0; run < 2; ++run) {
    const fs::path d = root / ("run" + std::to_string(run));
    auto p = [&](const char* f) { return (d / f).string(); };
    int rc = cli({"--quiet", "--seed", "5", "synth", "gen", "--config",
                  (root / "synth.json").string(), "--out-dir", d.string()});
    rc = rc ? rc : cli({"--quiet", "stats", "--verbs", p("verbs.json"), "--nouns", p("nouns.json"),
                        "--train", p("train.jsonl"), "--out", p("stats.json")});
    rc = rc ? rc : cli({"--quiet", "--seed", "5", "refine", "--stats", p("stats.json"), "--logits",
                        p("logits.jsonl"), "--z", "20", "--k", "5", "--out", p("preds.jsonl")});
    rc = rc ? rc : cli({"--quiet", "eval", "--preds", p("preds.jsonl"), "--truth",
                        p("truth.jsonl"), "--out", p("report.json")});
    if (rc != 0) return {false, "pipeline run " + std::to_string(run) + " failed"};
    digests[run][0] = io::file_sha256(p("preds.jsonl"));
    digests[run][1] = io::file_sha256(p("report.json"));
  }
  fs::remove_all(root);
  const bool same = digests[0][0] == digests[1][0] && digests[0][1] == digests[1][1];
  return {same, "predictions sha256 " + digests[0][0].substr(0, 12) + (same ? " == " : " != ") +
                    digests[1][0].substr(0, 12) + ", report sha256 " +
                    digests[0][1].substr(0, 12) + (same ? " == " : " != ") +
                    digests[1][1].substr(0, 12)};
}

Outcome min_over_k_monotone() {
  std::mt19937_64 gen(9);
  std::size_t increases = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t z = 1 + trial % 20, c = 2 + trial % 5;
    std::uniform_int_distribution<std::size_t> pick(0, c - 1);
    auto random_actions = [&] {
      std::vector<Action> a(z);
      for (auto& x : a) x = {pick(gen), pick(gen)};
      return a;
    };
    const ActionSequence truth{"t", random_actions()};
    PredictionSet preds{"t", {random_actions()}, {Tier::raw_argmax}};
    for (MatchAxis axis : {MatchAxis::verb, MatchAxis::noun, MatchAxis::action}) {
      PredictionSet grow = preds;
      double last = ed_at_k(grow, truth, axis);
      for (int k = 0; k < 5; ++k) {
        grow.patterns.push_back(random_actions());
        grow.tiers.push_back(Tier::refined_sampled);
        const double now = ed_at_k(grow, truth, axis);
        increases += now > last;
        last = now;
      }
    }
  }
  return {increases == 0, fmt("%.0f increases over 1000 cases x 3 axes x 5 appends",
                              static_cast<double>(increases))};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"edit-distance oracle equivalence", edit_distance_oracle},
      {"label-smoothing invariants", label_smoothing},
      {"gradient check", gradient_check},
      {"ensemble identity and linearity", ensemble_identity_linearity},
      {"refinement distribution contract", refinement_contract},
      {"statistics correctness", statistics_correctness},
      {"directional synthetic claim", synthetic_direction},
      {"pipeline determinism", pipeline_determinism},
      {"min-over-K monotonicity", min_over_k_monotone},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("[%s] %zu. %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str());
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed;
}
