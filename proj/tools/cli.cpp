#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>

#include "lta/cooc_stats.hpp"
#include "lta/ensemble.hpp"
#include "lta/eval_metric.hpp"
#include "lta/io.hpp"
#include "lta/refine.hpp"
#include "lta/rng.hpp"
#include "lta/smooth_train.hpp"
#include "lta/synth.hpp"

namespace lta::cli {

namespace {

using io::json;
namespace fs = std::filesystem;

struct Globals {
  std::uint64_t seed = 0;
  bool quiet = false;
  std::string manifest;
};

/// Records inputs, outputs and configuration of one command run.
class Manifest {
 public:
  explicit Manifest(std::string command) { doc_["command"] = std::move(command); }

  void input(const std::string& role, const fs::path& path) {
    doc_["inputs"][role] = {{"path", path.string()}, {"sha256", io::file_sha256(path)}};
  }
  void output(const std::string& role, const fs::path& path) {
    doc_["outputs"][role] = {{"path", path.string()}, {"sha256", io::file_sha256(path)}};
  }
  json& config() { return doc_["config"]; }

  void write(const fs::path& path) const {
    io::write_file_atomic(path, doc_.dump(2) + "\n");
  }

 private:
  json doc_ = json::object();
};

void finish_manifest(const Manifest& m, const Globals& g, const std::string& fallback = {}) {
  if (!g.manifest.empty()) {
    m.write(g.manifest);
  } else if (!fallback.empty()) {
    m.write(fallback);
  }
}

std::string format4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

template <typename T>
std::string to_jsonl(const std::vector<T>& items) {
  std::string out;
  for (const auto& item : items) out += io::dump_line(io::to_json(item));
  return out;
}

// ---------------------------------------------------------------------------
// stats

struct StatsArgs {
  std::string verbs, nouns, train, val, out;
  SmoothingConfig smoothing;
  std::string empty_rows = "uniform";
};

int cmd_stats(const StatsArgs& a, const Globals& g, std::ostream& out) {
  const Vocabulary verbs = io::read_vocabulary(a.verbs);
  const Vocabulary nouns = io::read_vocabulary(a.nouns);
  std::vector<ActionSequence> corpus = io::read_corpus(a.train);
  if (!a.val.empty()) {
    auto val = io::read_corpus(a.val);
    corpus.insert(corpus.end(), std::make_move_iterator(val.begin()),
                  std::make_move_iterator(val.end()));
  }
  SmoothingConfig cfg = a.smoothing;
  cfg.empty_rows = a.empty_rows == "error" ? EmptyRowPolicy::error : EmptyRowPolicy::uniform;

  const CoocStats stats = build_stats(corpus, verbs, nouns, cfg);
  io::write_file_atomic(a.out, io::to_json(stats).dump() + "\n");

  const CoocCounts counts = count_corpus(corpus, verbs.size(), nouns.size());
  if (!g.quiet) {
    out << "verbs: " << verbs.size() << "  nouns: " << nouns.size()
        << "  sequences: " << counts.num_sequences << "  actions: " << counts.num_actions
        << "  bigrams: " << counts.num_bigrams << "\n";
  }

  Manifest m("stats");
  m.input("verbs", a.verbs);
  m.input("nouns", a.nouns);
  m.input("train", a.train);
  if (!a.val.empty()) m.input("val", a.val);
  m.config() = io::to_json(stats)["smoothing"];
  m.output("stats", a.out);
  finish_manifest(m, g);
  return 0;
}

// ---------------------------------------------------------------------------
// ensemble

struct EnsembleArgs {
  std::string a, b, out, truth;
  EnsembleWeights weights;
  bool sweep = false;
  double step = 0.1;
  double max_weight = 2.0;
  bool allow_transposition = true;
};

std::vector<LogitsTensor> combine_files(const std::vector<LogitsTensor>& a,
                                        const std::vector<LogitsTensor>& b,
                                        const EnsembleWeights& w) {
  if (a.size() != b.size()) {
    throw Error("logits files hold " + std::to_string(a.size()) + " and " +
                std::to_string(b.size()) + " examples");
  }
  std::vector<LogitsTensor> out;
  out.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(combine_logits(a[i], b[i], w));
  return out;
}

PredictionSet argmax_set(const LogitsTensor& t) {
  PredictionConfig pc;
  pc.steps = t.steps();
  pc.patterns = 1;
  return generate_patterns(softmax_rows(t), CoocStats{}, pc);
}

int cmd_ensemble(const EnsembleArgs& args, const Globals& g, std::ostream& out) {
  const auto a = io::read_logits(args.a);
  const auto b = io::read_logits(args.b);
  Manifest m("ensemble");
  m.input("a", args.a);
  m.input("b", args.b);

  if (!args.sweep) {
    io::write_file_atomic(args.out, to_jsonl(combine_files(a, b, args.weights)));
    m.config() = {{"alpha", args.weights.alpha}, {"beta", args.weights.beta}};
    m.output("logits", args.out);
    finish_manifest(m, g);
    return 0;
  }

  // Grid sweep scored by argmax decoding (K = 1) against the truth corpus.
  if (args.truth.empty()) throw Error("--sweep needs --truth");
  if (!(args.step > 0.0)) throw Error("--step must be positive");
  const auto truths = key_by_episode(io::read_corpus(args.truth));
  m.input("truth", args.truth);
  const auto n_steps = static_cast<std::size_t>(std::floor(args.max_weight / args.step + 1e-9));
  json grid = json::array();
  json best;
  for (std::size_t i = 0; i <= n_steps; ++i) {
    for (std::size_t j = 0; j <= n_steps; ++j) {
      const EnsembleWeights w{static_cast<double>(i) * args.step,
                              static_cast<double>(j) * args.step};
      if (w.alpha == 0.0 && w.beta == 0.0) continue;
      std::vector<PredictionSet> preds;
      for (const auto& t : combine_files(a, b, w)) preds.push_back(argmax_set(t));
      const EvalReport r = evaluate_corpus(preds, truths, {args.allow_transposition, false});
      json row = {{"alpha", w.alpha},
                  {"beta", w.beta},
                  {"ed_verb", r.ed_verb},
                  {"ed_noun", r.ed_noun},
                  {"ed_action", r.ed_action}};
      if (best.is_null() || r.ed_action < best["ed_action"].get<double>()) best = row;
      grid.push_back(std::move(row));
    }
  }
  io::write_file_atomic(args.out, json{{"grid", grid}, {"best", best}}.dump(2) + "\n");
  if (!g.quiet) {
    out << "best alpha=" << best["alpha"].get<double>() << " beta=" << best["beta"].get<double>()
        << "  action ED " << format4(best["ed_action"].get<double>()) << "\n";
  }
  m.config() = {{"sweep_step", args.step}, {"sweep_max", args.max_weight}};
  m.output("sweep", args.out);
  finish_manifest(m, g);
  return 0;
}

// ---------------------------------------------------------------------------
// refine / pipeline

struct RefineArgs {
  std::string stats, logits, logits_b, out, mode = "as_written", seed_action;
  EnsembleWeights weights;
  std::size_t steps = 20;
  std::size_t patterns = 5;
};

std::optional<Action> parse_seed_action(const std::string& s) {
  if (s.empty()) return std::nullopt;
  unsigned long v = 0, n = 0;
  char tail = 0;
  if (std::sscanf(s.c_str(), "%lu,%lu%c", &v, &n, &tail) != 2) {
    throw Error("--seed-action expects VERB,NOUN");
  }
  return Action{v, n};
}

int cmd_refine(const RefineArgs& a, const Globals& g, std::ostream& out) {
  PredictionConfig cfg;
  cfg.steps = a.steps;
  cfg.patterns = a.patterns;
  cfg.mode = indicator_mode_from_string(a.mode);
  cfg.first_step_seed = parse_seed_action(a.seed_action);
  cfg.check();

  Manifest m("refine");
  CoocStats stats;
  if (cfg.patterns >= 2) {
    if (a.stats.empty()) throw Error("refinement (K >= 2) requires --stats");
    stats = io::read_stats(a.stats);
    m.input("stats", a.stats);
  }

  std::vector<LogitsTensor> logits = io::read_logits(a.logits);
  m.input("logits", a.logits);
  if (!a.logits_b.empty()) {
    logits = combine_files(logits, io::read_logits(a.logits_b), a.weights);
    m.input("logits_b", a.logits_b);
  }

  std::vector<PredictionSet> preds;
  preds.reserve(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (logits[i].steps() != cfg.steps) {
      throw Error("'" + logits[i].example_id + "': logits have " +
                  std::to_string(logits[i].steps()) + " steps, --z is " +
                  std::to_string(cfg.steps));
    }
    PredictionConfig pc = cfg;
    pc.rng_seed = derive_seed(g.seed, i);
    preds.push_back(generate_patterns(softmax_rows(logits[i]), stats, pc));
  }
  io::write_file_atomic(a.out, to_jsonl(preds));
  if (!g.quiet) out << "wrote " << preds.size() << " prediction sets to " << a.out << "\n";

  json& c = m.config();
  c["z"] = cfg.steps;
  c["k"] = cfg.patterns;
  c["mode"] = std::string(to_string(cfg.mode));
  c["seed"] = g.seed;
  c["per_example_seed"] = "derive_seed(seed, line_index)";
  c["first_step"] = a.seed_action.empty() ? "unrefined" : "seed_action " + a.seed_action;
  if (!a.logits_b.empty()) c["ensemble"] = {{"alpha", a.weights.alpha}, {"beta", a.weights.beta}};
  m.output("predictions", a.out);
  finish_manifest(m, g, a.out + ".manifest.json");
  return 0;
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
  std::string data, out, smooth = "off", verbs, nouns, emit_logits, history;
  std::size_t steps = 0;
  std::size_t num_verbs = 0, num_nouns = 0;
  double init_scale = 0.01;
  TrainConfig cfg;
};

int cmd_train(const TrainArgs& a, const Globals& g, std::ostream& out) {
  const auto records = io::read_train_data(a.data);
  if (records.empty()) throw Error("empty dataset");
  std::size_t nv = a.num_verbs, nn = a.num_nouns;
  if (!a.verbs.empty()) nv = io::read_vocabulary(a.verbs).size();
  if (!a.nouns.empty()) nn = io::read_vocabulary(a.nouns).size();
  std::size_t max_v = 0, max_n = 0;
  std::vector<TrainExample> dataset;
  for (const auto& r : records) {
    for (const Action& act : r.example.target.actions) {
      max_v = std::max(max_v, act.verb);
      max_n = std::max(max_n, act.noun);
    }
    dataset.push_back(r.example);
  }
  if (nv == 0) nv = max_v + 1;
  if (nn == 0) nn = max_n + 1;
  for (const auto& r : records) {
    auto v = validate_sequence(r.example.target, nv, nn);
    if (!v.ok()) throw Error("invalid training " + v.describe(r.example_id));
  }

  TrainConfig cfg = a.cfg;
  cfg.use_label_smoothing = a.smooth == "on";
  cfg.rng_seed = g.seed;
  const std::size_t feature_dim = dataset.front().features.size();
  MultiHeadDecoder init = MultiHeadDecoder::random(feature_dim, a.steps, nv, nn,
                                                   derive_seed(g.seed, 0x696e6974), a.init_scale);
  const TrainResult result = train(std::move(init), dataset, cfg);
  io::write_file_atomic(a.out, io::to_json(result.decoder).dump() + "\n");

  Manifest m("train");
  m.input("data", a.data);
  m.config() = {{"z", a.steps},
                {"smooth", a.smooth},
                {"learning_rate", cfg.learning_rate},
                {"epochs", cfg.epochs},
                {"batch_size", cfg.batch_size},
                {"init_scale", a.init_scale},
                {"seed", g.seed},
                {"num_verbs", nv},
                {"num_nouns", nn}};
  m.output("checkpoint", a.out);
  if (!a.history.empty()) {
    io::write_file_atomic(a.history, json{{"loss_history", result.loss_history}}.dump() + "\n");
    m.output("history", a.history);
  }
  if (!a.emit_logits.empty()) {
    std::vector<LogitsTensor> logits;
    for (const auto& r : records) {
      LogitsTensor t = decoder_forward(result.decoder, r.example.features);
      t.example_id = r.example_id;
      logits.push_back(std::move(t));
    }
    io::write_file_atomic(a.emit_logits, to_jsonl(logits));
    m.output("logits", a.emit_logits);
  }
  if (!g.quiet) {
    out << "epochs: " << result.loss_history.size()
        << "  loss first: " << format4(result.loss_history.front())
        << "  last: " << format4(result.loss_history.back()) << "\n";
  }
  finish_manifest(m, g);
  return 0;
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
  std::string preds, truth, out;
  bool no_transposition = false;
  bool per_example = false;
};

int cmd_eval(const EvalArgs& a, const Globals& g, std::ostream& out, std::ostream& err) {
  const auto preds = io::read_predictions(a.preds);
  const auto truths = key_by_episode(io::read_corpus(a.truth));
  const EvalReport r = evaluate_corpus(preds, truths, {!a.no_transposition, a.per_example});
  io::write_file_atomic(a.out, io::to_json(r).dump(2) + "\n");
  if (r.unmatched > 0) {
    err << "warning: " << r.unmatched << " prediction(s) had no ground truth and were skipped\n";
  }
  if (!g.quiet) {
    out << "Verb    Noun    Action  (n=" << r.n_examples << ")\n"
        << format4(r.ed_verb) << "  " << format4(r.ed_noun) << "  " << format4(r.ed_action)
        << "\n";
  }
  Manifest m("eval");
  m.input("predictions", a.preds);
  m.input("truth", a.truth);
  m.config() = {{"allow_transposition", !a.no_transposition}, {"per_example", a.per_example}};
  m.output("report", a.out);
  finish_manifest(m, g);
  return 0;
}

// ---------------------------------------------------------------------------
// synth

struct SynthRun {
  SynthConfig synth;
  PredictionConfig pred;
  SmoothingConfig smoothing;
};

SynthRun synth_from_json(const json& j, std::uint64_t default_seed) {
  SynthRun r;
  SynthConfig& c = r.synth;
  c.num_verbs = j.value("num_verbs", c.num_verbs);
  c.num_nouns = j.value("num_nouns", c.num_nouns);
  c.num_sequences = j.value("num_sequences", c.num_sequences);
  c.seq_len = j.value("seq_len", c.seq_len);
  c.verb_noun_coupling = j.value("verb_noun_coupling", c.verb_noun_coupling);
  c.logit_noise_sigma = j.value("logit_noise_sigma", c.logit_noise_sigma);
  c.logit_scale = j.value("logit_scale", c.logit_scale);
  c.rng_seed = j.value("rng_seed", default_seed);
  if (j.contains("designated_mass")) {
    if (c.num_verbs != c.num_nouns) {
      throw Error("designated_mass needs num_verbs == num_nouns; give transition_sharpness");
    }
    c.transition_sharpness = sharpness_for_mass(j["designated_mass"].get<double>(), c.num_nouns);
  } else {
    c.transition_sharpness = j.value("transition_sharpness", c.transition_sharpness);
  }
  r.pred.steps = j.value("z", std::size_t{20});
  r.pred.patterns = j.value("k", std::size_t{5});
  r.pred.rng_seed = j.value("pattern_seed", c.rng_seed);
  r.pred.mode = indicator_mode_from_string(j.value("mode", std::string("as_written")));
  r.smoothing.add_k = j.value("add_k", r.smoothing.add_k);
  c.check();
  r.pred.check();
  return r;
}

json config_to_json(const SynthRun& r) {
  return {{"num_verbs", r.synth.num_verbs},
          {"num_nouns", r.synth.num_nouns},
          {"num_sequences", r.synth.num_sequences},
          {"seq_len", r.synth.seq_len},
          {"transition_sharpness", r.synth.transition_sharpness},
          {"verb_noun_coupling", r.synth.verb_noun_coupling},
          {"logit_noise_sigma", r.synth.logit_noise_sigma},
          {"logit_scale", r.synth.logit_scale},
          {"rng_seed", r.synth.rng_seed},
          {"z", r.pred.steps},
          {"k", r.pred.patterns},
          {"pattern_seed", r.pred.rng_seed},
          {"mode", std::string(to_string(r.pred.mode))},
          {"add_k", r.smoothing.add_k}};
}

std::vector<std::string> class_names(const char* prefix, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

struct SynthArgs {
  std::string config, out_dir, out;
};

int cmd_synth_gen(const SynthArgs& a, const Globals& g, std::ostream& out) {
  const SynthRun run = synth_from_json(json::parse(io::read_file(a.config)), g.seed);
  const SynthCorpus gen = gen_markov_corpus(run.synth);
  const SplitCorpus split = split_by_parity(gen.corpus);
  const auto truths = eval_truths(split.eval, run.pred.steps);

  std::vector<LogitsTensor> logits;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    logits.push_back(corrupt_to_logits(truths[i], run.synth.num_verbs, run.synth.num_nouns,
                                       run.synth.logit_noise_sigma, run.synth.logit_scale,
                                       logits_seed(run.synth.rng_seed, i)));
  }

  const fs::path dir = a.out_dir;
  fs::create_directories(dir);
  const std::map<std::string, std::string> files = {
      {"verbs", io::to_json(Vocabulary(Axis::verb, class_names("verb", run.synth.num_verbs)))
                    .dump() + "\n"},
      {"nouns", io::to_json(Vocabulary(Axis::noun, class_names("noun", run.synth.num_nouns)))
                    .dump() + "\n"},
      {"corpus", io::corpus_to_jsonl(gen.corpus)},
      {"train", io::corpus_to_jsonl(split.train)},
      {"truth", io::corpus_to_jsonl(truths)},
      {"logits", to_jsonl(logits)},
      {"planted", json{{"verb_transition", io::to_json(gen.planted.verb_transition)},
                       {"noun_transition", io::to_json(gen.planted.noun_transition)},
                       {"verb_given_noun", io::to_json(gen.planted.verb_given_noun)},
                       {"verb_successor", gen.planted.verb_successor},
                       {"noun_successor", gen.planted.noun_successor},
                       {"noun_verb", gen.planted.noun_verb},
                       {"expected", io::to_json(gen.planted.expected)}}
                      .dump() + "\n"},
  };
  const std::map<std::string, std::string> names = {
      {"verbs", "verbs.json"},   {"nouns", "nouns.json"},   {"corpus", "corpus.jsonl"},
      {"train", "train.jsonl"},  {"truth", "truth.jsonl"},  {"logits", "logits.jsonl"},
      {"planted", "planted.json"}};
  Manifest m("synth gen");
  m.input("config", a.config);
  m.config() = config_to_json(run);
  for (const auto& [role, bytes] : files) {
    io::write_file_atomic(dir / names.at(role), bytes);
    m.output(role, dir / names.at(role));
  }
  if (!g.quiet) {
    out << "wrote " << gen.corpus.size() << " sequences (" << split.train.size() << " train, "
        << truths.size() << " held out) to " << dir.string() << "\n";
  }
  finish_manifest(m, g);
  return 0;
}

int cmd_synth_experiment(const SynthArgs& a, const Globals& g, std::ostream& out) {
  const SynthRun run = synth_from_json(json::parse(io::read_file(a.config)), g.seed);
  const ExperimentReport r = run_refinement_experiment(run.synth, run.pred, run.smoothing);
  auto triple = [](const EvalReport& e) {
    return json{{"ed_verb", e.ed_verb}, {"ed_noun", e.ed_noun}, {"ed_action", e.ed_action},
                {"n_examples", e.n_examples}};
  };
  json episodes = json::array();
  for (const auto& e : r.episodes) {
    episodes.push_back({{"episode_id", e.episode_id},
                        {"logits_seed", e.logits_seed},
                        {"pattern_seed", e.pattern_seed},
                        {"raw_action", e.raw_action},
                        {"refined_action", e.refined_action},
                        {"full_action", e.full_action}});
  }
  const json doc = {{"config", config_to_json(run)},
                    {"raw_argmax", triple(r.raw_argmax)},
                    {"refined_argmax", triple(r.refined_argmax)},
                    {"full_set", triple(r.full_set)},
                    {"delta_action", r.delta_action},
                    {"delta_full_action", r.delta_full_action},
                    {"episodes", episodes}};
  io::write_file_atomic(a.out, doc.dump(2) + "\n");
  if (!g.quiet) {
    out << "                Verb    Noun    Action\n";
    for (const auto& [name, e] : {std::pair<const char*, const EvalReport&>{"raw argmax    ",
                                                                             r.raw_argmax},
                                  {"refined argmax", r.refined_argmax},
                                  {"full K set    ", r.full_set}}) {
      out << name << "  " << format4(e.ed_verb) << "  " << format4(e.ed_noun) << "  "
          << format4(e.ed_action) << "\n";
    }
    out << "action delta (raw - refined): " << format4(r.delta_action) << "\n";
  }
  Manifest m("synth experiment");
  m.input("config", a.config);
  m.config() = config_to_json(run);
  m.output("report", a.out);
  finish_manifest(m, g);
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Post-hoc refinement and evaluation for long-term action anticipation"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Seed for every random stream")->capture_default_str();
  app.add_flag("--quiet", g.quiet, "Suppress progress output");
  app.add_option("--manifest", g.manifest, "Write a run manifest (JSON) to this path");

  StatsArgs stats;
  auto* stats_cmd = app.add_subcommand("stats", "Build co-occurrence statistics from a corpus");
  stats_cmd->add_option("--verbs", stats.verbs, "Verb vocabulary JSON")->required();
  stats_cmd->add_option("--nouns", stats.nouns, "Noun vocabulary JSON")->required();
  stats_cmd->add_option("--train", stats.train, "Training corpus (JSON Lines)")->required();
  stats_cmd->add_option("--val", stats.val, "Validation corpus, concatenated after --train");
  stats_cmd->add_option("--out", stats.out, "Output stats file")->required();
  stats_cmd->add_option("--add-k", stats.smoothing.add_k)->capture_default_str();
  stats_cmd->add_option("--clamp-min", stats.smoothing.prob_clamp_min)->capture_default_str();
  stats_cmd->add_option("--clamp-max", stats.smoothing.prob_clamp_max)->capture_default_str();
  stats_cmd->add_option("--empty-rows", stats.empty_rows, "uniform|error (only with --add-k 0)")
      ->check(CLI::IsMember({"uniform", "error"}))
      ->capture_default_str();

  EnsembleArgs ens;
  auto* ens_cmd = app.add_subcommand("ensemble", "Weighted sum of two logits files");
  ens_cmd->add_option("--a", ens.a, "First model's logits")->required();
  ens_cmd->add_option("--b", ens.b, "Second model's logits")->required();
  ens_cmd->add_option("--alpha", ens.weights.alpha)->capture_default_str();
  ens_cmd->add_option("--beta", ens.weights.beta)->capture_default_str();
  ens_cmd->add_option("--out", ens.out)->required();
  ens_cmd->add_flag("--sweep", ens.sweep, "Grid-search alpha/beta by argmax action ED");
  ens_cmd->add_option("--truth", ens.truth, "Truth corpus for --sweep");
  ens_cmd->add_option("--step", ens.step)->capture_default_str();
  ens_cmd->add_option("--max-weight", ens.max_weight)->capture_default_str();

  RefineArgs ref;
  auto* ref_cmd = app.add_subcommand("refine", "Softmax, refine and emit K patterns per example");
  ref_cmd->alias("pipeline");
  ref_cmd->add_option("--stats", ref.stats, "Stats file (required when K >= 2)");
  ref_cmd->add_option("--logits", ref.logits, "Logits file")->required();
  ref_cmd->add_option("--logits-b", ref.logits_b, "Second logits file; enables ensembling");
  ref_cmd->add_option("--alpha", ref.weights.alpha)->capture_default_str();
  ref_cmd->add_option("--beta", ref.weights.beta)->capture_default_str();
  ref_cmd->add_option("--z", ref.steps, "Steps per pattern")->capture_default_str();
  ref_cmd->add_option("--k", ref.patterns, "Patterns per example")->capture_default_str();
  ref_cmd->add_option("--mode", ref.mode)
      ->check(CLI::IsMember({"as_written", "standard_npmi"}))
      ->capture_default_str();
  ref_cmd->add_option("--seed-action", ref.seed_action,
                      "VERB,NOUN treated as the action before step 1");
  ref_cmd->add_option("--out", ref.out, "Predictions file")->required();

  TrainArgs tr;
  auto* tr_cmd = app.add_subcommand("train", "Train the linear multi-head decoder");
  tr_cmd->add_option("--data", tr.data, "Training data (JSON Lines)")->required();
  tr_cmd->add_option("--z", tr.steps, "Steps (heads) per axis")->required();
  tr_cmd->add_option("--smooth", tr.smooth)
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();
  tr_cmd->add_option("--out", tr.out, "Decoder checkpoint")->required();
  tr_cmd->add_option("--epochs", tr.cfg.epochs)->capture_default_str();
  tr_cmd->add_option("--lr", tr.cfg.learning_rate)->capture_default_str();
  tr_cmd->add_option("--batch", tr.cfg.batch_size)->capture_default_str();
  tr_cmd->add_option("--init-scale", tr.init_scale)->capture_default_str();
  tr_cmd->add_option("--verbs", tr.verbs, "Verb vocabulary (sets the class count)");
  tr_cmd->add_option("--nouns", tr.nouns, "Noun vocabulary (sets the class count)");
  tr_cmd->add_option("--num-verbs", tr.num_verbs, "Verb class count");
  tr_cmd->add_option("--num-nouns", tr.num_nouns, "Noun class count");
  tr_cmd->add_option("--emit-logits", tr.emit_logits, "Write trained logits for --data");
  tr_cmd->add_option("--history", tr.history, "Write the per-epoch loss history");

  EvalArgs ev;
  auto* ev_cmd = app.add_subcommand("eval", "Edit distance at (Z, K)");
  ev_cmd->add_option("--preds", ev.preds, "Predictions file")->required();
  ev_cmd->add_option("--truth", ev.truth, "Ground-truth corpus")->required();
  ev_cmd->add_option("--out", ev.out, "Report file")->required();
  ev_cmd->add_flag("--no-transposition", ev.no_transposition, "Plain Levenshtein distance");
  ev_cmd->add_flag("--per-example", ev.per_example, "Include per-example scores");

  SynthArgs sy;
  auto* sy_cmd = app.add_subcommand("synth", "Synthetic data with planted structure");
  sy_cmd->require_subcommand(1);
  auto* gen_cmd = sy_cmd->add_subcommand("gen", "Write corpus, truth and logits files");
  gen_cmd->add_option("--config", sy.config)->required();
  gen_cmd->add_option("--out-dir", sy.out_dir)->required();
  auto* exp_cmd = sy_cmd->add_subcommand("experiment", "Compare raw and refined decoding");
  exp_cmd->add_option("--config", sy.config)->required();
  exp_cmd->add_option("--out", sy.out)->required();

  std::vector<char*> argv;
  std::vector<std::string> storage = args.empty() ? std::vector<std::string>{"lta"} : args;
  for (auto& s : storage) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*stats_cmd) return cmd_stats(stats, g, out);
    if (*ens_cmd) return cmd_ensemble(ens, g, out);
    if (*ref_cmd) return cmd_refine(ref, g, out);
    if (*tr_cmd) return cmd_train(tr, g, out);
    if (*ev_cmd) return cmd_eval(ev, g, out, err);
    if (*gen_cmd) return cmd_synth_gen(sy, g, out);
    if (*exp_cmd) return cmd_synth_experiment(sy, g, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace lta::cli
