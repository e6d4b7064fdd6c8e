#include "lta/io.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

namespace lta::io {

namespace {

std::size_t get_index(const json& j, std::string_view what) {
  if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() &&
                                 j.get<std::int64_t>() < 0)) {
    throw Error(std::string(what) + " must be a nonnegative integer");
  }
  return j.get<std::size_t>();
}

double get_real(const json& j, std::string_view what) {
  if (!j.is_number()) throw Error(std::string(what) + " must be a number");
  return j.get<double>();
}

const json& field(const json& j, const char* key) {
  if (!j.is_object()) throw Error("expected a JSON object");
  auto it = j.find(key);
  if (it == j.end()) throw Error(std::string("missing field '") + key + "'");
  return *it;
}

std::string get_string(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_string()) throw Error(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

Action action_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw Error("action must be a [verb_id, noun_id] pair");
  return {get_index(j[0], "verb_id"), get_index(j[1], "noun_id")};
}

json actions_to_json(const std::vector<Action>& actions) {
  json arr = json::array();
  for (const Action& a : actions) arr.push_back({a.verb, a.noun});
  return arr;
}

std::vector<Action> actions_from_json(const json& j) {
  if (!j.is_array()) throw Error("actions must be an array");
  std::vector<Action> out;
  out.reserve(j.size());
  for (const auto& a : j) out.push_back(action_from_json(a));
  return out;
}

std::vector<double> vector_from_json(const json& j, std::string_view what) {
  if (!j.is_array()) throw Error(std::string(what) + " must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) out.push_back(get_real(v, what));
  return out;
}

template <typename T, typename Parse>
std::vector<T> read_jsonl_file(const std::filesystem::path& path, Parse&& parse) {
  return parse_jsonl<T>(read_file(path), path.string(), parse);
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                               &EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
    throw Error("sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string file_sha256(const std::filesystem::path& path) { return sha256_hex(read_file(path)); }

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error("cannot rename '" + tmp.string() + "': " + ec.message());
}

std::string dump_line(const json& j) { return j.dump() + "\n"; }

json to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, std::string_view what) {
  if (!j.is_array()) throw Error(std::string(what) + " must be an array of rows");
  std::vector<std::vector<double>> rows;
  rows.reserve(j.size());
  for (const auto& r : j) rows.push_back(vector_from_json(r, what));
  try {
    return Matrix::from_rows(rows);
  } catch (const Error& e) {
    throw Error(std::string(what) + ": " + e.what());
  }
}

json to_json(const Vocabulary& v) {
  return {{"kind", std::string(to_string(v.kind()))}, {"names", v.names()}};
}

Vocabulary vocabulary_from_json(const json& j) {
  const std::string kind = get_string(j, "kind");
  Axis axis;
  if (kind == "verb") {
    axis = Axis::verb;
  } else if (kind == "noun") {
    axis = Axis::noun;
  } else {
    throw Error("vocabulary kind must be 'verb' or 'noun', got '" + kind + "'");
  }
  const json& names = field(j, "names");
  if (!names.is_array()) throw Error("'names' must be an array");
  std::vector<std::string> out;
  for (const auto& n : names) {
    if (!n.is_string()) throw Error("class names must be strings");
    out.push_back(n.get<std::string>());
  }
  return Vocabulary(axis, std::move(out));
}

Vocabulary read_vocabulary(const std::filesystem::path& path) {
  try {
    return vocabulary_from_json(json::parse(read_file(path)));
  } catch (const json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

json to_json(const ActionSequence& seq) {
  return {{"episode_id", seq.episode_id}, {"actions", actions_to_json(seq.actions)}};
}

ActionSequence sequence_from_json(const json& j) {
  return {get_string(j, "episode_id"), actions_from_json(field(j, "actions"))};
}

std::string corpus_to_jsonl(const std::vector<ActionSequence>& corpus) {
  std::string out;
  for (const auto& seq : corpus) out += dump_line(to_json(seq));
  return out;
}

std::vector<ActionSequence> parse_corpus(std::string_view text, std::string_view source) {
  return parse_jsonl<ActionSequence>(text, source, sequence_from_json);
}

std::vector<ActionSequence> read_corpus(const std::filesystem::path& path) {
  return read_jsonl_file<ActionSequence>(path, sequence_from_json);
}

json to_json(const CoocStats& s) {
  std::string policy = s.smoothing.empty_rows == EmptyRowPolicy::uniform ? "uniform" : "error";
  return {
      {"num_verbs", s.num_verbs()},
      {"num_nouns", s.num_nouns()},
      {"smoothing",
       {{"add_k", s.smoothing.add_k},
        {"prob_clamp_min", s.smoothing.prob_clamp_min},
        {"prob_clamp_max", s.smoothing.prob_clamp_max},
        {"empty_rows", policy}}},
      {"corpus_fingerprint", s.corpus_fingerprint},
      {"verb_marginal", s.verb_marginal},
      {"noun_marginal", s.noun_marginal},
      {"verb_transition", to_json(s.verb_transition)},
      {"noun_transition", to_json(s.noun_transition)},
      {"verb_given_noun", to_json(s.verb_given_noun)},
  };
}

CoocStats stats_from_json(const json& j) {
  CoocStats s;
  const json& sm = field(j, "smoothing");
  s.smoothing.add_k = get_real(field(sm, "add_k"), "add_k");
  s.smoothing.prob_clamp_min = get_real(field(sm, "prob_clamp_min"), "prob_clamp_min");
  s.smoothing.prob_clamp_max = get_real(field(sm, "prob_clamp_max"), "prob_clamp_max");
  if (sm.contains("empty_rows")) {
    const std::string policy = get_string(sm, "empty_rows");
    if (policy == "uniform") {
      s.smoothing.empty_rows = EmptyRowPolicy::uniform;
    } else if (policy == "error") {
      s.smoothing.empty_rows = EmptyRowPolicy::error;
    } else {
      throw Error("unknown empty_rows policy '" + policy + "'");
    }
  }
  s.corpus_fingerprint = get_string(j, "corpus_fingerprint");
  s.verb_marginal = vector_from_json(field(j, "verb_marginal"), "verb_marginal");
  s.noun_marginal = vector_from_json(field(j, "noun_marginal"), "noun_marginal");
  s.verb_transition = matrix_from_json(field(j, "verb_transition"), "verb_transition");
  s.noun_transition = matrix_from_json(field(j, "noun_transition"), "noun_transition");
  s.verb_given_noun = matrix_from_json(field(j, "verb_given_noun"), "verb_given_noun");
  if (get_index(field(j, "num_verbs"), "num_verbs") != s.num_verbs() ||
      get_index(field(j, "num_nouns"), "num_nouns") != s.num_nouns()) {
    throw Error("stats: declared vocabulary sizes do not match the marginals");
  }
  s.check();
  return s;
}

CoocStats read_stats(const std::filesystem::path& path) {
  try {
    return stats_from_json(json::parse(read_file(path)));
  } catch (const std::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

json to_json(const LogitsTensor& t) {
  return {{"example_id", t.example_id},
          {"verb_logits", to_json(t.verb_logits)},
          {"noun_logits", to_json(t.noun_logits)}};
}

LogitsTensor logits_from_json(const json& j) {
  LogitsTensor t{get_string(j, "example_id"),
                 matrix_from_json(field(j, "verb_logits"), "verb_logits"),
                 matrix_from_json(field(j, "noun_logits"), "noun_logits")};
  t.check();
  return t;
}

std::vector<LogitsTensor> read_logits(const std::filesystem::path& path) {
  return read_jsonl_file<LogitsTensor>(path, logits_from_json);
}

json to_json(const PredictionSet& p) {
  json patterns = json::array();
  for (const auto& pat : p.patterns) patterns.push_back(actions_to_json(pat));
  json tiers = json::array();
  for (Tier t : p.tiers) tiers.push_back(std::string(to_string(t)));
  return {{"example_id", p.example_id}, {"patterns", patterns}, {"tiers", tiers}};
}

PredictionSet predictions_from_json(const json& j) {
  PredictionSet p;
  p.example_id = get_string(j, "example_id");
  const json& patterns = field(j, "patterns");
  if (!patterns.is_array()) throw Error("'patterns' must be an array");
  for (const auto& pat : patterns) p.patterns.push_back(actions_from_json(pat));
  const json& tiers = field(j, "tiers");
  if (!tiers.is_array()) throw Error("'tiers' must be an array");
  for (const auto& t : tiers) {
    if (!t.is_string()) throw Error("tiers must be strings");
    p.tiers.push_back(tier_from_string(t.get<std::string>()));
  }
  if (p.tiers.size() != p.patterns.size()) throw Error("'tiers' and 'patterns' differ in length");
  return p;
}

std::vector<PredictionSet> read_predictions(const std::filesystem::path& path) {
  return read_jsonl_file<PredictionSet>(path, predictions_from_json);
}

json to_json(const EvalReport& r) {
  json j = {{"ed_verb", r.ed_verb},
            {"ed_noun", r.ed_noun},
            {"ed_action", r.ed_action},
            {"n_examples", r.n_examples},
            {"unmatched", r.unmatched}};
  if (!r.unmatched_ids.empty()) j["unmatched_ids"] = r.unmatched_ids;
  if (!r.per_example.empty()) {
    json rows = json::array();
    for (const auto& s : r.per_example) {
      rows.push_back(
          {{"example_id", s.example_id}, {"verb", s.verb}, {"noun", s.noun}, {"action", s.action}});
    }
    j["per_example"] = rows;
  }
  return j;
}

json to_json(const MultiHeadDecoder& dec) {
  json vw = json::array(), nw = json::array();
  for (const auto& m : dec.verb_weights) vw.push_back(to_json(m));
  for (const auto& m : dec.noun_weights) nw.push_back(to_json(m));
  return {{"feature_dim", dec.feature_dim}, {"steps", dec.steps()},
          {"num_verbs", dec.num_verbs()},   {"num_nouns", dec.num_nouns()},
          {"verb_weights", vw},             {"noun_weights", nw},
          {"verb_bias", dec.verb_bias},     {"noun_bias", dec.noun_bias}};
}

MultiHeadDecoder decoder_from_json(const json& j) {
  MultiHeadDecoder dec;
  dec.feature_dim = get_index(field(j, "feature_dim"), "feature_dim");
  for (const auto& m : field(j, "verb_weights")) {
    dec.verb_weights.push_back(matrix_from_json(m, "verb_weights"));
  }
  for (const auto& m : field(j, "noun_weights")) {
    dec.noun_weights.push_back(matrix_from_json(m, "noun_weights"));
  }
  for (const auto& b : field(j, "verb_bias")) dec.verb_bias.push_back(vector_from_json(b, "bias"));
  for (const auto& b : field(j, "noun_bias")) dec.noun_bias.push_back(vector_from_json(b, "bias"));
  dec.check();
  if (get_index(field(j, "steps"), "steps") != dec.steps() ||
      get_index(field(j, "num_verbs"), "num_verbs") != dec.num_verbs() ||
      get_index(field(j, "num_nouns"), "num_nouns") != dec.num_nouns()) {
    throw Error("decoder checkpoint: declared dimensions do not match the arrays");
  }
  return dec;
}

json to_json(const TrainRecord& r) {
  json j = {{"features", r.example.features},
            {"actions", actions_to_json(r.example.target.actions)}};
  if (!r.example_id.empty()) j["example_id"] = r.example_id;
  return j;
}

std::vector<TrainRecord> read_train_data(const std::filesystem::path& path) {
  std::size_t index = 0;
  return read_jsonl_file<TrainRecord>(path, [&index](const json& j) {
    TrainRecord r;
    r.example_id = j.contains("example_id") ? get_string(j, "example_id")
                                            : "example-" + std::to_string(index);
    ++index;
    r.example.features = vector_from_json(field(j, "features"), "features");
    r.example.target = {r.example_id, actions_from_json(field(j, "actions"))};
    return r;
  });
}

}  // namespace lta::io
