#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lta/cooc_stats.hpp"
#include "lta/ensemble.hpp"
#include "lta/eval_metric.hpp"
#include "lta/refine.hpp"
#include "lta/smooth_train.hpp"
#include "lta/vocab.hpp"

namespace lta::io {

using json = nlohmann::json;

// Digests and whole-file helpers.
std::string sha256_hex(std::string_view bytes);
std::string read_file(const std::filesystem::path& path);
std::string file_sha256(const std::filesystem::path& path);
/// Writes to a sibling temp file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

/// Compact dump, one trailing newline.
std::string dump_line(const json& j);

// Vocabulary: {"kind": "verb"|"noun", "names": [...]}
json to_json(const Vocabulary& v);
Vocabulary vocabulary_from_json(const json& j);
Vocabulary read_vocabulary(const std::filesystem::path& path);

// Corpus line: {"episode_id": s, "actions": [[v, n], ...]}
json to_json(const ActionSequence& seq);
ActionSequence sequence_from_json(const json& j);
std::string corpus_to_jsonl(const std::vector<ActionSequence>& corpus);

/// Parses JSON Lines. Errors carry "<source>:<line>: ...". Blank lines are skipped.
template <typename T, typename Parse>
std::vector<T> parse_jsonl(std::string_view text, std::string_view source, Parse&& parse);

std::vector<ActionSequence> parse_corpus(std::string_view text, std::string_view source);
std::vector<ActionSequence> read_corpus(const std::filesystem::path& path);

// Statistics file.
json to_json(const CoocStats& stats);
CoocStats stats_from_json(const json& j);
CoocStats read_stats(const std::filesystem::path& path);

// Logits line: {"example_id": s, "verb_logits": [[...]], "noun_logits": [[...]]}
json to_json(const LogitsTensor& t);
LogitsTensor logits_from_json(const json& j);
std::vector<LogitsTensor> read_logits(const std::filesystem::path& path);

// Predictions line: {"example_id": s, "patterns": [[[v, n], ...], ...], "tiers": [...]}
json to_json(const PredictionSet& p);
PredictionSet predictions_from_json(const json& j);
std::vector<PredictionSet> read_predictions(const std::filesystem::path& path);

// Report: {"ed_verb", "ed_noun", "ed_action", "n_examples", "unmatched"[, "per_example"]}
json to_json(const EvalReport& r);

// Decoder checkpoint.
json to_json(const MultiHeadDecoder& dec);
MultiHeadDecoder decoder_from_json(const json& j);

// Training line: {"features": [...], "actions": [[v, n], ...][, "example_id": s]}
struct TrainRecord {
  std::string example_id;
  TrainExample example;
};
std::vector<TrainRecord> read_train_data(const std::filesystem::path& path);
json to_json(const TrainRecord& r);

Matrix matrix_from_json(const json& j, std::string_view what);
json to_json(const Matrix& m);

// ---------------------------------------------------------------------------

template <typename T, typename Parse>
std::vector<T> parse_jsonl(std::string_view text, std::string_view source, Parse&& parse) {
  std::vector<T> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      out.push_back(parse(json::parse(line)));
    } catch (const std::exception& e) {
      throw Error(std::string(source) + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace lta::io
