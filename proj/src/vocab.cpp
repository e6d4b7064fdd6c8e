#include "lta/vocab.hpp"

#include <unordered_set>

namespace lta {

Vocabulary::Vocabulary(Axis kind, std::vector<std::string> names)
    : kind_(kind), names_(std::move(names)) {
  if (names_.empty()) {
    throw Error(std::string(to_string(kind_)) + " vocabulary must have at least one class");
  }
  std::unordered_set<std::string_view> seen;
  for (const auto& n : names_) {
    if (!seen.insert(n).second) {
      throw Error("duplicate " + std::string(to_string(kind_)) + " class name '" + n + "'");
    }
  }
}

std::optional<std::size_t> Vocabulary::find(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  return std::nullopt;
}

std::string Violation::describe() const {
  switch (kind) {
    case Kind::empty_sequence:
      return "empty sequence";
    case Kind::verb_out_of_range:
      return "position " + std::to_string(position) + ": verb id " + std::to_string(value) +
             " out of range";
    case Kind::noun_out_of_range:
      return "position " + std::to_string(position) + ": noun id " + std::to_string(value) +
             " out of range";
  }
  return {};
}

std::string ValidationResult::describe(const std::string& episode_id) const {
  std::string out = "episode '" + episode_id + "':";
  for (const auto& v : violations) out += " " + v.describe() + ";";
  return out;
}

ValidationResult validate_sequence(const ActionSequence& seq, std::size_t num_verbs,
                                   std::size_t num_nouns) {
  ValidationResult result;
  if (seq.actions.empty()) {
    result.violations.push_back({Violation::Kind::empty_sequence});
    return result;
  }
  for (std::size_t i = 0; i < seq.actions.size(); ++i) {
    const Action& a = seq.actions[i];
    if (a.verb >= num_verbs) {
      result.violations.push_back({Violation::Kind::verb_out_of_range, i, a.verb});
    }
    if (a.noun >= num_nouns) {
      result.violations.push_back({Violation::Kind::noun_out_of_range, i, a.noun});
    }
  }
  return result;
}

void require_valid(const std::vector<ActionSequence>& corpus, std::size_t num_verbs,
                   std::size_t num_nouns) {
  for (const auto& seq : corpus) {
    auto r = validate_sequence(seq, num_verbs, num_nouns);
    if (!r.ok()) throw Error("invalid " + r.describe(seq.episode_id));
  }
}

}  // namespace lta
