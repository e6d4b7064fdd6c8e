#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "lta/common.hpp"

namespace lta {

/// Dense id <-> name map for one class axis. Ids are array indices.
class Vocabulary {
 public:
  /// Throws lta::Error if names is empty or contains duplicates.
  Vocabulary(Axis kind, std::vector<std::string> names);

  Axis kind() const { return kind_; }
  std::size_t size() const { return names_.size(); }
  const std::string& name(std::size_t id) const { return names_.at(id); }
  const std::vector<std::string>& names() const { return names_; }
  std::optional<std::size_t> find(const std::string& name) const;

  bool operator==(const Vocabulary&) const = default;

 private:
  Axis kind_;
  std::vector<std::string> names_;
};

struct Action {
  std::size_t verb = 0;
  std::size_t noun = 0;

  bool operator==(const Action&) const = default;
  auto operator<=>(const Action&) const = default;
};

struct ActionSequence {
  std::string episode_id;
  std::vector<Action> actions;

  bool operator==(const ActionSequence&) const = default;
};

struct Violation {
  enum class Kind { empty_sequence, verb_out_of_range, noun_out_of_range };
  Kind kind;
  std::size_t position = 0;  // unused for empty_sequence
  std::size_t value = 0;

  std::string describe() const;
  bool operator==(const Violation&) const = default;
};

struct ValidationResult {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  /// All violations on one line, prefixed with the episode id.
  std::string describe(const std::string& episode_id) const;
};

ValidationResult validate_sequence(const ActionSequence& seq, std::size_t num_verbs,
                                   std::size_t num_nouns);

inline ValidationResult validate_sequence(const ActionSequence& seq, const Vocabulary& verbs,
                                          const Vocabulary& nouns) {
  return validate_sequence(seq, verbs.size(), nouns.size());
}

/// Throws lta::Error naming the first invalid episode.
void require_valid(const std::vector<ActionSequence>& corpus, std::size_t num_verbs,
                   std::size_t num_nouns);

}  // namespace lta
