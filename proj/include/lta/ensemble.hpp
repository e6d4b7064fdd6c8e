#pragma once

#include <string>

#include "lta/common.hpp"

namespace lta {

/// Per-example decoder scores: one Z x C matrix per axis.
struct LogitsTensor {
  std::string example_id;
  Matrix verb_logits;
  Matrix noun_logits;

  std::size_t steps() const { return verb_logits.rows(); }
  const Matrix& axis(Axis a) const { return a == Axis::verb ? verb_logits : noun_logits; }

  /// Throws if the row counts differ or any entry is non-finite.
  void check() const;
  std::string shape_string() const;

  bool operator==(const LogitsTensor&) const = default;
};

struct EnsembleWeights {
  double alpha = 0.6;
  double beta = 1.4;
};

/// Softmax of a LogitsTensor; every row is a distribution.
struct StepDistributions {
  std::string example_id;
  Matrix verb_probs;
  Matrix noun_probs;

  std::size_t steps() const { return verb_probs.rows(); }
  const Matrix& axis(Axis a) const { return a == Axis::verb ? verb_probs : noun_probs; }
};

/// alpha * a + beta * b elementwise on both axes.
LogitsTensor combine_logits(const LogitsTensor& a, const LogitsTensor& b,
                            const EnsembleWeights& w);

/// Max-subtracted softmax of one row, written into `out`.
void softmax_row(std::span<const double> logits, std::span<double> out);

StepDistributions softmax_rows(const LogitsTensor& logits);

}  // namespace lta
