#include "lta/ensemble.hpp"

#include <algorithm>
#include <cmath>

namespace lta {

void LogitsTensor::check() const {
  if (verb_logits.rows() != noun_logits.rows()) {
    throw Error("logits '" + example_id + "': verb and noun step counts differ (" +
                shape_string() + ")");
  }
  if (verb_logits.rows() == 0) throw Error("logits '" + example_id + "': no steps");
  for (const Matrix* m : {&verb_logits, &noun_logits}) {
    for (double v : m->values()) {
      if (!std::isfinite(v)) throw Error("logits '" + example_id + "': non-finite entry");
    }
  }
}

std::string LogitsTensor::shape_string() const {
  return "verb " + verb_logits.shape_string() + ", noun " + noun_logits.shape_string();
}

LogitsTensor combine_logits(const LogitsTensor& a, const LogitsTensor& b,
                            const EnsembleWeights& w) {
  if (a.example_id != b.example_id) {
    throw Error("example_id mismatch: '" + a.example_id + "' vs '" + b.example_id + "'");
  }
  if (a.verb_logits.rows() != b.verb_logits.rows() ||
      a.verb_logits.cols() != b.verb_logits.cols() ||
      a.noun_logits.rows() != b.noun_logits.rows() ||
      a.noun_logits.cols() != b.noun_logits.cols()) {
    throw Error("shape mismatch for '" + a.example_id + "': (" + a.shape_string() + ") vs (" +
                b.shape_string() + ")");
  }
  if (!std::isfinite(w.alpha) || !std::isfinite(w.beta)) {
    throw Error("ensemble weights must be finite");
  }
  LogitsTensor out{a.example_id, Matrix(a.verb_logits.rows(), a.verb_logits.cols()),
                   Matrix(a.noun_logits.rows(), a.noun_logits.cols())};
  auto blend = [&](const Matrix& x, const Matrix& y, Matrix& dst) {
    auto xs = x.values();
    auto ys = y.values();
    auto ds = dst.values();
    for (std::size_t i = 0; i < ds.size(); ++i) ds[i] = w.alpha * xs[i] + w.beta * ys[i];
  };
  blend(a.verb_logits, b.verb_logits, out.verb_logits);
  blend(a.noun_logits, b.noun_logits, out.noun_logits);
  return out;
}

void softmax_row(std::span<const double> logits, std::span<double> out) {
  const double top = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - top);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
}

StepDistributions softmax_rows(const LogitsTensor& logits) {
  StepDistributions d{logits.example_id,
                      Matrix(logits.verb_logits.rows(), logits.verb_logits.cols()),
                      Matrix(logits.noun_logits.rows(), logits.noun_logits.cols())};
  for (std::size_t z = 0; z < logits.verb_logits.rows(); ++z) {
    softmax_row(logits.verb_logits.row(z), d.verb_probs.row(z));
  }
  for (std::size_t z = 0; z < logits.noun_logits.rows(); ++z) {
    softmax_row(logits.noun_logits.row(z), d.noun_probs.row(z));
  }
  return d;
}

}  // namespace lta
