#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lta/common.hpp"
#include "lta/ensemble.hpp"
#include "lta/vocab.hpp"

namespace lta {

/// Sequence-level label smoothing: row z becomes the average of the one-hot
/// y_z and the mean one-hot over all Z rows. Throws if a row is not one-hot.
Matrix smooth_labels(const Matrix& onehots);

/// Z x num_classes one-hot matrix for the given class ids.
Matrix one_hot_rows(std::span<const std::size_t> classes, std::size_t num_classes);

/// -sum target * ln(max(pred, 1e-12)).
double cross_entropy(std::span<const double> pred, std::span<const double> target);

/// Independent linear head per step and axis: logits_z = W_z^T x + b_z.
/// Weights are stored feature_dim x C.
struct MultiHeadDecoder {
  std::size_t feature_dim = 0;
  std::vector<Matrix> verb_weights;  // Z entries, feature_dim x C_verb
  std::vector<Matrix> noun_weights;  // Z entries, feature_dim x C_noun
  std::vector<std::vector<double>> verb_bias;
  std::vector<std::vector<double>> noun_bias;

  /// All-zero decoder.
  static MultiHeadDecoder zeros(std::size_t feature_dim, std::size_t steps, std::size_t num_verbs,
                                std::size_t num_nouns);
  /// Weights ~ N(0, scale^2), biases zero.
  static MultiHeadDecoder random(std::size_t feature_dim, std::size_t steps,
                                 std::size_t num_verbs, std::size_t num_nouns,
                                 std::uint64_t seed, double scale = 0.01);

  std::size_t steps() const { return verb_weights.size(); }
  std::size_t num_verbs() const { return verb_bias.empty() ? 0 : verb_bias[0].size(); }
  std::size_t num_nouns() const { return noun_bias.empty() ? 0 : noun_bias[0].size(); }

  /// Visits every parameter in a fixed order: verb weights, noun weights,
  /// verb biases, noun biases, step-major within each.
  template <typename F>
  void for_each_param(F&& f) {
    visit(*this, f);
  }
  template <typename F>
  void for_each_param(F&& f) const {
    visit(*this, f);
  }

  void check() const;
  bool operator==(const MultiHeadDecoder&) const = default;

 private:
  template <typename Self, typename F>
  static void visit(Self& self, F& f) {
    for (auto* heads : {&self.verb_weights, &self.noun_weights}) {
      for (auto& m : *heads) {
        for (auto& v : m.values()) f(v);
      }
    }
    for (auto* biases : {&self.verb_bias, &self.noun_bias}) {
      for (auto& b : *biases) {
        for (auto& v : b) f(v);
      }
    }
  }
};

LogitsTensor decoder_forward(const MultiHeadDecoder& dec, std::span<const double> features);

struct TrainExample {
  std::vector<double> features;
  ActionSequence target;  // exactly Z actions
};

struct TrainConfig {
  double learning_rate = 0.05;
  std::size_t epochs = 200;
  std::size_t batch_size = 8;
  bool use_label_smoothing = false;
  std::uint64_t rng_seed = 0;

  void check() const;
};

/// Per-example training targets (one-hot or smoothed) for both axes.
struct Targets {
  Matrix verb;
  Matrix noun;
};

Targets make_targets(const ActionSequence& seq, std::size_t num_verbs, std::size_t num_nouns,
                     bool smooth);

/// Summed per-head cross-entropy over both axes, averaged over the batch,
/// and its analytic gradient (same layout as the decoder).
struct LossAndGradient {
  double loss = 0.0;
  MultiHeadDecoder gradient;
};

LossAndGradient loss_and_gradient(const MultiHeadDecoder& dec,
                                  std::span<const std::vector<double>> features,
                                  std::span<const Targets> targets);

/// Loss only; shares the forward path with loss_and_gradient.
double batch_loss(const MultiHeadDecoder& dec, std::span<const std::vector<double>> features,
                  std::span<const Targets> targets);

struct TrainResult {
  MultiHeadDecoder decoder;
  std::vector<double> loss_history;  // mean per-example loss, one per epoch
};

/// Minibatch gradient descent. Each epoch shuffles with a stream derived
/// from (rng_seed, epoch); the epoch loss is accumulated before each update.
TrainResult train(MultiHeadDecoder dec, const std::vector<TrainExample>& dataset,
                  const TrainConfig& cfg);

}  // namespace lta
