#include "lta/smooth_train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lta/rng.hpp"

namespace lta {

namespace {

constexpr double kProbFloor = 1e-12;

void check_one_hot_row(std::span<const double> row, std::size_t z) {
  std::size_t ones = 0;
  for (double v : row) {
    if (v == 1.0) {
      ++ones;
    } else if (v != 0.0) {
      ones = 2;
      break;
    }
  }
  if (ones != 1) throw Error("row " + std::to_string(z) + " is not one-hot");
}

// dst += scale * src, parameter-wise.
void add_scaled(MultiHeadDecoder& dst, const MultiHeadDecoder& src, double scale) {
  auto mats = [&](std::vector<Matrix>& d, const std::vector<Matrix>& s) {
    for (std::size_t z = 0; z < d.size(); ++z) {
      auto dv = d[z].values();
      auto sv = s[z].values();
      for (std::size_t i = 0; i < dv.size(); ++i) dv[i] += scale * sv[i];
    }
  };
  auto vecs = [&](std::vector<std::vector<double>>& d, const std::vector<std::vector<double>>& s) {
    for (std::size_t z = 0; z < d.size(); ++z) {
      for (std::size_t i = 0; i < d[z].size(); ++i) d[z][i] += scale * s[z][i];
    }
  };
  mats(dst.verb_weights, src.verb_weights);
  mats(dst.noun_weights, src.noun_weights);
  vecs(dst.verb_bias, src.verb_bias);
  vecs(dst.noun_bias, src.noun_bias);
}

void head_forward(const Matrix& w, std::span<const double> bias, std::span<const double> x,
                  std::span<double> out) {
  std::copy(bias.begin(), bias.end(), out.begin());
  for (std::size_t d = 0; d < x.size(); ++d) {
    const double xd = x[d];
    auto wrow = w.row(d);
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += wrow[c] * xd;
  }
}

void check_batch(const MultiHeadDecoder& dec, std::span<const std::vector<double>> features,
                 std::span<const Targets> targets) {
  if (features.size() != targets.size()) throw Error("features/targets count mismatch");
  if (features.empty()) throw Error("empty batch");
  for (const auto& t : targets) {
    if (t.verb.rows() != dec.steps() || t.noun.rows() != dec.steps() ||
        t.verb.cols() != dec.num_verbs() || t.noun.cols() != dec.num_nouns()) {
      throw Error("target shape does not match decoder");
    }
  }
}

// Loss of one example; when `grad` is set, accumulates scale * dLoss/dparam.
double example_loss(const MultiHeadDecoder& dec, std::span<const double> x, const Targets& t,
                    MultiHeadDecoder* grad, double scale) {
  const LogitsTensor logits = decoder_forward(dec, x);
  double loss = 0.0;
  auto axis = [&](const Matrix& lg, const Matrix& target, std::vector<Matrix>* gw,
                  std::vector<std::vector<double>>* gb) {
    std::vector<double> p(lg.cols());
    for (std::size_t z = 0; z < lg.rows(); ++z) {
      softmax_row(lg.row(z), p);
      auto tz = target.row(z);
      loss += cross_entropy(p, tz);
      if (!grad) continue;
      const double tsum = std::accumulate(tz.begin(), tz.end(), 0.0);
      std::vector<double> g(p.size());
      for (std::size_t c = 0; c < p.size(); ++c) g[c] = scale * (p[c] * tsum - tz[c]);
      Matrix& w = (*gw)[z];
      for (std::size_t d = 0; d < x.size(); ++d) {
        auto wrow = w.row(d);
        for (std::size_t c = 0; c < g.size(); ++c) wrow[c] += x[d] * g[c];
      }
      for (std::size_t c = 0; c < g.size(); ++c) (*gb)[z][c] += g[c];
    }
  };
  axis(logits.verb_logits, t.verb, grad ? &grad->verb_weights : nullptr,
       grad ? &grad->verb_bias : nullptr);
  axis(logits.noun_logits, t.noun, grad ? &grad->noun_weights : nullptr,
       grad ? &grad->noun_bias : nullptr);
  return loss;
}

}  // namespace

Matrix one_hot_rows(std::span<const std::size_t> classes, std::size_t num_classes) {
  Matrix m(classes.size(), num_classes);
  for (std::size_t z = 0; z < classes.size(); ++z) {
    if (classes[z] >= num_classes) throw Error("class id out of range in one_hot_rows");
    m(z, classes[z]) = 1.0;
  }
  return m;
}

Matrix smooth_labels(const Matrix& onehots) {
  const std::size_t steps = onehots.rows();
  if (steps == 0) throw Error("smooth_labels: no rows");
  std::vector<double> mean(onehots.cols(), 0.0);
  for (std::size_t z = 0; z < steps; ++z) {
    check_one_hot_row(onehots.row(z), z);
    for (std::size_t c = 0; c < onehots.cols(); ++c) mean[c] += onehots(z, c);
  }
  for (double& m : mean) m /= static_cast<double>(steps);

  Matrix out(steps, onehots.cols());
  for (std::size_t z = 0; z < steps; ++z) {
    for (std::size_t c = 0; c < onehots.cols(); ++c) out(z, c) = (onehots(z, c) + mean[c]) / 2.0;
  }
  return out;
}

double cross_entropy(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size()) {
    throw Error("cross_entropy: length mismatch (" + std::to_string(pred.size()) + " vs " +
                std::to_string(target.size()) + ")");
  }
  double loss = 0.0;
  for (std::size_t c = 0; c < pred.size(); ++c) {
    if (target[c] != 0.0) loss -= target[c] * std::log(std::max(pred[c], kProbFloor));
  }
  return loss;
}

MultiHeadDecoder MultiHeadDecoder::zeros(std::size_t feature_dim, std::size_t steps,
                                         std::size_t num_verbs, std::size_t num_nouns) {
  if (feature_dim == 0 || steps == 0 || num_verbs == 0 || num_nouns == 0) {
    throw Error("decoder dimensions must be positive");
  }
  MultiHeadDecoder dec;
  dec.feature_dim = feature_dim;
  dec.verb_weights.assign(steps, Matrix(feature_dim, num_verbs));
  dec.noun_weights.assign(steps, Matrix(feature_dim, num_nouns));
  dec.verb_bias.assign(steps, std::vector<double>(num_verbs, 0.0));
  dec.noun_bias.assign(steps, std::vector<double>(num_nouns, 0.0));
  return dec;
}

MultiHeadDecoder MultiHeadDecoder::random(std::size_t feature_dim, std::size_t steps,
                                          std::size_t num_verbs, std::size_t num_nouns,
                                          std::uint64_t seed, double scale) {
  MultiHeadDecoder dec = zeros(feature_dim, steps, num_verbs, num_nouns);
  CounterRng rng(seed);
  for (auto* heads : {&dec.verb_weights, &dec.noun_weights}) {
    for (auto& m : *heads) {
      for (double& v : m.values()) v = scale * rng.normal();
    }
  }
  return dec;
}

void MultiHeadDecoder::check() const {
  const std::size_t z = verb_weights.size();
  if (z == 0 || noun_weights.size() != z || verb_bias.size() != z || noun_bias.size() != z) {
    throw Error("decoder: inconsistent head counts");
  }
  for (std::size_t i = 0; i < z; ++i) {
    if (verb_weights[i].rows() != feature_dim || noun_weights[i].rows() != feature_dim ||
        verb_weights[i].cols() != verb_bias[0].size() ||
        noun_weights[i].cols() != noun_bias[0].size() ||
        verb_bias[i].size() != verb_bias[0].size() ||
        noun_bias[i].size() != noun_bias[0].size()) {
      throw Error("decoder: inconsistent head shapes at step " + std::to_string(i));
    }
  }
  for_each_param([](double v) {
    if (!std::isfinite(v)) throw Error("decoder: non-finite parameter");
  });
}

LogitsTensor decoder_forward(const MultiHeadDecoder& dec, std::span<const double> features) {
  if (features.size() != dec.feature_dim) {
    throw Error("feature vector has length " + std::to_string(features.size()) +
                ", decoder expects " + std::to_string(dec.feature_dim));
  }
  LogitsTensor out{{}, Matrix(dec.steps(), dec.num_verbs()), Matrix(dec.steps(), dec.num_nouns())};
  for (std::size_t z = 0; z < dec.steps(); ++z) {
    head_forward(dec.verb_weights[z], dec.verb_bias[z], features, out.verb_logits.row(z));
    head_forward(dec.noun_weights[z], dec.noun_bias[z], features, out.noun_logits.row(z));
  }
  return out;
}

void TrainConfig::check() const {
  if (!(learning_rate > 0.0)) throw Error("learning_rate must be positive");
  if (epochs == 0) throw Error("epochs must be positive");
  if (batch_size == 0) throw Error("batch_size must be positive");
}

Targets make_targets(const ActionSequence& seq, std::size_t num_verbs, std::size_t num_nouns,
                     bool smooth) {
  std::vector<std::size_t> verbs, nouns;
  for (const Action& a : seq.actions) {
    verbs.push_back(a.verb);
    nouns.push_back(a.noun);
  }
  Targets t{one_hot_rows(verbs, num_verbs), one_hot_rows(nouns, num_nouns)};
  if (smooth) {
    t.verb = smooth_labels(t.verb);
    t.noun = smooth_labels(t.noun);
  }
  return t;
}

LossAndGradient loss_and_gradient(const MultiHeadDecoder& dec,
                                  std::span<const std::vector<double>> features,
                                  std::span<const Targets> targets) {
  check_batch(dec, features, targets);
  LossAndGradient out;
  out.gradient = MultiHeadDecoder::zeros(dec.feature_dim, dec.steps(), dec.num_verbs(),
                                         dec.num_nouns());
  const double scale = 1.0 / static_cast<double>(features.size());
  for (std::size_t i = 0; i < features.size(); ++i) {
    out.loss += example_loss(dec, features[i], targets[i], &out.gradient, scale);
  }
  out.loss *= scale;
  return out;
}

double batch_loss(const MultiHeadDecoder& dec, std::span<const std::vector<double>> features,
                  std::span<const Targets> targets) {
  check_batch(dec, features, targets);
  double loss = 0.0;
  for (std::size_t i = 0; i < features.size(); ++i) {
    loss += example_loss(dec, features[i], targets[i], nullptr, 0.0);
  }
  return loss / static_cast<double>(features.size());
}

TrainResult train(MultiHeadDecoder dec, const std::vector<TrainExample>& dataset,
                  const TrainConfig& cfg) {
  if (dataset.empty()) throw Error("empty dataset");
  cfg.check();
  dec.check();

  std::vector<std::vector<double>> features;
  std::vector<Targets> targets;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& ex = dataset[i];
    if (ex.features.size() != dec.feature_dim) {
      throw Error("example " + std::to_string(i) + ": feature length " +
                  std::to_string(ex.features.size()) + ", expected " +
                  std::to_string(dec.feature_dim));
    }
    if (ex.target.actions.size() != dec.steps()) {
      throw Error("example " + std::to_string(i) + ": sequence length " +
                  std::to_string(ex.target.actions.size()) + ", expected Z = " +
                  std::to_string(dec.steps()));
    }
    features.push_back(ex.features);
    targets.push_back(
        make_targets(ex.target, dec.num_verbs(), dec.num_nouns(), cfg.use_label_smoothing));
  }

  TrainResult result;
  std::vector<std::size_t> order(dataset.size());
  std::vector<std::vector<double>> batch_x;
  std::vector<Targets> batch_t;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    CounterRng rng(derive_seed(cfg.rng_seed, epoch));
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng.below(i)]);
    }
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      batch_x.clear();
      batch_t.clear();
      for (std::size_t i = start; i < end; ++i) {
        batch_x.push_back(features[order[i]]);
        batch_t.push_back(targets[order[i]]);
      }
      const LossAndGradient lg = loss_and_gradient(dec, batch_x, batch_t);
      epoch_loss += lg.loss * static_cast<double>(end - start);
      add_scaled(dec, lg.gradient, -cfg.learning_rate);
    }
    result.loss_history.push_back(epoch_loss / static_cast<double>(order.size()));
  }
  result.decoder = std::move(dec);
  return result;
}

}  // namespace lta
