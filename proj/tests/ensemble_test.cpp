#include "lta/ensemble.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lta/refine.hpp"
#include "oracles.hpp"

namespace lta {
namespace {

LogitsTensor random_tensor(std::mt19937_64& gen, std::size_t z, std::size_t cv, std::size_t cn,
                           double scale = 3.0) {
  std::normal_distribution<double> d(0.0, scale);
  LogitsTensor t{"ex", Matrix(z, cv), Matrix(z, cn)};
  for (double& v : t.verb_logits.values()) v = d(gen);
  for (double& v : t.noun_logits.values()) v = d(gen);
  return t;
}

TEST(CombineLogitsTest, IdentityWeightsAreBitExact) {
  std::mt19937_64 gen(1);
  const auto a = random_tensor(gen, 20, 7, 9);
  const auto b = random_tensor(gen, 20, 7, 9);
  EXPECT_EQ(combine_logits(a, b, {1.0, 0.0}), a);
}

TEST(CombineLogitsTest, Midpoint) {
  LogitsTensor a{"x", Matrix(2, 3, 2.0), Matrix(2, 4, 2.0)};
  LogitsTensor b{"x", Matrix(2, 3, 4.0), Matrix(2, 4, 4.0)};
  const auto c = combine_logits(a, b, {0.5, 0.5});
  for (double v : c.verb_logits.values()) EXPECT_EQ(v, 3.0);
  for (double v : c.noun_logits.values()) EXPECT_EQ(v, 3.0);
  EXPECT_EQ(c.example_id, "x");
}

TEST(CombineLogitsTest, MatchesScalarLoopAtTunedWeights) {
  std::mt19937_64 gen(2);
  const auto a = random_tensor(gen, 20, 5, 6);
  const auto b = random_tensor(gen, 20, 5, 6);
  const auto c = combine_logits(a, b, {0.6, 1.4});
  for (std::size_t z = 0; z < 20; ++z) {
    for (std::size_t k = 0; k < 5; ++k) {
      EXPECT_NEAR(c.verb_logits(z, k), 0.6 * a.verb_logits(z, k) + 1.4 * b.verb_logits(z, k),
                  1e-12);
    }
    for (std::size_t k = 0; k < 6; ++k) {
      EXPECT_NEAR(c.noun_logits(z, k), 0.6 * a.noun_logits(z, k) + 1.4 * b.noun_logits(z, k),
                  1e-12);
    }
  }
}

TEST(CombineLogitsTest, LinearInWeights) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> w(-2.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = random_tensor(gen, 4, 3, 5);
    const auto b = random_tensor(gen, 4, 3, 5);
    const EnsembleWeights w1{w(gen), w(gen)}, w2{w(gen), w(gen)};
    const auto sum = combine_logits(a, b, {w1.alpha + w2.alpha, w1.beta + w2.beta});
    const auto c1 = combine_logits(a, b, w1);
    const auto c2 = combine_logits(a, b, w2);
    for (std::size_t i = 0; i < sum.verb_logits.values().size(); ++i) {
      EXPECT_NEAR(c1.verb_logits.values()[i] + c2.verb_logits.values()[i],
                  sum.verb_logits.values()[i], 1e-9);
    }
  }
}

TEST(CombineLogitsTest, ShapeAndIdMismatch) {
  LogitsTensor a{"x", Matrix(2, 3), Matrix(2, 4)};
  LogitsTensor b{"x", Matrix(3, 3), Matrix(3, 4)};
  try {
    combine_logits(a, b, {});
    FAIL();
  } catch (const Error& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("2x3"), std::string::npos);
    EXPECT_NE(msg.find("3x3"), std::string::npos);
  }
  LogitsTensor c{"y", Matrix(2, 3), Matrix(2, 4)};
  EXPECT_THROW(combine_logits(a, c, {}), Error);
}

TEST(SoftmaxTest, UniformRow) {
  LogitsTensor t{"u", Matrix(1, 3, 0.0), Matrix(1, 1, 0.0)};
  const auto d = softmax_rows(t);
  for (double p : d.verb_probs.row(0)) EXPECT_DOUBLE_EQ(p, 1.0 / 3.0);
  EXPECT_EQ(d.noun_probs(0, 0), 1.0);
}

TEST(SoftmaxTest, NoOverflow) {
  LogitsTensor t{"o", Matrix::from_rows({{1000.0, 0.0}}), Matrix::from_rows({{-1e6, 1e6}})};
  const auto d = softmax_rows(t);
  EXPECT_NEAR(d.verb_probs(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(d.verb_probs(0, 1), 0.0, 1e-12);
  EXPECT_EQ(d.noun_probs(0, 1), 1.0);
}

TEST(SoftmaxTest, MatchesExtendedPrecision) {
  std::vector<double> x{1.0, 2.0, 3.0};
  std::vector<double> out(3);
  softmax_row(x, out);
  const auto ref = oracle::softmax_ld(x);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(out[i], static_cast<double>(ref[i]), 1e-12);
  }
}

TEST(SoftmaxTest, RowsAreDistributionsAndArgmaxPreserved) {
  std::mt19937_64 gen(4);
  for (int trial = 0; trial < 200; ++trial) {
    const auto t = random_tensor(gen, 5, 6, 7, trial % 2 ? 1e6 : 5.0);
    const auto d = softmax_rows(t);
    for (Axis axis : {Axis::verb, Axis::noun}) {
      for (std::size_t z = 0; z < 5; ++z) {
        double sum = 0.0;
        for (double p : d.axis(axis).row(z)) {
          ASSERT_TRUE(std::isfinite(p));
          ASSERT_GE(p, 0.0);
          sum += p;
        }
        EXPECT_NEAR(sum, 1.0, 1e-9);
        EXPECT_EQ(argmax(d.axis(axis).row(z)), argmax(t.axis(axis).row(z)));
      }
    }
  }
}

}  // namespace
}  // namespace lta
