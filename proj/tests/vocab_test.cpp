#include "lta/vocab.hpp"

#include <gtest/gtest.h>

namespace lta {
namespace {

TEST(VocabularyTest, IdsAreDenseIndices) {
  Vocabulary v(Axis::verb, {"take", "put", "wash"});
  EXPECT_EQ(v.size(), 3u);
  EXPECT_EQ(v.name(2), "wash");
  EXPECT_EQ(v.find("put"), 1u);
  EXPECT_FALSE(v.find("cut").has_value());
}

TEST(VocabularyTest, RejectsEmptyAndDuplicates) {
  EXPECT_THROW(Vocabulary(Axis::noun, {}), Error);
  EXPECT_THROW(Vocabulary(Axis::noun, {"cup", "knife", "cup"}), Error);
}

TEST(ValidateSequenceTest, InBounds) {
  ActionSequence seq{"e0", {{0, 0}, {1, 2}}};
  EXPECT_TRUE(validate_sequence(seq, 2, 3).ok());
}

TEST(ValidateSequenceTest, VerbOutOfRange) {
  ActionSequence seq{"e1", {{2, 0}}};
  auto r = validate_sequence(seq, 2, 3);
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0].kind, Violation::Kind::verb_out_of_range);
  EXPECT_EQ(r.violations[0].position, 0u);
}

TEST(ValidateSequenceTest, ReportsEveryViolation) {
  ActionSequence seq{"e2", {{0, 0}, {5, 9}, {1, 1}}};
  auto r = validate_sequence(seq, 2, 3);
  ASSERT_EQ(r.violations.size(), 2u);
  EXPECT_EQ(r.violations[0].kind, Violation::Kind::verb_out_of_range);
  EXPECT_EQ(r.violations[1].kind, Violation::Kind::noun_out_of_range);
  EXPECT_EQ(r.violations[1].position, 1u);
  EXPECT_NE(r.describe("e2").find("e2"), std::string::npos);
}

TEST(ValidateSequenceTest, EmptySequence) {
  auto r = validate_sequence(ActionSequence{"empty", {}}, 2, 2);
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0].describe(), "empty sequence");
}

TEST(ValidateSequenceTest, RequireValidNamesEpisode) {
  std::vector<ActionSequence> corpus{{"good", {{0, 0}}}, {"bad-episode", {{0, 7}}}};
  try {
    require_valid(corpus, 1, 1);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("bad-episode"), std::string::npos);
  }
}

}  // namespace
}  // namespace lta
