#include <gtest/gtest.h>

#include "dicore/error.hpp"
#include "dicore/freeform_parser.hpp"

using namespace dicore;

namespace {

using Pairs = std::vector<std::pair<std::string, std::string>>;

Pairs pairs(const std::vector<FreeFormMention>& ms) {
  Pairs out;
  for (const auto& m : ms) out.emplace_back(m.event_name, m.trigger);
  return out;
}

}  // namespace

TEST(FreeForm, CanonicalArray) {
  EXPECT_EQ(pairs(parse_freeform_json(R"([["Birth","birth"]])")), (Pairs{{"Birth", "birth"}}));
}

TEST(FreeForm, CodeFence) {
  EXPECT_EQ(pairs(parse_freeform_json("```json\n[[\"Arrest\",\"arrested\"]]\n```")),
            (Pairs{{"Arrest", "arrested"}}));
}

TEST(FreeForm, TuplesAsInTheQualitativeTables) {
  EXPECT_EQ(pairs(parse_freeform_json(R"([("Birth", "gave"), ("Birth", "birth")])")),
            (Pairs{{"Birth", "gave"}, {"Birth", "birth"}}));
}

TEST(FreeForm, SingleQuotesAndProse) {
  EXPECT_EQ(pairs(parse_freeform_json("Here's what I found: [('Attack', 'war'), ('Meet', \"talks\")]")),
            (Pairs{{"Attack", "war"}, {"Meet", "talks"}}));
  EXPECT_EQ(pairs(parse_freeform_json("[['Statement', \"they'll\"]]")),
            (Pairs{{"Statement", "they'll"}}));
}

TEST(FreeForm, ObjectsWithAlternativeKeys) {
  EXPECT_EQ(pairs(parse_freeform_json(
                R"([{"event_type":"Attack","trigger":"war"},{"event":"Die","trigger_word":"killed"}])")),
            (Pairs{{"Attack", "war"}, {"Die", "killed"}}));
}

TEST(FreeForm, DropsIncompleteAndDuplicatePairs) {
  EXPECT_EQ(pairs(parse_freeform_json(R"([["A","x"],["B"],["A","x"],["","y"],["C","  "],["D","z"]])")),
            (Pairs{{"A", "x"}, {"D", "z"}}));
}

TEST(FreeForm, EmptyArray) { EXPECT_TRUE(parse_freeform_json("[]").empty()); }

TEST(FreeForm, Unrecoverable) {
  try {
    parse_freeform_json("no events here");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParseFailure);
  }
}

TEST(FreeForm, StringList) {
  EXPECT_EQ(parse_string_list("Types: [\"Attack\", 'Die']"),
            (std::vector<std::string>{"Attack", "Die"}));
  EXPECT_TRUE(parse_string_list("[]").empty());
  EXPECT_THROW(parse_string_list("none"), Error);
}
