#include <gtest/gtest.h>

#include <map>
#include <sstream>

#include "dicore/error.hpp"
#include "dicore/eval.hpp"
#include "oracles.hpp"

using namespace dicore;

namespace {

const std::string kText = "The students held a demonstration against the war.";

GoldInstance gold(std::string id, std::string text, std::vector<GroundedMention> ms) {
  GoldInstance g;
  g.id = std::move(id);
  g.text = std::move(text);
  g.mentions = std::move(ms);
  return g;
}

std::vector<GoldInstance> protest_gold() {
  return {gold("s1", kText, {{"Demonstrate", "demonstration"}, {"Attack", "war"}})};
}

Prediction pred(std::vector<GroundedMention> ms) { return {"s1", std::move(ms)}; }

}  // namespace

TEST(Eval, PartialRecall) {
  const auto golds = protest_gold();
  const std::vector<Prediction> preds{pred({{"Attack", "war"}})};
  for (auto m : {Metric::kTI, Metric::kTC, Metric::kEI}) {
    const auto s = score(preds, golds, m);
    EXPECT_DOUBLE_EQ(s.precision, 1.0) << to_string(m);
    EXPECT_DOUBLE_EQ(s.recall, 0.5);
    EXPECT_NEAR(s.f1, 2.0 / 3.0, 1e-12);
    EXPECT_EQ(s.tp, 1);
    EXPECT_EQ(s.fp, 0);
    EXPECT_EQ(s.fn, 1);
  }
}

TEST(Eval, WrongTypeRightSpan) {
  const auto golds = protest_gold();
  const std::vector<Prediction> preds{pred({{"Attack", "demonstration"}})};
  EXPECT_DOUBLE_EQ(score(preds, golds, Metric::kTI).precision, 1.0);
  EXPECT_DOUBLE_EQ(score(preds, golds, Metric::kTC).precision, 0.0);
  EXPECT_DOUBLE_EQ(score(preds, golds, Metric::kEI).precision, 1.0);
}

TEST(Eval, PerfectAndCaseFolded) {
  const auto golds = protest_gold();
  const std::vector<Prediction> preds{pred({{"Attack", "War"}, {"Demonstrate", "demonstration"}})};
  const auto all = score_all(preds, golds);
  for (auto m : {Metric::kTI, Metric::kTC, Metric::kEI}) EXPECT_DOUBLE_EQ(all.get(m).f1, 1.0);
}

TEST(Eval, EmptyEverything) {
  const std::vector<GoldInstance> golds{gold("s1", kText, {})};
  const auto s = score({}, golds, Metric::kTC);
  EXPECT_EQ(s.precision, 0.0);
  EXPECT_EQ(s.recall, 0.0);
  EXPECT_EQ(s.f1, 0.0);
}

TEST(Eval, MissingPredictionCountsAsEmpty) {
  const auto golds = protest_gold();
  const auto s = score({}, golds, Metric::kTI);
  EXPECT_EQ(s.fn, 2);
  EXPECT_EQ(s.tp, 0);
}

TEST(Eval, IdMismatch) {
  const auto golds = protest_gold();
  const std::vector<Prediction> unknown{{"nope", {}}};
  const std::vector<Prediction> dup{pred({}), pred({})};
  for (const auto* p : {&unknown, &dup}) {
    try {
      score(*p, golds, Metric::kTI);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kIdMismatch);
    }
  }
}

TEST(Eval, MatchesBruteForceCounts) {
  std::mt19937_64 rng(7);
  const std::vector<std::string> types{"A", "B", "C"};
  const std::vector<std::string> triggers{"x", "y", "z", "X"};
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<GoldInstance> golds;
    std::vector<Prediction> preds;
    std::vector<std::vector<oracle::Pair>> g_pairs, p_pairs;
    for (int d = 0; d < 5; ++d) {
      const auto id = "d" + std::to_string(d);
      auto draw = [&] {
        std::vector<GroundedMention> ms;
        std::vector<oracle::Pair> ps;
        const int n = static_cast<int>(rng() % 4);
        for (int i = 0; i < n; ++i) {
          GroundedMention m{types[rng() % types.size()], triggers[rng() % triggers.size()]};
          ps.emplace_back(m.event_type, m.trigger);
          ms.push_back(std::move(m));
        }
        return std::pair(ms, ps);
      };
      auto [gm, gp] = draw();
      auto [pm, pp] = draw();
      golds.push_back(gold(id, "x y z", gm));
      preds.push_back({id, pm});
      g_pairs.push_back(gp);
      p_pairs.push_back(pp);
    }
    for (auto [metric, key] : {std::pair(Metric::kTI, oracle::Key::kTrigger),
                               std::pair(Metric::kTC, oracle::Key::kPair),
                               std::pair(Metric::kEI, oracle::Key::kType)}) {
      const auto expected = oracle::brute_force_counts(p_pairs, g_pairs, key);
      const auto s = score(preds, golds, metric);
      EXPECT_EQ(s.tp, expected.tp);
      EXPECT_EQ(s.fp, expected.fp);
      EXPECT_EQ(s.fn, expected.fn);
      EXPECT_NEAR(s.f1, oracle::f1_from(expected), 1e-12);
    }
  }
}

// With one trigger labeled twice in gold, trigger keys collapse while pair
// keys do not, so TC can exceed TI.
TEST(Eval, MultiLabelGoldCanLiftTcAboveTi) {
  const std::vector<GoldInstance> golds{gold("a", "war", {{"A", "war"}, {"B", "war"}}),
                                        gold("b", "x", {{"A", "x"}})};
  const std::vector<Prediction> preds{{"a", {{"A", "war"}, {"B", "war"}}}};
  EXPECT_NEAR(score(preds, golds, Metric::kTI).f1, 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(score(preds, golds, Metric::kTC).f1, 0.8, 1e-12);
}

TEST(Eval, TcNeverExceedsTiWithSingleLabelGold) {
  std::mt19937_64 rng(11);
  const std::vector<std::string> types{"A", "B", "C"};
  const std::vector<std::string> triggers{"x", "y", "Y"};
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<GoldInstance> golds;
    std::vector<Prediction> preds;
    for (int d = 0; d < 4; ++d) {
      std::map<std::string, std::string> label;
      std::vector<GroundedMention> gm, pm;
      for (int i = static_cast<int>(rng() % 4); i > 0; --i) {
        const auto& t = triggers[rng() % 3];
        gm.push_back({label.try_emplace(oracle::lower(t), types[rng() % 3]).first->second, t});
      }
      for (int i = static_cast<int>(rng() % 4); i > 0; --i) {
        pm.push_back({types[rng() % 3], triggers[rng() % 3]});
      }
      golds.push_back(gold("d" + std::to_string(d), "x y", gm));
      preds.push_back({"d" + std::to_string(d), pm});
    }
    const auto all = score_all(preds, golds);
    EXPECT_LE(all.tc.f1, all.ti.f1);
    EXPECT_LE(all.tc.precision, all.ti.precision);
    EXPECT_LE(all.tc.recall, all.ti.recall);
  }
}

TEST(Eval, MacroAverageAndRuns) {
  MetricScores a, b;
  a.ti = Scores::from_counts(3, 1, 0);
  b.ti = Scores::from_counts(1, 1, 2);
  const auto r = make_report({{"a", a}, {"b", b}});
  EXPECT_NEAR(r.average.ti.precision, (0.75 + 0.5) / 2, 1e-12);

  MetricScores r1, r2;
  r1.tc.f1 = 0.30;
  r2.tc.f1 = 0.40;
  r1.tc.tp = 2;
  r2.tc.tp = 5;
  const std::vector<EvalReport> runs{make_report({{"x", r1}}), make_report({{"x", r2}})};
  const auto agg = aggregate_runs(runs);
  EXPECT_EQ(agg.runs, 2);
  EXPECT_NEAR(agg.datasets.at("x").tc.f1, 0.35, 1e-12);
  EXPECT_NEAR(agg.average.tc.f1, 0.35, 1e-12);
  EXPECT_EQ(agg.datasets.at("x").tc.tp, 7);

  const auto single = aggregate_runs(std::span(runs).first(1));
  EXPECT_DOUBLE_EQ(single.datasets.at("x").tc.f1, 0.30);
}

TEST(Eval, AggregateErrors) {
  const std::vector<EvalReport> shapes{make_report({{"x", {}}}), make_report({{"y", {}}})};
  try {
    aggregate_runs(shapes);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShapeMismatch);
  }
  EXPECT_THROW(aggregate_runs({}), Error);
}

TEST(Eval, MapToSpan) {
  const std::string text = "The warden of the war";
  const auto s = map_to_span("war", text);
  ASSERT_TRUE(s.has_value());
  EXPECT_EQ(s->begin, 18u);
  EXPECT_EQ(s->end, 21u);
  EXPECT_EQ(map_to_span("WARDEN", text), (CharSpan{4, 10}));
  EXPECT_EQ(map_to_span("ward", text), (CharSpan{4, 8}));
  EXPECT_FALSE(map_to_span("peace", text).has_value());
}

TEST(Eval, Rendering) {
  MetricScores m;
  m.ti = Scores::from_counts(1, 0, 1);
  const auto r = make_report({{"ACE", m}});
  const auto j = nlohmann::json::parse(report_to_json(r));
  EXPECT_EQ(j["runs"], 1);
  EXPECT_NEAR(j["datasets"]["ACE"]["TI"]["f1"].get<double>(), 2.0 / 3.0, 1e-12);
  std::ostringstream table;
  write_report_table(r, table);
  EXPECT_NE(table.str().find("ACE"), std::string::npos);
  EXPECT_NE(table.str().find("66.7"), std::string::npos);
  EXPECT_NE(table.str().find("runs: 1"), std::string::npos);
}
