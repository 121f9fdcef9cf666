#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "fixtures.hpp"
#include "hatmatch/error.hpp"
#include "hatmatch/matching.hpp"

using namespace hatmatch;

TEST(MatchesJsonl, RoundTripKeepsEntriesPoolsAndFailures) {
  MatchedSet set;
  set.method = MatchMethod::SCM;
  set.outcome_kind = OutcomeKind::Citations;
  set.pool_kind = PoolKind::Unmoved;
  MatchedEntry e;
  e.key = "T1";
  e.treated = {{"T1", 2012, 1.0}};
  e.controls = {{"C1", 2012, 0.25}, {"C2", 2012, 0.75}};
  e.pre_rmspe = 1.5e-9;
  e.flags = {"iteration_limit"};
  set.entries.push_back(e);
  set.failures["quality_gate"] = 2;

  CandidatePool pool;
  pool.treated_id = "T1";
  pool.treated_y_w = 2012;
  pool.kind = PoolKind::Unmoved;
  pool.contenders = {{"C1", 2012}, {"C2", 2012}, {"C3", 2012}};
  pool.caps_applied = true;
  pool.survivors = 9;
  std::vector<CandidatePool> pools{pool};

  const auto path = (fixture::temp_dir("match_io") / "m.jsonl").string();
  write_matches_jsonl(path, set, pools);
  const auto back = read_matches_jsonl(path);

  EXPECT_EQ(back.matched.method, MatchMethod::SCM);
  EXPECT_EQ(back.matched.outcome_kind, OutcomeKind::Citations);
  EXPECT_EQ(back.matched.pool_kind, PoolKind::Unmoved);
  ASSERT_EQ(back.matched.entries.size(), 1u);
  const auto& b = back.matched.entries[0];
  EXPECT_EQ(b.key, "T1");
  ASSERT_EQ(b.controls.size(), 2u);
  EXPECT_EQ(b.controls[1].id, "C2");
  EXPECT_EQ(b.controls[1].weight, 0.75);
  EXPECT_EQ(b.pre_rmspe, 1.5e-9);
  EXPECT_EQ(b.flags, e.flags);
  EXPECT_EQ(back.matched.failures.at("quality_gate"), 2);
  ASSERT_EQ(back.pools.size(), 1u);
  EXPECT_EQ(back.pools[0].contenders, pool.contenders);
  EXPECT_TRUE(back.pools[0].caps_applied);
  EXPECT_EQ(back.pools[0].survivors, 9);
}

TEST(MatchesJsonl, NanDistanceSurvives) {
  MatchedSet set;
  MatchedEntry e;
  e.key = "T";
  e.treated = {{"T", 2011, 1.0}};
  set.entries.push_back(e);
  const auto path = (fixture::temp_dir("match_io_nan") / "m.jsonl").string();
  write_matches_jsonl(path, set);
  const auto back = read_matches_jsonl(path);
  ASSERT_EQ(back.matched.entries.size(), 1u);
  EXPECT_TRUE(std::isnan(back.matched.entries[0].distance));
}

TEST(MatchesJsonl, ErrorsNameFileAndLine) {
  MatchedSet set;
  MatchedEntry e;
  e.key = "T";
  set.entries.push_back(e);
  const auto path = (fixture::temp_dir("match_io_bad") / "m.jsonl").string();
  write_matches_jsonl(path, set);
  std::ofstream(path, std::ios::app) << "{not json\n";
  try {
    read_matches_jsonl(path);
    FAIL() << "expected InvalidInput";
  } catch (const InvalidInput& ex) {
    EXPECT_NE(std::string(ex.what()).find(path + ":3"), std::string::npos) << ex.what();
  }
  EXPECT_THROW(read_matches_jsonl(path + ".absent"), IoError);
}
