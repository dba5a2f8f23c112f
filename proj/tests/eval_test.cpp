// Copyright 2026 The semupdate Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "doctest.h"

#include <algorithm>
#include <random>
#include <set>

#include "common/error.hpp"
#include "dataset/toy_grammar.hpp"
#include "eval/eval.hpp"
#include "eval/render.hpp"
#include "support/test_util.hpp"

namespace semupdate {
namespace {

using testing::CodeOf;

// Published averages (changed, unchanged, trivially unchanged) per strategy.
struct Row {
  const char *strategy;
  double changed, unchanged, trivial;
};
const Row kPublished[] = {
    {"v2_only", 53.8, 24.0, 77.6},          {"oracle", 78.4, 70.0, 75.6},
    {"select_intent_only", 68.3, 68.2, 78.0}, {"select_remove", 51.4, 69.3, 76.3},
    {"v1_only", 0.0, 71.7, 76.0},           {"direct_mix", 3.1, 71.2, 75.4},
    {"upsampled_mix", 3.4, 71.8, 76.4},     {"fine_tune", 62.1, 39.6, 78.0},
    {"multi_task", 65.5, 65.5, 78.0},
};

PartitionScore Percent(double v) {
  return {static_cast<int64_t>(std::llround(v * 10)), 1000};
}

EvalReport Report(const std::string &update, const std::string &strategy, uint64_t seed,
                  PartitionScore c, PartitionScore u, PartitionScore t) {
  EvalReport r;
  r.update = update;
  r.strategy = strategy;
  r.seed = seed;
  r.scores = {c, u, t};
  return r;
}

std::vector<EvalReport> PublishedReports() {
  std::vector<EvalReport> out;
  for (const Row &row : kPublished) {
    out.push_back(Report("avg", row.strategy, 1, Percent(row.changed), Percent(row.unchanged),
                         Percent(row.trivial)));
  }
  return out;
}

TEST_CASE("aggregating the published averages") {
  const Summary s = Aggregate(PublishedReports());
  // Hand-computed: mean of the three partition columns.
  auto macro = [](const Row &r) { return (r.changed + r.unchanged + r.trivial) / 3.0; };
  for (const Row &row : kPublished) {
    const StrategySummary *found = s.Find(row.strategy);
    REQUIRE(found);
    CHECK(found->macro * 100 == doctest::Approx(macro(row)).epsilon(1e-9));
  }
  CHECK(s.Find("v2_only")->macro * 100 == doctest::Approx(51.8).epsilon(0.0005));
  CHECK(s.Find("oracle")->macro * 100 == doctest::Approx(74.67).epsilon(0.0005));
  CHECK(s.Find("select_intent_only")->macro * 100 == doctest::Approx(71.5).epsilon(0.0005));
  REQUIRE(s.best_baseline.has_value());
  CHECK(*s.best_baseline == "v2_only");
  const double expected = 100.0 * (71.5 - 51.8) / (224.0 / 3.0 - 51.8);
  CHECK(s.gap_closure.at("select_intent_only") == doctest::Approx(expected).epsilon(1e-6));
  CHECK(std::abs(s.gap_closure.at("select_intent_only") - 86.0) <= 0.5);
  CHECK_FALSE(s.gap_closure.count("oracle"));
  CHECK_FALSE(s.gap_closure.count("direct_mix"));
}

TEST_CASE("gap closure") {
  CHECK(GapClosure(0.5, 0.75, 1.0) == doctest::Approx(50.0));
  CHECK(GapClosure(0.5, 0.4, 1.0) == doctest::Approx(-20.0));
  CHECK(CodeOf([] { GapClosure(0.6, 0.7, 0.6); }) == ErrorCode::kDegenerateGap);
  CHECK(CodeOf([] { GapClosure(0.6, 0.7, 0.5); }) == ErrorCode::kDegenerateGap);
}

TEST_CASE("aggregate is invariant to report order") {
  std::vector<EvalReport> reports;
  std::mt19937_64 rng(3);
  for (const char *u : {"A", "B"}) {
    for (uint64_t seed : {1, 2, 3}) {
      for (const Row &row : kPublished) {
        reports.push_back(Report(u, row.strategy, seed, {int64_t(rng() % 100), 100},
                                 {int64_t(rng() % 100), 100}, {int64_t(rng() % 100), 100}));
      }
    }
  }
  const nlohmann::json first = SummaryToJson(Aggregate(reports));
  for (int i = 0; i < 5; ++i) {
    std::shuffle(reports.begin(), reports.end(), rng);
    CHECK(SummaryToJson(Aggregate(reports)) == first);
  }
  const Summary s = Aggregate(reports);
  CHECK(s.updates == std::vector<std::string>{"A", "B"});
  CHECK(s.seeds == std::vector<uint64_t>{1, 2, 3});
  CHECK(s.per_update.at("A").size() == 9);

  // Independent mean for one cell group.
  double sum = 0.0;
  for (const EvalReport &r : reports) {
    if (r.strategy == "fine_tune") sum += r.scores[0].accuracy();
  }
  CHECK(s.Find("fine_tune")->mean[0] == doctest::Approx(sum / 6));
}

TEST_CASE("aggregate rejects incomplete grids") {
  CHECK(CodeOf([] { Aggregate({}); }) == ErrorCode::kIncompleteGrid);
  std::vector<EvalReport> reports = {
      Report("A", "v1_only", 1, {1, 2}, {1, 2}, {1, 2}),
      Report("A", "v1_only", 2, {1, 2}, {1, 2}, {1, 2}),
      Report("A", "oracle", 1, {1, 2}, {1, 2}, {1, 2}),
  };
  CHECK(CodeOf([&] { Aggregate(reports); }) == ErrorCode::kIncompleteGrid);
  reports.push_back(reports[2]);
  CHECK(CodeOf([&] { Aggregate(reports); }) == ErrorCode::kIncompleteGrid);
  reports.back().seed = 2;
  CHECK_NOTHROW(Aggregate(reports));
}

TEST_CASE("oracle at or below the best baseline leaves gap closure unset") {
  const Summary s = Aggregate({Report("A", "v1_only", 1, {5, 10}, {5, 10}, {5, 10}),
                               Report("A", "oracle", 1, {5, 10}, {5, 10}, {5, 10}),
                               Report("A", "multi_task", 1, {6, 10}, {5, 10}, {5, 10})});
  CHECK_FALSE(s.best_baseline.has_value());
  CHECK(s.gap_closure.empty());
}

TEST_CASE("report records round trip through json lines") {
  testing::TempDir dir;
  const std::string path = dir.Path("reports.jsonl");
  std::vector<EvalReport> reports = PublishedReports();
  reports[2].notes = {"predicted changed 12 of 40"};
  for (const EvalReport &r : reports) AppendJsonLines(path, ReportRecords(r));
  const auto lines = ReadJsonLines(path);
  CHECK(lines.size() == 3 * reports.size());
  const std::vector<EvalReport> back = ReportsFromRecords(lines);
  REQUIRE(back.size() == reports.size());
  for (const EvalReport &r : reports) {
    auto it = std::find_if(back.begin(), back.end(),
                           [&](const EvalReport &b) { return b.strategy == r.strategy; });
    REQUIRE(it != back.end());
    CHECK(it->scores == r.scores);
    CHECK(it->notes == r.notes);
  }

  testing::WriteFile(path, "{\"a\":1}\n\n{broken\n");
  try {
    ReadJsonLines(path);
    FAIL("expected a parse error");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kParseError);
    CHECK(e.line() == 3);
  }
  CHECK(CodeOf([&] { ReadJsonLines(dir.Path("missing.jsonl")); }) == ErrorCode::kIo);
}

const VersionedDataset &CurveData() {
  static const VersionedDataset data = [] {
    for (const UpdateSpec &s : DefaultUpdateSpecs()) {
      if (s.name == "A") return BuildVersionPair(GenerateToyCorpus(DefaultGrammar(), 0), s);
    }
    throw std::runtime_error("missing A");
  }();
  return data;
}

std::set<std::string> Ids(const std::vector<Example> &v) {
  std::set<std::string> out;
  for (const Example &e : v) out.insert(e.id);
  return out;
}

TEST_CASE("curve bundles nest across sizes and differ only by the conflicting set") {
  const VersionedDataset &data = CurveData();
  const CurveSettings settings;
  size_t non_changed = 0;
  for (const Example &e : data.examples) non_changed += e.partition != Partition::kChanged;

  std::set<std::string> previous_v2;
  std::set<std::string> test_ids;
  for (int size : settings.v2_sizes) {
    const SplitBundle c =
        BuildCurveBundle(data, size, settings, CurveCondition::kConflicting, 4);
    const SplitBundle o =
        BuildCurveBundle(data, size, settings, CurveCondition::kOracleRemoved, 4);
    CHECK(c.v2_train.size() == static_cast<size_t>(size));
    CHECK(c.test_changed.size() == 100);
    CHECK(c.v1_train.size() == non_changed + 50);
    CHECK(o.v1_train.size() == non_changed);
    CHECK(Ids(o.v2_train) == Ids(c.v2_train));
    CHECK(Ids(o.test_changed) == Ids(c.test_changed));
    for (const Example &e : c.v2_train) CHECK(e.partition == Partition::kChanged);

    const auto v2 = Ids(c.v2_train);
    for (const std::string &id : previous_v2) CHECK(v2.count(id));
    previous_v2 = v2;
    if (test_ids.empty()) test_ids = Ids(c.test_changed);
    CHECK(Ids(c.test_changed) == test_ids);

    // Disjoint test, v2 and conflicting sets.
    const auto v1 = Ids(c.v1_train);
    for (const std::string &id : v2) CHECK_FALSE(v1.count(id));
    for (const std::string &id : test_ids) {
      CHECK_FALSE(v1.count(id));
      CHECK_FALSE(v2.count(id));
    }
  }
  const SplitBundle other =
      BuildCurveBundle(data, 25, settings, CurveCondition::kConflicting, 5);
  CHECK(Ids(other.test_changed) != test_ids);

  CurveSettings huge = settings;
  huge.test_size = 10000;
  CHECK(CodeOf([&] { BuildCurveBundle(data, 25, huge, CurveCondition::kConflicting, 1); }) ==
        ErrorCode::kInsufficientPartition);
  CHECK(CodeOf([&] { BuildCurveBundle(data, 0, settings, CurveCondition::kConflicting, 1); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("curve summary averages seeds then updates") {
  std::vector<CurvePoint> points;
  auto add = [&](const std::string &u, int size, CurveCondition c, uint64_t seed, int num) {
    points.push_back({u, size, c, seed, {num, 100}});
  };
  add("A", 25, CurveCondition::kConflicting, 1, 10);
  add("A", 25, CurveCondition::kConflicting, 2, 20);
  add("A", 25, CurveCondition::kOracleRemoved, 1, 40);
  add("A", 25, CurveCondition::kOracleRemoved, 2, 60);
  add("C", 25, CurveCondition::kConflicting, 1, 30);
  add("C", 25, CurveCondition::kConflicting, 2, 30);
  add("C", 25, CurveCondition::kOracleRemoved, 1, 70);
  add("C", 25, CurveCondition::kOracleRemoved, 2, 90);
  const auto rows = SummarizeCurve(points);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].update == "A");
  CHECK(rows[0].conflicting == doctest::Approx(0.15));
  CHECK(rows[0].oracle_removed == doctest::Approx(0.5));
  CHECK(rows[2].update == "Average");
  CHECK(rows[2].conflicting == doctest::Approx(0.225));
  CHECK(rows[2].oracle_removed == doctest::Approx(0.65));

  for (const CurvePoint &p : points) {
    const CurvePoint back = CurvePointFromJson(CurvePointToJson(p));
    CHECK(back.update == p.update);
    CHECK(back.v2_size == p.v2_size);
    CHECK(back.condition == p.condition);
    CHECK(back.seed == p.seed);
    CHECK(back.changed == p.changed);
  }

  auto missing = points;
  missing.pop_back();
  CHECK(CodeOf([&] { SummarizeCurve(missing); }) == ErrorCode::kIncompleteGrid);
  auto dup = points;
  dup.push_back(points[0]);
  CHECK(CodeOf([&] { SummarizeCurve(dup); }) == ErrorCode::kIncompleteGrid);
  CHECK(CodeOf([] { SummarizeCurve({}); }) == ErrorCode::kIncompleteGrid);

  const std::string table = RenderCurveTable(rows);
  CHECK(table.find("Average") != std::string::npos);
  CHECK(RenderCurveSvg(rows).rfind("<svg", 0) == 0);
  CHECK(CurveToJson(rows).is_array());
}

TEST_CASE("summary rendering") {
  CHECK(FormatPercent(0.7147) == "71.5");
  CHECK(FormatPercent(0.0) == "0.0");
  const Summary s = Aggregate(PublishedReports());
  const std::string table = RenderSummaryTable(s);
  for (const Row &row : kPublished) CHECK(table.find(row.strategy) != std::string::npos);
  CHECK(table.find("86.") != std::string::npos);
  CHECK(RenderSummarySvg(s).rfind("<svg", 0) == 0);
  const nlohmann::json j = SummaryToJson(s);
  CHECK(j.dump().find("select_intent_only") != std::string::npos);
}

}  // namespace
}  // namespace semupdate
