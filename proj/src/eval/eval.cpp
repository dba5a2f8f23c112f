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
#include "eval/eval.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <tuple>

#include "common/error.hpp"
#include "common/seed.hpp"
#include "strategies/strategies.hpp"

namespace semupdate {

EvalReport Evaluate(const ParserModel &model, const std::string &head,
                    const SplitBundle &bundle) {
  EvalReport report;
  report.update = bundle.spec.name;
  for (Partition p : kAllPartitions) {
    const std::vector<Example> &test = bundle.Test(p);
    std::vector<Tokens> queries;
    for (const Example &e : test) queries.push_back(e.tokens);
    const std::vector<Prediction> predictions = PredictBatch(model, queries, head);
    PartitionScore &score = report.scores[static_cast<int>(p)];
    score.denominator = static_cast<int64_t>(test.size());
    for (size_t i = 0; i < test.size(); ++i) {
      const Prediction &pred = predictions[i];
      if (!pred.valid) ++report.invalid_decodes;
      if (pred.valid && ExactMatch(pred.tree, *test[i].v2)) ++score.numerator;
      report.predictions[test[i].id] =
          (pred.valid ? "" : "!invalid ") + Serialize(pred.tree, test[i].tokens);
    }
  }
  return report;
}

const StrategySummary *Summary::Find(const std::string &strategy) const {
  for (const StrategySummary &row : rows) {
    if (row.strategy == strategy) return &row;
  }
  return nullptr;
}

const std::vector<std::string> &BaselineStrategies() {
  static const std::vector<std::string> kBaselines = {"v1_only", "v2_only",
                                                      "direct_mix", "upsampled_mix"};
  return kBaselines;
}

double GapClosure(double best_baseline_macro, double method_macro,
                  double oracle_macro) {
  if (!(oracle_macro > best_baseline_macro)) {
    Fail(ErrorCode::kDegenerateGap, "oracle does not exceed the best baseline");
  }
  return 100.0 * (method_macro - best_baseline_macro) /
         (oracle_macro - best_baseline_macro);
}

namespace {

// Canonical strategy order first, then anything else by name.
int StrategyRank(const std::string &name) {
  const auto &all = AllStrategies();
  for (size_t i = 0; i < all.size(); ++i) {
    if (name == StrategyName(all[i])) return static_cast<int>(i);
  }
  return static_cast<int>(all.size());
}

bool StrategyLess(const std::string &a, const std::string &b) {
  const int ra = StrategyRank(a), rb = StrategyRank(b);
  return ra != rb ? ra < rb : a < b;
}

StrategySummary MeanOf(const std::string &strategy,
                       const std::vector<const EvalReport *> &cells) {
  StrategySummary s;
  s.strategy = strategy;
  s.cells = cells.size();
  for (int p = 0; p < 3; ++p) {
    double sum = 0.0;
    for (const EvalReport *r : cells) sum += r->scores[p].accuracy();
    s.mean[p] = sum / static_cast<double>(cells.size());
  }
  s.macro = (s.mean[0] + s.mean[1] + s.mean[2]) / 3.0;
  return s;
}

}  // namespace

Summary Aggregate(const std::vector<EvalReport> &reports) {
  if (reports.empty()) Fail(ErrorCode::kIncompleteGrid, "no reports to aggregate");
  std::vector<const EvalReport *> sorted;
  for (const EvalReport &r : reports) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(), [](const EvalReport *a, const EvalReport *b) {
    if (a->strategy != b->strategy) return StrategyLess(a->strategy, b->strategy);
    return std::tie(a->update, a->seed) < std::tie(b->update, b->seed);
  });

  std::set<std::string> updates;
  std::set<uint64_t> seeds;
  std::vector<std::string> strategies;
  for (const EvalReport *r : sorted) {
    updates.insert(r->update);
    seeds.insert(r->seed);
    if (strategies.empty() || strategies.back() != r->strategy) {
      strategies.push_back(r->strategy);
    }
  }
  const size_t expected = updates.size() * seeds.size();
  Summary summary;
  summary.updates.assign(updates.begin(), updates.end());
  summary.seeds.assign(seeds.begin(), seeds.end());
  for (const std::string &strategy : strategies) {
    std::vector<const EvalReport *> cells;
    for (const EvalReport *r : sorted) {
      if (r->strategy == strategy) cells.push_back(r);
    }
    std::set<std::pair<std::string, uint64_t>> seen;
    for (const EvalReport *r : cells) {
      if (!seen.insert({r->update, r->seed}).second) {
        Fail(ErrorCode::kIncompleteGrid, "duplicate cell " + strategy + "/" +
                                             r->update + "/" + std::to_string(r->seed));
      }
    }
    if (cells.size() != expected) {
      Fail(ErrorCode::kIncompleteGrid,
           strategy + " covers " + std::to_string(cells.size()) + " of " +
               std::to_string(expected) + " update x seed cells");
    }
    summary.rows.push_back(MeanOf(strategy, cells));
    for (const std::string &update : updates) {
      std::vector<const EvalReport *> per;
      for (const EvalReport *r : cells) {
        if (r->update == update) per.push_back(r);
      }
      summary.per_update[update].push_back(MeanOf(strategy, per));
    }
  }

  const StrategySummary *best = nullptr;
  for (const std::string &name : BaselineStrategies()) {
    const StrategySummary *row = summary.Find(name);
    if (row && (!best || row->macro > best->macro)) best = row;
  }
  const StrategySummary *oracle = summary.Find("oracle");
  if (best && oracle && oracle->macro > best->macro) {
    summary.best_baseline = best->strategy;
    for (const StrategySummary &row : summary.rows) {
      const auto &baselines = BaselineStrategies();
      if (row.strategy == "oracle" ||
          std::find(baselines.begin(), baselines.end(), row.strategy) != baselines.end()) {
        continue;
      }
      summary.gap_closure[row.strategy] =
          GapClosure(best->macro, row.macro, oracle->macro);
    }
  }
  return summary;
}

std::vector<nlohmann::json> ReportRecords(const EvalReport &report) {
  std::vector<nlohmann::json> out;
  for (Partition p : kAllPartitions) {
    const PartitionScore &s = report.score(p);
    nlohmann::json j = {{"update", report.update},
                        {"strategy", report.strategy},
                        {"seed", report.seed},
                        {"partition", PartitionName(p)},
                        {"numerator", s.numerator},
                        {"denominator", s.denominator}};
    if (!report.notes.empty()) j["notes"] = report.notes;
    out.push_back(std::move(j));
  }
  return out;
}

std::vector<EvalReport> ReportsFromRecords(const std::vector<nlohmann::json> &records) {
  using Key = std::tuple<std::string, std::string, uint64_t>;
  std::map<Key, EvalReport> grouped;
  std::map<Key, std::set<Partition>> seen;
  std::vector<Key> order;
  for (const nlohmann::json &j : records) {
    try {
      const Key key{j.at("update").get<std::string>(), j.at("strategy").get<std::string>(),
                    j.at("seed").get<uint64_t>()};
      auto [it, fresh] = grouped.try_emplace(key);
      EvalReport &r = it->second;
      if (fresh) {
        order.push_back(key);
        std::tie(r.update, r.strategy, r.seed) = key;
      }
      const Partition p = PartitionFromName(j.at("partition").get<std::string>());
      if (!seen[key].insert(p).second) {
        Fail(ErrorCode::kIncompleteGrid, "duplicate report record for " +
                                             std::get<0>(key) + "/" + std::get<1>(key));
      }
      PartitionScore &s = r.scores[static_cast<int>(p)];
      s.numerator = j.at("numerator").get<int64_t>();
      s.denominator = j.at("denominator").get<int64_t>();
      if (s.denominator <= 0 || s.numerator < 0 || s.numerator > s.denominator) {
        Fail(ErrorCode::kParseError, "report record with invalid counts");
      }
      if (j.contains("notes") && r.notes.empty()) {
        r.notes = j.at("notes").get<std::vector<std::string>>();
      }
    } catch (const nlohmann::json::exception &e) {
      Fail(ErrorCode::kParseError, std::string("bad report record: ") + e.what());
    }
  }
  std::vector<EvalReport> out;
  for (const Key &key : order) {
    if (seen[key].size() != 3) {
      Fail(ErrorCode::kIncompleteGrid, "report for " + std::get<0>(key) + "/" +
                                           std::get<1>(key) + " lacks partitions");
    }
    out.push_back(std::move(grouped[key]));
  }
  return out;
}

std::vector<nlohmann::json> ReadJsonLines(const std::string &path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path);
  std::vector<nlohmann::json> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception &e) {
      throw Error(ErrorCode::kParseError,
                  path + ":" + std::to_string(number) + ": " + e.what(), number);
    }
  }
  return out;
}

void AppendJsonLines(const std::string &path, const std::vector<nlohmann::json> &lines) {
  std::ofstream out(path, std::ios::app);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path);
  for (const nlohmann::json &j : lines) out << j.dump() << '\n';
  out.flush();
  if (!out) Fail(ErrorCode::kIo, "write failed: " + path);
}

const char *CurveConditionName(CurveCondition c) {
  return c == CurveCondition::kConflicting ? "conflicting" : "oracle_removed";
}

SplitBundle BuildCurveBundle(const VersionedDataset &data, int v2_size,
                             const CurveSettings &settings, CurveCondition condition,
                             uint64_t seed) {
  if (v2_size <= 0 || settings.conflicting < 0 || settings.test_size <= 0) {
    Fail(ErrorCode::kInvalidArgument, "curve sizes must be positive");
  }
  std::vector<size_t> changed;
  for (size_t i = 0; i < data.examples.size(); ++i) {
    if (data.examples[i].partition == Partition::kChanged) changed.push_back(i);
  }
  const int max_size = std::max(
      v2_size, *std::max_element(settings.v2_sizes.begin(), settings.v2_sizes.end()));
  const size_t needed =
      static_cast<size_t>(settings.test_size + settings.conflicting + max_size);
  if (changed.size() < needed) {
    Fail(ErrorCode::kInsufficientPartition,
         "update " + data.spec.name + " has " + std::to_string(changed.size()) +
             " changed examples; the sweep needs " + std::to_string(needed));
  }
  // One shuffle per seed; the layout below keeps every slice fixed across
  // sizes and conditions.
  std::mt19937_64 rng(DeriveSeed(seed, "curve." + data.spec.name));
  DeterministicShuffle(changed, rng);

  SplitBundle b;
  b.spec = data.spec;
  size_t cursor = 0;
  for (int i = 0; i < settings.test_size; ++i) {
    b.test_changed.push_back(data.examples[changed[cursor++]]);
  }
  std::set<size_t> conflicting;
  for (int i = 0; i < settings.conflicting; ++i) conflicting.insert(changed[cursor++]);
  for (int i = 0; i < v2_size; ++i) {
    b.v2_train.push_back(data.examples[changed[cursor++]]);
  }
  for (size_t i = 0; i < data.examples.size(); ++i) {
    const Example &e = data.examples[i];
    if (e.partition != Partition::kChanged ||
        (condition == CurveCondition::kConflicting && conflicting.count(i))) {
      b.v1_train.push_back(e);
    }
  }
  return b;
}

std::vector<CurveRow> SummarizeCurve(const std::vector<CurvePoint> &points) {
  using Key = std::pair<std::string, int>;
  std::map<Key, std::map<uint64_t, std::array<const CurvePoint *, 2>>> cells;
  std::set<uint64_t> seeds;
  std::set<std::string> updates;
  std::set<int> sizes;
  for (const CurvePoint &p : points) {
    auto &slot = cells[{p.update, p.v2_size}][p.seed][static_cast<int>(p.condition)];
    if (slot) Fail(ErrorCode::kIncompleteGrid, "duplicate curve point");
    slot = &p;
    seeds.insert(p.seed);
    updates.insert(p.update);
    sizes.insert(p.v2_size);
  }
  if (points.empty()) Fail(ErrorCode::kIncompleteGrid, "no curve points");
  std::vector<CurveRow> rows;
  std::map<int, std::pair<double, double>> totals;
  for (const std::string &update : updates) {
    for (int size : sizes) {
      auto it = cells.find({update, size});
      if (it == cells.end() || it->second.size() != seeds.size()) {
        Fail(ErrorCode::kIncompleteGrid,
             "curve missing seeds for " + update + " size " + std::to_string(size));
      }
      CurveRow row{update, size, 0.0, 0.0};
      for (const auto &[seed, pair] : it->second) {
        if (!pair[0] || !pair[1]) {
          Fail(ErrorCode::kIncompleteGrid, "curve missing a condition for " + update);
        }
        row.conflicting += pair[0]->changed.accuracy();
        row.oracle_removed += pair[1]->changed.accuracy();
      }
      row.conflicting /= static_cast<double>(seeds.size());
      row.oracle_removed /= static_cast<double>(seeds.size());
      totals[size].first += row.conflicting;
      totals[size].second += row.oracle_removed;
      rows.push_back(row);
    }
  }
  for (const auto &[size, sum] : totals) {
    rows.push_back({"Average", size, sum.first / static_cast<double>(updates.size()),
                    sum.second / static_cast<double>(updates.size())});
  }
  return rows;
}

nlohmann::json CurvePointToJson(const CurvePoint &p) {
  return {{"update", p.update},
          {"v2_size", p.v2_size},
          {"condition", CurveConditionName(p.condition)},
          {"seed", p.seed},
          {"partition", "changed"},
          {"numerator", p.changed.numerator},
          {"denominator", p.changed.denominator}};
}

CurvePoint CurvePointFromJson(const nlohmann::json &j) {
  CurvePoint p;
  try {
    p.update = j.at("update").get<std::string>();
    p.v2_size = j.at("v2_size").get<int>();
    const std::string c = j.at("condition").get<std::string>();
    if (c == "conflicting") {
      p.condition = CurveCondition::kConflicting;
    } else if (c == "oracle_removed") {
      p.condition = CurveCondition::kOracleRemoved;
    } else {
      Fail(ErrorCode::kParseError, "unknown curve condition " + c);
    }
    p.seed = j.at("seed").get<uint64_t>();
    p.changed.numerator = j.at("numerator").get<int64_t>();
    p.changed.denominator = j.at("denominator").get<int64_t>();
  } catch (const nlohmann::json::exception &e) {
    Fail(ErrorCode::kParseError, std::string("bad curve record: ") + e.what());
  }
  return p;
}

}  // namespace semupdate
