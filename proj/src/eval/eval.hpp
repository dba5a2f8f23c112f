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
#ifndef SEMUPDATE_EVAL_EVAL_HPP_
#define SEMUPDATE_EVAL_EVAL_HPP_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dataset/dataset.hpp"
#include "json.hpp"
#include "model/parser_model.hpp"

namespace semupdate {

struct PartitionScore {
  int64_t numerator = 0;
  int64_t denominator = 0;

  double accuracy() const {
    return denominator == 0 ? 0.0 : static_cast<double>(numerator) / denominator;
  }
  bool operator==(const PartitionScore &) const = default;
};

struct EvalReport {
  std::string update;
  std::string strategy;
  uint64_t seed = 0;
  // Indexed by Partition.
  std::array<PartitionScore, 3> scores;
  // id -> serialized predicted tree.
  std::map<std::string, std::string> predictions;
  int invalid_decodes = 0;
  std::vector<std::string> notes;

  const PartitionScore &score(Partition p) const {
    return scores[static_cast<int>(p)];
  }
};

// Exact match against V2 labels on each test partition. Invalid decodes
// count as mismatches. Strategy and seed are left for the caller.
EvalReport Evaluate(const ParserModel &model, const std::string &head,
                    const SplitBundle &bundle);

struct StrategySummary {
  std::string strategy;
  std::array<double, 3> mean{};  // by Partition, in [0, 1]
  double macro = 0.0;
  size_t cells = 0;
};

struct Summary {
  std::vector<StrategySummary> rows;
  std::vector<std::string> updates;
  std::vector<uint64_t> seeds;
  // Per update: strategy -> mean over seeds.
  std::map<std::string, std::vector<StrategySummary>> per_update;
  std::optional<std::string> best_baseline;
  // Strategy -> percent of the baseline-to-oracle gap closed.
  std::map<std::string, double> gap_closure;

  const StrategySummary *Find(const std::string &strategy) const;
};

// Baselines considered for the gap-closure reference.
const std::vector<std::string> &BaselineStrategies();

// Unweighted means over the full strategy x update x seed grid. Throws
// IncompleteGrid on missing or duplicate cells. The result does not depend on
// report order.
Summary Aggregate(const std::vector<EvalReport> &reports);

// 100 * (method - baseline) / (oracle - baseline). Throws DegenerateGap when
// oracle <= baseline.
double GapClosure(double best_baseline_macro, double method_macro,
                  double oracle_macro);

// One line per (run, partition).
std::vector<nlohmann::json> ReportRecords(const EvalReport &report);
// Groups records back into reports; predictions are not restored.
std::vector<EvalReport> ReportsFromRecords(const std::vector<nlohmann::json> &records);
std::vector<nlohmann::json> ReadJsonLines(const std::string &path);
void AppendJsonLines(const std::string &path, const std::vector<nlohmann::json> &lines);

// Conflict-effect sweep.
enum class CurveCondition { kConflicting, kOracleRemoved };
const char *CurveConditionName(CurveCondition c);

struct CurveSettings {
  std::vector<int> v2_sizes = {25, 50, 100, 200};
  int conflicting = 50;
  int test_size = 100;
};

// V1 train holds every unchanged and trivially-unchanged example plus, for
// the conflicting condition, a fixed set of changed examples with V1 labels.
// V2 train holds changed examples only and is nested across sizes. Both
// conditions see the same V2 train and test sets for a given seed.
SplitBundle BuildCurveBundle(const VersionedDataset &data, int v2_size,
                             const CurveSettings &settings, CurveCondition condition,
                             uint64_t seed);

struct CurvePoint {
  std::string update;
  int v2_size = 0;
  CurveCondition condition = CurveCondition::kConflicting;
  uint64_t seed = 0;
  PartitionScore changed;
};

struct CurveRow {
  std::string update;  // "Average" for the cross-update row
  int v2_size = 0;
  double conflicting = 0.0;
  double oracle_removed = 0.0;
};

// Means over seeds per (update, size), then over updates. Rows are sorted by
// update then size, with averages last. Throws IncompleteGrid on holes.
std::vector<CurveRow> SummarizeCurve(const std::vector<CurvePoint> &points);

nlohmann::json CurvePointToJson(const CurvePoint &p);
CurvePoint CurvePointFromJson(const nlohmann::json &j);

}  // namespace semupdate

#endif  // SEMUPDATE_EVAL_EVAL_HPP_
