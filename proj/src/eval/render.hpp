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
#ifndef SEMUPDATE_EVAL_RENDER_HPP_
#define SEMUPDATE_EVAL_RENDER_HPP_

#include <string>
#include <vector>

#include "eval/eval.hpp"
#include "json.hpp"

namespace semupdate {

// Percentages with one decimal.
std::string FormatPercent(double fraction);

// Per-update partition rows, the average rows, the macro row, and the gap
// closure lines.
std::string RenderSummaryTable(const Summary &summary);
nlohmann::json SummaryToJson(const Summary &summary);
// Grouped bars, one group per strategy.
std::string RenderSummarySvg(const Summary &summary);

std::string RenderCurveTable(const std::vector<CurveRow> &rows);
nlohmann::json CurveToJson(const std::vector<CurveRow> &rows);
// Changed accuracy against V2 size for the two conditions, from the
// "Average" rows.
std::string RenderCurveSvg(const std::vector<CurveRow> &rows);

}  // namespace semupdate

#endif  // SEMUPDATE_EVAL_RENDER_HPP_
