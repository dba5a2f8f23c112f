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
#ifndef SEMUPDATE_STRATEGIES_STRATEGIES_HPP_
#define SEMUPDATE_STRATEGIES_STRATEGIES_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "dataset/dataset.hpp"
#include "model/parser_model.hpp"
#include "strategies/classifier.hpp"

namespace semupdate {

enum class Strategy {
  kV1Only,
  kV2Only,
  kDirectMix,
  kUpsampledMix,
  kFineTune,
  kMultiTask,
  kSelectRemove,
  kSelectIntentOnly,
  kOracle,
};

// Canonical order, also used for report rows.
const std::vector<Strategy> &AllStrategies();
const char *StrategyName(Strategy s);
// Throws InvalidArgument for unknown names.
Strategy StrategyFromName(const std::string &name);
bool NeedsClassifier(Strategy s);

// One training stage. Stages run in order on the same model; `tag` seeds the
// stage, so equal tags with equal inputs train identically.
struct PlanStage {
  std::string tag;
  std::vector<TrainPool> pools;
  TrainSchedule schedule;
};

struct TrainingPlan {
  Strategy strategy = Strategy::kV1Only;
  std::vector<std::string> heads;
  std::string eval_head;
  std::vector<PlanStage> stages;
  // Deviations worth reporting, e.g. a fallback to another recipe.
  std::vector<std::string> notes;
};

struct FineTuneSettings {
  double stage2_fraction = 0.2;
  double stage2_warmup_fraction = 0.1;
};

// Throws MissingClassifier when a select_* strategy gets no classifier.
TrainingPlan BuildTrainingPlan(Strategy strategy, const SplitBundle &bundle,
                               const ParserConfig &config,
                               const Classifier *classifier,
                               const FineTuneSettings &fine_tune = {});

// round(v1_changed / v2_changed), at least 1.
int UpsampleFactor(size_t v1_changed, size_t v2_changed);

// Targets are the V1 trees with the root relabeled to the post-update intent;
// only position 0 carries loss. Throws MultipleNewIntents when the update
// introduces its new intent through more than one merge rule.
std::vector<MaskedExample> IntentOnlyRelabel(const std::vector<Example> &examples,
                                             const UpdateSpec &spec);

MaskedExample WithLabel(const Example &e, const ParseTree &label);

// Fresh model per plan. With `first_stage_result`, stage 0 is skipped and
// training continues from a copy of that model (it must be the outcome of an
// identical stage 0 under the same seed).
ParserModel ExecutePlan(const TrainingPlan &plan, const Vocab &vocab,
                        const ParserConfig &config, uint64_t seed,
                        const ParserModel *first_stage_result = nullptr);

}  // namespace semupdate

#endif  // SEMUPDATE_STRATEGIES_STRATEGIES_HPP_
