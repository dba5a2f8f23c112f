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
#include "strategies/strategies.hpp"

#include <algorithm>
#include <cmath>

#include "common/error.hpp"
#include "common/seed.hpp"

namespace semupdate {

const std::vector<Strategy> &AllStrategies() {
  static const std::vector<Strategy> kAll = {
      Strategy::kV1Only,       Strategy::kV2Only,       Strategy::kDirectMix,
      Strategy::kUpsampledMix, Strategy::kFineTune,     Strategy::kMultiTask,
      Strategy::kSelectRemove, Strategy::kSelectIntentOnly, Strategy::kOracle};
  return kAll;
}

const char *StrategyName(Strategy s) {
  switch (s) {
    case Strategy::kV1Only: return "v1_only";
    case Strategy::kV2Only: return "v2_only";
    case Strategy::kDirectMix: return "direct_mix";
    case Strategy::kUpsampledMix: return "upsampled_mix";
    case Strategy::kFineTune: return "fine_tune";
    case Strategy::kMultiTask: return "multi_task";
    case Strategy::kSelectRemove: return "select_remove";
    case Strategy::kSelectIntentOnly: return "select_intent_only";
    case Strategy::kOracle: return "oracle";
  }
  return "?";
}

Strategy StrategyFromName(const std::string &name) {
  for (Strategy s : AllStrategies()) {
    if (name == StrategyName(s)) return s;
  }
  Fail(ErrorCode::kInvalidArgument, "unknown strategy '" + name + "'");
}

bool NeedsClassifier(Strategy s) {
  return s == Strategy::kSelectRemove || s == Strategy::kSelectIntentOnly;
}

MaskedExample WithLabel(const Example &e, const ParseTree &label) {
  return MaskedExample{e.id, e.tokens, label, {}};
}

int UpsampleFactor(size_t v1_changed, size_t v2_changed) {
  if (v2_changed == 0) return 1;
  const long f = std::lround(static_cast<double>(v1_changed) /
                             static_cast<double>(v2_changed));
  return static_cast<int>(std::max(1L, f));
}

std::vector<MaskedExample> IntentOnlyRelabel(const std::vector<Example> &examples,
                                             const UpdateSpec &spec) {
  const MergeIntentRule *merge = nullptr;
  for (const ReverseRule &rule : spec.rules) {
    if (const auto *m = std::get_if<MergeIntentRule>(&rule)) {
      if (merge) {
        Fail(ErrorCode::kMultipleNewIntents,
             "update " + spec.name + " introduces intents through several rules");
      }
      merge = m;
    }
  }
  std::vector<MaskedExample> out;
  for (const Example &e : examples) {
    if (!e.v1) Fail(ErrorCode::kInvalidArgument, e.id + " has no V1 label");
    ParseTree target = *e.v1;
    if (merge && target.label == merge->merged_into) target.label = merge->new_intent;
    MaskedExample m = WithLabel(e, target);
    m.loss_mask = IntentOnlyMask(target);
    out.push_back(std::move(m));
  }
  return out;
}

namespace {

std::vector<MaskedExample> V1Labeled(const std::vector<Example> &examples) {
  std::vector<MaskedExample> out;
  for (const Example &e : examples) out.push_back(WithLabel(e, *e.v1));
  return out;
}

std::vector<MaskedExample> V2Labeled(const std::vector<Example> &examples) {
  std::vector<MaskedExample> out;
  for (const Example &e : examples) out.push_back(WithLabel(e, *e.v2));
  return out;
}

void Append(std::vector<MaskedExample> &to, const std::vector<MaskedExample> &from) {
  to.insert(to.end(), from.begin(), from.end());
}

// V1 examples split by whether the (observable) V1 intent lies outside the
// affected list.
void SplitTrivial(const SplitBundle &b, std::vector<Example> &trivial,
                  std::vector<Example> &rest) {
  for (const Example &e : b.v1_train) {
    (IsTriviallyUnchanged(*e.v1, b.spec) ? trivial : rest).push_back(e);
  }
}

PlanStage SingleStage(std::string tag, std::vector<MaskedExample> data,
                      const TrainSchedule &schedule) {
  PlanStage s;
  s.tag = std::move(tag);
  TrainPool pool;
  pool.data = std::move(data);
  s.pools.push_back(std::move(pool));
  s.schedule = schedule;
  return s;
}

}  // namespace

TrainingPlan BuildTrainingPlan(Strategy strategy, const SplitBundle &bundle,
                               const ParserConfig &config,
                               const Classifier *classifier,
                               const FineTuneSettings &fine_tune) {
  if (NeedsClassifier(strategy) && classifier == nullptr) {
    Fail(ErrorCode::kMissingClassifier,
         std::string(StrategyName(strategy)) + " needs a selection classifier");
  }
  TrainingPlan plan;
  plan.strategy = strategy;
  plan.heads = {ParserModel::kDefaultHead};
  plan.eval_head = ParserModel::kDefaultHead;
  const TrainSchedule base = TrainSchedule::From(config);

  std::vector<Example> trivial, non_trivial;
  SplitTrivial(bundle, trivial, non_trivial);
  std::vector<MaskedExample> v2_recipe = V2Labeled(bundle.v2_train);
  Append(v2_recipe, V1Labeled(trivial));

  switch (strategy) {
    case Strategy::kV1Only:
      plan.stages.push_back(SingleStage("v1", V1Labeled(bundle.v1_train), base));
      break;
    case Strategy::kV2Only:
      plan.stages.push_back(SingleStage("v2", v2_recipe, base));
      break;
    case Strategy::kDirectMix: {
      std::vector<MaskedExample> data = V1Labeled(bundle.v1_train);
      Append(data, V2Labeled(bundle.v2_train));
      plan.stages.push_back(SingleStage("mix", std::move(data), base));
      break;
    }
    case Strategy::kUpsampledMix: {
      size_t v1_changed = 0, v2_changed = 0;
      for (const Example &e : bundle.v1_train) {
        v1_changed += e.partition == Partition::kChanged ? 1 : 0;
      }
      for (const Example &e : bundle.v2_train) {
        v2_changed += e.partition == Partition::kChanged ? 1 : 0;
      }
      const int factor = UpsampleFactor(v1_changed, v2_changed);
      std::vector<MaskedExample> data = V1Labeled(bundle.v1_train);
      const std::vector<MaskedExample> v2 = V2Labeled(bundle.v2_train);
      for (int i = 0; i < factor; ++i) Append(data, v2);
      plan.notes.push_back("upsample factor " + std::to_string(factor));
      plan.stages.push_back(SingleStage("upsampled", std::move(data), base));
      break;
    }
    case Strategy::kFineTune: {
      plan.stages.push_back(SingleStage("v1", V1Labeled(bundle.v1_train), base));
      TrainSchedule second = base;
      second.steps = std::max(
          1, static_cast<int>(std::lround(base.steps * fine_tune.stage2_fraction)));
      second.warmup = std::max(
          1, static_cast<int>(std::lround(second.steps * fine_tune.stage2_warmup_fraction)));
      plan.stages.push_back(SingleStage("fine_tune.v2", v2_recipe, second));
      break;
    }
    case Strategy::kMultiTask: {
      plan.heads = {"v1", "v2"};
      plan.eval_head = "v2";
      PlanStage s;
      s.tag = "multi_task";
      s.schedule = base;
      s.pools.push_back(TrainPool{V1Labeled(bundle.v1_train), "v1", 0.5});
      s.pools.push_back(TrainPool{v2_recipe, "v2", 0.5});
      plan.stages.push_back(std::move(s));
      break;
    }
    case Strategy::kSelectRemove:
    case Strategy::kSelectIntentOnly: {
      const FilterResult filtered = FilterV1(*classifier, non_trivial);
      std::vector<MaskedExample> data = v2_recipe;
      Append(data, V1Labeled(filtered.predicted_unchanged));
      std::string tag = "select_remove";
      if (strategy == Strategy::kSelectIntentOnly) {
        try {
          Append(data, IntentOnlyRelabel(filtered.predicted_changed, bundle.spec));
          tag = "select_intent_only";
        } catch (const Error &e) {
          if (e.code() != ErrorCode::kMultipleNewIntents) throw;
          plan.notes.push_back("fallback: select_intent_only -> select_remove (" +
                               std::string(e.what()) + ")");
        }
      }
      plan.notes.push_back("predicted changed " +
                           std::to_string(filtered.predicted_changed.size()) +
                           " of " + std::to_string(non_trivial.size()));
      plan.stages.push_back(SingleStage(tag, std::move(data), base));
      break;
    }
    case Strategy::kOracle: {
      std::vector<MaskedExample> data = V2Labeled(bundle.v1_train);
      Append(data, V2Labeled(bundle.v2_train));
      plan.stages.push_back(SingleStage("oracle", std::move(data), base));
      break;
    }
  }
  return plan;
}

ParserModel ExecutePlan(const TrainingPlan &plan, const Vocab &vocab,
                        const ParserConfig &config, uint64_t seed,
                        const ParserModel *first_stage_result) {
  if (plan.stages.empty()) Fail(ErrorCode::kEmptyData, "plan has no stages");
  size_t first = 0;
  ParserModel model = first_stage_result
                          ? *first_stage_result
                          : ParserModel(config, vocab, DeriveSeed(seed, "init"));
  if (first_stage_result) {
    first = 1;
  } else {
    for (const std::string &head : plan.heads) {
      if (!model.HasHead(head)) model.AddHead(head, HeadInit::kFresh, "", seed);
    }
    for (const std::string &head : model.Heads()) {
      if (std::find(plan.heads.begin(), plan.heads.end(), head) == plan.heads.end()) {
        model.RemoveHead(head);
      }
    }
  }
  for (size_t i = first; i < plan.stages.size(); ++i) {
    const PlanStage &stage = plan.stages[i];
    model.params().ResetOptimizerState();
    TrainPools(model, stage.pools, stage.schedule,
               DeriveSeed(seed, "stage." + stage.tag));
  }
  return model;
}

}  // namespace semupdate
