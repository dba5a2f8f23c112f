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
#ifndef SEMUPDATE_DATASET_UPDATE_SPEC_HPP_
#define SEMUPDATE_DATASET_UPDATE_SPEC_HPP_

#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "parsetree/parse_tree.hpp"

namespace semupdate {

enum class ArgumentPolicyKind { kKeep, kDropAll, kRename };

struct ArgumentPolicy {
  ArgumentPolicyKind kind = ArgumentPolicyKind::kKeep;
  // kRename: V2 slot label -> V1 slot label, applied to the root's slots.
  std::map<std::string, std::string> rename;
};

// Predicate over the V2 tree, evaluated after the top-intent check.
enum class Selector { kAny, kHasArguments, kNoArguments };

// Folds V2 examples of `new_intent` back into `merged_into`.
struct MergeIntentRule {
  std::string new_intent;
  std::string merged_into;
  ArgumentPolicy argument_policy;
  Selector selector = Selector::kAny;
};

// Strips `slot_label` slots from intents in `intent_set`.
struct RemoveArgumentRule {
  std::set<std::string> intent_set;
  std::string slot_label;
};

using ReverseRule = std::variant<MergeIntentRule, RemoveArgumentRule>;

// One schema update, described in the reverse (V2 -> V1) direction.
struct UpdateSpec {
  std::string name;
  std::string description;
  std::set<std::string> affected_intents;
  std::vector<ReverseRule> rules;
};

void ValidateUpdateSpec(const UpdateSpec &spec);

bool RuleFires(const ReverseRule &rule, const ParseTree &v2);

// V1 form of a V2 label. Labels no rule selects come back unchanged; two
// firing rules raise AmbiguousRules.
ParseTree ApplyReverseUpdate(const ParseTree &v2, const UpdateSpec &spec);

bool IsTriviallyUnchanged(const ParseTree &v1, const UpdateSpec &spec);

UpdateSpec UpdateSpecFromJson(const nlohmann::json &j);
nlohmann::json UpdateSpecToJson(const UpdateSpec &spec);
UpdateSpec LoadUpdateSpec(const std::string &path);
void SaveUpdateSpec(const UpdateSpec &spec, const std::string &path);

}  // namespace semupdate

#endif  // SEMUPDATE_DATASET_UPDATE_SPEC_HPP_
