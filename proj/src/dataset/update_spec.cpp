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
#include "dataset/update_spec.hpp"

#include <fstream>

#include "common/error.hpp"

namespace semupdate {

namespace {

bool HasArguments(const ParseTree &t) { return !t.children.empty(); }

bool ContainsSlotUnder(const ParseTree &t, const RemoveArgumentRule &rule) {
  for (const ParseTree &c : t.children) {
    if (t.is_intent() && rule.intent_set.count(t.label) &&
        c.label == rule.slot_label) {
      return true;
    }
    if (ContainsSlotUnder(c, rule)) return true;
  }
  return false;
}

void StripSlots(ParseTree &t, const RemoveArgumentRule &rule) {
  if (t.is_intent() && rule.intent_set.count(t.label)) {
    std::erase_if(t.children, [&](const ParseTree &c) {
      return c.label == rule.slot_label;
    });
  }
  for (ParseTree &c : t.children) StripSlots(c, rule);
}

ParseTree ApplyRule(const ReverseRule &rule, const ParseTree &v2) {
  ParseTree out = v2;
  if (const auto *merge = std::get_if<MergeIntentRule>(&rule)) {
    out.label = merge->merged_into;
    switch (merge->argument_policy.kind) {
      case ArgumentPolicyKind::kKeep:
        break;
      case ArgumentPolicyKind::kDropAll:
        out.children.clear();
        break;
      case ArgumentPolicyKind::kRename:
        for (ParseTree &slot : out.children) {
          auto it = merge->argument_policy.rename.find(slot.label);
          if (it != merge->argument_policy.rename.end()) slot.label = it->second;
        }
        break;
    }
    return out;
  }
  StripSlots(out, std::get<RemoveArgumentRule>(rule));
  return out;
}

Selector SelectorFromString(const std::string &s) {
  if (s == "any") return Selector::kAny;
  if (s == "has_arguments") return Selector::kHasArguments;
  if (s == "no_arguments") return Selector::kNoArguments;
  Fail(ErrorCode::kConfig, "unknown selector '" + s + "'");
}

const char *SelectorName(Selector s) {
  switch (s) {
    case Selector::kAny: return "any";
    case Selector::kHasArguments: return "has_arguments";
    case Selector::kNoArguments: return "no_arguments";
  }
  return "any";
}

}  // namespace

void ValidateUpdateSpec(const UpdateSpec &spec) {
  if (spec.name.empty()) Fail(ErrorCode::kConfig, "update spec without name");
  for (const ReverseRule &rule : spec.rules) {
    if (const auto *merge = std::get_if<MergeIntentRule>(&rule)) {
      if (!spec.affected_intents.count(merge->merged_into)) {
        Fail(ErrorCode::kConfig, spec.name + ": merge target " +
                                     merge->merged_into +
                                     " missing from affected_intents");
      }
      if (merge->new_intent == merge->merged_into) {
        Fail(ErrorCode::kConfig, spec.name + ": merge into itself");
      }
    } else {
      const auto &remove = std::get<RemoveArgumentRule>(rule);
      for (const std::string &intent : remove.intent_set) {
        if (!spec.affected_intents.count(intent)) {
          Fail(ErrorCode::kConfig, spec.name + ": intent " + intent +
                                       " missing from affected_intents");
        }
      }
    }
  }
}

bool RuleFires(const ReverseRule &rule, const ParseTree &v2) {
  if (const auto *merge = std::get_if<MergeIntentRule>(&rule)) {
    if (v2.label != merge->new_intent) return false;
    switch (merge->selector) {
      case Selector::kAny: return true;
      case Selector::kHasArguments: return HasArguments(v2);
      case Selector::kNoArguments: return !HasArguments(v2);
    }
    return false;
  }
  const auto &remove = std::get<RemoveArgumentRule>(rule);
  return remove.intent_set.count(v2.label) && ContainsSlotUnder(v2, remove);
}

ParseTree ApplyReverseUpdate(const ParseTree &v2, const UpdateSpec &spec) {
  const ReverseRule *fired = nullptr;
  for (const ReverseRule &rule : spec.rules) {
    if (!RuleFires(rule, v2)) continue;
    if (fired) {
      Fail(ErrorCode::kAmbiguousRules,
           spec.name + ": more than one rule selects " + v2.label);
    }
    fired = &rule;
  }
  return fired ? ApplyRule(*fired, v2) : v2;
}

bool IsTriviallyUnchanged(const ParseTree &v1, const UpdateSpec &spec) {
  return spec.affected_intents.count(TopIntent(v1)) == 0;
}

UpdateSpec UpdateSpecFromJson(const nlohmann::json &j) {
  try {
    UpdateSpec spec;
    spec.name = j.at("name").get<std::string>();
    spec.description = j.value("description", "");
    for (const auto &intent : j.at("affected_intents")) {
      spec.affected_intents.insert(intent.get<std::string>());
    }
    for (const auto &r : j.value("rules", nlohmann::json::array())) {
      const std::string kind = r.at("kind").get<std::string>();
      if (kind == "merge_intent") {
        MergeIntentRule rule;
        rule.new_intent = r.at("new_intent").get<std::string>();
        rule.merged_into = r.at("merged_into").get<std::string>();
        rule.selector = SelectorFromString(r.value("selector", "any"));
        const auto &policy = r.value("argument_policy", nlohmann::json("keep"));
        if (policy.is_string()) {
          const std::string p = policy.get<std::string>();
          if (p == "keep") {
            rule.argument_policy.kind = ArgumentPolicyKind::kKeep;
          } else if (p == "drop_all") {
            rule.argument_policy.kind = ArgumentPolicyKind::kDropAll;
          } else {
            Fail(ErrorCode::kConfig, "unknown argument_policy '" + p + "'");
          }
        } else {
          rule.argument_policy.kind = ArgumentPolicyKind::kRename;
          rule.argument_policy.rename =
              policy.at("rename").get<std::map<std::string, std::string>>();
        }
        spec.rules.emplace_back(std::move(rule));
      } else if (kind == "remove_argument") {
        RemoveArgumentRule rule;
        for (const auto &intent : r.at("intent_set")) {
          rule.intent_set.insert(intent.get<std::string>());
        }
        rule.slot_label = r.at("slot_label").get<std::string>();
        spec.rules.emplace_back(std::move(rule));
      } else {
        Fail(ErrorCode::kConfig, "unknown rule kind '" + kind + "'");
      }
    }
    ValidateUpdateSpec(spec);
    return spec;
  } catch (const nlohmann::json::exception &e) {
    Fail(ErrorCode::kConfig, std::string("update spec: ") + e.what());
  }
}

nlohmann::json UpdateSpecToJson(const UpdateSpec &spec) {
  nlohmann::json j;
  j["name"] = spec.name;
  if (!spec.description.empty()) j["description"] = spec.description;
  j["affected_intents"] = spec.affected_intents;
  j["rules"] = nlohmann::json::array();
  for (const ReverseRule &rule : spec.rules) {
    nlohmann::json r;
    if (const auto *merge = std::get_if<MergeIntentRule>(&rule)) {
      r["kind"] = "merge_intent";
      r["new_intent"] = merge->new_intent;
      r["merged_into"] = merge->merged_into;
      r["selector"] = SelectorName(merge->selector);
      switch (merge->argument_policy.kind) {
        case ArgumentPolicyKind::kKeep: r["argument_policy"] = "keep"; break;
        case ArgumentPolicyKind::kDropAll:
          r["argument_policy"] = "drop_all";
          break;
        case ArgumentPolicyKind::kRename:
          r["argument_policy"] = {{"rename", merge->argument_policy.rename}};
          break;
      }
    } else {
      const auto &remove = std::get<RemoveArgumentRule>(rule);
      r["kind"] = "remove_argument";
      r["intent_set"] = remove.intent_set;
      r["slot_label"] = remove.slot_label;
    }
    j["rules"].push_back(std::move(r));
  }
  return j;
}

UpdateSpec LoadUpdateSpec(const std::string &path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception &e) {
    Fail(ErrorCode::kConfig, path + ": " + e.what());
  }
  return UpdateSpecFromJson(j);
}

void SaveUpdateSpec(const UpdateSpec &spec, const std::string &path) {
  std::ofstream out(path);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path);
  out << UpdateSpecToJson(spec).dump(2) << "\n";
}

}  // namespace semupdate
