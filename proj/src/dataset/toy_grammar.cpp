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
#include "dataset/toy_grammar.hpp"

#include <cstdio>
#include <random>
#include <set>

#include "common/error.hpp"

namespace semupdate {

namespace {

using Intents = std::vector<GrammarConfig::IntentTemplates>;

Intents DefaultIntents() {
  return {
      {"IN:GET_DIRECTIONS",
       {"directions to {SL:DESTINATION}",
        "how do i get to {SL:DESTINATION} from {SL:SOURCE}",
        "show me the way to {SL:DESTINATION}",
        "best route to {SL:DESTINATION} by {SL:METHOD_TRAVEL}",
        "take me to {SL:DESTINATION}",
        "which route to {SL:DESTINATION} has less {SL:OBSTRUCTION}",
        "directions to {SL:DESTINATION} avoiding {SL:OBSTRUCTION}",
        "route from {SL:SOURCE} to {SL:DESTINATION} without {SL:OBSTRUCTION}",
        "navigate to {SL:DESTINATION} and avoid {SL:OBSTRUCTION}",
        "get me to {SL:DESTINATION} by {SL:METHOD_TRAVEL} avoiding {SL:OBSTRUCTION}"}},
      {"IN:GET_ESTIMATED_ARRIVAL",
       {"if i leave {SL:DATE_TIME_DEPARTURE} when will i get to {SL:DESTINATION}",
        "what time will i arrive at {SL:DESTINATION} if i leave {SL:DATE_TIME_DEPARTURE}",
        "when will i reach {SL:DESTINATION}",
        "eta to {SL:DESTINATION}",
        "leaving {SL:DATE_TIME_DEPARTURE} what is my arrival time at {SL:DESTINATION}",
        "when would i arrive in {SL:DESTINATION} by {SL:METHOD_TRAVEL}",
        "arrival time at {SL:DESTINATION} if we head out {SL:DATE_TIME_DEPARTURE}"}},
      {"IN:GET_ESTIMATED_DEPARTURE",
       {"when should i leave to get to {SL:DESTINATION} {SL:DATE_TIME_ARRIVAL}",
        "what time do i need to leave for {SL:DESTINATION} to be there {SL:DATE_TIME_ARRIVAL}",
        "when do i have to head out to reach {SL:DESTINATION} {SL:DATE_TIME_ARRIVAL}",
        "departure time to make it to {SL:DESTINATION} {SL:DATE_TIME_ARRIVAL}",
        "how early should i leave for {SL:DESTINATION}",
        "when must i depart to arrive at {SL:DESTINATION} {SL:DATE_TIME_ARRIVAL}"}},
      {"IN:GET_ESTIMATED_DURATION",
       {"how long will it take to get to {SL:DESTINATION}",
        "how long is the drive from {SL:SOURCE} to {SL:DESTINATION}",
        "travel time to {SL:DESTINATION} by {SL:METHOD_TRAVEL}",
        "how many minutes to {SL:DESTINATION} avoiding {SL:OBSTRUCTION}",
        "how long is my commute {~FILLER}",
        "how long will the trip take {~FILLER}",
        "how much time does the drive take {~FILLER}"}},
      {"IN:GET_DISTANCE",
       {"how far is {SL:DESTINATION}",
        "how far is {SL:DESTINATION} from {SL:SOURCE}",
        "distance from {SL:SOURCE} to {SL:DESTINATION}",
        "how many miles to {SL:DESTINATION}",
        "what is the distance to {SL:DESTINATION}",
        "how far away is {SL:DESTINATION}"}},
      {"IN:GET_INFO_TRAFFIC",
       {"how is traffic on {SL:LOCATION}",
        "is there traffic on {SL:LOCATION} {SL:DATE_TIME}",
        "where is there construction on {SL:LOCATION}",
        "any accidents on {SL:LOCATION}",
        "traffic report for {SL:LOCATION} {SL:DATE_TIME}",
        "is {SL:LOCATION} backed up {SL:DATE_TIME}",
        "how bad is the jam on {SL:LOCATION}"}},
      {"IN:GET_INFO_ROAD_CONDITION",
       {"are roads {SL:ROAD_CONDITION} on {SL:LOCATION}",
        "is {SL:LOCATION} {SL:ROAD_CONDITION}",
        "are the roads {SL:ROAD_CONDITION} near {SL:LOCATION}",
        "road conditions on {SL:LOCATION}",
        "is it {SL:ROAD_CONDITION} on {SL:LOCATION}",
        "how are the roads near {SL:LOCATION}",
        "will {SL:LOCATION} be {SL:ROAD_CONDITION}"}},
      {"IN:UNSUPPORTED_NAVIGATION",
       {"what major city has the worst {~ROAD_THING}",
        "why are drivers in {~PLACE} so bad",
        "who designed the {~ROAD_THING} in {~PLACE}",
        "when was the {~ROAD_THING} in {~PLACE} built",
        "which state has the most {~ROAD_THING}",
        "how much did the {~ROAD_THING} in {~PLACE} cost",
        "is driving in {~PLACE} dangerous",
        "are people in {~PLACE} good at parking"}},
      {"IN:GET_EVENT",
       {"any {SL:CATEGORY_EVENT} on {SL:LOCATION} {SL:DATE_TIME}",
        "what {SL:CATEGORY_EVENT} are happening {SL:DATE_TIME}",
        "find {SL:CATEGORY_EVENT} near {SL:LOCATION}",
        "are there {SL:CATEGORY_EVENT} {SL:DATE_TIME}",
        "show me {SL:CATEGORY_EVENT} {SL:DATE_TIME}",
        "where can i see {SL:CATEGORY_EVENT}"}},
      {"IN:GET_LOCATION",
       {"find {SL:CATEGORY_LOCATION} {SL:LOCATION_MODIFIER}",
        "where are the closest {SL:CATEGORY_LOCATION}",
        "any {SL:CATEGORY_LOCATION} {SL:LOCATION_MODIFIER}",
        "show {SL:CATEGORY_LOCATION} on {SL:LOCATION}",
        "i need {SL:CATEGORY_LOCATION} {SL:LOCATION_MODIFIER}"}},
      {"IN:GET_LOCATION_HOME", {"{SL:CONTACT} home", "{SL:CONTACT} house"},
       true},
      {"IN:GET_LOCATION_WORK", {"{SL:CONTACT} office", "{SL:CONTACT} work"},
       true},
  };
}

std::map<std::string, std::vector<std::string>> DefaultFillers() {
  return {
      {"SL:DESTINATION",
       {"new york city", "boston", "atlanta", "the airport", "chicago",
        "denver", "the mall", "seattle", "the stadium", "union station",
        "central park", "the beach", "miami", "portland", "the library",
        "dallas", "san diego", "the zoo", "austin", "the hospital",
        "grand central", "lake tahoe", "the museum", "philadelphia",
        "@IN:GET_LOCATION_HOME", "@IN:GET_LOCATION_WORK"}},
      {"SL:SOURCE",
       {"the office", "san francisco", "brooklyn", "the hotel", "queens",
        "oakland", "the train station", "harlem", "cambridge", "the campus",
        "newark", "midtown", "jersey city", "the suburbs", "baltimore"}},
      {"SL:METHOD_TRAVEL",
       {"car", "bus", "train", "bike", "foot", "subway", "ferry", "taxi"}},
      {"SL:OBSTRUCTION",
       {"traffic", "construction", "tolls", "accidents", "road work",
        "highways", "bridges", "the freeway", "congestion", "detours"}},
      {"SL:DATE_TIME_DEPARTURE",
       {"right now", "at 5 pm", "in ten minutes", "at noon", "tomorrow morning",
        "at 8 am", "tonight", "after lunch", "at 6 30", "in an hour"}},
      {"SL:DATE_TIME_ARRIVAL",
       {"by 5 pm", "by noon", "by 9 am", "before 7 pm", "by midnight",
        "before the meeting", "by 3 pm", "before sunset"}},
      {"SL:LOCATION",
       {"the highway", "i 95", "route 66", "the bay bridge", "downtown",
        "the interstate", "main street", "the tunnel", "highway 101",
        "the turnpike", "broadway", "the beltway", "fifth avenue",
        "the parkway"}},
      {"SL:DATE_TIME",
       {"today", "tonight", "this morning", "right now", "this weekend",
        "tomorrow", "this afternoon", "at rush hour", "on friday"}},
      {"SL:ROAD_CONDITION",
       {"icy", "flooded", "snowy", "slippery", "closed", "foggy", "wet",
        "clear"}},
      {"SL:CATEGORY_EVENT",
       {"concerts", "festivals", "parades", "farmers markets", "art shows",
        "comedy shows", "baseball games", "food fairs", "street fairs",
        "jazz nights"}},
      {"SL:CATEGORY_LOCATION",
       {"gas stations", "coffee shops", "parking lots", "rest stops",
        "pharmacies", "hotels", "restaurants", "ev chargers"}},
      {"SL:LOCATION_MODIFIER",
       {"nearby", "near me", "close by", "around here", "in the area"}},
      {"SL:CONTACT",
       {"my", "my mom's", "my brother's", "john's", "my sister's", "sarah's",
        "my boss's"}},
      {"~PLACE",
       {"texas", "ohio", "boston", "los angeles", "new jersey", "florida",
        "rome", "paris", "tokyo", "montana", "vermont", "utah", "london",
        "mexico city", "georgia", "oregon", "maine", "nevada", "iowa",
        "arizona"}},
      {"~ROAD_THING",
       {"traffic", "potholes", "toll roads", "bridges", "roundabouts",
        "tunnels", "speed traps", "parking", "highways", "bike lanes"}},
      {"~FILLER",
       {"today", "these days", "usually", "on weekdays", "in the morning",
        "at night", "normally", "on average", "this week", "lately", "now",
        "in winter"}},
  };
}

bool IsSlotPlaceholder(const std::string &w) {
  return w.size() > 2 && w.front() == '{' && w.back() == '}';
}

class Generator {
 public:
  Generator(const GrammarConfig &g, uint64_t seed) : g_(g), rng_(seed) {
    for (size_t i = 0; i < g.intents.size(); ++i) {
      by_name_[g.intents[i].intent] = i;
      if (!g.intents[i].nested_only) roots_.push_back(i);
    }
  }

  Example Sample() {
    for (int attempt = 0; attempt < 64; ++attempt) {
      const size_t intent = roots_[Pick(roots_.size())];
      const auto &entry = g_.intents[intent];
      const int tmpl = static_cast<int>(Pick(entry.templates.size()));
      Example e;
      e.v2 = Expand(entry.intent, entry.templates[tmpl], e.tokens, 0);
      // Leftmost span resolution must recover the sampled indices.
      if (ParseBracketed(Serialize(*e.v2, e.tokens), e.tokens) != *e.v2) {
        continue;
      }
      e.provenance.intent = entry.intent;
      e.provenance.template_index = tmpl;
      for (const ParseTree &c : e.v2->children) {
        e.provenance.slots.push_back(c.label);
      }
      return e;
    }
    Fail(ErrorCode::kDegenerateGrammar,
         "grammar keeps producing ambiguous span anchors");
  }

 private:
  size_t Pick(size_t n) { return static_cast<size_t>(rng_() % n); }

  ParseTree Expand(const std::string &intent, const std::string &tmpl,
                   Tokens &tokens, int depth) {
    if (depth > 4) {
      Fail(ErrorCode::kDegenerateGrammar, "nesting too deep at " + intent);
    }
    ParseTree node = ParseTree::Intent(intent);
    for (const std::string &word : SplitTokens(tmpl)) {
      if (!IsSlotPlaceholder(word)) {
        tokens.push_back(word);
        continue;
      }
      const std::string key = word.substr(1, word.size() - 2);
      const auto &options = g_.fillers.at(key);
      const std::string &filler = options[Pick(options.size())];
      if (key.starts_with("~")) {
        for (std::string &t : SplitTokens(filler)) tokens.push_back(std::move(t));
        continue;
      }
      if (filler.starts_with("@")) {
        const auto &nested = g_.intents[by_name_.at(filler.substr(1))];
        const std::string &sub =
            nested.templates[Pick(nested.templates.size())];
        node.children.push_back(ParseTree::SlotWith(
            key, {Expand(nested.intent, sub, tokens, depth + 1)}));
        continue;
      }
      std::vector<int> span;
      for (std::string &t : SplitTokens(filler)) {
        span.push_back(static_cast<int>(tokens.size()));
        tokens.push_back(std::move(t));
      }
      node.children.push_back(ParseTree::Slot(key, std::move(span)));
    }
    return node;
  }

  const GrammarConfig &g_;
  std::mt19937_64 rng_;
  std::map<std::string, size_t> by_name_;
  std::vector<size_t> roots_;
};

}  // namespace

GrammarConfig DefaultGrammar() {
  GrammarConfig g;
  g.intents = DefaultIntents();
  g.fillers = DefaultFillers();
  return g;
}

void ValidateGrammar(const GrammarConfig &g) {
  std::set<std::string> names;
  size_t roots = 0;
  for (const auto &entry : g.intents) {
    if (entry.intent.empty() || KindOfLabel(entry.intent) != NodeKind::kIntent) {
      Fail(ErrorCode::kDegenerateGrammar, "bad intent name '" + entry.intent + "'");
    }
    if (entry.templates.empty()) {
      Fail(ErrorCode::kDegenerateGrammar,
           "intent " + entry.intent + " has no template");
    }
    names.insert(entry.intent);
    if (!entry.nested_only) ++roots;
  }
  std::set<std::string> slot_labels;
  for (const auto &entry : g.intents) {
    for (const std::string &tmpl : entry.templates) {
      if (SplitTokens(tmpl).empty()) {
        Fail(ErrorCode::kDegenerateGrammar,
             "intent " + entry.intent + " has an empty template");
      }
      for (const std::string &word : SplitTokens(tmpl)) {
        if (!IsSlotPlaceholder(word)) continue;
        const std::string key = word.substr(1, word.size() - 2);
        auto it = g.fillers.find(key);
        if (it == g.fillers.end() || it->second.empty()) {
          Fail(ErrorCode::kDegenerateGrammar,
               "placeholder " + key + " in " + entry.intent + " has no fillers");
        }
        if (key.starts_with("~")) continue;
        if (KindOfLabel(key) != NodeKind::kSlot) {
          Fail(ErrorCode::kDegenerateGrammar, "placeholder " + key +
                                                  " is neither SL: nor ~");
        }
        slot_labels.insert(key);
        for (const std::string &f : it->second) {
          if (f.starts_with("@") && !names.count(f.substr(1))) {
            Fail(ErrorCode::kDegenerateGrammar,
                 "filler references missing intent " + f.substr(1));
          }
          if (!f.starts_with("@") && SplitTokens(f).empty()) {
            Fail(ErrorCode::kDegenerateGrammar, "empty filler for " + key);
          }
        }
      }
    }
  }
  if (roots < 8) {
    Fail(ErrorCode::kDegenerateGrammar,
         "grammar needs at least 8 root intents, has " + std::to_string(roots));
  }
  if (slot_labels.size() < 10) {
    Fail(ErrorCode::kDegenerateGrammar,
         "grammar needs at least 10 slot labels, has " +
             std::to_string(slot_labels.size()));
  }
  if (g.size < 0) Fail(ErrorCode::kDegenerateGrammar, "negative corpus size");
}

std::vector<Example> GenerateToyCorpus(const GrammarConfig &g, uint64_t seed) {
  ValidateGrammar(g);
  Generator gen(g, seed);
  std::vector<Example> out;
  out.reserve(g.size);
  for (int i = 0; i < g.size; ++i) {
    Example e = gen.Sample();
    char id[32];
    std::snprintf(id, sizeof(id), "toy-%06d", i);
    e.id = id;
    out.push_back(std::move(e));
  }
  return out;
}

GrammarConfig GrammarFromJson(const nlohmann::json &j) {
  try {
    GrammarConfig g;
    g.size = j.value("size", 6000);
    for (const auto &entry : j.at("intents")) {
      GrammarConfig::IntentTemplates t;
      t.intent = entry.at("name").get<std::string>();
      t.templates = entry.value("templates", std::vector<std::string>{});
      t.nested_only = entry.value("nested_only", false);
      g.intents.push_back(std::move(t));
    }
    g.fillers =
        j.at("fillers").get<std::map<std::string, std::vector<std::string>>>();
    return g;
  } catch (const nlohmann::json::exception &e) {
    Fail(ErrorCode::kConfig, std::string("grammar: ") + e.what());
  }
}

nlohmann::json GrammarToJson(const GrammarConfig &g) {
  nlohmann::json j;
  j["size"] = g.size;
  j["intents"] = nlohmann::json::array();
  for (const auto &entry : g.intents) {
    nlohmann::json e = {{"name", entry.intent}, {"templates", entry.templates}};
    if (entry.nested_only) e["nested_only"] = true;
    j["intents"].push_back(std::move(e));
  }
  j["fillers"] = g.fillers;
  return j;
}

std::vector<UpdateSpec> DefaultUpdateSpecs() {
  std::vector<UpdateSpec> specs;

  UpdateSpec a;
  a.name = "A";
  a.description = "New intent from unsupported";
  a.affected_intents = {"IN:UNSUPPORTED_NAVIGATION"};
  a.rules.emplace_back(MergeIntentRule{
      "IN:GET_ESTIMATED_ARRIVAL", "IN:UNSUPPORTED_NAVIGATION",
      {ArgumentPolicyKind::kDropAll, {}}, Selector::kAny});
  specs.push_back(std::move(a));

  UpdateSpec b;
  b.name = "B";
  b.description = "New intent from related with argument relabeling";
  b.affected_intents = {"IN:GET_ESTIMATED_ARRIVAL"};
  b.rules.emplace_back(MergeIntentRule{
      "IN:GET_ESTIMATED_DEPARTURE", "IN:GET_ESTIMATED_ARRIVAL",
      {ArgumentPolicyKind::kRename,
       {{"SL:DATE_TIME_ARRIVAL", "SL:DATE_TIME_DEPARTURE"}}},
      Selector::kAny});
  specs.push_back(std::move(b));

  UpdateSpec c;
  c.name = "C";
  c.description = "New argument";
  c.affected_intents = {"IN:GET_DIRECTIONS", "IN:GET_ESTIMATED_DURATION"};
  c.rules.emplace_back(RemoveArgumentRule{
      {"IN:GET_DIRECTIONS", "IN:GET_ESTIMATED_DURATION"}, "SL:OBSTRUCTION"});
  specs.push_back(std::move(c));

  UpdateSpec d;
  d.name = "D";
  d.description = "New intent from related with same arguments";
  d.affected_intents = {"IN:GET_INFO_ROAD_CONDITION"};
  d.rules.emplace_back(MergeIntentRule{
      "IN:GET_INFO_TRAFFIC", "IN:GET_INFO_ROAD_CONDITION",
      {ArgumentPolicyKind::kKeep, {}}, Selector::kAny});
  specs.push_back(std::move(d));

  UpdateSpec e;
  e.name = "E";
  e.description = "New intent from both unsupported and related";
  e.affected_intents = {"IN:GET_DISTANCE", "IN:UNSUPPORTED_NAVIGATION"};
  e.rules.emplace_back(MergeIntentRule{
      "IN:GET_ESTIMATED_DURATION", "IN:GET_DISTANCE",
      {ArgumentPolicyKind::kKeep, {}}, Selector::kHasArguments});
  e.rules.emplace_back(MergeIntentRule{
      "IN:GET_ESTIMATED_DURATION", "IN:UNSUPPORTED_NAVIGATION",
      {ArgumentPolicyKind::kDropAll, {}}, Selector::kNoArguments});
  specs.push_back(std::move(e));

  return specs;
}

}  // namespace semupdate
