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
#ifndef SEMUPDATE_DATASET_TOY_GRAMMAR_HPP_
#define SEMUPDATE_DATASET_TOY_GRAMMAR_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dataset/dataset.hpp"
#include "json.hpp"

namespace semupdate {

// Template grammar for a navigation-domain toy corpus.
//
// Templates are whitespace-separated words with placeholders:
//   {SL:LABEL}  a slot filled from fillers["SL:LABEL"]; a filler written as
//               "@IN:LABEL" expands one of that intent's templates as a
//               nested intent inside the slot.
//   {~NAME}     unlabeled filler text from fillers["~NAME"].
struct GrammarConfig {
  struct IntentTemplates {
    std::string intent;
    std::vector<std::string> templates;
    // Only reachable through "@" fillers, never sampled at the root.
    bool nested_only = false;
  };

  std::vector<IntentTemplates> intents;
  std::map<std::string, std::vector<std::string>> fillers;
  int size = 6000;
};

GrammarConfig DefaultGrammar();
GrammarConfig GrammarFromJson(const nlohmann::json &j);
nlohmann::json GrammarToJson(const GrammarConfig &g);

// Throws DegenerateGrammar naming the offending intent or placeholder.
void ValidateGrammar(const GrammarConfig &g);

// Root intents are drawn uniformly, templates and fillers uniformly within
// them. Every example records its provenance.
std::vector<Example> GenerateToyCorpus(const GrammarConfig &g, uint64_t seed);

// The five update types over the default grammar (keys "A".."E").
std::vector<UpdateSpec> DefaultUpdateSpecs();

}  // namespace semupdate

#endif  // SEMUPDATE_DATASET_TOY_GRAMMAR_HPP_
