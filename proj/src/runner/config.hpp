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
#ifndef SEMUPDATE_RUNNER_CONFIG_HPP_
#define SEMUPDATE_RUNNER_CONFIG_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dataset/dataset.hpp"
#include "dataset/toy_grammar.hpp"
#include "dataset/update_spec.hpp"
#include "eval/eval.hpp"
#include "json.hpp"
#include "model/parser_model.hpp"
#include "strategies/classifier.hpp"
#include "strategies/strategies.hpp"

namespace semupdate {

enum class CorpusSource { kToy, kTsv, kTop };

struct CorpusConfig {
  CorpusSource source = CorpusSource::kToy;
  std::string path;  // for kTsv and kTop, relative to the config file
  uint64_t seed = 0;
  GrammarConfig grammar = DefaultGrammar();
};

// Everything one experiment needs, parsed from a single JSON file.
//
//   corpus:     {source: toy|tsv|top, path, seed, size, grammar}
//   updates:    "default" or a list of update objects
//   model:      {reference: {...}, desk_overrides: {...}}
//   strategies, seeds, splits, classifier, fine_tune, curve, workers
struct ExperimentConfig {
  CorpusConfig corpus;
  std::vector<UpdateSpec> updates = DefaultUpdateSpecs();
  ParserConfig reference_model = ParserConfig::ReferenceDefaults();
  nlohmann::json desk_overrides = nlohmann::json::object();
  std::vector<Strategy> strategies = AllStrategies();
  std::vector<uint64_t> seeds = {1, 2, 3, 4, 5};
  SplitSizes splits;
  ClassifierConfig classifier;
  FineTuneSettings fine_tune;
  CurveSettings curve;
  std::vector<std::string> curve_updates;  // empty: every update
  std::vector<uint64_t> curve_seeds;       // empty: same as seeds
  int workers = 1;

  // Reference defaults with the desk overrides applied.
  ParserConfig EffectiveModel() const;
  nlohmann::json ToJson() const;
  // FNV-1a of the canonical JSON, excluding `workers`.
  std::string Hash() const;
};

ExperimentConfig ExperimentConfigFromJson(const nlohmann::json &j,
                                          const std::string &base_dir = ".");
ExperimentConfig LoadExperimentConfig(const std::string &path);

// Comma-separated lists for command-line filters.
std::vector<std::string> SplitList(const std::string &text);
std::vector<uint64_t> ParseSeedList(const std::string &text);
std::vector<int> ParseIntList(const std::string &text);

}  // namespace semupdate

#endif  // SEMUPDATE_RUNNER_CONFIG_HPP_
