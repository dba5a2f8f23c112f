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
#ifndef SEMUPDATE_STRATEGIES_CLASSIFIER_HPP_
#define SEMUPDATE_STRATEGIES_CLASSIFIER_HPP_

#include <cstdint>
#include <vector>

#include "dataset/dataset.hpp"
#include "json.hpp"
#include "model/parser_model.hpp"

namespace semupdate {

struct ClassifierConfig {
  int hidden_dim = 512;
  int train_steps = 1000;
  int batch_size = 32;
  double learning_rate = 1e-4;
  int warmup_steps = 0;
  double threshold = 0.5;

  void Validate() const;
  nlohmann::json ToJson() const;
  static ClassifierConfig FromJson(const nlohmann::json &j,
                                   const ClassifierConfig &base);
};

// Binary changed/unchanged classifier over mean-pooled encoder states. The
// encoder starts from a parser's encoder and is fine-tuned with the rest.
class Classifier {
 public:
  Classifier(const ParserModel &encoder_source, const ClassifierConfig &config,
             uint64_t seed);

  // Probability that each query belongs to the changed partition.
  std::vector<double> ChangedProbability(const std::vector<Tokens> &queries) const;
  std::vector<bool> PredictChanged(const std::vector<Tokens> &queries) const;

  const ClassifierConfig &config() const { return config_; }
  nn::ParameterStore &params() { return params_; }
  const nn::ParameterStore &params() const { return params_; }

  // Training loss for a batch (label true = changed). Mean over examples.
  double Loss(const std::vector<Tokens> &queries,
              const std::vector<bool> &changed) const;
  void Train(const std::vector<Tokens> &queries, const std::vector<bool> &changed,
             uint64_t seed);

 private:
  nn::Graph::Var Logits(ParamBinder &bind,
                        const std::vector<Tokens> &queries) const;

  ParserConfig encoder_config_;
  Vocab vocab_;
  ClassifierConfig config_;
  nn::ParameterStore params_;
};

// Trains on V2 examples using their partition tags (changed vs unchanged).
// Throws SingleClassData unless both classes are present.
Classifier TrainSelectionClassifier(const std::vector<Example> &v2_train,
                                    const ParserModel &v1_parser,
                                    const ClassifierConfig &config,
                                    uint64_t seed);

struct FilterResult {
  std::vector<Example> predicted_unchanged;
  std::vector<Example> predicted_changed;
};

// Splits V1 examples by classifier decision. Order within each side follows
// the input.
FilterResult FilterV1(const Classifier &classifier,
                      const std::vector<Example> &v1_examples);

}  // namespace semupdate

#endif  // SEMUPDATE_STRATEGIES_CLASSIFIER_HPP_
