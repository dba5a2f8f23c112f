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
#include "strategies/classifier.hpp"

#include <cmath>
#include <random>

#include "common/error.hpp"
#include "common/seed.hpp"

namespace semupdate {

using nn::Graph;
using nn::Matrix;
using Var = Graph::Var;

void ClassifierConfig::Validate() const {
  if (hidden_dim <= 0 || train_steps < 0 || batch_size <= 0 ||
      !(learning_rate > 0) || warmup_steps < 0) {
    Fail(ErrorCode::kConfig, "invalid classifier settings");
  }
  if (!(threshold > 0 && threshold < 1)) {
    Fail(ErrorCode::kConfig, "classifier threshold must lie in (0, 1)");
  }
}

nlohmann::json ClassifierConfig::ToJson() const {
  return {{"hidden_dim", hidden_dim},       {"train_steps", train_steps},
          {"batch_size", batch_size},       {"learning_rate", learning_rate},
          {"warmup_steps", warmup_steps},   {"threshold", threshold}};
}

ClassifierConfig ClassifierConfig::FromJson(const nlohmann::json &j,
                                            const ClassifierConfig &base) {
  ClassifierConfig c = base;
  try {
    c.hidden_dim = j.value("hidden_dim", c.hidden_dim);
    c.train_steps = j.value("train_steps", c.train_steps);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.warmup_steps = j.value("warmup_steps", c.warmup_steps);
    c.threshold = j.value("threshold", c.threshold);
  } catch (const nlohmann::json::exception &e) {
    Fail(ErrorCode::kConfig, std::string("classifier config: ") + e.what());
  }
  c.Validate();
  return c;
}

Classifier::Classifier(const ParserModel &encoder_source,
                       const ClassifierConfig &config, uint64_t seed)
    : encoder_config_(encoder_source.config()),
      vocab_(encoder_source.vocab()),
      config_(config) {
  config_.Validate();
  for (const auto &[name, p] : encoder_source.params()) {
    if (name == "emb.word" || name == "emb.pos" || name.starts_with("enc.")) {
      params_.Add(name, p.value);
    }
  }
  std::mt19937_64 rng(seed);
  const int d = encoder_config_.model_dim;
  params_.Add("cls.w1", nn::XavierUniform(d, config_.hidden_dim, rng));
  params_.Add("cls.b1", Matrix::Zero(1, config_.hidden_dim));
  params_.Add("cls.w2", nn::XavierUniform(config_.hidden_dim, 2, rng));
  params_.Add("cls.b2", Matrix::Zero(1, 2));
}

Var Classifier::Logits(ParamBinder &bind,
                       const std::vector<Tokens> &queries) const {
  std::vector<std::vector<int>> words;
  for (const Tokens &q : queries) words.push_back(vocab_.WordIds(q));
  EncodedSources enc = EncodeSources(bind, encoder_config_, words);
  Graph &g = bind.graph();
  Var pooled = g.MeanPool(enc.memory, enc.segments);
  Var h = g.Relu(g.AddRowVector(g.MatMul(pooled, bind("cls.w1")), bind("cls.b1")));
  return g.AddRowVector(g.MatMul(h, bind("cls.w2")), bind("cls.b2"));
}

std::vector<double> Classifier::ChangedProbability(
    const std::vector<Tokens> &queries) const {
  std::vector<double> out;
  constexpr size_t kChunk = 256;
  for (size_t start = 0; start < queries.size(); start += kChunk) {
    const size_t end = std::min(queries.size(), start + kChunk);
    std::vector<Tokens> chunk(queries.begin() + start, queries.begin() + end);
    Graph g;
    ParamBinder bind(g, params_);
    const Matrix &logits = g.value(Logits(bind, chunk));
    for (Eigen::Index r = 0; r < logits.rows(); ++r) {
      // Two-way softmax, class 1 = changed.
      out.push_back(1.0 / (1.0 + std::exp(logits(r, 0) - logits(r, 1))));
    }
  }
  return out;
}

std::vector<bool> Classifier::PredictChanged(
    const std::vector<Tokens> &queries) const {
  std::vector<bool> out;
  for (double p : ChangedProbability(queries)) out.push_back(p > config_.threshold);
  return out;
}

double Classifier::Loss(const std::vector<Tokens> &queries,
                        const std::vector<bool> &changed) const {
  if (queries.empty() || queries.size() != changed.size()) {
    Fail(ErrorCode::kInvalidArgument, "classifier batch mismatch");
  }
  Graph g;
  ParamBinder bind(g, params_);
  std::vector<int> targets(changed.begin(), changed.end());
  Var loss = g.SoftmaxCrossEntropy(Logits(bind, queries), targets,
                                   static_cast<double>(queries.size()));
  return g.scalar(loss);
}

void Classifier::Train(const std::vector<Tokens> &queries,
                       const std::vector<bool> &changed, uint64_t seed) {
  if (queries.empty() || queries.size() != changed.size()) {
    Fail(ErrorCode::kEmptyData, "no classifier training data");
  }
  std::vector<size_t> order(queries.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  DeterministicShuffle(order, rng);
  size_t cursor = 0;

  nn::AdamConfig adam;
  params_.ResetOptimizerState();
  params_.ZeroGrad();
  for (int step = 0; step < config_.train_steps; ++step) {
    std::vector<Tokens> batch;
    std::vector<int> targets;
    for (int i = 0; i < config_.batch_size; ++i) {
      if (cursor == order.size()) {
        DeterministicShuffle(order, rng);
        cursor = 0;
      }
      const size_t k = order[cursor++];
      batch.push_back(queries[k]);
      targets.push_back(changed[k] ? 1 : 0);
    }
    Graph g;
    ParamBinder bind(g, params_);
    Var loss = g.SoftmaxCrossEntropy(Logits(bind, batch), std::move(targets),
                                     static_cast<double>(batch.size()));
    g.Backward(loss);
    nn::AdamStep(params_, adam,
                 nn::WarmupRate(config_.learning_rate, step, config_.warmup_steps));
  }
}

Classifier TrainSelectionClassifier(const std::vector<Example> &v2_train,
                                    const ParserModel &v1_parser,
                                    const ClassifierConfig &config,
                                    uint64_t seed) {
  std::vector<Tokens> queries;
  std::vector<bool> labels;
  size_t positives = 0;
  for (const Example &e : v2_train) {
    if (e.partition == Partition::kTriviallyUnchanged) continue;
    queries.push_back(e.tokens);
    labels.push_back(e.partition == Partition::kChanged);
    positives += labels.back() ? 1 : 0;
  }
  if (positives == 0 || positives == queries.size()) {
    Fail(ErrorCode::kSingleClassData,
         "classifier needs both changed and unchanged examples");
  }
  Classifier c(v1_parser, config, DeriveSeed(seed, "classifier.init"));
  c.Train(queries, labels, DeriveSeed(seed, "classifier.train"));
  return c;
}

FilterResult FilterV1(const Classifier &classifier,
                      const std::vector<Example> &v1_examples) {
  FilterResult out;
  std::vector<Tokens> queries;
  for (const Example &e : v1_examples) queries.push_back(e.tokens);
  const std::vector<bool> changed = classifier.PredictChanged(queries);
  for (size_t i = 0; i < v1_examples.size(); ++i) {
    (changed[i] ? out.predicted_changed : out.predicted_unchanged)
        .push_back(v1_examples[i]);
  }
  return out;
}

}  // namespace semupdate
