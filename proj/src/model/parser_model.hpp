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
#ifndef SEMUPDATE_MODEL_PARSER_MODEL_HPP_
#define SEMUPDATE_MODEL_PARSER_MODEL_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "model/vocab.hpp"
#include "nn/graph.hpp"
#include "nn/params.hpp"
#include "parsetree/parse_tree.hpp"

namespace semupdate {

// Architecture and schedule. The encoder is a small self-attention stack
// trained from scratch; everything else follows the transformer decoder
// hyperparameter table (decoder layers, dimensions, batch, steps, rate,
// warmup).
struct ParserConfig {
  int encoder_layers = 2;
  int model_dim = 256;
  int attention_heads = 2;
  int decoder_layers = 1;
  int decoder_ff_dim = 256;
  int encoder_ff_dim = 256;
  int batch_size = 512;
  int train_steps = 50000;
  double learning_rate = 3e-4;
  int warmup_steps = 10000;
  int max_positions = 256;
  double clip_norm = 1.0;

  static ParserConfig ReferenceDefaults() { return {}; }
  // Full-scale values with the desk-scale schedule applied.
  static ParserConfig DeskScale();

  void Validate() const;
  nlohmann::json ToJson() const;
  // Missing keys keep the values already in `base`.
  static ParserConfig FromJson(const nlohmann::json &j,
                               const ParserConfig &base);
  static ParserConfig FromJson(const nlohmann::json &j);
};

// A training target: query, tree, and which action positions carry loss.
// An empty mask means every position counts.
struct MaskedExample {
  std::string id;
  Tokens tokens;
  ParseTree target;
  std::vector<uint8_t> loss_mask;
};

// Mask with only the root-intent prediction (position 0) enabled.
std::vector<uint8_t> IntentOnlyMask(const ParseTree &target);

struct Prediction {
  ParseTree tree;
  ActionSequence actions;
  bool valid = false;
};

enum class HeadInit { kFresh, kCloneOf };

class ParserModel {
 public:
  static constexpr const char *kDefaultHead = "main";

  ParserModel(const ParserConfig &config, Vocab vocab, uint64_t seed);

  const ParserConfig &config() const { return config_; }
  const Vocab &vocab() const { return vocab_; }
  nn::ParameterStore &params() { return params_; }
  const nn::ParameterStore &params() const { return params_; }

  std::vector<std::string> Heads() const;
  bool HasHead(const std::string &name) const;
  // Encoder and decoder body are untouched. kCloneOf copies `source`.
  void AddHead(const std::string &name, HeadInit init,
               const std::string &source = kDefaultHead, uint64_t seed = 0);
  void RemoveHead(const std::string &name);

  // Constructs an empty shell for checkpoint loading.
  static ParserModel Empty(const ParserConfig &config, Vocab vocab);

 private:
  ParserModel(const ParserConfig &config, Vocab vocab);
  void InitBody(uint64_t seed);
  void InitHead(const std::string &name, uint64_t seed);

  ParserConfig config_;
  Vocab vocab_;
  nn::ParameterStore params_;
};

// Binds named parameters into a graph once per graph. Frozen binders feed
// values as constants so no gradient is recorded.
class ParamBinder {
 public:
  ParamBinder(nn::Graph &graph, nn::ParameterStore &store);
  ParamBinder(nn::Graph &graph, const nn::ParameterStore &store);

  nn::Graph::Var operator()(const std::string &name);
  nn::Graph &graph() { return graph_; }

 private:
  nn::Graph &graph_;
  nn::ParameterStore *mutable_store_;
  const nn::ParameterStore *store_;
  std::unordered_map<std::string, nn::Graph::Var> cache_;
};

struct EncodedSources {
  nn::Graph::Var memory = -1;
  std::vector<nn::Segment> segments;
};

// Runs embeddings and the encoder stack over packed sources. Parameter names
// are "emb.word", "emb.pos", "enc.*".
EncodedSources EncodeSources(ParamBinder &bind, const ParserConfig &config,
                             const std::vector<std::vector<int>> &word_ids);

// Per-head pieces of a teacher-forced forward pass, exposed for gradient
// checks.
struct HeadOutputs {
  nn::Graph::Var vocab_logits = -1;
  nn::Graph::Var copy_query = -1;
  std::vector<int> rows;  // decoder rows routed to this head
  std::vector<uint8_t> mask;
};

struct BatchForward {
  nn::Graph graph;
  nn::Graph::Var loss = -1;
  nn::Graph::Var memory = -1;
  std::map<std::string, HeadOutputs> heads;
  int scored_positions = 0;
};

struct RoutedExample {
  const MaskedExample *example;
  std::string head;
};

// Teacher-forced forward over a batch; loss is the mean cross-entropy over
// all unmasked positions in the batch (0 if none). With `trainable` the
// graph records gradients into the model's parameters.
BatchForward ForwardBatch(ParserModel &model,
                          const std::vector<RoutedExample> &batch,
                          bool trainable);

double Loss(const ParserModel &model, const std::vector<MaskedExample> &batch,
            const std::string &head);

// A pool of training data routed to one head; `share` is its fraction of
// each batch.
struct TrainPool {
  std::vector<MaskedExample> data;
  std::string head = ParserModel::kDefaultHead;
  double share = 1.0;
};

struct TrainSchedule {
  int steps = 0;
  int warmup = 0;
  int batch_size = 1;
  double learning_rate = 3e-4;
  double clip_norm = 1.0;

  static TrainSchedule From(const ParserConfig &config);
};

// Adam with linear warmup then a constant rate. Each pool is drawn in
// reshuffled epochs; deterministic under `seed`.
void TrainPools(ParserModel &model, const std::vector<TrainPool> &pools,
                const TrainSchedule &schedule, uint64_t seed);

void Train(ParserModel &model, const std::vector<MaskedExample> &data,
           const ParserConfig &config, const std::string &head, uint64_t seed);

// Greedy decoding until the root bracket closes or 2 * |tokens| + 64
// actions. Malformed sequences come back flagged invalid with a best-effort
// tree.
std::vector<Prediction> PredictBatch(const ParserModel &model,
                                     const std::vector<Tokens> &queries,
                                     const std::string &head);
Prediction Predict(const ParserModel &model, const Tokens &query,
                   const std::string &head);

// Skips invalid actions and closes open brackets; used for invalid decodes.
ParseTree BestEffortTree(const ActionSequence &actions, size_t query_length);

// Self-describing binary archive: config, vocabulary, head list, and named
// tensors.
void SaveCheckpoint(const ParserModel &model, const std::string &path);
ParserModel LoadCheckpoint(const std::string &path);

}  // namespace semupdate

#endif  // SEMUPDATE_MODEL_PARSER_MODEL_HPP_
