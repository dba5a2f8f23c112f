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
#include "model/parser_model.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "common/error.hpp"
#include "common/seed.hpp"
#include "dataset/dataset.hpp"

namespace semupdate {

using nn::Graph;
using nn::Matrix;
using nn::Segment;
using Var = Graph::Var;

// ---------------------------------------------------------------------------
// ParserConfig

ParserConfig ParserConfig::DeskScale() {
  ParserConfig c;
  c.train_steps = 5000;
  c.batch_size = 64;
  c.warmup_steps = 500;
  return c;
}

void ParserConfig::Validate() const {
  auto positive = [](int v, const char *name) {
    if (v <= 0) Fail(ErrorCode::kConfig, std::string(name) + " must be positive");
  };
  positive(encoder_layers, "encoder_layers");
  positive(model_dim, "model_dim");
  positive(attention_heads, "attention_heads");
  positive(decoder_layers, "decoder_layers");
  positive(decoder_ff_dim, "decoder_ff_dim");
  positive(encoder_ff_dim, "encoder_ff_dim");
  positive(batch_size, "batch_size");
  positive(train_steps, "train_steps");
  positive(warmup_steps, "warmup_steps");
  positive(max_positions, "max_positions");
  if (!(learning_rate > 0)) Fail(ErrorCode::kConfig, "learning_rate must be positive");
  if (warmup_steps > train_steps) {
    Fail(ErrorCode::kConfig, "warmup_steps exceeds train_steps");
  }
  if (model_dim % attention_heads != 0) {
    Fail(ErrorCode::kConfig, "model_dim must be divisible by attention_heads");
  }
}

nlohmann::json ParserConfig::ToJson() const {
  return {{"encoder_layers", encoder_layers},
          {"model_dim", model_dim},
          {"attention_heads", attention_heads},
          {"decoder_layers", decoder_layers},
          {"decoder_ff_dim", decoder_ff_dim},
          {"encoder_ff_dim", encoder_ff_dim},
          {"batch_size", batch_size},
          {"train_steps", train_steps},
          {"learning_rate", learning_rate},
          {"warmup_steps", warmup_steps},
          {"max_positions", max_positions},
          {"clip_norm", clip_norm}};
}

ParserConfig ParserConfig::FromJson(const nlohmann::json &j,
                                    const ParserConfig &base) {
  ParserConfig c = base;
  try {
    c.encoder_layers = j.value("encoder_layers", c.encoder_layers);
    c.model_dim = j.value("model_dim", c.model_dim);
    c.attention_heads = j.value("attention_heads", c.attention_heads);
    c.decoder_layers = j.value("decoder_layers", c.decoder_layers);
    c.decoder_ff_dim = j.value("decoder_ff_dim", c.decoder_ff_dim);
    c.encoder_ff_dim = j.value("encoder_ff_dim", c.encoder_ff_dim);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.train_steps = j.value("train_steps", c.train_steps);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.warmup_steps = j.value("warmup_steps", c.warmup_steps);
    c.max_positions = j.value("max_positions", c.max_positions);
    c.clip_norm = j.value("clip_norm", c.clip_norm);
  } catch (const nlohmann::json::exception &e) {
    Fail(ErrorCode::kConfig, std::string("model config: ") + e.what());
  }
  return c;
}

ParserConfig ParserConfig::FromJson(const nlohmann::json &j) {
  return FromJson(j, ParserConfig());
}

std::vector<uint8_t> IntentOnlyMask(const ParseTree &target) {
  std::vector<uint8_t> mask(Linearize(target).size(), 0);
  mask[0] = 1;
  return mask;
}

// ---------------------------------------------------------------------------
// ParserModel

namespace {

constexpr double kHeadInitStd = 0.02;

std::string HeadPrefix(const std::string &head) { return "head." + head + "."; }

void AddLayerNorm(nn::ParameterStore &p, const std::string &name, int d) {
  p.Add(name + ".g", Matrix::Ones(1, d));
  p.Add(name + ".b", Matrix::Zero(1, d));
}

void AddAttention(nn::ParameterStore &p, const std::string &name, int d,
                  std::mt19937_64 &rng) {
  for (const char *w : {".wq", ".wk", ".wv", ".wo"}) {
    p.Add(name + w, nn::XavierUniform(d, d, rng));
  }
}

void AddFeedForward(nn::ParameterStore &p, const std::string &name, int d,
                    int ff, std::mt19937_64 &rng) {
  p.Add(name + ".w1", nn::XavierUniform(d, ff, rng));
  p.Add(name + ".b1", Matrix::Zero(1, ff));
  p.Add(name + ".w2", nn::XavierUniform(ff, d, rng));
  p.Add(name + ".b2", Matrix::Zero(1, d));
}

}  // namespace

ParserModel::ParserModel(const ParserConfig &config, Vocab vocab)
    : config_(config), vocab_(std::move(vocab)) {
  config_.Validate();
}

ParserModel::ParserModel(const ParserConfig &config, Vocab vocab,
                         uint64_t seed)
    : ParserModel(config, std::move(vocab)) {
  InitBody(seed);
  InitHead(kDefaultHead, DeriveSeed(seed, "head.main"));
}

ParserModel ParserModel::Empty(const ParserConfig &config, Vocab vocab) {
  return ParserModel(config, std::move(vocab));
}

void ParserModel::InitBody(uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int d = config_.model_dim;
  const double emb_std = 1.0 / std::sqrt(static_cast<double>(d));
  params_.Add("emb.word", nn::NormalInit(vocab_.num_words(), d, emb_std, rng));
  params_.Add("emb.pos", nn::NormalInit(config_.max_positions, d, emb_std, rng));
  params_.Add("emb.action", nn::NormalInit(vocab_.num_inputs(), d, emb_std, rng));
  params_.Add("emb.dec_pos",
              nn::NormalInit(config_.max_positions, d, emb_std, rng));
  for (int l = 0; l < config_.encoder_layers; ++l) {
    const std::string p = "enc." + std::to_string(l);
    AddLayerNorm(params_, p + ".ln1", d);
    AddAttention(params_, p + ".attn", d, rng);
    AddLayerNorm(params_, p + ".ln2", d);
    AddFeedForward(params_, p + ".ff", d, config_.encoder_ff_dim, rng);
  }
  AddLayerNorm(params_, "enc.ln", d);
  for (int l = 0; l < config_.decoder_layers; ++l) {
    const std::string p = "dec." + std::to_string(l);
    AddLayerNorm(params_, p + ".ln1", d);
    AddAttention(params_, p + ".self", d, rng);
    AddLayerNorm(params_, p + ".ln2", d);
    AddAttention(params_, p + ".cross", d, rng);
    AddLayerNorm(params_, p + ".ln3", d);
    AddFeedForward(params_, p + ".ff", d, config_.decoder_ff_dim, rng);
  }
  AddLayerNorm(params_, "dec.ln", d);
}

void ParserModel::InitHead(const std::string &name, uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int d = config_.model_dim;
  const std::string p = HeadPrefix(name);
  // Small output weights keep the initial action distribution near uniform.
  params_.Add(p + "out_w", nn::NormalInit(d, vocab_.num_outputs(), kHeadInitStd, rng));
  params_.Add(p + "out_b", Matrix::Zero(1, vocab_.num_outputs()));
  params_.Add(p + "copy_w", nn::NormalInit(d, d, kHeadInitStd, rng));
}

std::vector<std::string> ParserModel::Heads() const {
  std::vector<std::string> out;
  for (const std::string &name : params_.NamesWithPrefix("head.")) {
    if (name.ends_with(".out_w")) {
      out.push_back(name.substr(5, name.size() - 5 - 6));
    }
  }
  return out;
}

bool ParserModel::HasHead(const std::string &name) const {
  return params_.Has(HeadPrefix(name) + "out_w");
}

void ParserModel::AddHead(const std::string &name, HeadInit init,
                          const std::string &source, uint64_t seed) {
  if (name.empty() || name.find('.') != std::string::npos) {
    Fail(ErrorCode::kInvalidArgument, "bad head name '" + name + "'");
  }
  if (HasHead(name)) Fail(ErrorCode::kDuplicateHead, "head " + name + " exists");
  if (init == HeadInit::kFresh) {
    InitHead(name, DeriveSeed(seed, "head." + name));
    return;
  }
  if (!HasHead(source)) {
    Fail(ErrorCode::kUnknownHead, "no head named " + source);
  }
  for (const char *w : {"out_w", "out_b", "copy_w"}) {
    params_.Add(HeadPrefix(name) + w, params_.Get(HeadPrefix(source) + w).value);
  }
}

void ParserModel::RemoveHead(const std::string &name) {
  if (!HasHead(name)) Fail(ErrorCode::kUnknownHead, "no head named " + name);
  for (const char *w : {"out_w", "out_b", "copy_w"}) {
    params_.Remove(HeadPrefix(name) + w);
  }
}

// ---------------------------------------------------------------------------
// Graph construction

ParamBinder::ParamBinder(Graph &graph, nn::ParameterStore &store)
    : graph_(graph), mutable_store_(&store), store_(&store) {}

ParamBinder::ParamBinder(Graph &graph, const nn::ParameterStore &store)
    : graph_(graph), mutable_store_(nullptr), store_(&store) {}

Var ParamBinder::operator()(const std::string &name) {
  auto it = cache_.find(name);
  if (it != cache_.end()) return it->second;
  const Var v = mutable_store_ ? graph_.Param(mutable_store_->Get(name))
                               : graph_.Input(store_->Get(name).value);
  cache_.emplace(name, v);
  return v;
}

namespace {

Var LayerNormOf(ParamBinder &bind, Var x, const std::string &name) {
  return bind.graph().LayerNorm(x, bind(name + ".g"), bind(name + ".b"));
}

Var FeedForward(ParamBinder &bind, Var x, const std::string &name) {
  Graph &g = bind.graph();
  Var h = g.Relu(g.AddRowVector(g.MatMul(x, bind(name + ".w1")), bind(name + ".b1")));
  return g.AddRowVector(g.MatMul(h, bind(name + ".w2")), bind(name + ".b2"));
}

Var AttentionBlock(ParamBinder &bind, Var queries_from, Var keys_from,
                   const std::vector<Segment> &q_segments,
                   const std::vector<Segment> &k_segments, int heads,
                   bool causal, const std::string &name) {
  Graph &g = bind.graph();
  Var q = g.MatMul(queries_from, bind(name + ".wq"));
  Var k = g.MatMul(keys_from, bind(name + ".wk"));
  Var v = g.MatMul(keys_from, bind(name + ".wv"));
  Var a = g.Attention(q, k, v, q_segments, k_segments, heads, causal);
  return g.MatMul(a, bind(name + ".wo"));
}

std::vector<Segment> Pack(const std::vector<size_t> &lengths) {
  std::vector<Segment> segs;
  int offset = 0;
  for (size_t len : lengths) {
    segs.push_back({offset, static_cast<int>(len)});
    offset += static_cast<int>(len);
  }
  return segs;
}

// Decoder inputs and targets for one teacher-forced example.
struct Prepared {
  std::vector<int> words;
  std::vector<int> action_in;
  std::vector<int> word_in;  // word id for positions following a COPY
  std::vector<int> targets;
  std::vector<uint8_t> mask;
};

int OutputIdOf(const Vocab &vocab, const Action &a, int num_outputs) {
  switch (a.kind) {
    case ActionKind::kClose: return Vocab::kCloseOutput;
    case ActionKind::kCopy: return num_outputs + a.index;
    case ActionKind::kOpen: {
      const int id = vocab.LabelId(a.label);
      if (id < 0) Fail(ErrorCode::kInvalidArgument, "label not in vocabulary: " + a.label);
      return 1 + id;
    }
  }
  return 0;
}

void InputIdOf(const Vocab &vocab, const Action &a, const std::vector<int> &words,
               int &action_id, int &word_id) {
  word_id = -1;
  switch (a.kind) {
    case ActionKind::kClose: action_id = Vocab::kCloseInput; break;
    case ActionKind::kCopy:
      action_id = Vocab::kCopyInput;
      word_id = words.at(a.index);
      break;
    case ActionKind::kOpen: {
      const int id = vocab.LabelId(a.label);
      action_id = id < 0 ? Vocab::kBos : 3 + id;
      break;
    }
  }
}

Prepared Prepare(const Vocab &vocab, const MaskedExample &ex) {
  Prepared p;
  p.words = vocab.WordIds(ex.tokens);
  const ActionSequence actions = Linearize(ex.target);
  if (!ex.loss_mask.empty() && ex.loss_mask.size() != actions.size()) {
    Fail(ErrorCode::kInvalidArgument, "loss mask length mismatch for " + ex.id);
  }
  const int num_outputs = vocab.num_outputs();
  for (size_t t = 0; t < actions.size(); ++t) {
    int action_id = Vocab::kBos, word_id = -1;
    if (t > 0) InputIdOf(vocab, actions[t - 1], p.words, action_id, word_id);
    p.action_in.push_back(action_id);
    p.word_in.push_back(word_id);
    p.targets.push_back(OutputIdOf(vocab, actions[t], num_outputs));
    p.mask.push_back(ex.loss_mask.empty() ? 1 : ex.loss_mask[t]);
  }
  return p;
}

// Decoder stack over packed prefixes; returns final hidden states.
Var DecodeStates(ParamBinder &bind, const ParserConfig &config, Var memory,
                 const std::vector<Segment> &src_segments,
                 const std::vector<const std::vector<int> *> &action_in,
                 const std::vector<const std::vector<int> *> &word_in,
                 std::vector<Segment> &tgt_segments) {
  Graph &g = bind.graph();
  std::vector<int> actions, words, positions;
  std::vector<size_t> lengths;
  for (size_t i = 0; i < action_in.size(); ++i) {
    const auto &a = *action_in[i];
    if (static_cast<int>(a.size()) > config.max_positions) {
      Fail(ErrorCode::kInvalidArgument, "target longer than max_positions");
    }
    lengths.push_back(a.size());
    for (size_t t = 0; t < a.size(); ++t) {
      actions.push_back(a[t]);
      words.push_back((*word_in[i])[t]);
      positions.push_back(static_cast<int>(t));
    }
  }
  tgt_segments = Pack(lengths);
  Var y = g.Add(g.Add(g.Gather(bind("emb.action"), actions),
                      g.Gather(bind("emb.word"), words)),
                g.Gather(bind("emb.dec_pos"), positions));
  const int heads = config.attention_heads;
  for (int l = 0; l < config.decoder_layers; ++l) {
    const std::string p = "dec." + std::to_string(l);
    Var h = LayerNormOf(bind, y, p + ".ln1");
    y = g.Add(y, AttentionBlock(bind, h, h, tgt_segments, tgt_segments, heads,
                                true, p + ".self"));
    h = LayerNormOf(bind, y, p + ".ln2");
    y = g.Add(y, AttentionBlock(bind, h, memory, tgt_segments, src_segments,
                                heads, false, p + ".cross"));
    h = LayerNormOf(bind, y, p + ".ln3");
    y = g.Add(y, FeedForward(bind, h, p + ".ff"));
  }
  return LayerNormOf(bind, y, "dec.ln");
}

double CopyScale(const ParserConfig &config) {
  return 1.0 / std::sqrt(static_cast<double>(config.model_dim));
}

struct RoutedPrepared {
  const Prepared *prepared;
  std::string head;
};

BatchForward ForwardPrepared(const ParserModel &model,
                             nn::ParameterStore *trainable,
                             const std::vector<RoutedPrepared> &batch) {
  BatchForward out;
  Graph &g = out.graph;
  ParamBinder bind = trainable ? ParamBinder(g, *trainable)
                               : ParamBinder(g, model.params());
  const ParserConfig &config = model.config();

  std::vector<std::vector<int>> words;
  std::vector<const std::vector<int> *> action_in, word_in;
  for (const RoutedPrepared &r : batch) {
    if (!model.HasHead(r.head)) Fail(ErrorCode::kUnknownHead, "no head named " + r.head);
    words.push_back(r.prepared->words);
    action_in.push_back(&r.prepared->action_in);
    word_in.push_back(&r.prepared->word_in);
  }
  EncodedSources enc = EncodeSources(bind, config, words);
  out.memory = enc.memory;
  std::vector<Segment> tgt;
  Var states = DecodeStates(bind, config, enc.memory, enc.segments, action_in,
                            word_in, tgt);

  // Route each example's rows to its head; group heads in name order.
  std::map<std::string, std::vector<size_t>> by_head;
  for (size_t i = 0; i < batch.size(); ++i) by_head[batch[i].head].push_back(i);
  int scored = 0;
  for (const RoutedPrepared &r : batch) {
    for (uint8_t m : r.prepared->mask) scored += m ? 1 : 0;
  }
  out.scored_positions = scored;
  const double normalizer = std::max(1, scored);
  std::vector<Var> losses;
  for (const auto &[head, members] : by_head) {
    HeadOutputs ho;
    std::vector<Segment> sources;
    std::vector<int> targets;
    for (size_t i : members) {
      const Prepared &p = *batch[i].prepared;
      for (size_t t = 0; t < p.targets.size(); ++t) {
        ho.rows.push_back(tgt[i].offset + static_cast<int>(t));
        sources.push_back(enc.segments[i]);
        targets.push_back(p.targets[t]);
        ho.mask.push_back(p.mask[t]);
      }
    }
    const std::string prefix = HeadPrefix(head);
    Var h = g.Gather(states, ho.rows);
    ho.vocab_logits =
        g.AddRowVector(g.MatMul(h, bind(prefix + "out_w")), bind(prefix + "out_b"));
    ho.copy_query = g.MatMul(h, bind(prefix + "copy_w"));
    losses.push_back(g.ActionCrossEntropy(ho.vocab_logits, ho.copy_query,
                                          enc.memory, std::move(sources),
                                          std::move(targets), ho.mask,
                                          CopyScale(config), normalizer));
    out.heads.emplace(head, std::move(ho));
  }
  Var total = losses.front();
  for (size_t i = 1; i < losses.size(); ++i) total = g.Add(total, losses[i]);
  out.loss = total;
  return out;
}

}  // namespace

EncodedSources EncodeSources(ParamBinder &bind, const ParserConfig &config,
                             const std::vector<std::vector<int>> &word_ids) {
  Graph &g = bind.graph();
  std::vector<int> ids, positions;
  std::vector<size_t> lengths;
  for (const auto &w : word_ids) {
    if (w.empty()) Fail(ErrorCode::kInvalidArgument, "empty query");
    if (static_cast<int>(w.size()) > config.max_positions) {
      Fail(ErrorCode::kInvalidArgument, "query longer than max_positions");
    }
    lengths.push_back(w.size());
    for (size_t t = 0; t < w.size(); ++t) {
      ids.push_back(w[t]);
      positions.push_back(static_cast<int>(t));
    }
  }
  EncodedSources out;
  out.segments = Pack(lengths);
  Var x = g.Add(g.Gather(bind("emb.word"), ids), g.Gather(bind("emb.pos"), positions));
  for (int l = 0; l < config.encoder_layers; ++l) {
    const std::string p = "enc." + std::to_string(l);
    Var h = LayerNormOf(bind, x, p + ".ln1");
    x = g.Add(x, AttentionBlock(bind, h, h, out.segments, out.segments,
                                config.attention_heads, false, p + ".attn"));
    h = LayerNormOf(bind, x, p + ".ln2");
    x = g.Add(x, FeedForward(bind, h, p + ".ff"));
  }
  out.memory = LayerNormOf(bind, x, "enc.ln");
  return out;
}

BatchForward ForwardBatch(ParserModel &model,
                          const std::vector<RoutedExample> &batch,
                          bool trainable) {
  if (batch.empty()) Fail(ErrorCode::kEmptyData, "empty batch");
  std::vector<Prepared> prepared;
  prepared.reserve(batch.size());
  for (const RoutedExample &r : batch) {
    prepared.push_back(Prepare(model.vocab(), *r.example));
  }
  std::vector<RoutedPrepared> routed;
  for (size_t i = 0; i < batch.size(); ++i) {
    routed.push_back({&prepared[i], batch[i].head});
  }
  return ForwardPrepared(model, trainable ? &model.params() : nullptr, routed);
}

double Loss(const ParserModel &model, const std::vector<MaskedExample> &batch,
            const std::string &head) {
  if (batch.empty()) Fail(ErrorCode::kEmptyData, "empty batch");
  std::vector<Prepared> prepared;
  for (const MaskedExample &e : batch) prepared.push_back(Prepare(model.vocab(), e));
  std::vector<RoutedPrepared> routed;
  for (const Prepared &p : prepared) routed.push_back({&p, head});
  BatchForward f = ForwardPrepared(model, nullptr, routed);
  return f.graph.scalar(f.loss);
}

// ---------------------------------------------------------------------------
// Training

TrainSchedule TrainSchedule::From(const ParserConfig &config) {
  TrainSchedule s;
  s.steps = config.train_steps;
  s.warmup = config.warmup_steps;
  s.batch_size = config.batch_size;
  s.learning_rate = config.learning_rate;
  s.clip_norm = config.clip_norm;
  return s;
}

namespace {

// Cycles through a pool in freshly shuffled epochs.
class EpochSampler {
 public:
  EpochSampler(size_t n, uint64_t seed) : order_(n), rng_(seed) {
    for (size_t i = 0; i < n; ++i) order_[i] = i;
    DeterministicShuffle(order_, rng_);
  }

  size_t Next() {
    if (cursor_ == order_.size()) {
      DeterministicShuffle(order_, rng_);
      cursor_ = 0;
    }
    return order_[cursor_++];
  }

 private:
  std::vector<size_t> order_;
  std::mt19937_64 rng_;
  size_t cursor_ = 0;
};

}  // namespace

void TrainPools(ParserModel &model, const std::vector<TrainPool> &pools,
                const TrainSchedule &schedule, uint64_t seed) {
  if (pools.empty()) Fail(ErrorCode::kEmptyData, "no training data");
  for (const TrainPool &pool : pools) {
    if (pool.data.empty()) Fail(ErrorCode::kEmptyData, "empty training pool");
    if (!model.HasHead(pool.head)) {
      Fail(ErrorCode::kUnknownHead, "no head named " + pool.head);
    }
  }
  if (schedule.steps <= 0) return;

  std::vector<std::vector<Prepared>> prepared(pools.size());
  std::vector<EpochSampler> samplers;
  std::vector<int> per_batch(pools.size());
  double share_total = 0.0;
  for (const TrainPool &pool : pools) share_total += pool.share;
  int assigned = 0;
  for (size_t k = 0; k < pools.size(); ++k) {
    for (const MaskedExample &e : pools[k].data) {
      prepared[k].push_back(Prepare(model.vocab(), e));
    }
    samplers.emplace_back(pools[k].data.size(),
                          DeriveSeed(seed, "pool" + std::to_string(k)));
    per_batch[k] = static_cast<int>(
        std::lround(schedule.batch_size * pools[k].share / share_total));
    per_batch[k] = std::max(1, per_batch[k]);
    assigned += per_batch[k];
  }
  // Rounding leftovers go to the first pool.
  per_batch[0] = std::max(1, per_batch[0] + schedule.batch_size - assigned);

  nn::AdamConfig adam;
  adam.clip_norm = schedule.clip_norm;
  model.params().ZeroGrad();
  for (int step = 0; step < schedule.steps; ++step) {
    std::vector<RoutedPrepared> batch;
    for (size_t k = 0; k < pools.size(); ++k) {
      for (int i = 0; i < per_batch[k]; ++i) {
        batch.push_back({&prepared[k][samplers[k].Next()], pools[k].head});
      }
    }
    BatchForward f = ForwardPrepared(model, &model.params(), batch);
    f.graph.Backward(f.loss);
    nn::AdamStep(model.params(), adam,
                 nn::WarmupRate(schedule.learning_rate, step, schedule.warmup));
  }
}

void Train(ParserModel &model, const std::vector<MaskedExample> &data,
           const ParserConfig &config, const std::string &head, uint64_t seed) {
  if (data.empty()) Fail(ErrorCode::kEmptyData, "no training data");
  TrainPool pool;
  pool.data = data;
  pool.head = head;
  TrainPools(model, {pool}, TrainSchedule::From(config), seed);
}

// ---------------------------------------------------------------------------
// Decoding

ParseTree BestEffortTree(const ActionSequence &actions, size_t query_length) {
  std::vector<ParseTree> stack;
  std::optional<ParseTree> root;
  int last_index = -1;
  auto close_top = [&]() {
    ParseTree node = std::move(stack.back());
    stack.pop_back();
    const bool empty_slot =
        node.is_slot() && node.span.empty() && node.children.empty();
    if (stack.empty()) {
      root = std::move(node);
    } else if (!empty_slot) {
      stack.back().children.push_back(std::move(node));
    }
  };
  for (const Action &a : actions) {
    if (root) break;
    switch (a.kind) {
      case ActionKind::kOpen: {
        const NodeKind kind = KindOfLabel(a.label);
        const bool ok = stack.empty()
                            ? kind == NodeKind::kIntent
                            : (stack.back().is_intent() ? kind == NodeKind::kSlot
                                                        : kind == NodeKind::kIntent &&
                                                              stack.back().span.empty());
        if (!ok) break;
        ParseTree node;
        node.kind = kind;
        node.label = a.label;
        stack.push_back(std::move(node));
        break;
      }
      case ActionKind::kCopy: {
        if (stack.empty() || !stack.back().is_slot() ||
            !stack.back().children.empty()) {
          break;
        }
        ParseTree &top = stack.back();
        if (a.index < 0 || static_cast<size_t>(a.index) >= query_length ||
            a.index <= last_index ||
            (!top.span.empty() && a.index != top.span.back() + 1)) {
          break;
        }
        top.span.push_back(a.index);
        last_index = a.index;
        break;
      }
      case ActionKind::kClose:
        if (!stack.empty()) close_top();
        break;
    }
  }
  while (!stack.empty()) close_top();
  if (!root) return ParseTree::Intent("IN:<invalid>");
  return std::move(*root);
}

std::vector<Prediction> PredictBatch(const ParserModel &model,
                                     const std::vector<Tokens> &queries,
                                     const std::string &head) {
  if (!model.HasHead(head)) Fail(ErrorCode::kUnknownHead, "no head named " + head);
  std::vector<Prediction> out(queries.size());
  if (queries.empty()) return out;
  const ParserConfig &config = model.config();
  const Vocab &vocab = model.vocab();
  const int num_outputs = vocab.num_outputs();

  std::vector<std::vector<int>> words;
  for (const Tokens &q : queries) words.push_back(vocab.WordIds(q));
  Matrix memory;
  std::vector<Segment> src_segments;
  {
    Graph g;
    ParamBinder bind(g, model.params());
    EncodedSources enc = EncodeSources(bind, config, words);
    memory = g.value(enc.memory);
    src_segments = enc.segments;
  }
  const std::string prefix = HeadPrefix(head);
  const Matrix &out_w = model.params().Get(prefix + "out_w").value;
  const Matrix &out_b = model.params().Get(prefix + "out_b").value;
  const Matrix &copy_w = model.params().Get(prefix + "copy_w").value;
  const double copy_scale = CopyScale(config);

  std::vector<std::vector<int>> action_in(queries.size()), word_in(queries.size());
  std::vector<ActionSequence> actions(queries.size());
  std::vector<int> depth(queries.size(), 0);
  std::vector<size_t> active;
  for (size_t i = 0; i < queries.size(); ++i) {
    action_in[i].push_back(Vocab::kBos);
    word_in[i].push_back(-1);
    active.push_back(i);
  }
  while (!active.empty()) {
    Graph g;
    ParamBinder bind(g, model.params());
    // Only the active examples' memory rows are needed.
    std::vector<int> mem_rows;
    std::vector<Segment> act_src;
    std::vector<const std::vector<int> *> a_in, w_in;
    for (size_t i : active) {
      const Segment s = src_segments[i];
      act_src.push_back({static_cast<int>(mem_rows.size()), s.length});
      for (int r = 0; r < s.length; ++r) mem_rows.push_back(s.offset + r);
      a_in.push_back(&action_in[i]);
      w_in.push_back(&word_in[i]);
    }
    Var mem = g.Gather(g.Input(memory), mem_rows);
    std::vector<Segment> tgt;
    Var states = DecodeStates(bind, config, mem, act_src, a_in, w_in, tgt);
    const Matrix &H = g.value(states);
    const Matrix &M = g.value(mem);

    std::vector<size_t> still;
    for (size_t k = 0; k < active.size(); ++k) {
      const size_t i = active[k];
      const auto h = H.row(tgt[k].offset + tgt[k].length - 1);
      Eigen::RowVectorXd scores(num_outputs + act_src[k].length);
      scores.head(num_outputs) = h * out_w + out_b.row(0);
      Eigen::RowVectorXd cq = h * copy_w;
      scores.tail(act_src[k].length) =
          (M.block(act_src[k].offset, 0, act_src[k].length, M.cols()) *
           cq.transpose()).transpose() * copy_scale;
      Eigen::Index best = 0;
      scores.maxCoeff(&best);
      Action a;
      if (best == Vocab::kCloseOutput) {
        a = Action::Close();
      } else if (best < num_outputs) {
        a = Action::Open(vocab.Label(static_cast<int>(best) - 1));
      } else {
        a = Action::Copy(static_cast<int>(best) - num_outputs);
      }
      actions[i].push_back(a);
      if (a.kind == ActionKind::kOpen) ++depth[i];
      if (a.kind == ActionKind::kClose) --depth[i];
      const size_t cap = std::min<size_t>(2 * queries[i].size() + 64,
                                          static_cast<size_t>(config.max_positions));
      const bool bad_start = actions[i].size() == 1 && a.kind != ActionKind::kOpen;
      if (depth[i] <= 0 || bad_start || actions[i].size() >= cap) continue;
      int action_id = Vocab::kBos, word_id = -1;
      InputIdOf(vocab, a, words[i], action_id, word_id);
      action_in[i].push_back(action_id);
      word_in[i].push_back(word_id);
      still.push_back(i);
    }
    active = std::move(still);
  }

  for (size_t i = 0; i < queries.size(); ++i) {
    Prediction &p = out[i];
    p.actions = TruncateAtRootClose(actions[i]);
    try {
      p.tree = Delinearize(p.actions, queries[i].size());
      p.valid = true;
    } catch (const Error &e) {
      if (e.code() != ErrorCode::kMalformedSequence) throw;
      p.tree = BestEffortTree(p.actions, queries[i].size());
      p.valid = false;
    }
  }
  return out;
}

Prediction Predict(const ParserModel &model, const Tokens &query,
                   const std::string &head) {
  return PredictBatch(model, {query}, head).front();
}

}  // namespace semupdate
