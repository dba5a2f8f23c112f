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
#ifndef SEMUPDATE_NN_GRAPH_HPP_
#define SEMUPDATE_NN_GRAPH_HPP_

#include <cstdint>
#include <functional>
#include <vector>

#include "nn/params.hpp"

namespace semupdate::nn {

// A contiguous run of rows belonging to one sequence in a packed matrix.
struct Segment {
  int offset = 0;
  int length = 0;
};

// Reverse-mode tape over row-major matrices. Sequences in a batch are packed
// row-wise; ops that mix positions (attention, pooling, copy scoring) take
// explicit segment lists.
class Graph {
 public:
  using Var = int;

  Var Input(Matrix value);
  // Gradients flow into `param.grad` and mark it touched.
  Var Param(Parameter &param);

  // Row r of the result is row rows[r] of `table`; -1 yields a zero row.
  Var Gather(Var table, std::vector<int> rows);
  Var MatMul(Var a, Var b);
  Var AddRowVector(Var x, Var bias);
  Var Add(Var a, Var b);
  Var Relu(Var x);
  Var LayerNorm(Var x, Var gain, Var bias, double epsilon = 1e-5);

  // Scaled dot-product attention, `heads` column blocks. Query segment i
  // attends only to key segment i; with `causal` set, query position t sees
  // key positions <= t.
  Var Attention(Var q, Var k, Var v, std::vector<Segment> q_segments,
                std::vector<Segment> k_segments, int heads, bool causal);

  Var MeanPool(Var x, std::vector<Segment> segments);

  // sum_r (logsumexp(logits_r) - logits_r[target_r]) / normalizer.
  Var SoftmaxCrossEntropy(Var logits, std::vector<int> targets,
                          double normalizer);

  // Cross-entropy over a joint softmax of [vocab logits | copy scores], with
  // copy score j = <copy_query_r, memory_{src_r.offset + j}> * copy_scale.
  // Target t < V selects a vocabulary action; t >= V copies source position
  // t - V. Rows with mask 0 contribute neither loss nor gradient.
  Var ActionCrossEntropy(Var vocab_logits, Var copy_query, Var memory,
                         std::vector<Segment> sources, std::vector<int> targets,
                         std::vector<uint8_t> mask, double copy_scale,
                         double normalizer);

  const Matrix &value(Var v) const { return nodes_[v].value; }
  // Zero-shaped until Backward has reached the node.
  const Matrix &grad(Var v) const { return nodes_[v].grad; }
  double scalar(Var v) const { return nodes_[v].value(0, 0); }

  // Seeds d(root)/d(root) = 1; root must be 1x1.
  void Backward(Var root);

  size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
    std::function<void(Graph &, Var)> backward;
  };

  Var Push(Matrix value, bool requires_grad,
           std::function<void(Graph &, Var)> backward);
  Matrix &GradRef(Var v);
  bool Requires(Var v) const { return nodes_[v].requires_grad; }

  std::vector<Node> nodes_;
};

}  // namespace semupdate::nn

#endif  // SEMUPDATE_NN_GRAPH_HPP_
