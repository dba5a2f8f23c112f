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
#include "doctest.h"

#include <cmath>
#include <random>

#include "nn/graph.hpp"
#include "nn/params.hpp"
#include "support/grad_check.hpp"

namespace semupdate::nn {
namespace {

using testing::WorstGradient;

Matrix Random(int rows, int cols, std::mt19937_64 &rng, double scale = 1.0) {
  return NormalInit(rows, cols, scale, rng);
}

// Builds a graph from the store and returns the scalar loss; gradients land
// in the store when `backward` is set.
using Builder = std::function<Graph::Var(Graph &, ParameterStore &)>;

double Run(ParameterStore &store, const Builder &build, bool backward) {
  Graph g;
  const Graph::Var loss = build(g, store);
  if (backward) {
    store.ZeroGrad();
    g.Backward(loss);
  }
  return g.scalar(loss);
}

void CheckGradients(ParameterStore &store, const Builder &build) {
  Run(store, build, true);
  const auto worst = WorstGradient(
      store, store.Names(), [&] { return Run(store, build, false); }, 40, 3);
  INFO(worst.name << "(" << worst.row << "," << worst.col << ") analytic " << worst.analytic
                  << " numeric " << worst.numeric);
  CHECK(testing::RelativeError(worst.analytic, worst.numeric) < 1e-4);
}

TEST_CASE("gradients of dense ops") {
  std::mt19937_64 rng(1);
  ParameterStore s;
  s.Add("x", Random(5, 4, rng));
  s.Add("w", Random(4, 6, rng, 0.5));
  s.Add("b", Random(1, 6, rng));
  s.Add("g", Random(1, 6, rng));
  s.Add("beta", Random(1, 6, rng));
  s.Add("y", Random(5, 6, rng));
  CheckGradients(s, [](Graph &g, ParameterStore &p) {
    Graph::Var h = g.MatMul(g.Param(p.Get("x")), g.Param(p.Get("w")));
    h = g.AddRowVector(h, g.Param(p.Get("b")));
    h = g.Add(h, g.Param(p.Get("y")));
    h = g.LayerNorm(h, g.Param(p.Get("g")), g.Param(p.Get("beta")));
    h = g.Relu(h);
    return g.SoftmaxCrossEntropy(h, {0, 5, 2, 3, 1}, 5.0);
  });
}

TEST_CASE("gradients of gather and pooling") {
  std::mt19937_64 rng(2);
  ParameterStore s;
  s.Add("table", Random(7, 3, rng));
  CheckGradients(s, [](Graph &g, ParameterStore &p) {
    const Graph::Var rows = g.Gather(g.Param(p.Get("table")), {1, 4, 4, -1, 6, 0});
    const Graph::Var pooled = g.MeanPool(rows, {{0, 2}, {2, 4}});
    return g.SoftmaxCrossEntropy(pooled, {2, 0}, 2.0);
  });
}

TEST_CASE("gradients of segmented attention") {
  std::mt19937_64 rng(3);
  for (bool causal : {false, true}) {
    ParameterStore s;
    s.Add("q", Random(7, 4, rng));
    s.Add("k", Random(7, 4, rng));
    s.Add("v", Random(7, 4, rng));
    CheckGradients(s, [causal](Graph &g, ParameterStore &p) {
      const std::vector<Segment> seg = {{0, 3}, {3, 4}};
      const Graph::Var a = g.Attention(g.Param(p.Get("q")), g.Param(p.Get("k")),
                                       g.Param(p.Get("v")), seg, seg, 2, causal);
      return g.SoftmaxCrossEntropy(a, {0, 1, 2, 3, 0, 1, 2}, 7.0);
    });
  }
}

TEST_CASE("causal attention ignores later positions") {
  std::mt19937_64 rng(4);
  Matrix q = Random(4, 4, rng), k = Random(4, 4, rng), v = Random(4, 4, rng);
  Graph g1;
  const Matrix a = g1.value(g1.Attention(g1.Input(q), g1.Input(k), g1.Input(v), {{0, 4}},
                                         {{0, 4}}, 2, true));
  k.row(3).setRandom();
  v.row(3).setRandom();
  Graph g2;
  const Matrix b = g2.value(g2.Attention(g2.Input(q), g2.Input(k), g2.Input(v), {{0, 4}},
                                         {{0, 4}}, 2, true));
  CHECK(a.topRows(3) == b.topRows(3));
  CHECK(a.row(3) != b.row(3));
}

TEST_CASE("action cross entropy gradients and masking") {
  std::mt19937_64 rng(5);
  ParameterStore s;
  s.Add("logits", Random(5, 4, rng));
  s.Add("query", Random(5, 3, rng));
  s.Add("memory", Random(6, 3, rng));
  const std::vector<uint8_t> mask = {1, 0, 1, 1, 0};
  const Builder build = [&](Graph &g, ParameterStore &p) {
    return g.ActionCrossEntropy(g.Param(p.Get("logits")), g.Param(p.Get("query")),
                                g.Param(p.Get("memory")), {{0, 2}, {0, 2}, {2, 2}, {2, 2}, {2, 2}},
                                {0, 5, 4, 5, 1}, mask, 0.5, 3.0);
  };
  CheckGradients(s, build);
  Run(s, build, true);
  const Matrix &gl = s.Get("logits").grad;
  const Matrix &gq = s.Get("query").grad;
  for (int r : {1, 4}) {
    CHECK(gl.row(r).isZero(0.0));
    CHECK(gq.row(r).isZero(0.0));
  }
  CHECK_FALSE(gl.row(0).isZero(0.0));
  // Memory rows 4 and 5 belong to no source segment.
  CHECK(s.Get("memory").grad.bottomRows(2).isZero(0.0));
}

TEST_CASE("adam leaves untouched parameters bit-identical") {
  std::mt19937_64 rng(6);
  ParameterStore s;
  s.Add("used", Random(3, 3, rng));
  s.Add("idle", Random(3, 3, rng));
  const ParameterStore before = s;
  for (int step = 0; step < 3; ++step) {
    Graph g;
    const Graph::Var loss = g.SoftmaxCrossEntropy(g.Param(s.Get("used")), {0, 1, 2}, 3.0);
    g.Backward(loss);
    AdamStep(s, {}, 0.01);
  }
  CHECK(s.Get("idle").value == before.Get("idle").value);
  CHECK(s.Get("idle").m == before.Get("idle").m);
  CHECK(s.Get("idle").v == before.Get("idle").v);
  CHECK(s.Get("used").value != before.Get("used").value);
  CHECK_FALSE(s.Get("used").touched);
}

TEST_CASE("warmup is linear then constant") {
  CHECK(WarmupRate(1.0, 0, 10) == doctest::Approx(0.1));
  CHECK(WarmupRate(1.0, 4, 10) == doctest::Approx(0.5));
  CHECK(WarmupRate(1.0, 9, 10) == doctest::Approx(1.0));
  CHECK(WarmupRate(1.0, 500, 10) == doctest::Approx(1.0));
  CHECK(WarmupRate(2.0, 0, 0) == doctest::Approx(2.0));
}

}  // namespace
}  // namespace semupdate::nn
