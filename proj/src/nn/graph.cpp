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
#include "nn/graph.hpp"

#include <cmath>
#include <limits>
#include <memory>

#include "common/error.hpp"

namespace semupdate::nn {

Graph::Var Graph::Push(Matrix value, bool requires_grad,
                       std::function<void(Graph &, Var)> backward) {
  Node node;
  node.value = std::move(value);
  node.requires_grad = requires_grad;
  if (requires_grad) node.backward = std::move(backward);
  nodes_.push_back(std::move(node));
  return static_cast<Var>(nodes_.size() - 1);
}

Matrix &Graph::GradRef(Var v) {
  Node &n = nodes_[v];
  if (n.grad.rows() != n.value.rows() || n.grad.cols() != n.value.cols()) {
    n.grad = Matrix::Zero(n.value.rows(), n.value.cols());
  }
  return n.grad;
}

Graph::Var Graph::Input(Matrix value) {
  return Push(std::move(value), false, nullptr);
}

Graph::Var Graph::Param(Parameter &param) {
  Parameter *p = &param;
  return Push(param.value, true, [p](Graph &g, Var self) {
    p->grad += g.nodes_[self].grad;
    p->touched = true;
  });
}

Graph::Var Graph::Gather(Var table, std::vector<int> rows) {
  const Matrix &t = value(table);
  Matrix out = Matrix::Zero(static_cast<int>(rows.size()), t.cols());
  for (size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= 0) out.row(r) = t.row(rows[r]);
  }
  return Push(std::move(out), Requires(table),
              [table, rows = std::move(rows)](Graph &g, Var self) {
                const Matrix &go = g.nodes_[self].grad;
                Matrix &gt = g.GradRef(table);
                for (size_t r = 0; r < rows.size(); ++r) {
                  if (rows[r] >= 0) gt.row(rows[r]) += go.row(r);
                }
              });
}

Graph::Var Graph::MatMul(Var a, Var b) {
  Matrix out = value(a) * value(b);
  return Push(std::move(out), Requires(a) || Requires(b),
              [a, b](Graph &g, Var self) {
                const Matrix &go = g.nodes_[self].grad;
                if (g.Requires(a)) {
                  g.GradRef(a).noalias() += go * g.value(b).transpose();
                }
                if (g.Requires(b)) {
                  g.GradRef(b).noalias() += g.value(a).transpose() * go;
                }
              });
}

Graph::Var Graph::AddRowVector(Var x, Var bias) {
  Matrix out = value(x);
  out.rowwise() += value(bias).row(0);
  return Push(std::move(out), Requires(x) || Requires(bias),
              [x, bias](Graph &g, Var self) {
                const Matrix &go = g.nodes_[self].grad;
                if (g.Requires(x)) g.GradRef(x) += go;
                if (g.Requires(bias)) g.GradRef(bias) += go.colwise().sum();
              });
}

Graph::Var Graph::Add(Var a, Var b) {
  Matrix out = value(a) + value(b);
  return Push(std::move(out), Requires(a) || Requires(b),
              [a, b](Graph &g, Var self) {
                const Matrix &go = g.nodes_[self].grad;
                if (g.Requires(a)) g.GradRef(a) += go;
                if (g.Requires(b)) g.GradRef(b) += go;
              });
}

Graph::Var Graph::Relu(Var x) {
  Matrix out = value(x).cwiseMax(0.0);
  return Push(std::move(out), Requires(x), [x](Graph &g, Var self) {
    const Matrix &go = g.nodes_[self].grad;
    g.GradRef(x).array() +=
        (g.value(x).array() > 0.0).cast<double>() * go.array();
  });
}

Graph::Var Graph::LayerNorm(Var x, Var gain, Var bias, double epsilon) {
  const Matrix &in = value(x);
  const int n = static_cast<int>(in.cols());
  Matrix xhat(in.rows(), in.cols());
  Eigen::VectorXd inv_std(in.rows());
  for (int r = 0; r < in.rows(); ++r) {
    const double mean = in.row(r).mean();
    const double var = (in.row(r).array() - mean).square().sum() / n;
    inv_std(r) = 1.0 / std::sqrt(var + epsilon);
    xhat.row(r) = (in.row(r).array() - mean) * inv_std(r);
  }
  Matrix out = xhat;
  out.array().rowwise() *= value(gain).row(0).array();
  out.rowwise() += value(bias).row(0);
  return Push(
      std::move(out), Requires(x) || Requires(gain) || Requires(bias),
      [x, gain, bias, n, xhat = std::move(xhat),
       inv_std = std::move(inv_std)](Graph &g, Var self) {
        const Matrix &go = g.nodes_[self].grad;
        if (g.Requires(gain)) {
          g.GradRef(gain) += (go.array() * xhat.array()).colwise().sum().matrix();
        }
        if (g.Requires(bias)) g.GradRef(bias) += go.colwise().sum();
        if (g.Requires(x)) {
          Matrix dxhat = go;
          dxhat.array().rowwise() *= g.value(gain).row(0).array();
          Matrix &gx = g.GradRef(x);
          for (int r = 0; r < go.rows(); ++r) {
            const double s1 = dxhat.row(r).sum();
            const double s2 = dxhat.row(r).dot(xhat.row(r));
            gx.row(r).array() += inv_std(r) / n *
                                 (n * dxhat.row(r).array() - s1 -
                                  xhat.row(r).array() * s2);
          }
        }
      });
}

Graph::Var Graph::Attention(Var q, Var k, Var v,
                            std::vector<Segment> q_segments,
                            std::vector<Segment> k_segments, int heads,
                            bool causal) {
  const Matrix &Q = value(q);
  const Matrix &K = value(k);
  const Matrix &V = value(v);
  const int d = static_cast<int>(Q.cols());
  if (heads <= 0 || d % heads != 0 || q_segments.size() != k_segments.size()) {
    Fail(ErrorCode::kInternal, "bad attention shapes");
  }
  const int dk = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));
  Matrix out = Matrix::Zero(Q.rows(), d);
  // Attention weights per (segment, head), kept for the backward pass.
  auto probs = std::make_shared<std::vector<Matrix>>();
  probs->reserve(q_segments.size() * heads);
  for (size_t s = 0; s < q_segments.size(); ++s) {
    const Segment qs = q_segments[s], ks = k_segments[s];
    for (int h = 0; h < heads; ++h) {
      if (qs.length == 0 || ks.length == 0) {
        probs->emplace_back();
        continue;
      }
      Matrix scores = Q.block(qs.offset, h * dk, qs.length, dk) *
                      K.block(ks.offset, h * dk, ks.length, dk).transpose() *
                      scale;
      for (int i = 0; i < qs.length; ++i) {
        const int visible = causal ? std::min(i + 1, ks.length) : ks.length;
        double mx = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < visible; ++j) mx = std::max(mx, scores(i, j));
        double z = 0.0;
        for (int j = 0; j < ks.length; ++j) {
          const double e = j < visible ? std::exp(scores(i, j) - mx) : 0.0;
          scores(i, j) = e;
          z += e;
        }
        scores.row(i) /= z;
      }
      out.block(qs.offset, h * dk, qs.length, dk).noalias() =
          scores * V.block(ks.offset, h * dk, ks.length, dk);
      probs->push_back(std::move(scores));
    }
  }
  return Push(
      std::move(out), Requires(q) || Requires(k) || Requires(v),
      [q, k, v, heads, dk, scale, probs, q_segments = std::move(q_segments),
       k_segments = std::move(k_segments)](Graph &g, Var self) {
        const Matrix &go = g.nodes_[self].grad;
        const Matrix &Q = g.value(q);
        const Matrix &K = g.value(k);
        const Matrix &V = g.value(v);
        Matrix &gq = g.GradRef(q);
        Matrix &gk = g.GradRef(k);
        Matrix &gv = g.GradRef(v);
        size_t idx = 0;
        for (size_t s = 0; s < q_segments.size(); ++s) {
          const Segment qs = q_segments[s], ks = k_segments[s];
          for (int h = 0; h < heads; ++h, ++idx) {
            if (qs.length == 0 || ks.length == 0) continue;
            const Matrix &P = (*probs)[idx];
            auto dO = go.block(qs.offset, h * dk, qs.length, dk);
            Matrix dP = dO * V.block(ks.offset, h * dk, ks.length, dk).transpose();
            gv.block(ks.offset, h * dk, ks.length, dk).noalias() +=
                P.transpose() * dO;
            Matrix dS = P.cwiseProduct(dP);
            for (int i = 0; i < dS.rows(); ++i) {
              const double row = dS.row(i).sum();
              dS.row(i) -= P.row(i) * row;
            }
            gq.block(qs.offset, h * dk, qs.length, dk).noalias() +=
                dS * K.block(ks.offset, h * dk, ks.length, dk) * scale;
            gk.block(ks.offset, h * dk, ks.length, dk).noalias() +=
                dS.transpose() * Q.block(qs.offset, h * dk, qs.length, dk) *
                scale;
          }
        }
      });
}

Graph::Var Graph::MeanPool(Var x, std::vector<Segment> segments) {
  const Matrix &in = value(x);
  Matrix out = Matrix::Zero(static_cast<int>(segments.size()), in.cols());
  for (size_t s = 0; s < segments.size(); ++s) {
    if (segments[s].length == 0) continue;
    out.row(s) = in.block(segments[s].offset, 0, segments[s].length, in.cols())
                     .colwise()
                     .mean();
  }
  return Push(std::move(out), Requires(x),
              [x, segments = std::move(segments)](Graph &g, Var self) {
                const Matrix &go = g.nodes_[self].grad;
                Matrix &gx = g.GradRef(x);
                for (size_t s = 0; s < segments.size(); ++s) {
                  const Segment seg = segments[s];
                  for (int r = 0; r < seg.length; ++r) {
                    gx.row(seg.offset + r) += go.row(s) / seg.length;
                  }
                }
              });
}

Graph::Var Graph::SoftmaxCrossEntropy(Var logits, std::vector<int> targets,
                                      double normalizer) {
  const Matrix &L = value(logits);
  Matrix probs(L.rows(), L.cols());
  double total = 0.0;
  for (int r = 0; r < L.rows(); ++r) {
    const double mx = L.row(r).maxCoeff();
    probs.row(r) = (L.row(r).array() - mx).exp();
    const double z = probs.row(r).sum();
    probs.row(r) /= z;
    total += std::log(z) + mx - L(r, targets[r]);
  }
  Matrix out(1, 1);
  out(0, 0) = total / normalizer;
  return Push(std::move(out), Requires(logits),
              [logits, normalizer, probs = std::move(probs),
               targets = std::move(targets)](Graph &g, Var self) {
                const double go = g.nodes_[self].grad(0, 0) / normalizer;
                Matrix d = probs;
                for (size_t r = 0; r < targets.size(); ++r) d(r, targets[r]) -= 1.0;
                g.GradRef(logits) += d * go;
              });
}

Graph::Var Graph::ActionCrossEntropy(Var vocab_logits, Var copy_query,
                                     Var memory, std::vector<Segment> sources,
                                     std::vector<int> targets,
                                     std::vector<uint8_t> mask,
                                     double copy_scale, double normalizer) {
  const Matrix &VL = value(vocab_logits);
  const Matrix &CQ = value(copy_query);
  const Matrix &M = value(memory);
  const int rows = static_cast<int>(VL.rows());
  const int vocab = static_cast<int>(VL.cols());
  if (static_cast<int>(sources.size()) != rows ||
      static_cast<int>(targets.size()) != rows ||
      static_cast<int>(mask.size()) != rows) {
    Fail(ErrorCode::kInternal, "ActionCrossEntropy size mismatch");
  }
  // Softmax rows for unmasked positions (empty for masked ones).
  auto probs = std::make_shared<std::vector<Eigen::RowVectorXd>>(rows);
  double total = 0.0;
  for (int r = 0; r < rows; ++r) {
    if (!mask[r]) continue;
    const Segment src = sources[r];
    Eigen::RowVectorXd full(vocab + src.length);
    full.head(vocab) = VL.row(r);
    if (src.length > 0) {
      full.tail(src.length) =
          (M.block(src.offset, 0, src.length, M.cols()) *
           CQ.row(r).transpose()).transpose() * copy_scale;
    }
    const int t = targets[r];
    if (t < 0 || t >= full.size()) {
      Fail(ErrorCode::kInternal, "action target out of range");
    }
    const double mx = full.maxCoeff();
    Eigen::RowVectorXd e = (full.array() - mx).exp();
    const double z = e.sum();
    total += std::log(z) + mx - full(t);
    (*probs)[r] = e / z;
  }
  Matrix out(1, 1);
  out(0, 0) = total / normalizer;
  const bool req =
      Requires(vocab_logits) || Requires(copy_query) || Requires(memory);
  return Push(
      std::move(out), req,
      [vocab_logits, copy_query, memory, vocab, copy_scale, normalizer, probs,
       sources = std::move(sources), targets = std::move(targets),
       mask = std::move(mask)](Graph &g, Var self) {
        const double go = g.nodes_[self].grad(0, 0) / normalizer;
        const Matrix &CQ = g.value(copy_query);
        const Matrix &M = g.value(memory);
        Matrix &gvl = g.GradRef(vocab_logits);
        Matrix &gcq = g.GradRef(copy_query);
        Matrix &gm = g.GradRef(memory);
        for (size_t r = 0; r < mask.size(); ++r) {
          if (!mask[r]) continue;
          Eigen::RowVectorXd d = (*probs)[r] * go;
          d(targets[r]) -= go;
          gvl.row(r) += d.head(vocab);
          const Segment src = sources[r];
          if (src.length == 0) continue;
          Eigen::RowVectorXd dc = d.tail(src.length) * copy_scale;
          gcq.row(r) += dc * M.block(src.offset, 0, src.length, M.cols());
          gm.block(src.offset, 0, src.length, M.cols()).noalias() +=
              dc.transpose() * CQ.row(r);
        }
      });
}

void Graph::Backward(Var root) {
  if (value(root).rows() != 1 || value(root).cols() != 1) {
    Fail(ErrorCode::kInternal, "Backward root must be scalar");
  }
  GradRef(root)(0, 0) += 1.0;
  for (Var v = root; v >= 0; --v) {
    Node &n = nodes_[v];
    if (!n.requires_grad || !n.backward) continue;
    if (n.grad.size() == 0) continue;
    n.backward(*this, v);
  }
}

}  // namespace semupdate::nn
