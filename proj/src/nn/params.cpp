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
#include "nn/params.hpp"

#include <cmath>

#include "common/error.hpp"

namespace semupdate::nn {

Parameter &ParameterStore::Add(const std::string &name, Matrix init) {
  if (params_.count(name)) {
    Fail(ErrorCode::kInternal, "duplicate parameter " + name);
  }
  Parameter &p = params_[name];
  p.grad = Matrix::Zero(init.rows(), init.cols());
  p.m = Matrix::Zero(init.rows(), init.cols());
  p.v = Matrix::Zero(init.rows(), init.cols());
  p.value = std::move(init);
  return p;
}

Parameter &ParameterStore::Get(const std::string &name) {
  auto it = params_.find(name);
  if (it == params_.end()) Fail(ErrorCode::kInternal, "no parameter " + name);
  return it->second;
}

const Parameter &ParameterStore::Get(const std::string &name) const {
  auto it = params_.find(name);
  if (it == params_.end()) Fail(ErrorCode::kInternal, "no parameter " + name);
  return it->second;
}

std::vector<std::string> ParameterStore::Names() const {
  std::vector<std::string> out;
  for (const auto &[name, p] : params_) out.push_back(name);
  return out;
}

std::vector<std::string> ParameterStore::NamesWithPrefix(
    const std::string &prefix) const {
  std::vector<std::string> out;
  for (const auto &[name, p] : params_) {
    if (name.starts_with(prefix)) out.push_back(name);
  }
  return out;
}

void ParameterStore::ZeroGrad() {
  for (auto &[name, p] : params_) {
    p.grad.setZero();
    p.touched = false;
  }
}

void ParameterStore::ResetOptimizerState() {
  for (auto &[name, p] : params_) {
    p.m.setZero();
    p.v.setZero();
  }
}

void AdamStep(ParameterStore &store, const AdamConfig &config, double lr) {
  double sq = 0.0;
  for (auto &[name, p] : store) {
    if (p.touched) sq += p.grad.squaredNorm();
  }
  double scale = 1.0;
  if (config.clip_norm > 0.0) {
    const double norm = std::sqrt(sq);
    if (norm > config.clip_norm) scale = config.clip_norm / norm;
  }
  for (auto &[name, p] : store) {
    if (!p.touched) continue;
    const double b1 = config.beta1, b2 = config.beta2;
    auto g = p.grad.array() * scale;
    p.m.array() = b1 * p.m.array() + (1.0 - b1) * g;
    p.v.array() = b2 * p.v.array() + (1.0 - b2) * g.square();
    p.value.array() -=
        lr * p.m.array() / (p.v.array().sqrt() + config.epsilon);
    p.grad.setZero();
    p.touched = false;
  }
}

double WarmupRate(double base_lr, int step, int warmup) {
  if (warmup <= 0) return base_lr;
  const double frac = static_cast<double>(step + 1) / warmup;
  return base_lr * std::min(1.0, frac);
}

Matrix XavierUniform(int rows, int cols, std::mt19937_64 &rng) {
  const double limit = std::sqrt(6.0 / (rows + cols));
  std::uniform_real_distribution<double> dist(-limit, limit);
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = dist(rng);
  }
  return m;
}

Matrix NormalInit(int rows, int cols, double stddev, std::mt19937_64 &rng) {
  std::normal_distribution<double> dist(0.0, stddev);
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = dist(rng);
  }
  return m;
}

}  // namespace semupdate::nn
