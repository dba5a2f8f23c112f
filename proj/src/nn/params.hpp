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
#ifndef SEMUPDATE_NN_PARAMS_HPP_
#define SEMUPDATE_NN_PARAMS_HPP_

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace semupdate::nn {

using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Parameter {
  Matrix value;
  Matrix grad;
  // Adam moments.
  Matrix m;
  Matrix v;
  // Set when a backward pass reached this parameter since the last step.
  bool touched = false;
};

// Named parameters, iterated in name order. Copying deep-copies values and
// optimizer state.
class ParameterStore {
 public:
  Parameter &Add(const std::string &name, Matrix init);
  Parameter &Get(const std::string &name);
  const Parameter &Get(const std::string &name) const;
  bool Has(const std::string &name) const { return params_.count(name) > 0; }
  void Remove(const std::string &name) { params_.erase(name); }

  std::vector<std::string> Names() const;
  std::vector<std::string> NamesWithPrefix(const std::string &prefix) const;
  size_t Size() const { return params_.size(); }

  void ZeroGrad();
  void ResetOptimizerState();

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

 private:
  std::map<std::string, Parameter> params_;
};

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.98;
  double epsilon = 1e-9;
  // Global L2 clip over the touched gradients; <= 0 disables.
  double clip_norm = 1.0;
};

// One Adam update at rate `lr` over parameters touched since the last step.
// Untouched parameters (and their moments) are left bit-identical. Clears
// gradients and touched flags afterwards.
void AdamStep(ParameterStore &store, const AdamConfig &config, double lr);

// Linear warmup to `base_lr` over `warmup` steps, then constant.
double WarmupRate(double base_lr, int step, int warmup);

Matrix XavierUniform(int rows, int cols, std::mt19937_64 &rng);
Matrix NormalInit(int rows, int cols, double stddev, std::mt19937_64 &rng);

}  // namespace semupdate::nn

#endif  // SEMUPDATE_NN_PARAMS_HPP_
