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
#ifndef SEMUPDATE_MODEL_VOCAB_HPP_
#define SEMUPDATE_MODEL_VOCAB_HPP_

#include <map>
#include <string>
#include <vector>

#include "dataset/dataset.hpp"
#include "json.hpp"
#include "parsetree/parse_tree.hpp"

namespace semupdate {

// Word and action vocabularies shared by every head of a model.
//
// Decoder input ids: 0 BOS, 1 CLOSE, 2 COPY, 3 + i for label i.
// Output ids:        0 CLOSE, 1 + i for OPEN(label i); copy of source
//                    position j is scored at num_outputs() + j.
class Vocab {
 public:
  static constexpr int kUnknownWord = 0;
  static constexpr int kBos = 0;
  static constexpr int kCloseInput = 1;
  static constexpr int kCopyInput = 2;
  static constexpr int kCloseOutput = 0;

  Vocab();

  void AddWord(const std::string &word);
  void AddLabel(const std::string &label);
  void AddTree(const ParseTree &tree);

  // Words and labels of every example, both label versions.
  static Vocab FromExamples(const std::vector<const std::vector<Example> *> &sets);

  int WordId(const std::string &word) const;
  int LabelId(const std::string &label) const;  // -1 if absent
  const std::string &Label(int id) const { return labels_[id]; }

  int num_words() const { return static_cast<int>(words_.size()); }
  int num_labels() const { return static_cast<int>(labels_.size()); }
  int num_inputs() const { return 3 + num_labels(); }
  int num_outputs() const { return 1 + num_labels(); }

  std::vector<int> WordIds(const Tokens &tokens) const;

  nlohmann::json ToJson() const;
  static Vocab FromJson(const nlohmann::json &j);

  bool operator==(const Vocab &other) const {
    return words_ == other.words_ && labels_ == other.labels_;
  }

 private:
  std::vector<std::string> words_;
  std::map<std::string, int> word_ids_;
  std::vector<std::string> labels_;
  std::map<std::string, int> label_ids_;
};

}  // namespace semupdate

#endif  // SEMUPDATE_MODEL_VOCAB_HPP_
