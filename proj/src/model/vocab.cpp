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
#include "model/vocab.hpp"

#include "common/error.hpp"

namespace semupdate {

Vocab::Vocab() { AddWord("<unk>"); }

void Vocab::AddWord(const std::string &word) {
  if (word_ids_.emplace(word, static_cast<int>(words_.size())).second) {
    words_.push_back(word);
  }
}

void Vocab::AddLabel(const std::string &label) {
  if (label_ids_.emplace(label, static_cast<int>(labels_.size())).second) {
    labels_.push_back(label);
  }
}

void Vocab::AddTree(const ParseTree &tree) {
  AddLabel(tree.label);
  for (const ParseTree &c : tree.children) AddTree(c);
}

Vocab Vocab::FromExamples(
    const std::vector<const std::vector<Example> *> &sets) {
  Vocab v;
  for (const auto *set : sets) {
    for (const Example &e : *set) {
      for (const std::string &t : e.tokens) v.AddWord(t);
      if (e.v1) v.AddTree(*e.v1);
      if (e.v2) v.AddTree(*e.v2);
    }
  }
  return v;
}

int Vocab::WordId(const std::string &word) const {
  auto it = word_ids_.find(word);
  return it == word_ids_.end() ? kUnknownWord : it->second;
}

int Vocab::LabelId(const std::string &label) const {
  auto it = label_ids_.find(label);
  return it == label_ids_.end() ? -1 : it->second;
}

std::vector<int> Vocab::WordIds(const Tokens &tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const std::string &t : tokens) ids.push_back(WordId(t));
  return ids;
}

nlohmann::json Vocab::ToJson() const {
  return {{"words", words_}, {"labels", labels_}};
}

Vocab Vocab::FromJson(const nlohmann::json &j) {
  Vocab v;
  v.words_.clear();
  v.word_ids_.clear();
  for (const auto &w : j.at("words")) v.AddWord(w.get<std::string>());
  for (const auto &l : j.at("labels")) v.AddLabel(l.get<std::string>());
  if (v.words_.empty() || v.words_[0] != "<unk>") {
    Fail(ErrorCode::kParseError, "vocabulary must start with <unk>");
  }
  return v;
}

}  // namespace semupdate
