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
#include <fstream>

#include "common/error.hpp"
#include "dataset/dataset.hpp"

namespace semupdate {

namespace {

class TopReader {
 public:
  explicit TopReader(const Tokens &pieces) : pieces_(pieces) {}

  ParseTree Read(Tokens *words) {
    words_ = words;
    if (pieces_.empty() || !pieces_[0].starts_with("[IN:")) {
      Fail(ErrorCode::kParseError, "TOP tree must start with [IN:");
    }
    ParseTree root = ReadNode();
    if (pos_ != pieces_.size()) {
      Fail(ErrorCode::kUnbalancedBrackets, "trailing text after TOP root");
    }
    return root;
  }

 private:
  // Positioned at a "[LABEL" piece.
  ParseTree ReadNode() {
    ParseTree node;
    node.label = pieces_[pos_++].substr(1);
    node.kind = KindOfLabel(node.label);
    std::vector<int> words_here;
    while (true) {
      if (pos_ >= pieces_.size()) {
        Fail(ErrorCode::kUnbalancedBrackets, "missing ] for " + node.label);
      }
      const std::string &p = pieces_[pos_];
      if (p == "]") {
        ++pos_;
        break;
      }
      if (p.starts_with("[")) {
        ParseTree child = ReadNode();
        if (child.is_slot() == node.is_slot()) {
          Fail(ErrorCode::kParseError, "misplaced " + child.label);
        }
        // Slots with no words and no nested intents carry nothing; drop them.
        if (!(child.is_slot() && child.span.empty() && child.children.empty())) {
          node.children.push_back(std::move(child));
        }
        continue;
      }
      words_here.push_back(static_cast<int>(words_->size()));
      words_->push_back(p);
      ++pos_;
    }
    // A slot keeps its words only when it has no nested intent, and only the
    // words form one contiguous run.
    if (node.is_slot() && node.children.empty() && !words_here.empty()) {
      bool contiguous = true;
      for (size_t i = 1; i < words_here.size(); ++i) {
        contiguous &= words_here[i] == words_here[i - 1] + 1;
      }
      if (contiguous) node.span = std::move(words_here);
    }
    return node;
  }

  const Tokens &pieces_;
  size_t pos_ = 0;
  Tokens *words_ = nullptr;
};

}  // namespace

ParseTree ParseTopTree(const std::string &text, Tokens *tokens_out) {
  Tokens words;
  ParseTree tree = TopReader(SplitTokens(text)).Read(&words);
  if (tokens_out) *tokens_out = std::move(words);
  return tree;
}

std::vector<Example> LoadTopCorpus(const std::string &path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path);
  std::vector<Example> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const size_t last_tab = line.rfind('\t');
    if (last_tab == std::string::npos) {
      throw Error(ErrorCode::kParseError,
                  path + ":" + std::to_string(number) + ": missing tree field",
                  number);
    }
    Example e;
    e.id = "top-" + std::to_string(number);
    try {
      e.v2 = ParseTopTree(line.substr(last_tab + 1), &e.tokens);
      ValidateTree(*e.v2, e.tokens.size());
    } catch (const Error &err) {
      throw Error(ErrorCode::kParseError,
                  path + ":" + std::to_string(number) + ": " + err.what(),
                  number);
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace semupdate
