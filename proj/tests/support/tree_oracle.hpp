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

// Test-side reference implementations. Nothing here calls into the library's
// parse-tree code, so agreement is meaningful.
#ifndef SEMUPDATE_TESTS_SUPPORT_TREE_ORACLE_HPP_
#define SEMUPDATE_TESTS_SUPPORT_TREE_ORACLE_HPP_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "parsetree/parse_tree.hpp"

namespace semupdate::testing {

struct RandomTreeCase {
  Tokens query;
  ParseTree tree;
};

class RandomTreeGenerator {
 public:
  explicit RandomTreeGenerator(uint64_t seed) : rng_(seed) {}

  // Distinct tokens, so every quoted span resolves to exactly one place.
  // Some tokens carry quotes and backslashes to exercise escaping.
  RandomTreeCase Next() {
    RandomTreeCase c;
    cursor_ = Uniform(0, 2);
    c.tree = MakeIntent(0);
    const int length = cursor_ + Uniform(0, 3);
    for (int i = 0; i < std::max(length, 1); ++i) {
      std::string tok = "w" + std::to_string(i);
      if (Uniform(0, 9) == 0) tok += "\"q";
      if (Uniform(0, 19) == 0) tok += "\\b";
      c.query.push_back(tok);
    }
    return c;
  }

 private:
  int Uniform(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng_);
  }

  ParseTree MakeIntent(int depth) {
    ParseTree t;
    t.kind = NodeKind::kIntent;
    t.label = "IN:I" + std::to_string(Uniform(0, 7));
    const int slots = Uniform(0, 3);
    for (int i = 0; i < slots; ++i) t.children.push_back(MakeSlot(depth));
    return t;
  }

  ParseTree MakeSlot(int depth) {
    ParseTree s;
    s.kind = NodeKind::kSlot;
    s.label = "SL:S" + std::to_string(Uniform(0, 9));
    if (depth < 3 && Uniform(0, 4) == 0) {
      s.children.push_back(MakeIntent(depth + 1));
      return s;
    }
    cursor_ += Uniform(0, 2);
    const int width = Uniform(1, 3);
    for (int i = 0; i < width; ++i) s.span.push_back(cursor_++);
    return s;
  }

  std::mt19937_64 rng_;
  int cursor_ = 0;
};

inline std::string QuoteTokens(const Tokens &query, const std::vector<int> &span) {
  std::string out = "\"";
  for (size_t i = 0; i < span.size(); ++i) {
    if (i) out += ' ';
    for (char ch : query[span[i]]) {
      if (ch == '"' || ch == '\\') out += '\\';
      out += ch;
    }
  }
  return out + "\"";
}

// Canonical bracket text: "(" label, quoted span, children, " )".
inline std::string ReferenceSerialize(const ParseTree &t, const Tokens &query) {
  std::string out = "(" + t.label;
  if (!t.span.empty()) out += " " + QuoteTokens(query, t.span);
  for (const ParseTree &c : t.children) out += " " + ReferenceSerialize(c, query);
  return out + " )";
}

inline size_t ReferenceActionCount(const ParseTree &t) {
  size_t n = 2 + t.span.size();
  for (const ParseTree &c : t.children) n += ReferenceActionCount(c);
  return n;
}

// Recursive-descent recognizer for canonical bracket text. Returns the
// number of nodes, or -1 if the text is not well formed.
class BracketRecognizer {
 public:
  explicit BracketRecognizer(const std::string &text) : s_(text) {}

  int Run() {
    int nodes = 0;
    if (!Node(nodes) || pos_ != s_.size()) return -1;
    return nodes;
  }

 private:
  bool Node(int &nodes) {
    if (!Eat('(')) return false;
    const size_t start = pos_;
    while (pos_ < s_.size() && s_[pos_] != ' ' && s_[pos_] != ')') ++pos_;
    const std::string label = s_.substr(start, pos_ - start);
    if (label.rfind("IN:", 0) != 0 && label.rfind("SL:", 0) != 0) return false;
    ++nodes;
    while (true) {
      if (!Eat(' ')) return false;
      if (Peek() == ')') {
        ++pos_;
        return true;
      }
      if (Peek() == '"') {
        if (!Quoted()) return false;
      } else if (!Node(nodes)) {
        return false;
      }
    }
  }

  bool Quoted() {
    ++pos_;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      if (s_[pos_] == '\\') ++pos_;
      ++pos_;
    }
    return Eat('"');
  }

  char Peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  bool Eat(char c) {
    if (Peek() != c) return false;
    ++pos_;
    return true;
  }

  const std::string &s_;
  size_t pos_ = 0;
};

}  // namespace semupdate::testing

#endif  // SEMUPDATE_TESTS_SUPPORT_TREE_ORACLE_HPP_
