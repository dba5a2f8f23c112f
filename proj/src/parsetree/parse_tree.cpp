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
#include "parsetree/parse_tree.hpp"

#include <cctype>
#include <optional>

#include "common/error.hpp"

namespace semupdate {

ParseTree ParseTree::Intent(std::string label,
                            std::vector<ParseTree> children) {
  ParseTree t;
  t.kind = NodeKind::kIntent;
  t.label = std::move(label);
  t.children = std::move(children);
  return t;
}

ParseTree ParseTree::Slot(std::string label, std::vector<int> span) {
  ParseTree t;
  t.kind = NodeKind::kSlot;
  t.label = std::move(label);
  t.span = std::move(span);
  return t;
}

ParseTree ParseTree::SlotWith(std::string label,
                              std::vector<ParseTree> intents) {
  ParseTree t;
  t.kind = NodeKind::kSlot;
  t.label = std::move(label);
  t.children = std::move(intents);
  return t;
}

NodeKind KindOfLabel(std::string_view label) {
  return label.starts_with("SL:") ? NodeKind::kSlot : NodeKind::kIntent;
}

namespace {

bool IsSpace(char c) { return std::isspace(static_cast<unsigned char>(c)); }

bool IsTrailingPunct(char c) {
  return c == '?' || c == '.' || c == ',' || c == '!' || c == ';' || c == ':';
}

}  // namespace

Tokens SplitTokens(std::string_view joined) {
  Tokens out;
  size_t i = 0;
  while (i < joined.size()) {
    while (i < joined.size() && IsSpace(joined[i])) ++i;
    size_t j = i;
    while (j < joined.size() && !IsSpace(joined[j])) ++j;
    if (j > i) out.emplace_back(joined.substr(i, j - i));
    i = j;
  }
  return out;
}

Tokens Tokenize(std::string_view text) {
  Tokens out;
  for (std::string &word : SplitTokens(text)) {
    size_t end = word.size();
    while (end > 0 && IsTrailingPunct(word[end - 1])) --end;
    if (end == 0) {
      out.push_back(word);
      continue;
    }
    out.push_back(word.substr(0, end));
    for (size_t k = end; k < word.size(); ++k) out.emplace_back(1, word[k]);
  }
  return out;
}

std::string JoinTokens(const Tokens &tokens) {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Bracket parsing.

namespace {

class BracketParser {
 public:
  BracketParser(std::string_view text, const Tokens &query)
      : text_(text), query_(query) {}

  ParseTree Parse() {
    SkipSpace();
    if (pos_ == text_.size()) Fail(ErrorCode::kEmptyInput, "empty parse text");
    if (text_[pos_] != '(') {
      if (text_[pos_] == ')') Unbalanced("unexpected ')'");
      Syntax("expected '('");
    }
    ParseTree root = ParseNode(/*parent_is_slot=*/true);
    if (!root.is_intent()) Syntax("root must be an intent");
    SkipSpace();
    if (pos_ != text_.size()) {
      if (text_[pos_] == ')') Unbalanced("extra ')'");
      Syntax("trailing text after root");
    }
    return root;
  }

 private:
  [[noreturn]] void Unbalanced(const std::string &what) {
    Fail(ErrorCode::kUnbalancedBrackets,
         what + " at offset " + std::to_string(pos_));
  }
  [[noreturn]] void Syntax(const std::string &what) {
    Fail(ErrorCode::kParseError, what + " at offset " + std::to_string(pos_));
  }

  void SkipSpace() {
    while (pos_ < text_.size() && IsSpace(text_[pos_])) ++pos_;
  }

  // Positioned at '('.
  ParseTree ParseNode(bool parent_is_slot) {
    ++pos_;
    SkipSpace();
    size_t start = pos_;
    while (pos_ < text_.size() && !IsSpace(text_[pos_]) &&
           text_[pos_] != '(' && text_[pos_] != ')' && text_[pos_] != '"') {
      ++pos_;
    }
    if (pos_ == start) {
      if (pos_ == text_.size()) Unbalanced("missing ')'");
      Syntax("missing label");
    }
    ParseTree node;
    node.label = std::string(text_.substr(start, pos_ - start));
    node.kind = KindOfLabel(node.label);
    if (node.is_slot() == parent_is_slot) {
      Syntax("node '" + node.label + "' cannot appear here");
    }
    while (true) {
      SkipSpace();
      if (pos_ == text_.size()) Unbalanced("missing ')' for " + node.label);
      char c = text_[pos_];
      if (c == ')') {
        ++pos_;
        break;
      }
      if (c == '(') {
        if (!node.span.empty()) Syntax("slot mixes span and nested intent");
        node.children.push_back(ParseNode(node.is_slot()));
      } else if (c == '"') {
        if (!node.is_slot()) Syntax("quoted span directly under intent");
        if (!node.span.empty() || !node.children.empty()) {
          Syntax("slot carries more than one span");
        }
        node.span = ResolveSpan(ReadQuoted());
      } else {
        Syntax("unexpected character");
      }
    }
    if (node.is_slot() && node.span.empty() && node.children.empty()) {
      Syntax("empty slot " + node.label);
    }
    return node;
  }

  std::string ReadQuoted() {
    ++pos_;
    std::string out;
    while (true) {
      if (pos_ == text_.size()) Syntax("unterminated quote");
      char c = text_[pos_++];
      if (c == '"') break;
      if (c == '\\' && pos_ < text_.size()) c = text_[pos_++];
      out += c;
    }
    return out;
  }

  std::vector<int> ResolveSpan(const std::string &quoted) {
    Tokens needle = SplitTokens(quoted);
    if (needle.empty()) Syntax("empty quoted span");
    const size_t n = needle.size();
    for (size_t s = cursor_; s + n <= query_.size(); ++s) {
      bool hit = true;
      for (size_t k = 0; k < n && hit; ++k) hit = query_[s + k] == needle[k];
      if (hit) {
        std::vector<int> span;
        for (size_t k = 0; k < n; ++k) span.push_back(static_cast<int>(s + k));
        cursor_ = s + n;
        return span;
      }
    }
    Fail(ErrorCode::kUnknownSpan, "span \"" + quoted + "\" not found in query");
  }

  std::string_view text_;
  const Tokens &query_;
  size_t pos_ = 0;
  size_t cursor_ = 0;
};

void AppendQuoted(std::string &out, const Tokens &query,
                  const std::vector<int> &span) {
  out += '"';
  for (size_t i = 0; i < span.size(); ++i) {
    if (i) out += ' ';
    const int idx = span[i];
    if (idx < 0 || static_cast<size_t>(idx) >= query.size()) {
      Fail(ErrorCode::kInvalidArgument, "span index out of range");
    }
    for (char c : query[idx]) {
      if (c == '"' || c == '\\') out += '\\';
      out += c;
    }
  }
  out += '"';
}

void SerializeInto(std::string &out, const ParseTree &t, const Tokens &query) {
  out += '(';
  out += t.label;
  if (!t.span.empty()) {
    out += ' ';
    AppendQuoted(out, query, t.span);
  }
  for (const ParseTree &c : t.children) {
    out += ' ';
    SerializeInto(out, c, query);
  }
  out += " )";
}

void LinearizeInto(ActionSequence &out, const ParseTree &t) {
  out.push_back(Action::Open(t.label));
  for (int idx : t.span) out.push_back(Action::Copy(idx));
  for (const ParseTree &c : t.children) LinearizeInto(out, c);
  out.push_back(Action::Close());
}

void ValidateInto(const ParseTree &t, size_t query_length, bool under_slot,
                  int &last_index) {
  auto bad = [](const std::string &what) {
    Fail(ErrorCode::kInvalidArgument, "invalid tree: " + what);
  };
  if (t.kind != KindOfLabel(t.label)) bad("kind/label mismatch " + t.label);
  if (t.is_slot() == under_slot) bad("misplaced node " + t.label);
  if (t.is_intent() && !t.span.empty()) bad("intent with span");
  if (t.is_slot()) {
    if (t.span.empty() == t.children.empty()) {
      bad("slot needs exactly one of span or nested intents");
    }
    for (size_t i = 0; i < t.span.size(); ++i) {
      const int idx = t.span[i];
      if (idx < 0 || static_cast<size_t>(idx) >= query_length) {
        bad("span out of range");
      }
      if (idx <= last_index) bad("span indices not increasing");
      if (i > 0 && idx != t.span[i - 1] + 1) bad("span not contiguous");
      last_index = idx;
    }
  }
  for (const ParseTree &c : t.children) {
    ValidateInto(c, query_length, t.is_slot(), last_index);
  }
}

}  // namespace

ParseTree ParseBracketed(std::string_view text, const Tokens &query) {
  return BracketParser(text, query).Parse();
}

std::string Serialize(const ParseTree &tree, const Tokens &query) {
  std::string out;
  SerializeInto(out, tree, query);
  return out;
}

ActionSequence Linearize(const ParseTree &tree) {
  ActionSequence out;
  LinearizeInto(out, tree);
  return out;
}

ParseTree Delinearize(const ActionSequence &actions, size_t query_length) {
  auto bad = [](const std::string &what) {
    Fail(ErrorCode::kMalformedSequence, what);
  };
  if (actions.empty()) bad("empty action sequence");
  // Nodes under construction; back() is the innermost open node.
  std::vector<ParseTree> stack;
  std::optional<ParseTree> root;
  int last_index = -1;
  for (size_t i = 0; i < actions.size(); ++i) {
    const Action &a = actions[i];
    if (root) bad("actions after root closed at position " + std::to_string(i));
    switch (a.kind) {
      case ActionKind::kOpen: {
        const NodeKind kind = KindOfLabel(a.label);
        if (stack.empty()) {
          if (kind != NodeKind::kIntent) bad("first action must open an intent");
        } else {
          const ParseTree &parent = stack.back();
          if (parent.is_intent() && kind != NodeKind::kSlot) {
            bad("intent directly under intent");
          }
          if (parent.is_slot()) {
            if (kind != NodeKind::kIntent) bad("slot directly under slot");
            if (!parent.span.empty()) bad("slot mixes span and nested intent");
          }
        }
        ParseTree node;
        node.kind = kind;
        node.label = a.label;
        stack.push_back(std::move(node));
        break;
      }
      case ActionKind::kCopy: {
        if (stack.empty()) bad("COPY before first OPEN");
        ParseTree &top = stack.back();
        if (!top.is_slot()) bad("COPY outside a slot");
        if (!top.children.empty()) bad("slot mixes nested intent and span");
        if (a.index < 0 || static_cast<size_t>(a.index) >= query_length) {
          bad("COPY index out of range");
        }
        if (!top.span.empty() && a.index != top.span.back() + 1) {
          bad("non-contiguous span");
        }
        if (a.index <= last_index) bad("COPY indices not increasing");
        last_index = a.index;
        top.span.push_back(a.index);
        break;
      }
      case ActionKind::kClose: {
        if (stack.empty()) bad("CLOSE without OPEN");
        ParseTree node = std::move(stack.back());
        stack.pop_back();
        if (node.is_slot() && node.span.empty() && node.children.empty()) {
          bad("empty slot " + node.label);
        }
        if (stack.empty()) {
          root = std::move(node);
        } else {
          stack.back().children.push_back(std::move(node));
        }
        break;
      }
    }
  }
  if (!root) bad("unbalanced: root never closed");
  return std::move(*root);
}

ActionSequence TruncateAtRootClose(const ActionSequence &actions) {
  int depth = 0;
  for (size_t i = 0; i < actions.size(); ++i) {
    if (actions[i].kind == ActionKind::kOpen) ++depth;
    if (actions[i].kind == ActionKind::kClose) {
      --depth;
      if (depth <= 0) {
        return ActionSequence(actions.begin(), actions.begin() + i + 1);
      }
    }
  }
  return actions;
}

bool ExactMatch(const ParseTree &a, const ParseTree &b) { return a == b; }

const std::string &TopIntent(const ParseTree &tree) { return tree.label; }

void ValidateTree(const ParseTree &tree, size_t query_length) {
  if (!tree.is_intent()) {
    Fail(ErrorCode::kInvalidArgument, "invalid tree: root must be an intent");
  }
  int last = -1;
  ValidateInto(tree, query_length, /*under_slot=*/true, last);
}

size_t NodeCount(const ParseTree &tree) {
  size_t n = 1;
  for (const ParseTree &c : tree.children) n += NodeCount(c);
  return n;
}

size_t SpanTokenCount(const ParseTree &tree) {
  size_t n = tree.span.size();
  for (const ParseTree &c : tree.children) n += SpanTokenCount(c);
  return n;
}

std::string ActionToString(const Action &action) {
  switch (action.kind) {
    case ActionKind::kOpen: return "OPEN(" + action.label + ")";
    case ActionKind::kClose: return "CLOSE";
    case ActionKind::kCopy: return "COPY(" + std::to_string(action.index) + ")";
  }
  return "?";
}

std::string ActionsToString(const ActionSequence &actions) {
  std::string out;
  for (size_t i = 0; i < actions.size(); ++i) {
    if (i) out += ' ';
    out += ActionToString(actions[i]);
  }
  return out;
}

}  // namespace semupdate
