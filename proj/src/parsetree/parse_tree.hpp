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
#ifndef SEMUPDATE_PARSETREE_PARSE_TREE_HPP_
#define SEMUPDATE_PARSETREE_PARSE_TREE_HPP_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace semupdate {

using Tokens = std::vector<std::string>;

enum class NodeKind { kIntent, kSlot };

// A hierarchical intent/slot parse over a tokenized query. Intent nodes hold
// slot children; slot nodes hold either a contiguous token span or nested
// intents. Spans are token indices, strictly increasing in depth-first order.
struct ParseTree {
  NodeKind kind = NodeKind::kIntent;
  std::string label;
  std::vector<int> span;
  std::vector<ParseTree> children;

  bool operator==(const ParseTree &other) const = default;

  bool is_intent() const { return kind == NodeKind::kIntent; }
  bool is_slot() const { return kind == NodeKind::kSlot; }

  static ParseTree Intent(std::string label,
                          std::vector<ParseTree> children = {});
  static ParseTree Slot(std::string label, std::vector<int> span);
  static ParseTree SlotWith(std::string label,
                            std::vector<ParseTree> intents);
};

// Labels prefixed "SL:" are slots; everything else is an intent.
NodeKind KindOfLabel(std::string_view label);

enum class ActionKind { kOpen, kClose, kCopy };

struct Action {
  ActionKind kind = ActionKind::kClose;
  std::string label;  // kOpen only
  int index = -1;     // kCopy only

  static Action Open(std::string label) {
    return {ActionKind::kOpen, std::move(label), -1};
  }
  static Action Close() { return {ActionKind::kClose, {}, -1}; }
  static Action Copy(int index) { return {ActionKind::kCopy, {}, index}; }

  bool operator==(const Action &other) const = default;
};

using ActionSequence = std::vector<Action>;

// Whitespace split that also detaches trailing punctuation (?.,!;:) so that
// "traffic?" yields "traffic" and "?".
Tokens Tokenize(std::string_view text);
// Plain whitespace split, for already-tokenized text.
Tokens SplitTokens(std::string_view joined);
std::string JoinTokens(const Tokens &tokens);

// Parses canonical (or loosely spaced) bracket text such as
//   (IN:GET_DIRECTIONS (SL:DESTINATION "work" ) )
// resolving each quoted span to the leftmost matching token run that starts
// after the previously resolved span.
ParseTree ParseBracketed(std::string_view text, const Tokens &query);

// Canonical form: single spaces, a space before every ')'.
std::string Serialize(const ParseTree &tree, const Tokens &query);

ActionSequence Linearize(const ParseTree &tree);

// Rebuilds the tree whose linearization equals `actions`. Throws
// MalformedSequence on unbalanced input, trailing actions, misplaced COPY,
// non-contiguous or out-of-range spans, or kind violations.
ParseTree Delinearize(const ActionSequence &actions, size_t query_length);

// Prefix of `actions` ending at the CLOSE that balances the first OPEN; the
// whole sequence if it never balances.
ActionSequence TruncateAtRootClose(const ActionSequence &actions);

// Entire-tree equality; no partial credit. Sibling order is significant.
bool ExactMatch(const ParseTree &a, const ParseTree &b);

const std::string &TopIntent(const ParseTree &tree);

// Throws if the structural invariants are violated.
void ValidateTree(const ParseTree &tree, size_t query_length);

size_t NodeCount(const ParseTree &tree);
size_t SpanTokenCount(const ParseTree &tree);

std::string ActionToString(const Action &action);
std::string ActionsToString(const ActionSequence &actions);

}  // namespace semupdate

#endif  // SEMUPDATE_PARSETREE_PARSE_TREE_HPP_
