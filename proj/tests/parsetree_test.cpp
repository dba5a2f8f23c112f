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

#include <random>

#include "common/error.hpp"
#include "parsetree/parse_tree.hpp"
#include "support/test_util.hpp"
#include "support/tree_oracle.hpp"

namespace semupdate {
namespace {

using testing::CodeOf;
using testing::RandomTreeGenerator;

TEST_CASE("tokenize detaches trailing punctuation") {
  CHECK(Tokenize("how is traffic?") == Tokens{"how", "is", "traffic", "?"});
  CHECK(Tokenize("  a   b ") == Tokens{"a", "b"});
  CHECK(Tokenize("?!") == Tokens{"?!"});
  CHECK(Tokenize("").empty());
}

TEST_CASE("parse the canonical example") {
  const Tokens q = Tokenize("directions to work");
  const ParseTree t = ParseBracketed("(IN:GET_DIRECTIONS (SL:DESTINATION \"work\" ) )", q);
  CHECK(t.label == "IN:GET_DIRECTIONS");
  REQUIRE(t.children.size() == 1);
  CHECK(t.children[0].label == "SL:DESTINATION");
  CHECK(t.children[0].span == std::vector<int>{2});
  CHECK(TopIntent(t) == "IN:GET_DIRECTIONS");
  CHECK(ActionsToString(Linearize(t)) ==
        "OPEN(IN:GET_DIRECTIONS) OPEN(SL:DESTINATION) COPY(2) CLOSE CLOSE");
}

TEST_CASE("root-only intent") {
  const Tokens q = Tokenize("What major city has the worst traffic?");
  const ParseTree t = ParseBracketed("(IN:UNSUPPORTED_NAVIGATION )", q);
  CHECK(t.children.empty());
  CHECK(Serialize(t, q) == "(IN:UNSUPPORTED_NAVIGATION )");
  CHECK(TopIntent(t) == "IN:UNSUPPORTED_NAVIGATION");
  CHECK(Linearize(t) == ActionSequence{Action::Open("IN:UNSUPPORTED_NAVIGATION"), Action::Close()});
}

TEST_CASE("figure example spans and linearization") {
  const Tokens q = Tokenize("Which route to work has less traffic?");
  const ParseTree t = ParseBracketed("(IN:GET_DIRECTIONS (SL:DESTINATION \"work\" ) )", q);
  CHECK(t.children[0].span == std::vector<int>{3});
  CHECK(ActionsToString(Linearize(t)) ==
        "OPEN(IN:GET_DIRECTIONS) OPEN(SL:DESTINATION) COPY(3) CLOSE CLOSE");
}

TEST_CASE("slot order is significant") {
  const Tokens q = Tokenize("from a to b");
  const ParseTree ab = ParseTree::Intent(
      "IN:X", {ParseTree::Slot("SL:S", {1}), ParseTree::Slot("SL:D", {3})});
  ParseTree ba = ab;
  std::swap(ba.children[0].label, ba.children[1].label);
  CHECK(Serialize(ab, q) != Serialize(ba, q));
  CHECK_FALSE(ExactMatch(ab, ba));
  CHECK(ExactMatch(ab, ab));
}

TEST_CASE("loose spacing parses to the canonical form") {
  const Tokens q = Tokenize("drive to the beach");
  const ParseTree t = ParseBracketed("(IN:GET_DIRECTIONS(SL:DESTINATION   \"the beach\"))", q);
  CHECK(Serialize(t, q) == "(IN:GET_DIRECTIONS (SL:DESTINATION \"the beach\" ) )");
}

TEST_CASE("repeated tokens resolve left to right") {
  const Tokens q = Tokenize("from boston to boston");
  const ParseTree t = ParseBracketed(
      "(IN:GET_DIRECTIONS (SL:SOURCE \"boston\" ) (SL:DESTINATION \"boston\" ) )", q);
  CHECK(t.children[0].span == std::vector<int>{1});
  CHECK(t.children[1].span == std::vector<int>{3});
}

TEST_CASE("parse errors carry codes") {
  const Tokens q = Tokenize("to work");
  CHECK(CodeOf([&] { ParseBracketed("(IN:X (SL:Y \"work\" )", q); }) ==
        ErrorCode::kUnbalancedBrackets);
  CHECK(CodeOf([&] { ParseBracketed("(IN:X (SL:Y \"home\" ) )", q); }) ==
        ErrorCode::kUnknownSpan);
  CHECK(CodeOf([&] { ParseBracketed("   ", q); }) == ErrorCode::kEmptyInput);
  CHECK(CodeOf([&] { ParseBracketed("(IN:X ) )", q); }) == ErrorCode::kUnbalancedBrackets);
}

TEST_CASE("delinearize rejects malformed sequences") {
  auto bad = [](const ActionSequence &a) {
    return CodeOf([&] { Delinearize(a, 5); }) == ErrorCode::kMalformedSequence;
  };
  using A = Action;
  CHECK(bad({}));
  CHECK(bad({A::Open("IN:X")}));
  CHECK(bad({A::Open("SL:X"), A::Close()}));
  CHECK(bad({A::Open("IN:X"), A::Copy(0), A::Close()}));
  CHECK(bad({A::Open("IN:X"), A::Close(), A::Close()}));
  CHECK(bad({A::Open("IN:X"), A::Open("SL:Y"), A::Copy(1), A::Copy(3), A::Close(), A::Close()}));
  CHECK(bad({A::Open("IN:X"), A::Open("SL:Y"), A::Copy(9), A::Close(), A::Close()}));
  CHECK(bad({A::Open("IN:X"), A::Open("IN:Y"), A::Close(), A::Close()}));
  CHECK(bad({A::Open("IN:X"), A::Open("SL:Y"), A::Close(), A::Close()}));
  CHECK(bad({A::Open("IN:X"), A::Close(), A::Open("IN:Y"), A::Close()}));
  CHECK_FALSE(bad({A::Open("IN:X"), A::Open("SL:Y"), A::Copy(1), A::Copy(2), A::Close(),
                   A::Close()}));
}

TEST_CASE("truncation stops at the root close") {
  using A = Action;
  const ActionSequence a = {A::Open("IN:X"), A::Close(), A::Copy(0), A::Close()};
  CHECK(TruncateAtRootClose(a).size() == 2);
  const ActionSequence open = {A::Open("IN:X"), A::Open("SL:Y")};
  CHECK(TruncateAtRootClose(open).size() == 2);
}

TEST_CASE("round trips over random trees") {
  RandomTreeGenerator gen(20260917);
  for (int i = 0; i < 12000; ++i) {
    const auto c = gen.Next();
    const std::string text = Serialize(c.tree, c.query);
    REQUIRE(text == testing::ReferenceSerialize(c.tree, c.query));
    REQUIRE(testing::BracketRecognizer(text).Run() == static_cast<int>(NodeCount(c.tree)));
    REQUIRE(ParseBracketed(text, c.query) == c.tree);

    const ActionSequence actions = Linearize(c.tree);
    REQUIRE(actions.size() == testing::ReferenceActionCount(c.tree));
    REQUIRE(actions.size() == 2 * NodeCount(c.tree) + SpanTokenCount(c.tree));
    REQUIRE(Delinearize(actions, c.query.size()) == c.tree);
    REQUIRE(TruncateAtRootClose(actions) == actions);
    REQUIRE(actions.front().label == TopIntent(c.tree));
    ValidateTree(c.tree, c.query.size());
  }
}

TEST_CASE("exact match agrees with canonical string equality") {
  RandomTreeGenerator gen(7);
  std::mt19937_64 rng(11);
  int equal = 0;
  for (int i = 0; i < 4000; ++i) {
    const auto a = gen.Next();
    ParseTree b = a.tree;
    // Small edits so that equal and unequal pairs both occur often.
    switch (rng() % 4) {
      case 0: break;
      case 1: b.label = "IN:I" + std::to_string(rng() % 8); break;
      case 2:
        if (!b.children.empty()) b.children.pop_back();
        break;
      case 3:
        if (b.children.size() >= 2) std::swap(b.children[0], b.children[1]);
        break;
    }
    const bool same = Serialize(a.tree, a.query) == Serialize(b, a.query);
    REQUIRE(ExactMatch(a.tree, b) == same);
    equal += same;
  }
  CHECK(equal > 1000);
  CHECK(equal < 3900);
}

TEST_CASE("validate rejects structural violations") {
  ParseTree t = ParseTree::Intent("IN:X", {ParseTree::Slot("SL:Y", {2, 3})});
  ValidateTree(t, 4);
  CHECK(CodeOf([&] { ValidateTree(t, 3); }) == ErrorCode::kInvalidArgument);
  t.children[0].span = {1, 3};
  CHECK(CodeOf([&] { ValidateTree(t, 4); }) == ErrorCode::kInvalidArgument);
  CHECK(CodeOf([&] { ValidateTree(ParseTree::Slot("SL:Y", {0}), 4); }) ==
        ErrorCode::kInvalidArgument);
}

}  // namespace
}  // namespace semupdate
