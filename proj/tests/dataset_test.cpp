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

#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "common/error.hpp"
#include "dataset/dataset.hpp"
#include "dataset/toy_grammar.hpp"
#include "support/test_util.hpp"

namespace semupdate {
namespace {

using testing::CodeOf;
using testing::TempDir;

const UpdateSpec &Builtin(const std::string &name) {
  static const std::vector<UpdateSpec> specs = DefaultUpdateSpecs();
  for (const UpdateSpec &s : specs) {
    if (s.name == name) return s;
  }
  throw std::runtime_error("no update " + name);
}

const std::vector<Example> &Corpus() {
  static const std::vector<Example> corpus = GenerateToyCorpus(DefaultGrammar(), 0);
  return corpus;
}

ParseTree Parse(const std::string &query, const std::string &text) {
  return ParseBracketed(text, Tokenize(query));
}

// Expected partition from what the generator sampled, without looking at
// any tree.
Partition OraclePartition(const Provenance &p, const UpdateSpec &spec) {
  bool fired = false;
  std::string v1_intent = p.intent;
  for (const ReverseRule &rule : spec.rules) {
    if (const auto *m = std::get_if<MergeIntentRule>(&rule)) {
      if (p.intent != m->new_intent) continue;
      const bool has_args = !p.slots.empty();
      if (m->selector == Selector::kHasArguments && !has_args) continue;
      if (m->selector == Selector::kNoArguments && has_args) continue;
      fired = true;
      v1_intent = m->merged_into;
    } else {
      const auto &r = std::get<RemoveArgumentRule>(rule);
      if (r.intent_set.count(p.intent) &&
          std::find(p.slots.begin(), p.slots.end(), r.slot_label) != p.slots.end()) {
        fired = true;
      }
    }
  }
  if (!spec.affected_intents.count(v1_intent)) return Partition::kTriviallyUnchanged;
  return fired ? Partition::kChanged : Partition::kUnchanged;
}

TEST_CASE("classify partition on the road-condition example") {
  const std::string q = "Where is there construction on the highway?";
  const ParseTree v1 =
      Parse(q, "(IN:GET_INFO_ROAD_CONDITION (SL:LOCATION \"the highway\" ) )");
  const ParseTree v2 = Parse(q, "(IN:GET_INFO_TRAFFIC (SL:LOCATION \"the highway\" ) )");
  const std::set<std::string> affected = {"IN:GET_INFO_ROAD_CONDITION", "IN:GET_INFO_TRAFFIC"};
  CHECK(ClassifyPartition(v1, &v2, affected) == Partition::kChanged);
  CHECK_FALSE(ExactMatch(v1, v2));

  const std::string icy = "Are roads icy?";
  const ParseTree a = Parse(icy, "(IN:GET_INFO_ROAD_CONDITION (SL:ROAD_CONDITION \"icy\" ) )");
  CHECK(ClassifyPartition(a, &a, affected) == Partition::kUnchanged);

  CHECK(ClassifyPartition(a, nullptr, {"IN:GET_EVENT"}) == Partition::kTriviallyUnchanged);
  CHECK(CodeOf([&] { ClassifyPartition(a, nullptr, affected); }) ==
        ErrorCode::kMissingV2Label);
}

TEST_CASE("reverse update on the unsupported and new-argument examples") {
  const std::string q =
      "If I leave right now, can I get to New York City before one o'clock PM?";
  const ParseTree v2 = Parse(q,
                             "(IN:GET_ESTIMATED_ARRIVAL (SL:DATE_TIME_DEPARTURE \"right now\" ) "
                             "(SL:DESTINATION \"New York City\" ) )");
  const ParseTree v1 = ApplyReverseUpdate(v2, Builtin("A"));
  CHECK(Serialize(v1, Tokenize(q)) == "(IN:UNSUPPORTED_NAVIGATION )");
  // Dropping arguments twice is the same as once.
  CHECK(ApplyReverseUpdate(v1, Builtin("A")) == v1);

  const std::string r = "Which route to work has less traffic?";
  const ParseTree with_obstruction =
      Parse(r, "(IN:GET_DIRECTIONS (SL:DESTINATION \"work\" ) (SL:OBSTRUCTION \"traffic\" ) )");
  CHECK(Serialize(ApplyReverseUpdate(with_obstruction, Builtin("C")), Tokenize(r)) ==
        "(IN:GET_DIRECTIONS (SL:DESTINATION \"work\" ) )");

  const std::string m = "What major city has the worst traffic?";
  const ParseTree untouched = Parse(m, "(IN:UNSUPPORTED_NAVIGATION )");
  CHECK(ExactMatch(ApplyReverseUpdate(untouched, Builtin("A")), untouched));
}

TEST_CASE("argument renaming and selectors") {
  const std::string q = "when do i leave to arrive at noon";
  const ParseTree v2 = Parse(q,
                             "(IN:GET_ESTIMATED_DEPARTURE (SL:DATE_TIME_ARRIVAL \"at noon\" ) )");
  const ParseTree v1 = ApplyReverseUpdate(v2, Builtin("B"));
  CHECK(Serialize(v1, Tokenize(q)) ==
        "(IN:GET_ESTIMATED_ARRIVAL (SL:DATE_TIME_DEPARTURE \"at noon\" ) )");

  const std::string d = "how long to drive home";
  const ParseTree args = Parse(d, "(IN:GET_ESTIMATED_DURATION (SL:DESTINATION \"home\" ) )");
  CHECK(TopIntent(ApplyReverseUpdate(args, Builtin("E"))) == "IN:GET_DISTANCE");
  const ParseTree bare = Parse(d, "(IN:GET_ESTIMATED_DURATION )");
  CHECK(TopIntent(ApplyReverseUpdate(bare, Builtin("E"))) == "IN:UNSUPPORTED_NAVIGATION");
}

TEST_CASE("overlapping selectors raise AmbiguousRules") {
  UpdateSpec spec = Builtin("E");
  std::get<MergeIntentRule>(spec.rules[1]).selector = Selector::kAny;
  const std::string d = "how long to drive home";
  const ParseTree args = Parse(d, "(IN:GET_ESTIMATED_DURATION (SL:DESTINATION \"home\" ) )");
  CHECK(CodeOf([&] { ApplyReverseUpdate(args, spec); }) == ErrorCode::kAmbiguousRules);
}

TEST_CASE("update specs validate and round trip through json") {
  for (const UpdateSpec &spec : DefaultUpdateSpecs()) {
    ValidateUpdateSpec(spec);
    const nlohmann::json j = UpdateSpecToJson(spec);
    CHECK(UpdateSpecToJson(UpdateSpecFromJson(j)) == j);
  }
  UpdateSpec bad = Builtin("A");
  bad.affected_intents.clear();
  CHECK(CodeOf([&] { ValidateUpdateSpec(bad); }) == ErrorCode::kConfig);
}

TEST_CASE("toy corpus size, determinism and intent balance") {
  const auto &corpus = Corpus();
  REQUIRE(corpus.size() == 6000);
  std::map<std::string, int> counts;
  for (const Example &e : corpus) {
    REQUIRE(e.v2.has_value());
    ValidateTree(*e.v2, e.tokens.size());
    CHECK(TopIntent(*e.v2) == e.provenance.intent);
    ++counts[e.provenance.intent];
  }
  CHECK(counts.size() >= 8);
  const double uniform = 6000.0 / counts.size();
  for (const auto &[intent, n] : counts) {
    INFO(intent);
    CHECK(n >= 0.5 * uniform);
    CHECK(n <= 1.5 * uniform);
  }

  GrammarConfig g = DefaultGrammar();
  std::set<std::string> slot_labels;
  for (const auto &[key, _] : g.fillers) {
    if (key.starts_with("SL:")) slot_labels.insert(key);
  }
  CHECK(slot_labels.size() >= 10);

  g.size = 300;
  const auto a = GenerateToyCorpus(g, 5);
  const auto b = GenerateToyCorpus(g, 5);
  const auto c = GenerateToyCorpus(g, 6);
  int differing = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].tokens == b[i].tokens);
    CHECK(*a[i].v2 == *b[i].v2);
    differing += a[i].tokens != c[i].tokens;
  }
  CHECK(differing >= 0.99 * a.size() - 3);

  g.size = 0;
  CHECK(GenerateToyCorpus(g, 1).empty());
}

TEST_CASE("two seeds give mostly different queries") {
  GrammarConfig g = DefaultGrammar();
  g.size = 1000;
  const auto a = GenerateToyCorpus(g, 1);
  const auto b = GenerateToyCorpus(g, 2);
  int differing = 0;
  for (size_t i = 0; i < a.size(); ++i) differing += a[i].tokens != b[i].tokens;
  CHECK(differing >= 990);
}

TEST_CASE("an intent without templates is a degenerate grammar") {
  GrammarConfig g = DefaultGrammar();
  g.intents[0].templates.clear();
  try {
    ValidateGrammar(g);
    FAIL("expected DegenerateGrammar");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kDegenerateGrammar);
    CHECK(std::string(e.what()).find(g.intents[0].intent) != std::string::npos);
  }
}

TEST_CASE("partitions match the generator oracle on every example") {
  for (const UpdateSpec &spec : DefaultUpdateSpecs()) {
    INFO(spec.name);
    const VersionedDataset data = BuildVersionPair(Corpus(), spec);
    REQUIRE(data.examples.size() == Corpus().size());
    PartitionCounts oracle;
    int mismatches = 0;
    for (const Example &e : data.examples) {
      const Partition expected = OraclePartition(e.provenance, spec);
      ++oracle[expected];
      mismatches += e.partition != expected;
      // Tag invariants.
      if (e.partition == Partition::kChanged) REQUIRE_FALSE(ExactMatch(*e.v1, *e.v2));
      if (e.partition == Partition::kUnchanged) {
        REQUIRE(ExactMatch(*e.v1, *e.v2));
        REQUIRE(spec.affected_intents.count(TopIntent(*e.v1)));
      }
      if (e.partition == Partition::kTriviallyUnchanged) {
        REQUIRE_FALSE(spec.affected_intents.count(TopIntent(*e.v1)));
      }
    }
    CHECK(mismatches == 0);
    CHECK(data.Counts() == oracle);
    CHECK(oracle.changed >= 300);
    CHECK(oracle.unchanged >= 200);
  }
}

TEST_CASE("an empty rule list changes nothing") {
  UpdateSpec spec;
  spec.name = "none";
  spec.affected_intents = {"IN:GET_DIRECTIONS"};
  const VersionedDataset data = BuildVersionPair(Corpus(), spec);
  CHECK(data.Counts().changed == 0);
  CHECK(data.Counts().unchanged > 0);
}

std::set<std::string> Ids(const std::vector<Example> &v) {
  std::set<std::string> out;
  for (const Example &e : v) out.insert(e.id);
  return out;
}

TEST_CASE("splits are deterministic, sized and disjoint") {
  const VersionedDataset data = BuildVersionPair(Corpus(), Builtin("A"));
  for (uint64_t seed : {1, 2, 3, 99}) {
    const SplitBundle a = SampleSplits(data, {}, seed);
    const SplitBundle b = SampleSplits(data, {}, seed);
    CHECK(Ids(a.v1_train) == Ids(b.v1_train));
    CHECK(Ids(a.v2_train) == Ids(b.v2_train));
    CHECK(Ids(a.test_changed) == Ids(b.test_changed));
    CHECK(a.v2_train.size() == 100);
    CHECK(a.test_changed.size() == 100);
    CHECK(a.test_unchanged.size() == 100);
    CHECK(a.test_triv.size() == 100);
    CHECK(a.v1_train.size() == data.examples.size() - 400);

    std::set<std::string> all;
    size_t total = 0;
    for (const auto *part : {&a.v1_train, &a.v2_train, &a.test_changed, &a.test_unchanged,
                             &a.test_triv}) {
      const auto ids = Ids(*part);
      CHECK(ids.size() == part->size());
      all.insert(ids.begin(), ids.end());
      total += part->size();
    }
    CHECK(all.size() == total);
    for (Partition p : kAllPartitions) {
      for (const Example &e : a.Test(p)) CHECK(e.partition == p);
    }
    for (const Example &e : a.v1_train) {
      if (e.partition == Partition::kChanged) REQUIRE_FALSE(ExactMatch(*e.v1, *e.v2));
    }
  }
  CHECK(Ids(SampleSplits(data, {}, 1).v2_train) != Ids(SampleSplits(data, {}, 2).v2_train));

  const SplitBundle changed_only = SampleSplits(data, {50, 0, 100}, 4);
  CHECK(changed_only.v2_train.size() == 50);
  for (const Example &e : changed_only.v2_train) CHECK(e.partition == Partition::kChanged);

  CHECK(CodeOf([&] { SampleSplits(data, {5000, 50, 100}, 1); }) ==
        ErrorCode::kInsufficientPartition);
}

TEST_CASE("corpus and versioned files round trip") {
  TempDir dir;
  const std::vector<Example> some(Corpus().begin(), Corpus().begin() + 500);
  const std::string path = dir.Path("c.tsv");
  SaveCorpus(some, path);
  const auto loaded = LoadCorpus(path);
  REQUIRE(loaded.size() == some.size());
  for (size_t i = 0; i < some.size(); ++i) {
    CHECK(loaded[i].id == some[i].id);
    CHECK(loaded[i].tokens == some[i].tokens);
    CHECK(ExactMatch(*loaded[i].v2, *some[i].v2));
  }

  const VersionedDataset data = BuildVersionPair(some, Builtin("C"));
  const std::string vpath = dir.Path("v.tsv");
  SaveVersioned(data, vpath);
  const VersionedDataset back = LoadVersioned(vpath, data.spec);
  REQUIRE(back.examples.size() == data.examples.size());
  for (size_t i = 0; i < data.examples.size(); ++i) {
    CHECK(ExactMatch(*back.examples[i].v1, *data.examples[i].v1));
    CHECK(ExactMatch(*back.examples[i].v2, *data.examples[i].v2));
    CHECK(back.examples[i].partition == data.examples[i].partition);
  }
}

TEST_CASE("a malformed row reports its line") {
  TempDir dir;
  const std::string path = dir.Path("bad.tsv");
  {
    std::ofstream out(path);
    for (int i = 1; i <= 6; ++i) {
      out << "id" << i << "\tdrive home\t(IN:GET_DIRECTIONS (SL:DESTINATION \"home\" ) )\n";
    }
    out << "id7\tdrive home\t(IN:GET_DIRECTIONS (SL:DESTINATION \"home\" )\n";
  }
  try {
    LoadCorpus(path);
    FAIL("expected ParseError");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kParseError);
    CHECK(e.line() == 7);
  }
}

TEST_CASE("rows typed like the figure examples load") {
  TempDir dir;
  const std::string path = dir.Path("fig.tsv");
  {
    std::ofstream out(path);
    out << "f1\tWhere is there construction on the highway?\t"
           "(IN:GET_INFO_TRAFFIC (SL:LOCATION \"the highway\" ) )\n"
        << "f2\tAre roads icy?\t(IN:GET_INFO_ROAD_CONDITION (SL:ROAD_CONDITION \"icy\" ) )\n"
        << "f3\tWhat major city has the worst traffic?\t(IN:UNSUPPORTED_NAVIGATION )\n"
        << "f4\tWhich route to work has less traffic?\t"
           "(IN:GET_DIRECTIONS (SL:DESTINATION \"work\" ) (SL:OBSTRUCTION \"traffic\" ) )\n";
  }
  const auto rows = LoadCorpus(path);
  REQUIRE(rows.size() == 4);
  CHECK(TopIntent(*rows[2].v2) == "IN:UNSUPPORTED_NAVIGATION");
  CHECK(rows[3].v2->children[1].span == std::vector<int>{6});
}

TEST_CASE("top format trees convert to bracket trees") {
  Tokens tokens;
  const ParseTree t = ParseTopTree(
      "[IN:GET_DIRECTIONS Directions to [SL:DESTINATION [IN:GET_EVENT the "
      "[SL:CATEGORY_EVENT eagles ] game ] ] ]",
      &tokens);
  CHECK(JoinTokens(tokens) == "Directions to the eagles game");
  CHECK(Serialize(t, tokens) ==
        "(IN:GET_DIRECTIONS (SL:DESTINATION (IN:GET_EVENT (SL:CATEGORY_EVENT \"eagles\" ) ) ) )");
}

}  // namespace
}  // namespace semupdate
