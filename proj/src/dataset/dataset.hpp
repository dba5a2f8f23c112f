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
#ifndef SEMUPDATE_DATASET_DATASET_HPP_
#define SEMUPDATE_DATASET_DATASET_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dataset/update_spec.hpp"
#include "parsetree/parse_tree.hpp"

namespace semupdate {

enum class Partition { kChanged = 0, kUnchanged = 1, kTriviallyUnchanged = 2 };

inline constexpr std::array<Partition, 3> kAllPartitions = {
    Partition::kChanged, Partition::kUnchanged, Partition::kTriviallyUnchanged};

const char *PartitionName(Partition p);
Partition PartitionFromName(const std::string &name);

// What the toy generator sampled, independent of any tree transform.
struct Provenance {
  std::string intent;
  std::vector<std::string> slots;  // root-level slot labels, in order
  int template_index = -1;
};

struct Example {
  std::string id;
  Tokens tokens;
  std::optional<ParseTree> v1;
  std::optional<ParseTree> v2;
  Partition partition = Partition::kTriviallyUnchanged;
  Provenance provenance;
};

Partition ClassifyPartition(const ParseTree &v1, const ParseTree *v2,
                            const std::set<std::string> &affected);

struct PartitionCounts {
  size_t changed = 0;
  size_t unchanged = 0;
  size_t trivially_unchanged = 0;

  size_t &operator[](Partition p);
  size_t total() const { return changed + unchanged + trivially_unchanged; }
  bool operator==(const PartitionCounts &) const = default;
};

struct VersionedDataset {
  UpdateSpec spec;
  std::vector<Example> examples;

  PartitionCounts Counts() const;
};

// Every example gains a V1 label (reverse update of its V2 label) and a
// partition tag.
VersionedDataset BuildVersionPair(const std::vector<Example> &corpus,
                                  const UpdateSpec &spec);

struct SplitSizes {
  int v2_changed = 50;
  int v2_unchanged = 50;
  int test_per_partition = 100;
};

// V1 train examples keep both labels: `v1` is what strategies train on (out
// of date for the changed subset); `v2` and `partition` are oracle-only.
struct SplitBundle {
  UpdateSpec spec;
  std::vector<Example> v1_train;
  std::vector<Example> v2_train;
  std::vector<Example> test_changed;
  std::vector<Example> test_unchanged;
  std::vector<Example> test_triv;

  const std::vector<Example> &Test(Partition p) const;
};

// Draws test sets first, then V2 train, and leaves the rest (in corpus order)
// as V1 train. Pure function of (data, sizes, seed).
SplitBundle SampleSplits(const VersionedDataset &data, const SplitSizes &sizes,
                         uint64_t seed);

// Fisher-Yates with an explicit modulus draw, so the permutation does not
// depend on the standard library's distribution implementations.
template <typename T, typename Rng>
void DeterministicShuffle(std::vector<T> &items, Rng &rng) {
  for (size_t i = items.size(); i > 1; --i) {
    const size_t j = static_cast<size_t>(rng() % i);
    std::swap(items[i - 1], items[j]);
  }
}

// Corpus TSV: id, space-joined tokens, canonical V2 parse.
std::vector<Example> LoadCorpus(const std::string &path);
void SaveCorpus(const std::vector<Example> &examples, const std::string &path);

// Versioned TSV: id, tokens, V1 parse, V2 parse, partition.
VersionedDataset LoadVersioned(const std::string &path, const UpdateSpec &spec);
void SaveVersioned(const VersionedDataset &data, const std::string &path);

// TOP-format TSV (raw utterance, tokenized utterance, bracketed tree with
// square brackets and inline tokens).
std::vector<Example> LoadTopCorpus(const std::string &path);
ParseTree ParseTopTree(const std::string &text, Tokens *tokens_out);

}  // namespace semupdate

#endif  // SEMUPDATE_DATASET_DATASET_HPP_
