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
#include "dataset/dataset.hpp"

#include <random>

#include "common/error.hpp"

namespace semupdate {

const char *PartitionName(Partition p) {
  switch (p) {
    case Partition::kChanged: return "changed";
    case Partition::kUnchanged: return "unchanged";
    case Partition::kTriviallyUnchanged: return "trivially_unchanged";
  }
  return "?";
}

Partition PartitionFromName(const std::string &name) {
  if (name == "changed") return Partition::kChanged;
  if (name == "unchanged") return Partition::kUnchanged;
  if (name == "trivially_unchanged") return Partition::kTriviallyUnchanged;
  Fail(ErrorCode::kInvalidArgument, "unknown partition '" + name + "'");
}

Partition ClassifyPartition(const ParseTree &v1, const ParseTree *v2,
                            const std::set<std::string> &affected) {
  if (!affected.count(TopIntent(v1))) return Partition::kTriviallyUnchanged;
  if (v2 == nullptr) {
    Fail(ErrorCode::kMissingV2Label,
         "V2 label required for affected intent " + TopIntent(v1));
  }
  return ExactMatch(v1, *v2) ? Partition::kUnchanged : Partition::kChanged;
}

size_t &PartitionCounts::operator[](Partition p) {
  switch (p) {
    case Partition::kChanged: return changed;
    case Partition::kUnchanged: return unchanged;
    case Partition::kTriviallyUnchanged: return trivially_unchanged;
  }
  return changed;
}

PartitionCounts VersionedDataset::Counts() const {
  PartitionCounts c;
  for (const Example &e : examples) ++c[e.partition];
  return c;
}

VersionedDataset BuildVersionPair(const std::vector<Example> &corpus,
                                  const UpdateSpec &spec) {
  ValidateUpdateSpec(spec);
  VersionedDataset out;
  out.spec = spec;
  out.examples.reserve(corpus.size());
  for (const Example &src : corpus) {
    if (!src.v2) {
      Fail(ErrorCode::kInvalidArgument, "example " + src.id + " has no V2 label");
    }
    Example e = src;
    e.v1 = ApplyReverseUpdate(*src.v2, spec);
    e.partition = ClassifyPartition(*e.v1, &*e.v2, spec.affected_intents);
    out.examples.push_back(std::move(e));
  }
  return out;
}

const std::vector<Example> &SplitBundle::Test(Partition p) const {
  switch (p) {
    case Partition::kChanged: return test_changed;
    case Partition::kUnchanged: return test_unchanged;
    case Partition::kTriviallyUnchanged: return test_triv;
  }
  return test_changed;
}

SplitBundle SampleSplits(const VersionedDataset &data, const SplitSizes &sizes,
                         uint64_t seed) {
  if (sizes.v2_changed < 0 || sizes.v2_unchanged < 0 ||
      sizes.test_per_partition < 0) {
    Fail(ErrorCode::kInvalidArgument, "negative split size");
  }
  std::array<std::vector<size_t>, 3> pools;
  for (size_t i = 0; i < data.examples.size(); ++i) {
    pools[static_cast<int>(data.examples[i].partition)].push_back(i);
  }
  const std::array<int, 3> v2_need = {sizes.v2_changed, sizes.v2_unchanged, 0};
  std::mt19937_64 rng(seed);
  for (Partition p : kAllPartitions) {
    auto &pool = pools[static_cast<int>(p)];
    const size_t need = sizes.test_per_partition + v2_need[static_cast<int>(p)];
    if (pool.size() < need) {
      Fail(ErrorCode::kInsufficientPartition,
           data.spec.name + ": partition " + PartitionName(p) + " has " +
               std::to_string(pool.size()) + " examples, need " +
               std::to_string(need));
    }
    DeterministicShuffle(pool, rng);
  }

  SplitBundle b;
  b.spec = data.spec;
  std::vector<char> taken(data.examples.size(), 0);
  auto take = [&](Partition p, size_t from, size_t count,
                  std::vector<Example> &dst) {
    const auto &pool = pools[static_cast<int>(p)];
    for (size_t k = from; k < from + count; ++k) {
      taken[pool[k]] = 1;
      dst.push_back(data.examples[pool[k]]);
    }
  };
  const size_t test = sizes.test_per_partition;
  take(Partition::kChanged, 0, test, b.test_changed);
  take(Partition::kUnchanged, 0, test, b.test_unchanged);
  take(Partition::kTriviallyUnchanged, 0, test, b.test_triv);
  take(Partition::kChanged, test, sizes.v2_changed, b.v2_train);
  take(Partition::kUnchanged, test, sizes.v2_unchanged, b.v2_train);
  for (size_t i = 0; i < data.examples.size(); ++i) {
    if (!taken[i]) b.v1_train.push_back(data.examples[i]);
  }
  return b;
}

}  // namespace semupdate
