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
#ifndef SEMUPDATE_RUNNER_RUNNER_HPP_
#define SEMUPDATE_RUNNER_RUNNER_HPP_

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "runner/config.hpp"

namespace semupdate {

// Command-line narrowing of the configured grid. Empty means "as configured".
struct RunOptions {
  std::vector<std::string> strategies;
  std::vector<std::string> updates;
  std::vector<uint64_t> seeds;
  std::vector<int> sizes;
  int workers = 0;
  // Stop after this many newly computed cells (0 = no limit). The command
  // then reports an incomplete grid; a later call resumes.
  int max_cells = 0;
  // CmdRun writes a checkpoint per cell under models/.
  bool save_models = false;
  std::function<void(const std::string &)> log;
};

struct CommandResult {
  int cells_total = 0;
  int cells_computed = 0;
  int cells_skipped = 0;
  std::vector<std::string> failures;
  std::string text;  // rendered table, if any
};

// Builds the corpus (toy or external) and the versioned datasets for every
// configured update. Output layout:
//   corpus.tsv, updates/<name>.json, versioned/<name>.tsv, generate.json
CommandResult CmdGenerate(const ExperimentConfig &config, const std::string &out_dir,
                          const RunOptions &options = {});

// Runs the strategy x update x seed grid. Completed cells found in
// reports.jsonl are skipped. Writes reports.jsonl, predictions/, cells.jsonl,
// manifest.json, summary.{txt,json,svg}. Throws IncompleteGrid if any cell
// failed or the cell budget ran out; finished cells stay on disk.
CommandResult CmdRun(const ExperimentConfig &config, const std::string &out_dir,
                     const RunOptions &options = {});

// Conflict-effect sweep. Writes curve.jsonl, curve.txt, curve.json, curve.svg.
CommandResult CmdCurve(const ExperimentConfig &config, const std::string &out_dir,
                       const RunOptions &options = {});

// Renders summary and curve tables from what is on disk in `out_dir`.
CommandResult CmdReport(const std::string &out_dir);

// Versioned datasets for the configured updates, keyed by update name.
std::map<std::string, VersionedDataset> BuildVersionedData(const ExperimentConfig &config);

// Vocabulary covering the training sides of a bundle.
Vocab BundleVocab(const SplitBundle &bundle);

}  // namespace semupdate

#endif  // SEMUPDATE_RUNNER_RUNNER_HPP_
