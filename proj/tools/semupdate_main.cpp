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
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "semupdate/semupdate.h"

namespace {

struct Flags {
  std::string config = "configs/default.json";
  std::string out = "out";
  std::string strategies;
  std::string updates;
  std::string seeds;
  std::string sizes;
  int workers = 0;
  int max_cells = 0;
  bool quiet = false;
  bool save_models = false;
};

int Finish(int status, char *text) {
  if (text != nullptr) {
    std::fputs(text, stdout);
    semupdate_string_free(text);
  }
  if (status != SEMUPDATE_OK) {
    std::fprintf(stderr, "error (%s): %s\n", semupdate_status_name(status),
                 semupdate_last_error());
    return 1;
  }
  return 0;
}

semupdate_run_options Options(const Flags &f) {
  semupdate_run_options o;
  semupdate_run_options_init(&o);
  o.strategies = f.strategies.empty() ? nullptr : f.strategies.c_str();
  o.updates = f.updates.empty() ? nullptr : f.updates.c_str();
  o.seeds = f.seeds.empty() ? nullptr : f.seeds.c_str();
  o.sizes = f.sizes.empty() ? nullptr : f.sizes.c_str();
  o.workers = f.workers;
  o.max_cells = f.max_cells;
  o.verbose = f.quiet ? 0 : 1;
  o.save_models = f.save_models ? 1 : 0;
  return o;
}

void AddGridFlags(CLI::App *cmd, Flags &f) {
  cmd->add_option("--config", f.config, "Experiment config (JSON)")->check(CLI::ExistingFile);
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--updates", f.updates, "Comma-separated update names");
  cmd->add_option("--seeds", f.seeds, "Comma-separated seeds");
  cmd->add_option("--workers", f.workers, "Parallel workers (0 = as configured)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_flag("--quiet", f.quiet, "No progress lines");
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Updating a semantic parser under conflicting data: generate, run, curve, report"};
  app.require_subcommand(1);
  Flags f;

  CLI::App *generate = app.add_subcommand("generate", "Build the corpus and versioned datasets");
  AddGridFlags(generate, f);

  CLI::App *run = app.add_subcommand("run", "Train and evaluate the strategy x update x seed grid");
  AddGridFlags(run, f);
  run->add_option("--strategies", f.strategies, "Comma-separated strategy names");
  run->add_option("--max-cells", f.max_cells, "Stop after this many new cells (resume later)")
      ->check(CLI::NonNegativeNumber);
  run->add_flag("--save-models", f.save_models, "Write a checkpoint per cell");

  CLI::App *curve = app.add_subcommand("curve", "Conflicting-data sweep over V2 sizes");
  AddGridFlags(curve, f);
  curve->add_option("--sizes", f.sizes, "Comma-separated V2 train sizes");
  curve->add_option("--max-cells", f.max_cells, "Stop after this many new points (resume later)")
      ->check(CLI::NonNegativeNumber);

  CLI::App *report = app.add_subcommand("report", "Render tables from an output directory");
  report->add_option("--out", f.out, "Output directory");

  CLI11_PARSE(app, argc, argv);

  const semupdate_run_options options = Options(f);
  char *text = nullptr;
  int status = SEMUPDATE_OK;
  if (generate->parsed()) {
    status = semupdate_cmd_generate(f.config.c_str(), f.out.c_str(), &options, &text);
  } else if (run->parsed()) {
    status = semupdate_cmd_run(f.config.c_str(), f.out.c_str(), &options, &text);
  } else if (curve->parsed()) {
    status = semupdate_cmd_curve(f.config.c_str(), f.out.c_str(), &options, &text);
  } else if (report->parsed()) {
    status = semupdate_cmd_report(f.out.c_str(), &text);
  }
  return Finish(status, text);
}
