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
#include "semupdate/semupdate.h"

#include <cstdlib>
#include <cstring>
#include <iostream>
#include <new>
#include <string>

#include "common/error.hpp"
#include "dataset/dataset.hpp"
#include "dataset/toy_grammar.hpp"
#include "eval/eval.hpp"
#include "model/parser_model.hpp"
#include "parsetree/parse_tree.hpp"
#include "runner/runner.hpp"

struct semupdate_tree {
  semupdate::ParseTree tree;
  semupdate::Tokens tokens;
};

struct semupdate_corpus {
  std::vector<semupdate::Example> examples;
};

struct semupdate_update {
  semupdate::UpdateSpec spec;
};

struct semupdate_model {
  semupdate::ParserModel model;
};

namespace {

using semupdate::Error;
using semupdate::ErrorCode;

thread_local std::string g_last_error;
thread_local int g_last_line = 0;

int SetError(ErrorCode code, const std::string &message, int line = 0) {
  g_last_error = message;
  g_last_line = line;
  return static_cast<int>(code);
}

// Runs `body`, translating exceptions into status codes.
template <typename F>
int Guard(F &&body) {
  g_last_error.clear();
  g_last_line = 0;
  try {
    body();
    return SEMUPDATE_OK;
  } catch (const Error &e) {
    return SetError(e.code(), e.what(), e.line());
  } catch (const std::bad_alloc &) {
    return SetError(ErrorCode::kInternal, "out of memory");
  } catch (const std::exception &e) {
    return SetError(ErrorCode::kInternal, e.what());
  }
}

void Require(const void *p, const char *what) {
  if (p == nullptr) {
    semupdate::Fail(ErrorCode::kInvalidArgument, std::string(what) + " is NULL");
  }
}

char *CopyString(const std::string &s) {
  char *out = static_cast<char *>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

semupdate::RunOptions ToRunOptions(const semupdate_run_options *o) {
  semupdate::RunOptions r;
  if (o == nullptr) return r;
  if (o->strategies) r.strategies = semupdate::SplitList(o->strategies);
  if (o->updates) r.updates = semupdate::SplitList(o->updates);
  if (o->seeds) r.seeds = semupdate::ParseSeedList(o->seeds);
  if (o->sizes) r.sizes = semupdate::ParseIntList(o->sizes);
  r.workers = o->workers;
  r.max_cells = o->max_cells;
  r.save_models = o->save_models != 0;
  if (o->verbose) {
    r.log = [](const std::string &msg) { std::cerr << msg << std::endl; };
  }
  return r;
}

template <typename Cmd>
int RunCommand(const char *config_path, const char *out_dir,
               const semupdate_run_options *options, char **text_out, Cmd cmd) {
  return Guard([&] {
    Require(config_path, "config_path");
    Require(out_dir, "out_dir");
    const semupdate::ExperimentConfig config =
        semupdate::LoadExperimentConfig(config_path);
    const semupdate::CommandResult result = cmd(config, out_dir, ToRunOptions(options));
    if (text_out) *text_out = CopyString(result.text);
  });
}

}  // namespace

extern "C" {

const char *semupdate_status_name(int status) {
  if (status < 0 || status > static_cast<int>(ErrorCode::kInternal)) return "Unknown";
  return semupdate::ErrorCodeName(static_cast<ErrorCode>(status));
}

const char *semupdate_last_error(void) { return g_last_error.c_str(); }

int semupdate_last_error_line(void) { return g_last_line; }

void semupdate_string_free(char *s) { std::free(s); }

int semupdate_tokenize(const char *text, char **out) {
  return Guard([&] {
    Require(text, "text");
    Require(out, "out");
    *out = CopyString(semupdate::JoinTokens(semupdate::Tokenize(text)));
  });
}

int semupdate_tree_parse(const char *bracketed, const char *query, semupdate_tree **out) {
  return Guard([&] {
    Require(bracketed, "bracketed");
    Require(query, "query");
    Require(out, "out");
    auto t = std::make_unique<semupdate_tree>();
    t->tokens = semupdate::SplitTokens(query);
    t->tree = semupdate::ParseBracketed(bracketed, t->tokens);
    *out = t.release();
  });
}

void semupdate_tree_free(semupdate_tree *tree) { delete tree; }

int semupdate_tree_serialize(const semupdate_tree *tree, char **out) {
  return Guard([&] {
    Require(tree, "tree");
    Require(out, "out");
    *out = CopyString(semupdate::Serialize(tree->tree, tree->tokens));
  });
}

int semupdate_tree_linearize(const semupdate_tree *tree, char **out) {
  return Guard([&] {
    Require(tree, "tree");
    Require(out, "out");
    *out = CopyString(semupdate::ActionsToString(semupdate::Linearize(tree->tree)));
  });
}

int semupdate_tree_top_intent(const semupdate_tree *tree, char **out) {
  return Guard([&] {
    Require(tree, "tree");
    Require(out, "out");
    *out = CopyString(semupdate::TopIntent(tree->tree));
  });
}

int semupdate_tree_exact_match(const semupdate_tree *a, const semupdate_tree *b, int *out) {
  return Guard([&] {
    Require(a, "a");
    Require(b, "b");
    Require(out, "out");
    *out = semupdate::ExactMatch(a->tree, b->tree) ? 1 : 0;
  });
}

int semupdate_corpus_generate(const char *grammar_json, uint64_t seed, int size,
                              semupdate_corpus **out) {
  return Guard([&] {
    Require(out, "out");
    semupdate::GrammarConfig g = semupdate::DefaultGrammar();
    if (grammar_json != nullptr) {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(grammar_json);
      } catch (const nlohmann::json::exception &e) {
        semupdate::Fail(ErrorCode::kConfig, std::string("grammar: ") + e.what());
      }
      g = semupdate::GrammarFromJson(j);
    }
    if (size >= 0) g.size = size;
    semupdate::ValidateGrammar(g);
    auto c = std::make_unique<semupdate_corpus>();
    c->examples = semupdate::GenerateToyCorpus(g, seed);
    *out = c.release();
  });
}

int semupdate_corpus_load(const char *path, semupdate_corpus **out) {
  return Guard([&] {
    Require(path, "path");
    Require(out, "out");
    auto c = std::make_unique<semupdate_corpus>();
    c->examples = semupdate::LoadCorpus(path);
    *out = c.release();
  });
}

int semupdate_corpus_save(const semupdate_corpus *corpus, const char *path) {
  return Guard([&] {
    Require(corpus, "corpus");
    Require(path, "path");
    semupdate::SaveCorpus(corpus->examples, path);
  });
}

size_t semupdate_corpus_size(const semupdate_corpus *corpus) {
  return corpus == nullptr ? 0 : corpus->examples.size();
}

void semupdate_corpus_free(semupdate_corpus *corpus) { delete corpus; }

int semupdate_update_load(const char *path, semupdate_update **out) {
  return Guard([&] {
    Require(path, "path");
    Require(out, "out");
    auto u = std::make_unique<semupdate_update>();
    u->spec = semupdate::LoadUpdateSpec(path);
    *out = u.release();
  });
}

int semupdate_update_builtin(const char *name, semupdate_update **out) {
  return Guard([&] {
    Require(name, "name");
    Require(out, "out");
    for (const semupdate::UpdateSpec &spec : semupdate::DefaultUpdateSpecs()) {
      if (spec.name == name) {
        *out = new semupdate_update{spec};
        return;
      }
    }
    semupdate::Fail(ErrorCode::kInvalidArgument, std::string("no built-in update ") + name);
  });
}

void semupdate_update_free(semupdate_update *update) { delete update; }

int semupdate_versioned_build(const semupdate_corpus *corpus,
                              const semupdate_update *update, const char *out_path,
                              semupdate_partition_counts *counts) {
  return Guard([&] {
    Require(corpus, "corpus");
    Require(update, "update");
    const semupdate::VersionedDataset data =
        semupdate::BuildVersionPair(corpus->examples, update->spec);
    if (out_path != nullptr) semupdate::SaveVersioned(data, out_path);
    if (counts != nullptr) {
      const semupdate::PartitionCounts c = data.Counts();
      counts->changed = c.changed;
      counts->unchanged = c.unchanged;
      counts->trivially_unchanged = c.trivially_unchanged;
    }
  });
}

int semupdate_gap_closure(double best_baseline_macro, double method_macro,
                          double oracle_macro, double *out_percent) {
  return Guard([&] {
    Require(out_percent, "out_percent");
    *out_percent = semupdate::GapClosure(best_baseline_macro, method_macro, oracle_macro);
  });
}

void semupdate_run_options_init(semupdate_run_options *options) {
  if (options != nullptr) std::memset(options, 0, sizeof(*options));
}

int semupdate_cmd_generate(const char *config_path, const char *out_dir,
                           const semupdate_run_options *options, char **text_out) {
  return RunCommand(config_path, out_dir, options, text_out, semupdate::CmdGenerate);
}

int semupdate_cmd_run(const char *config_path, const char *out_dir,
                      const semupdate_run_options *options, char **text_out) {
  return RunCommand(config_path, out_dir, options, text_out, semupdate::CmdRun);
}

int semupdate_cmd_curve(const char *config_path, const char *out_dir,
                        const semupdate_run_options *options, char **text_out) {
  return RunCommand(config_path, out_dir, options, text_out, semupdate::CmdCurve);
}

int semupdate_cmd_report(const char *out_dir, char **text_out) {
  return Guard([&] {
    Require(out_dir, "out_dir");
    const semupdate::CommandResult result = semupdate::CmdReport(out_dir);
    if (text_out) *text_out = CopyString(result.text);
  });
}

int semupdate_model_load(const char *path, semupdate_model **out) {
  return Guard([&] {
    Require(path, "path");
    Require(out, "out");
    *out = new semupdate_model{semupdate::LoadCheckpoint(path)};
  });
}

void semupdate_model_free(semupdate_model *model) { delete model; }

int semupdate_model_predict(const semupdate_model *model, const char *query,
                            const char *head, char **tree_out, int *valid) {
  return Guard([&] {
    Require(model, "model");
    Require(query, "query");
    Require(tree_out, "tree_out");
    const semupdate::Tokens tokens = semupdate::Tokenize(query);
    if (tokens.empty()) semupdate::Fail(ErrorCode::kEmptyInput, "empty query");
    std::string h;
    if (head != nullptr) {
      h = head;
    } else {
      const std::vector<std::string> heads = model->model.Heads();
      if (heads.empty()) semupdate::Fail(ErrorCode::kUnknownHead, "model has no heads");
      h = heads.front();
    }
    const semupdate::Prediction p = semupdate::Predict(model->model, tokens, h);
    *tree_out = CopyString(semupdate::Serialize(p.tree, tokens));
    if (valid) *valid = p.valid ? 1 : 0;
  });
}

}  // extern "C"
