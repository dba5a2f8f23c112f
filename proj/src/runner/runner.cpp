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
#include "runner/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "common/error.hpp"
#include "common/seed.hpp"
#include "eval/render.hpp"

namespace semupdate {

namespace fs = std::filesystem;

namespace {

std::string Now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void WriteText(const fs::path &path, const std::string &text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) Fail(ErrorCode::kIo, "cannot write " + tmp.string());
    out << text;
    if (!out) Fail(ErrorCode::kIo, "write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

void Log(const RunOptions &options, const std::string &msg) {
  if (options.log) options.log(msg);
}

// Runs job(i) for i in [0, n) on up to `workers` threads. Exceptions must be
// handled inside `job`.
void RunJobs(size_t n, int workers, const std::function<void(size_t)> &job) {
  const size_t threads = std::min(n, static_cast<size_t>(std::max(1, workers)));
  if (threads <= 1) {
    for (size_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  for (size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (size_t i = next++; i < n; i = next++) job(i);
    });
  }
  for (std::thread &th : pool) th.join();
}

template <typename T>
std::vector<T> Narrow(const std::vector<T> &configured, const std::vector<T> &requested) {
  return requested.empty() ? configured : requested;
}

std::vector<const UpdateSpec *> SelectUpdates(const ExperimentConfig &config,
                                              const std::vector<std::string> &names) {
  std::vector<const UpdateSpec *> out;
  if (names.empty()) {
    for (const UpdateSpec &u : config.updates) out.push_back(&u);
    return out;
  }
  for (const std::string &name : names) {
    auto it = std::find_if(config.updates.begin(), config.updates.end(),
                           [&](const UpdateSpec &u) { return u.name == name; });
    if (it == config.updates.end()) {
      Fail(ErrorCode::kInvalidArgument, "unknown update '" + name + "'");
    }
    out.push_back(&*it);
  }
  return out;
}

std::vector<Strategy> SelectStrategies(const ExperimentConfig &config,
                                       const std::vector<std::string> &names) {
  if (names.empty()) return config.strategies;
  std::vector<Strategy> out;
  for (const std::string &n : names) out.push_back(StrategyFromName(n));
  return out;
}

std::set<std::string> GrammarLabels(const GrammarConfig &g) {
  std::set<std::string> labels;
  for (const auto &intent : g.intents) labels.insert(intent.intent);
  for (const auto &[name, values] : g.fillers) {
    if (name.starts_with("SL:")) labels.insert(name);
  }
  return labels;
}

void CheckUpdatesAgainstGrammar(const ExperimentConfig &config) {
  const std::set<std::string> labels = GrammarLabels(config.corpus.grammar);
  auto check = [&](const std::string &update, const std::string &label) {
    if (!labels.count(label)) {
      Fail(ErrorCode::kDegenerateGrammar,
           "update " + update + " names " + label + ", which the grammar does not define");
    }
  };
  for (const UpdateSpec &u : config.updates) {
    for (const std::string &a : u.affected_intents) check(u.name, a);
    for (const ReverseRule &rule : u.rules) {
      if (const auto *m = std::get_if<MergeIntentRule>(&rule)) {
        check(u.name, m->new_intent);
        check(u.name, m->merged_into);
      } else {
        const auto &r = std::get<RemoveArgumentRule>(rule);
        for (const std::string &i : r.intent_set) check(u.name, i);
        check(u.name, r.slot_label);
      }
    }
  }
}

std::vector<Example> BuildCorpus(const ExperimentConfig &config) {
  switch (config.corpus.source) {
    case CorpusSource::kToy:
      ValidateGrammar(config.corpus.grammar);
      CheckUpdatesAgainstGrammar(config);
      return GenerateToyCorpus(config.corpus.grammar, config.corpus.seed);
    case CorpusSource::kTsv:
      return LoadCorpus(config.corpus.path);
    case CorpusSource::kTop:
      return LoadTopCorpus(config.corpus.path);
  }
  return {};
}

std::string CellKey(const std::string &update, const std::string &strategy,
                    uint64_t seed) {
  return update + "/" + strategy + "/" + std::to_string(seed);
}

// Refuses to mix results from different configurations in one directory.
void CheckManifest(const fs::path &path, const std::string &hash) {
  if (!fs::exists(path)) return;
  std::ifstream in(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception &) {
    Fail(ErrorCode::kIo, "unreadable manifest " + path.string());
  }
  if (j.value("config_hash", "") != hash) {
    Fail(ErrorCode::kConfig, path.parent_path().string() +
                                 " holds results for another config (hash " +
                                 j.value("config_hash", "?") + ")");
  }
}

nlohmann::json ReadJsonFile(const fs::path &path) {
  if (!fs::exists(path)) return nlohmann::json::object();
  std::ifstream in(path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception &) {
    return nlohmann::json::object();
  }
}

void WriteManifest(const fs::path &out, const ExperimentConfig &config,
                   const std::string &command, const nlohmann::json &extra) {
  const fs::path path = out / "manifest.json";
  nlohmann::json j = ReadJsonFile(path);
  j["config_hash"] = config.Hash();
  j["config"] = config.ToJson();
  j["corpus_source"] = config.ToJson()["corpus"]["source"];
  if (!j.contains("created")) j["created"] = Now();
  j["updated"] = Now();
  j["commands"][command] = extra;
  WriteText(path, j.dump(2) + "\n");
}

}  // namespace

std::map<std::string, VersionedDataset> BuildVersionedData(const ExperimentConfig &config) {
  const std::vector<Example> corpus = BuildCorpus(config);
  std::map<std::string, VersionedDataset> out;
  for (const UpdateSpec &u : config.updates) out[u.name] = BuildVersionPair(corpus, u);
  return out;
}

Vocab BundleVocab(const SplitBundle &bundle) {
  return Vocab::FromExamples({&bundle.v1_train, &bundle.v2_train});
}

CommandResult CmdGenerate(const ExperimentConfig &config, const std::string &out_dir,
                          const RunOptions &options) {
  const fs::path out(out_dir);
  fs::create_directories(out / "updates");
  fs::create_directories(out / "versioned");
  CheckManifest(out / "manifest.json", config.Hash());
  const std::vector<Example> corpus = BuildCorpus(config);
  SaveCorpus(corpus, (out / "corpus.tsv").string());
  CommandResult result;
  nlohmann::json counts = nlohmann::json::object();
  std::ostringstream text;
  text << "corpus: " << corpus.size() << " examples\n";
  for (const UpdateSpec *u : SelectUpdates(config, options.updates)) {
    const VersionedDataset data = BuildVersionPair(corpus, *u);
    SaveUpdateSpec(*u, (out / "updates" / (u->name + ".json")).string());
    SaveVersioned(data, (out / "versioned" / (u->name + ".tsv")).string());
    const PartitionCounts c = data.Counts();
    counts[u->name] = {{"changed", c.changed},
                       {"unchanged", c.unchanged},
                       {"trivially_unchanged", c.trivially_unchanged}};
    text << "update " << u->name << " (" << u->description << "): changed "
         << c.changed << ", unchanged " << c.unchanged << ", trivially unchanged "
         << c.trivially_unchanged << "\n";
    ++result.cells_total;
    ++result.cells_computed;
  }
  WriteText(out / "generate.json",
            nlohmann::json({{"config_hash", config.Hash()},
                            {"corpus", "corpus.tsv"},
                            {"corpus_size", corpus.size()},
                            {"partition_counts", counts}})
                    .dump(2) +
                "\n");
  WriteManifest(out, config, "generate", {{"finished", Now()}, {"partition_counts", counts}});
  result.text = text.str();
  return result;
}

CommandResult CmdRun(const ExperimentConfig &config, const std::string &out_dir,
                     const RunOptions &options) {
  const fs::path out(out_dir);
  fs::create_directories(out / "predictions");
  CheckManifest(out / "manifest.json", config.Hash());
  const fs::path reports_path = out / "reports.jsonl";

  const std::vector<const UpdateSpec *> updates = SelectUpdates(config, options.updates);
  const std::vector<Strategy> strategies = SelectStrategies(config, options.strategies);
  const std::vector<uint64_t> seeds = Narrow(config.seeds, options.seeds);
  const int workers = options.workers > 0 ? options.workers : config.workers;
  const ParserConfig model_config = config.EffectiveModel();

  std::set<std::string> done;
  if (fs::exists(reports_path)) {
    for (const EvalReport &r : ReportsFromRecords(ReadJsonLines(reports_path.string()))) {
      done.insert(CellKey(r.update, r.strategy, r.seed));
    }
  }
  const std::map<std::string, VersionedDataset> data = BuildVersionedData(config);

  struct Group {
    const UpdateSpec *update;
    uint64_t seed;
    std::vector<Strategy> pending;
  };
  std::vector<Group> groups;
  CommandResult result;
  for (const UpdateSpec *u : updates) {
    for (uint64_t seed : seeds) {
      Group g{u, seed, {}};
      for (Strategy s : strategies) {
        ++result.cells_total;
        if (done.count(CellKey(u->name, StrategyName(s), seed))) {
          ++result.cells_skipped;
        } else {
          g.pending.push_back(s);
        }
      }
      if (!g.pending.empty()) groups.push_back(std::move(g));
    }
  }
  WriteManifest(out, config, "run", {{"started", Now()}, {"cells_total", result.cells_total}});

  std::mutex mu;
  std::atomic<int> budget_used{0};
  std::atomic<bool> budget_hit{false};
  auto take_budget = [&]() {
    if (options.max_cells <= 0) return true;
    if (budget_used.fetch_add(1) < options.max_cells) return true;
    budget_hit = true;
    return false;
  };

  RunJobs(groups.size(), workers, [&](size_t gi) {
    const Group &g = groups[gi];
    const std::string &uname = g.update->name;
    const uint64_t run_seed = DeriveSeed(g.seed, "train." + uname);
    std::optional<SplitBundle> bundle;
    std::optional<Vocab> vocab;
    std::optional<ParserModel> v1_model;
    std::optional<Classifier> classifier;
    std::string classifier_note;

    for (Strategy s : g.pending) {
      const std::string key = CellKey(uname, StrategyName(s), g.seed);
      if (!take_budget()) return;
      try {
        const std::string started = Now();
        if (!bundle) {
          bundle = SampleSplits(data.at(uname), config.splits,
                                DeriveSeed(g.seed, "split." + uname));
          vocab = BundleVocab(*bundle);
        }
        const bool wants_v1 = s == Strategy::kV1Only || s == Strategy::kFineTune ||
                              NeedsClassifier(s);
        if (wants_v1 && !v1_model) {
          const TrainingPlan v1_plan =
              BuildTrainingPlan(Strategy::kV1Only, *bundle, model_config, nullptr);
          v1_model = ExecutePlan(v1_plan, *vocab, model_config, run_seed);
        }
        if (NeedsClassifier(s) && !classifier) {
          classifier = TrainSelectionClassifier(bundle->v2_train, *v1_model,
                                                config.classifier,
                                                DeriveSeed(run_seed, "classifier"));
          std::vector<Tokens> queries;
          std::vector<bool> truth;
          for (const auto *test : {&bundle->test_changed, &bundle->test_unchanged}) {
            for (const Example &e : *test) {
              queries.push_back(e.tokens);
              truth.push_back(e.partition == Partition::kChanged);
            }
          }
          const std::vector<bool> pred = classifier->PredictChanged(queries);
          int correct = 0;
          for (size_t i = 0; i < pred.size(); ++i) correct += pred[i] == truth[i] ? 1 : 0;
          classifier_note = "classifier held-out accuracy " + std::to_string(correct) +
                            "/" + std::to_string(pred.size());
        }
        const TrainingPlan plan =
            BuildTrainingPlan(s, *bundle, model_config,
                              classifier ? &*classifier : nullptr, config.fine_tune);
        std::optional<ParserModel> trained;
        const ParserModel *model = nullptr;
        if (s == Strategy::kV1Only) {
          model = &*v1_model;
        } else {
          trained = ExecutePlan(plan, *vocab, model_config, run_seed,
                                s == Strategy::kFineTune ? &*v1_model : nullptr);
          model = &*trained;
        }
        EvalReport report = Evaluate(*model, plan.eval_head, *bundle);
        report.strategy = StrategyName(s);
        report.seed = g.seed;
        report.notes = plan.notes;
        if (NeedsClassifier(s)) report.notes.push_back(classifier_note);

        const std::string pred_name =
            "predictions/" + uname + "." + report.strategy + "." + std::to_string(g.seed) + ".tsv";
        std::ostringstream preds;
        for (const auto &[id, tree] : report.predictions) preds << id << '\t' << tree << '\n';

        if (options.save_models) {
          fs::create_directories(out / "models");
          SaveCheckpoint(*model, (out / "models" /
                                  (uname + "." + report.strategy + "." +
                                   std::to_string(g.seed) + ".ckpt")).string());
        }
        std::lock_guard<std::mutex> lock(mu);
        WriteText(out / pred_name, preds.str());
        AppendJsonLines(reports_path.string(), ReportRecords(report));
        AppendJsonLines((out / "cells.jsonl").string(),
                        {{{"cell", key},
                          {"started", started},
                          {"finished", Now()},
                          {"predictions", pred_name},
                          {"notes", report.notes}}});
        ++result.cells_computed;
        Log(options, key + ": changed " + FormatPercent(report.score(Partition::kChanged).accuracy()) +
                         ", unchanged " + FormatPercent(report.score(Partition::kUnchanged).accuracy()) +
                         ", triv " +
                         FormatPercent(report.score(Partition::kTriviallyUnchanged).accuracy()));
      } catch (const std::exception &e) {
        std::lock_guard<std::mutex> lock(mu);
        result.failures.push_back(key + ": " + e.what());
        Log(options, key + " FAILED: " + e.what());
      }
    }
  });

  // Summarize whatever is on disk for the requested grid.
  std::vector<EvalReport> reports;
  if (fs::exists(reports_path)) {
    std::set<std::string> wanted;
    for (const UpdateSpec *u : updates) {
      for (uint64_t seed : seeds) {
        for (Strategy s : strategies) wanted.insert(CellKey(u->name, StrategyName(s), seed));
      }
    }
    for (EvalReport &r : ReportsFromRecords(ReadJsonLines(reports_path.string()))) {
      if (wanted.count(CellKey(r.update, r.strategy, r.seed))) reports.push_back(std::move(r));
    }
  }
  std::vector<std::string> fallbacks;
  for (const EvalReport &r : reports) {
    for (const std::string &note : r.notes) {
      if (note.starts_with("fallback")) fallbacks.push_back(r.update + ": " + note);
    }
  }
  std::sort(fallbacks.begin(), fallbacks.end());
  fallbacks.erase(std::unique(fallbacks.begin(), fallbacks.end()), fallbacks.end());
  WriteManifest(out, config, "run",
                {{"finished", Now()},
                 {"cells_total", result.cells_total},
                 {"cells_present", reports.size()},
                 {"failures", result.failures},
                 {"fallbacks", fallbacks},
                 {"reports", "reports.jsonl"},
                 {"cells", "cells.jsonl"},
                 {"summary", "summary.txt"}});

  if (!result.failures.empty() || budget_hit ||
      static_cast<int>(reports.size()) != result.cells_total) {
    std::string msg = std::to_string(reports.size()) + " of " +
                      std::to_string(result.cells_total) + " cells complete";
    if (budget_hit) msg += " (cell budget reached; rerun to resume)";
    for (const std::string &f : result.failures) msg += "\n  " + f;
    Fail(ErrorCode::kIncompleteGrid, msg);
  }
  const Summary summary = Aggregate(reports);
  result.text = RenderSummaryTable(summary);
  WriteText(out / "summary.txt", result.text);
  WriteText(out / "summary.json", SummaryToJson(summary).dump(2) + "\n");
  WriteText(out / "summary.svg", RenderSummarySvg(summary));
  return result;
}

CommandResult CmdCurve(const ExperimentConfig &config, const std::string &out_dir,
                       const RunOptions &options) {
  const fs::path out(out_dir);
  fs::create_directories(out);
  CheckManifest(out / "manifest.json", config.Hash());
  const fs::path curve_path = out / "curve.jsonl";

  std::vector<std::string> update_names = options.updates;
  if (update_names.empty()) update_names = config.curve_updates;
  const std::vector<const UpdateSpec *> updates = SelectUpdates(config, update_names);
  std::vector<uint64_t> seeds = options.seeds;
  if (seeds.empty()) seeds = config.curve_seeds.empty() ? config.seeds : config.curve_seeds;
  CurveSettings settings = config.curve;
  if (!options.sizes.empty()) settings.v2_sizes = options.sizes;
  const int workers = options.workers > 0 ? options.workers : config.workers;
  const ParserConfig model_config = config.EffectiveModel();
  const std::map<std::string, VersionedDataset> data = BuildVersionedData(config);

  auto point_key = [](const std::string &u, int size, CurveCondition c, uint64_t seed) {
    return u + "/" + std::to_string(size) + "/" + CurveConditionName(c) + "/" +
           std::to_string(seed);
  };
  std::set<std::string> done;
  if (fs::exists(curve_path)) {
    for (const nlohmann::json &j : ReadJsonLines(curve_path.string())) {
      const CurvePoint p = CurvePointFromJson(j);
      done.insert(point_key(p.update, p.v2_size, p.condition, p.seed));
    }
  }
  struct Job {
    const UpdateSpec *update;
    uint64_t seed;
    int size;
    CurveCondition condition;
  };
  std::vector<Job> jobs;
  CommandResult result;
  for (const UpdateSpec *u : updates) {
    for (uint64_t seed : seeds) {
      for (int size : settings.v2_sizes) {
        for (CurveCondition c : {CurveCondition::kConflicting, CurveCondition::kOracleRemoved}) {
          ++result.cells_total;
          if (done.count(point_key(u->name, size, c, seed))) {
            ++result.cells_skipped;
          } else {
            jobs.push_back({u, seed, size, c});
          }
        }
      }
    }
  }
  WriteManifest(out, config, "curve", {{"started", Now()}, {"points_total", result.cells_total}});

  std::mutex mu;
  std::atomic<int> budget_used{0};
  std::atomic<bool> budget_hit{false};
  RunJobs(jobs.size(), workers, [&](size_t i) {
    const Job &job = jobs[i];
    const std::string key = point_key(job.update->name, job.size, job.condition, job.seed);
    if (options.max_cells > 0 && budget_used.fetch_add(1) >= options.max_cells) {
      budget_hit = true;
      return;
    }
    try {
      const VersionedDataset &vd = data.at(job.update->name);
      const SplitBundle bundle = BuildCurveBundle(vd, job.size, settings, job.condition, job.seed);
      // One vocabulary per (update, seed) so both conditions and all sizes
      // start from the same initialization.
      const int max_size = *std::max_element(settings.v2_sizes.begin(), settings.v2_sizes.end());
      const Vocab vocab = BundleVocab(
          BuildCurveBundle(vd, max_size, settings, CurveCondition::kConflicting, job.seed));
      const TrainingPlan plan =
          BuildTrainingPlan(Strategy::kDirectMix, bundle, model_config, nullptr);
      const ParserModel model = ExecutePlan(plan, vocab, model_config,
                                            DeriveSeed(job.seed, "curve." + job.update->name));
      const EvalReport report = Evaluate(model, plan.eval_head, bundle);
      CurvePoint p{job.update->name, job.size, job.condition, job.seed,
                   report.score(Partition::kChanged)};
      std::lock_guard<std::mutex> lock(mu);
      AppendJsonLines(curve_path.string(), {CurvePointToJson(p)});
      ++result.cells_computed;
      Log(options, key + ": changed " + FormatPercent(p.changed.accuracy()));
    } catch (const std::exception &e) {
      std::lock_guard<std::mutex> lock(mu);
      result.failures.push_back(key + ": " + e.what());
      Log(options, key + " FAILED: " + e.what());
    }
  });

  std::vector<CurvePoint> points;
  if (fs::exists(curve_path)) {
    std::set<std::string> wanted;
    for (const UpdateSpec *u : updates) {
      for (uint64_t seed : seeds) {
        for (int size : settings.v2_sizes) {
          for (CurveCondition c : {CurveCondition::kConflicting, CurveCondition::kOracleRemoved}) {
            wanted.insert(point_key(u->name, size, c, seed));
          }
        }
      }
    }
    for (const nlohmann::json &j : ReadJsonLines(curve_path.string())) {
      CurvePoint p = CurvePointFromJson(j);
      if (wanted.count(point_key(p.update, p.v2_size, p.condition, p.seed))) {
        points.push_back(std::move(p));
      }
    }
  }
  WriteManifest(out, config, "curve",
                {{"finished", Now()},
                 {"points_total", result.cells_total},
                 {"points_present", points.size()},
                 {"failures", result.failures},
                 {"points", "curve.jsonl"},
                 {"table", "curve.txt"},
                 {"plot", "curve.svg"}});
  if (!result.failures.empty() || budget_hit ||
      static_cast<int>(points.size()) != result.cells_total) {
    std::string msg = std::to_string(points.size()) + " of " +
                      std::to_string(result.cells_total) + " curve points complete";
    if (budget_hit) msg += " (cell budget reached; rerun to resume)";
    for (const std::string &f : result.failures) msg += "\n  " + f;
    Fail(ErrorCode::kIncompleteGrid, msg);
  }
  const std::vector<CurveRow> rows = SummarizeCurve(points);
  result.text = RenderCurveTable(rows);
  WriteText(out / "curve.txt", result.text);
  WriteText(out / "curve.json", CurveToJson(rows).dump(2) + "\n");
  WriteText(out / "curve.svg", RenderCurveSvg(rows));
  return result;
}

CommandResult CmdReport(const std::string &out_dir) {
  const fs::path out(out_dir);
  const fs::path reports_path = out / "reports.jsonl";
  const fs::path curve_path = out / "curve.jsonl";
  const bool has_reports = fs::exists(reports_path) && fs::file_size(reports_path) > 0;
  const bool has_curve = fs::exists(curve_path) && fs::file_size(curve_path) > 0;
  if (!has_reports && !has_curve) {
    Fail(ErrorCode::kEmptyData, "no reports found in " + out_dir);
  }
  CommandResult result;
  if (has_reports) {
    const std::vector<EvalReport> reports = ReportsFromRecords(ReadJsonLines(reports_path.string()));
    const Summary summary = Aggregate(reports);
    result.cells_total += static_cast<int>(reports.size());
    result.text += RenderSummaryTable(summary);
    WriteText(out / "summary.txt", RenderSummaryTable(summary));
    WriteText(out / "summary.json", SummaryToJson(summary).dump(2) + "\n");
    WriteText(out / "summary.svg", RenderSummarySvg(summary));
  }
  if (has_curve) {
    std::vector<CurvePoint> points;
    for (const nlohmann::json &j : ReadJsonLines(curve_path.string())) {
      points.push_back(CurvePointFromJson(j));
    }
    const std::vector<CurveRow> rows = SummarizeCurve(points);
    result.cells_total += static_cast<int>(points.size());
    if (!result.text.empty()) result.text += "\n";
    result.text += RenderCurveTable(rows);
    WriteText(out / "curve.txt", RenderCurveTable(rows));
    WriteText(out / "curve.json", CurveToJson(rows).dump(2) + "\n");
    WriteText(out / "curve.svg", RenderCurveSvg(rows));
  }
  return result;
}

}  // namespace semupdate
