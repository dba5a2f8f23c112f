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
#include "runner/config.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "common/error.hpp"
#include "common/seed.hpp"

namespace semupdate {

namespace fs = std::filesystem;

namespace {

const char *SourceName(CorpusSource s) {
  switch (s) {
    case CorpusSource::kToy: return "toy";
    case CorpusSource::kTsv: return "tsv";
    case CorpusSource::kTop: return "top";
  }
  return "?";
}

CorpusSource SourceFromName(const std::string &name) {
  if (name == "toy") return CorpusSource::kToy;
  if (name == "tsv") return CorpusSource::kTsv;
  if (name == "top") return CorpusSource::kTop;
  Fail(ErrorCode::kConfig, "unknown corpus source '" + name + "'");
}

}  // namespace

ParserConfig ExperimentConfig::EffectiveModel() const {
  ParserConfig c = ParserConfig::FromJson(desk_overrides, reference_model);
  c.Validate();
  return c;
}

nlohmann::json ExperimentConfig::ToJson() const {
  nlohmann::json j;
  j["corpus"] = {{"source", SourceName(corpus.source)},
                 {"path", corpus.path},
                 {"seed", corpus.seed},
                 {"grammar", GrammarToJson(corpus.grammar)}};
  j["updates"] = nlohmann::json::array();
  for (const UpdateSpec &u : updates) j["updates"].push_back(UpdateSpecToJson(u));
  j["model"] = {{"reference", reference_model.ToJson()},
                {"desk_overrides", desk_overrides}};
  j["strategies"] = nlohmann::json::array();
  for (Strategy s : strategies) j["strategies"].push_back(StrategyName(s));
  j["seeds"] = seeds;
  j["splits"] = {{"v2_changed", splits.v2_changed},
                 {"v2_unchanged", splits.v2_unchanged},
                 {"test_per_partition", splits.test_per_partition}};
  j["classifier"] = classifier.ToJson();
  j["fine_tune"] = {{"stage2_fraction", fine_tune.stage2_fraction},
                    {"stage2_warmup_fraction", fine_tune.stage2_warmup_fraction}};
  j["curve"] = {{"v2_sizes", curve.v2_sizes},
                {"conflicting", curve.conflicting},
                {"test_size", curve.test_size},
                {"updates", curve_updates},
                {"seeds", curve_seeds}};
  j["workers"] = workers;
  return j;
}

std::string ExperimentConfig::Hash() const {
  nlohmann::json j = ToJson();
  j.erase("workers");
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(HashString(j.dump())));
  return buf;
}

ExperimentConfig ExperimentConfigFromJson(const nlohmann::json &j,
                                          const std::string &base_dir) {
  ExperimentConfig c;
  std::set<std::string> names;
  try {
    if (j.contains("corpus")) {
      const nlohmann::json &cj = j.at("corpus");
      c.corpus.source = SourceFromName(cj.value("source", "toy"));
      c.corpus.seed = cj.value("seed", c.corpus.seed);
      if (cj.contains("path")) {
        const std::string path = cj.at("path").get<std::string>();
        c.corpus.path = path.empty() || fs::path(path).is_absolute()
                            ? path
                            : (fs::path(base_dir) / path).string();
      }
      if (cj.contains("grammar") && !cj.at("grammar").is_string()) {
        c.corpus.grammar = GrammarFromJson(cj.at("grammar"));
      }
      c.corpus.grammar.size = cj.value("size", c.corpus.grammar.size);
      if (c.corpus.source != CorpusSource::kToy && c.corpus.path.empty()) {
        Fail(ErrorCode::kConfig, "corpus.path is required for external corpora");
      }
    }
    if (j.contains("updates") && !j.at("updates").is_string()) {
      c.updates.clear();
      for (const auto &u : j.at("updates")) c.updates.push_back(UpdateSpecFromJson(u));
    }
    for (const UpdateSpec &u : c.updates) {
      if (!names.insert(u.name).second) {
        Fail(ErrorCode::kConfig, "duplicate update name " + u.name);
      }
    }
    if (j.contains("model")) {
      const nlohmann::json &mj = j.at("model");
      c.reference_model = ParserConfig::FromJson(mj.value("reference", nlohmann::json::object()),
                                             ParserConfig::ReferenceDefaults());
      c.desk_overrides = mj.value("desk_overrides", nlohmann::json::object());
    }
    if (j.contains("strategies")) {
      c.strategies.clear();
      for (const auto &s : j.at("strategies")) {
        c.strategies.push_back(StrategyFromName(s.get<std::string>()));
      }
    }
    c.seeds = j.value("seeds", c.seeds);
    if (j.contains("splits")) {
      const nlohmann::json &sj = j.at("splits");
      c.splits.v2_changed = sj.value("v2_changed", c.splits.v2_changed);
      c.splits.v2_unchanged = sj.value("v2_unchanged", c.splits.v2_unchanged);
      c.splits.test_per_partition =
          sj.value("test_per_partition", c.splits.test_per_partition);
    }
    if (j.contains("classifier")) {
      c.classifier = ClassifierConfig::FromJson(j.at("classifier"), c.classifier);
    }
    if (j.contains("fine_tune")) {
      const nlohmann::json &fj = j.at("fine_tune");
      c.fine_tune.stage2_fraction = fj.value("stage2_fraction", c.fine_tune.stage2_fraction);
      c.fine_tune.stage2_warmup_fraction =
          fj.value("stage2_warmup_fraction", c.fine_tune.stage2_warmup_fraction);
    }
    if (j.contains("curve")) {
      const nlohmann::json &vj = j.at("curve");
      c.curve.v2_sizes = vj.value("v2_sizes", c.curve.v2_sizes);
      c.curve.conflicting = vj.value("conflicting", c.curve.conflicting);
      c.curve.test_size = vj.value("test_size", c.curve.test_size);
      c.curve_updates = vj.value("updates", c.curve_updates);
      c.curve_seeds = vj.value("seeds", c.curve_seeds);
    }
    c.workers = j.value("workers", c.workers);
  } catch (const nlohmann::json::exception &e) {
    Fail(ErrorCode::kConfig, std::string("config: ") + e.what());
  }
  if (c.seeds.empty()) Fail(ErrorCode::kConfig, "at least one seed is required");
  if (c.strategies.empty()) Fail(ErrorCode::kConfig, "at least one strategy is required");
  if (c.updates.empty()) Fail(ErrorCode::kConfig, "at least one update is required");
  if (c.workers <= 0) Fail(ErrorCode::kConfig, "workers must be positive");
  if (c.curve.v2_sizes.empty()) Fail(ErrorCode::kConfig, "curve.v2_sizes is empty");
  for (const UpdateSpec &u : c.updates) ValidateUpdateSpec(u);
  for (const std::string &name : c.curve_updates) {
    if (!names.count(name)) Fail(ErrorCode::kConfig, "curve names unknown update " + name);
  }
  c.EffectiveModel();
  return c;
}

ExperimentConfig LoadExperimentConfig(const std::string &path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open config " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::exception &e) {
    Fail(ErrorCode::kConfig, path + ": " + e.what());
  }
  return ExperimentConfigFromJson(j, fs::path(path).parent_path().string());
}

std::vector<std::string> SplitList(const std::string &text) {
  std::vector<std::string> out;
  std::string item;
  for (char ch : text + ",") {
    if (ch == ',') {
      const size_t b = item.find_first_not_of(' ');
      const size_t e = item.find_last_not_of(' ');
      if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
      item.clear();
    } else {
      item += ch;
    }
  }
  return out;
}

std::vector<uint64_t> ParseSeedList(const std::string &text) {
  std::vector<uint64_t> out;
  for (const std::string &s : SplitList(text)) {
    try {
      size_t used = 0;
      out.push_back(std::stoull(s, &used));
      if (used != s.size()) throw std::invalid_argument(s);
    } catch (const std::exception &) {
      Fail(ErrorCode::kInvalidArgument, "bad seed '" + s + "'");
    }
  }
  return out;
}

std::vector<int> ParseIntList(const std::string &text) {
  std::vector<int> out;
  for (const std::string &s : SplitList(text)) {
    try {
      size_t used = 0;
      out.push_back(std::stoi(s, &used));
      if (used != s.size()) throw std::invalid_argument(s);
    } catch (const std::exception &) {
      Fail(ErrorCode::kInvalidArgument, "bad number '" + s + "'");
    }
  }
  return out;
}

}  // namespace semupdate
