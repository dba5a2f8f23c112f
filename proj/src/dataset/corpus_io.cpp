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
#include <fstream>
#include <sstream>

#include "common/error.hpp"
#include "dataset/dataset.hpp"

namespace semupdate {

namespace {

std::vector<std::string> SplitTabs(const std::string &line) {
  std::vector<std::string> fields;
  size_t start = 0;
  while (true) {
    size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

[[noreturn]] void LineError(const std::string &path, int line,
                            const std::string &what) {
  throw Error(ErrorCode::kParseError,
              path + ":" + std::to_string(line) + ": " + what, line);
}

// Reads tokens and a parse; raw queries with attached punctuation are
// re-tokenized if the whitespace split cannot anchor a quoted span.
ParseTree ParseRow(const std::string &path, int line,
                   const std::string &query_field, const std::string &parse,
                   Tokens &tokens) {
  tokens = SplitTokens(query_field);
  try {
    return ParseBracketed(parse, tokens);
  } catch (const Error &e) {
    if (e.code() == ErrorCode::kUnknownSpan) {
      Tokens retry = Tokenize(query_field);
      if (retry != tokens) {
        try {
          ParseTree t = ParseBracketed(parse, retry);
          tokens = std::move(retry);
          return t;
        } catch (const Error &) {
        }
      }
    }
    LineError(path, line, std::string(ErrorCodeName(e.code())) + ": " + e.what());
  }
}

template <typename RowFn>
void ForEachRow(const std::string &path, size_t expected_fields, RowFn fn) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields = SplitTabs(line);
    if (fields.size() != expected_fields) {
      LineError(path, number,
                "expected " + std::to_string(expected_fields) +
                    " tab-separated fields, got " +
                    std::to_string(fields.size()));
    }
    fn(number, fields);
  }
}

std::ofstream OpenForWrite(const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path);
  return out;
}

}  // namespace

std::vector<Example> LoadCorpus(const std::string &path) {
  std::vector<Example> out;
  ForEachRow(path, 3, [&](int line, const std::vector<std::string> &f) {
    Example e;
    e.id = f[0];
    e.v2 = ParseRow(path, line, f[1], f[2], e.tokens);
    out.push_back(std::move(e));
  });
  return out;
}

void SaveCorpus(const std::vector<Example> &examples, const std::string &path) {
  std::ofstream out = OpenForWrite(path);
  for (const Example &e : examples) {
    if (!e.v2) Fail(ErrorCode::kInvalidArgument, e.id + " has no V2 label");
    out << e.id << '\t' << JoinTokens(e.tokens) << '\t'
        << Serialize(*e.v2, e.tokens) << '\n';
  }
  if (!out) Fail(ErrorCode::kIo, "write failed: " + path);
}

VersionedDataset LoadVersioned(const std::string &path,
                               const UpdateSpec &spec) {
  VersionedDataset data;
  data.spec = spec;
  ForEachRow(path, 5, [&](int line, const std::vector<std::string> &f) {
    Example e;
    e.id = f[0];
    e.v1 = ParseRow(path, line, f[1], f[2], e.tokens);
    Tokens v2_tokens;
    e.v2 = ParseRow(path, line, f[1], f[3], v2_tokens);
    if (v2_tokens != e.tokens) LineError(path, line, "token mismatch");
    try {
      e.partition = PartitionFromName(f[4]);
    } catch (const Error &err) {
      LineError(path, line, err.what());
    }
    data.examples.push_back(std::move(e));
  });
  return data;
}

void SaveVersioned(const VersionedDataset &data, const std::string &path) {
  std::ofstream out = OpenForWrite(path);
  for (const Example &e : data.examples) {
    if (!e.v1 || !e.v2) {
      Fail(ErrorCode::kInvalidArgument, e.id + " lacks a versioned label");
    }
    out << e.id << '\t' << JoinTokens(e.tokens) << '\t'
        << Serialize(*e.v1, e.tokens) << '\t' << Serialize(*e.v2, e.tokens)
        << '\t' << PartitionName(e.partition) << '\n';
  }
  if (!out) Fail(ErrorCode::kIo, "write failed: " + path);
}

}  // namespace semupdate
