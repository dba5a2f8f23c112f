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
// Binary layout: 8-byte magic, uint64 header length, JSON header, then each
// tensor's doubles in header order (row-major, little-endian host order).
#include <cstring>
#include <fstream>

#include "common/error.hpp"
#include "model/parser_model.hpp"

namespace semupdate {
namespace {

constexpr char kMagic[8] = {'S', 'E', 'M', 'U', 'P', 'D', '0', '1'};

}  // namespace

void SaveCheckpoint(const ParserModel &model, const std::string &path) {
  nlohmann::json header;
  header["config"] = model.config().ToJson();
  header["vocab"] = model.vocab().ToJson();
  header["heads"] = model.Heads();
  nlohmann::json tensors = nlohmann::json::array();
  for (const auto &[name, p] : model.params()) {
    tensors.push_back({{"name", name}, {"rows", p.value.rows()}, {"cols", p.value.cols()}});
  }
  header["tensors"] = tensors;
  const std::string text = header.dump();

  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) Fail(ErrorCode::kIo, "cannot write " + tmp);
    out.write(kMagic, sizeof(kMagic));
    const uint64_t len = text.size();
    out.write(reinterpret_cast<const char *>(&len), sizeof(len));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    for (const auto &[name, p] : model.params()) {
      out.write(reinterpret_cast<const char *>(p.value.data()),
                static_cast<std::streamsize>(p.value.size() * sizeof(double)));
    }
    if (!out) Fail(ErrorCode::kIo, "write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    Fail(ErrorCode::kIo, "cannot rename " + tmp + " to " + path);
  }
}

ParserModel LoadCheckpoint(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path);
  char magic[8];
  uint64_t len = 0;
  in.read(magic, sizeof(magic));
  in.read(reinterpret_cast<char *>(&len), sizeof(len));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0 || len > (1u << 30)) {
    Fail(ErrorCode::kIo, path + " is not a checkpoint");
  }
  std::string text(len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(len));
  if (!in) Fail(ErrorCode::kIo, "truncated checkpoint " + path);

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception &e) {
    Fail(ErrorCode::kIo, "bad checkpoint header: " + std::string(e.what()));
  }
  ParserModel model = ParserModel::Empty(ParserConfig::FromJson(header.at("config")),
                                         Vocab::FromJson(header.at("vocab")));
  for (const auto &t : header.at("tensors")) {
    nn::Matrix m(t.at("rows").get<int>(), t.at("cols").get<int>());
    in.read(reinterpret_cast<char *>(m.data()),
            static_cast<std::streamsize>(m.size() * sizeof(double)));
    if (!in) Fail(ErrorCode::kIo, "truncated checkpoint " + path);
    model.params().Add(t.at("name").get<std::string>(), std::move(m));
  }
  return model;
}

}  // namespace semupdate
