//
// Copyright 2026 The WASP Synthesis Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "wasp/dataset_io.h"

#include <fstream>
#include <utility>

#include "absl/strings/str_cat.h"
#include "json.hpp"
#include "wasp/status_macros.h"

namespace wasp {
namespace {

using json = nlohmann::json;

constexpr char kFormat[] = "wasp-dataset";
constexpr int kVersion = 1;

json HeaderJson(std::string_view kind, const std::string& task, size_t count,
                std::optional<int> embedding_dim) {
  json h = {{"format", kFormat},
            {"version", kVersion},
            {"kind", kind},
            {"task", task},
            {"count", count}};
  if (embedding_dim) h["embedding_dim"] = *embedding_dim;
  return h;
}

json SampleJson(const LabeledSample& s) {
  json j = {{"text", s.text}, {"label", s.label}};
  j["attribute"] = s.attribute ? json(*s.attribute) : json(nullptr);
  return j;
}

absl::Status WriteLines(const std::string& path, const json& header,
                        const std::vector<json>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    return absl::PermissionDeniedError(
        absl::StrCat("cannot open '", path, "' for writing"));
  }
  constexpr auto kReplace = json::error_handler_t::replace;
  out << header.dump(-1, ' ', false, kReplace) << '\n';
  for (const auto& r : records) out << r.dump(-1, ' ', false, kReplace) << '\n';
  out.flush();
  if (!out) return absl::DataLossError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

absl::Status ParseError(const std::string& path, size_t line,
                        std::string_view what) {
  return absl::InvalidArgumentError(
      absl::StrCat(path, ":", line, ": ", std::string(what)));
}

struct RawFile {
  DatasetHeader header;
  std::vector<std::pair<size_t, json>> records;  // (line number, record)
};

absl::StatusOr<DatasetHeader> ParseHeader(const std::string& path,
                                          const std::string& text) {
  json h;
  try {
    h = json::parse(text);
  } catch (const json::exception& e) {
    return ParseError(path, 1, absl::StrCat("malformed header: ", e.what()));
  }
  if (!h.is_object() || h.value("format", "") != kFormat) {
    return ParseError(path, 1, "missing wasp-dataset header");
  }
  if (h.value("version", 0) != kVersion) {
    return ParseError(path, 1, "unsupported dataset version");
  }
  DatasetHeader header;
  try {
    header.kind = h.at("kind").get<std::string>();
    header.task = h.value("task", "");
    header.count = h.at("count").get<size_t>();
    if (h.contains("embedding_dim") && !h["embedding_dim"].is_null()) {
      header.embedding_dim = h["embedding_dim"].get<int>();
    }
  } catch (const json::exception& e) {
    return ParseError(path, 1, absl::StrCat("bad header field: ", e.what()));
  }
  if (header.kind != "synthetic" && header.kind != "labeled") {
    return ParseError(path, 1, absl::StrCat("unknown kind '", header.kind,
                                            "'"));
  }
  return header;
}

absl::StatusOr<RawFile> ReadRaw(const std::string& path,
                                const DatasetExpectations& expect) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return absl::NotFoundError(absl::StrCat("cannot open '", path, "'"));
  }
  RawFile raw;
  std::string line;
  if (!std::getline(in, line)) return ParseError(path, 1, "empty file");
  WASP_ASSIGN_OR_RETURN(raw.header, ParseHeader(path, line));
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      json j = json::parse(line);
      if (!j.is_object()) return ParseError(path, line_no, "not an object");
      raw.records.emplace_back(line_no, std::move(j));
    } catch (const json::exception& e) {
      return ParseError(path, line_no, e.what());
    }
  }
  if (raw.records.size() != raw.header.count) {
    return ParseError(path, line_no,
                      absl::StrCat("header declares ", raw.header.count,
                                   " records, found ", raw.records.size()));
  }
  if (expect.embedding_dim && raw.header.embedding_dim &&
      *expect.embedding_dim != *raw.header.embedding_dim) {
    return absl::InvalidArgumentError(absl::StrCat(
        path, ": embedding dimension ", *raw.header.embedding_dim,
        " does not match configured ", *expect.embedding_dim));
  }
  return raw;
}

absl::StatusOr<LabeledSample> ParseSample(const std::string& path, size_t line,
                                          const json& j,
                                          const DatasetExpectations& expect) {
  LabeledSample s;
  try {
    s.text = j.at("text").get<std::string>();
    s.label = j.at("label").get<std::string>();
    if (j.contains("attribute") && !j["attribute"].is_null()) {
      s.attribute = j["attribute"].get<std::string>();
    }
  } catch (const json::exception& e) {
    return ParseError(path, line, e.what());
  }
  if (TrimWhitespace(s.text).empty()) {
    return ParseError(path, line, "empty text");
  }
  if (expect.task != nullptr) {
    if (auto id = expect.task->CategoryId(s.label); !id.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ":", line, ": ", id.status().message()));
    }
  }
  return s;
}

}  // namespace

absl::Status WriteDataset(const std::string& path,
                          const std::vector<SyntheticSample>& dataset,
                          const std::string& task_name,
                          std::optional<int> embedding_dim) {
  std::vector<json> records;
  records.reserve(dataset.size());
  for (const auto& s : dataset) {
    json j = SampleJson(s.sample);
    j["source_generator"] = s.source_generator;
    j["born_iteration"] = s.born_iteration;
    j["global_index"] = s.global_index;
    records.push_back(std::move(j));
  }
  return WriteLines(
      path, HeaderJson("synthetic", task_name, dataset.size(), embedding_dim),
      records);
}

absl::StatusOr<std::vector<SyntheticSample>> ReadDataset(
    const std::string& path, const DatasetExpectations& expect) {
  WASP_ASSIGN_OR_RETURN(RawFile raw, ReadRaw(path, expect));
  if (raw.header.kind != "synthetic") {
    return ParseError(path, 1, "expected a synthetic dataset");
  }
  std::vector<SyntheticSample> out;
  out.reserve(raw.records.size());
  for (const auto& [line, j] : raw.records) {
    SyntheticSample s;
    WASP_ASSIGN_OR_RETURN(s.sample, ParseSample(path, line, j, expect));
    try {
      s.source_generator = j.at("source_generator").get<std::string>();
      s.born_iteration = j.at("born_iteration").get<int>();
      s.global_index = j.at("global_index").get<int64_t>();
    } catch (const json::exception& e) {
      return ParseError(path, line, e.what());
    }
    if (s.global_index != static_cast<int64_t>(out.size())) {
      return ParseError(path, line,
                        absl::StrCat("global_index ", s.global_index,
                                     " breaks the contiguous order"));
    }
    out.push_back(std::move(s));
  }
  return out;
}

absl::Status WriteLabeledSamples(const std::string& path,
                                 const std::vector<LabeledSample>& samples,
                                 const std::string& task_name) {
  std::vector<json> records;
  records.reserve(samples.size());
  for (const auto& s : samples) records.push_back(SampleJson(s));
  return WriteLines(path,
                    HeaderJson("labeled", task_name, samples.size(),
                               std::nullopt),
                    records);
}

absl::StatusOr<std::vector<LabeledSample>> ReadLabeledSamples(
    const std::string& path, const DatasetExpectations& expect) {
  WASP_ASSIGN_OR_RETURN(RawFile raw, ReadRaw(path, expect));
  std::vector<LabeledSample> out;
  out.reserve(raw.records.size());
  for (const auto& [line, j] : raw.records) {
    WASP_ASSIGN_OR_RETURN(LabeledSample s, ParseSample(path, line, j, expect));
    out.push_back(std::move(s));
  }
  return out;
}

absl::StatusOr<DatasetHeader> ReadDatasetHeader(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return absl::NotFoundError(absl::StrCat("cannot open '", path, "'"));
  }
  std::string line;
  if (!std::getline(in, line)) return ParseError(path, 1, "empty file");
  return ParseHeader(path, line);
}

}  // namespace wasp
