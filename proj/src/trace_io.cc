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

#include "wasp/trace_io.h"

#include <cmath>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "wasp/status_macros.h"

namespace wasp {
namespace {

using json = nlohmann::json;

constexpr char kTraceFormat[] = "wasp-trace";
constexpr int kTraceVersion = 1;

std::string Hex(uint64_t v) { return absl::StrFormat("%016x", v); }

absl::StatusOr<uint64_t> ParseHex(const std::string& s) {
  uint64_t v = 0;
  if (s.size() != 16) return absl::InvalidArgumentError("bad hex field");
  for (char c : s) {
    v <<= 4;
    if (c >= '0' && c <= '9') {
      v |= static_cast<uint64_t>(c - '0');
    } else if (c >= 'a' && c <= 'f') {
      v |= static_cast<uint64_t>(c - 'a' + 10);
    } else {
      return absl::InvalidArgumentError("bad hex field");
    }
  }
  return v;
}

absl::StatusOr<PromptStyle> ParseStyle(const std::string& s) {
  for (PromptStyle p : {PromptStyle::kZeroShot, PromptStyle::kContrastive,
                        PromptStyle::kNonContrastive}) {
    if (PromptStyleName(p) == s) return p;
  }
  return absl::InvalidArgumentError(absl::StrCat("unknown prompt style ", s));
}

// Infinity is not representable in JSON.
json Number(double x) {
  if (std::isinf(x)) return x > 0 ? json("inf") : json("-inf");
  return json(x);
}

std::string Fixed(double x, int digits) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return absl::StrFormat("%.*f", digits, x);
}

absl::Status WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    return absl::PermissionDeniedError(
        absl::StrCat("cannot open '", path, "' for writing"));
  }
  out << text;
  out.flush();
  if (!out) return absl::DataLossError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

}  // namespace

TraceHeader MakeTraceHeader(const RunConfig& config,
                            const CompositionReport& privacy) {
  TraceHeader h;
  h.task = config.task.name;
  h.n = config.n;
  h.iterations = config.iterations();
  h.q = config.q;
  h.s = config.s;
  h.seed = config.seed;
  h.infinite_epsilon = config.privacy.infinite_epsilon;
  h.epsilon = config.privacy.epsilon;
  h.delta = config.privacy.delta;
  h.parties = config.privacy.parties;
  h.level = std::string(PrivacyLevelName(config.privacy.level));
  h.contrastive = config.contrastive;
  h.weighting = config.weighting;
  h.generators = config.GeneratorIds();
  h.privacy = privacy;
  h.embedder = absl::StrCat(config.embedder.kind, ":",
                            config.embedder.kind == "http"
                                ? config.embedder.http.model
                                : std::to_string(config.embedder.seed),
                            ":", config.embedder.dimension);
  return h;
}

json TraceHeaderToJson(const TraceHeader& h) {
  return {{"format", kTraceFormat},
          {"version", kTraceVersion},
          {"task", h.task},
          {"n", h.n},
          {"iterations", h.iterations},
          {"q", h.q},
          {"s", h.s},
          {"seed", h.seed},
          {"epsilon", h.infinite_epsilon ? json("inf") : Number(h.epsilon)},
          {"delta", h.delta},
          {"parties", h.parties},
          {"level", h.level},
          {"contrastive", h.contrastive},
          {"weighting", h.weighting},
          {"generators", h.generators},
          {"embedder", h.embedder},
          {"sensitivity", h.privacy.sensitivity},
          {"releases", h.privacy.releases},
          {"per_round_epsilon", Number(h.privacy.per_round_epsilon)},
          {"sigma_total", h.privacy.sigma_total},
          {"sigma_local", h.privacy.sigma_local},
          {"aggregate_sigma", h.privacy.aggregate_sigma},
          {"composition_consistent", h.privacy.consistent}};
}

json IterationRecordToJson(const IterationRecord& r) {
  json gens = json::array();
  for (const auto& g : r.generators) {
    gens.push_back({{"id", g.id},
                    {"raw_weight", g.raw_weight},
                    {"weight", g.weight},
                    {"allocation", g.allocation},
                    {"owned", g.owned}});
  }
  return {{"iteration", r.iteration},
          {"generators", gens},
          {"dataset_size", r.dataset_size},
          {"frechet", r.frechet},
          {"voted", r.voted},
          {"sigma", r.sigma},
          {"weight_fallback", r.weight_fallback},
          {"near_ids", r.near_ids},
          {"far_ids", r.far_ids},
          {"rng_checkpoint", Hex(r.rng_checkpoint)},
          {"prompt_style", PromptStyleName(r.prompt_style)},
          {"template_hash", Hex(r.template_hash)},
          {"prompt_digest", Hex(r.prompt_digest)},
          {"attempts", r.attempts}};
}

absl::StatusOr<IterationRecord> IterationRecordFromJson(const json& j) {
  IterationRecord r;
  try {
    r.iteration = j.at("iteration").get<int>();
    for (const auto& g : j.at("generators")) {
      r.generators.push_back({g.at("id").get<std::string>(),
                              g.at("raw_weight").get<double>(),
                              g.at("weight").get<double>(),
                              g.at("allocation").get<int64_t>(),
                              g.at("owned").get<int64_t>()});
    }
    r.dataset_size = j.at("dataset_size").get<int64_t>();
    r.frechet = j.at("frechet").get<double>();
    r.voted = j.at("voted").get<bool>();
    r.sigma = j.at("sigma").get<double>();
    r.weight_fallback = j.at("weight_fallback").get<bool>();
    r.near_ids = j.at("near_ids").get<std::vector<std::vector<int64_t>>>();
    r.far_ids = j.at("far_ids").get<std::vector<std::vector<int64_t>>>();
    WASP_ASSIGN_OR_RETURN(r.rng_checkpoint,
                          ParseHex(j.at("rng_checkpoint").get<std::string>()));
    WASP_ASSIGN_OR_RETURN(r.prompt_style,
                          ParseStyle(j.at("prompt_style").get<std::string>()));
    WASP_ASSIGN_OR_RETURN(r.template_hash,
                          ParseHex(j.at("template_hash").get<std::string>()));
    WASP_ASSIGN_OR_RETURN(r.prompt_digest,
                          ParseHex(j.at("prompt_digest").get<std::string>()));
    r.attempts = j.at("attempts").get<int>();
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed iteration record: ", e.what()));
  }
  return r;
}

absl::StatusOr<TraceWriter> TraceWriter::Open(const std::string& path,
                                              const TraceHeader& header) {
  TraceWriter w(path);
  w.out_.open(path, std::ios::binary | std::ios::trunc);
  if (!w.out_) {
    return absl::PermissionDeniedError(
        absl::StrCat("cannot open '", path, "' for writing"));
  }
  w.out_ << TraceHeaderToJson(header).dump() << '\n';
  w.out_.flush();
  if (!w.out_) return absl::DataLossError(absl::StrCat("write failed: ", path));
  return w;
}

absl::Status TraceWriter::Append(const IterationRecord& record) {
  out_ << IterationRecordToJson(record).dump() << '\n';
  out_.flush();
  if (!out_) return absl::DataLossError(absl::StrCat("write failed: ", path_));
  return absl::OkStatus();
}

absl::StatusOr<TraceFile> ReadTrace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open '", path, "'"));
  TraceFile trace;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ":", line_no, ": ", e.what()));
    }
    if (line_no == 1) {
      if (!j.is_object() || j.value("format", "") != kTraceFormat) {
        return absl::InvalidArgumentError(
            absl::StrCat(path, ":1: missing wasp-trace header"));
      }
      trace.header = std::move(j);
      continue;
    }
    absl::StatusOr<IterationRecord> r = IterationRecordFromJson(j);
    if (!r.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ":", line_no, ": ", r.status().message()));
    }
    trace.records.push_back(*std::move(r));
  }
  if (line_no == 0) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": empty trace"));
  }
  return trace;
}

absl::Status WriteMetricsCsv(const std::string& path,
                             const std::vector<IterationRecord>& records) {
  std::string text = "iteration,generator,raw_w,w,N_k,owned\n";
  for (const auto& r : records) {
    for (const auto& g : r.generators) {
      absl::StrAppend(&text, r.iteration, ",", g.id, ",",
                      absl::StrFormat("%.17g", g.raw_weight), ",",
                      absl::StrFormat("%.17g", g.weight), ",", g.allocation,
                      ",", g.owned, "\n");
    }
  }
  return WriteText(path, text);
}

absl::Status WriteHistogramCsv(const std::string& path,
                               const VoteHistograms& h) {
  std::string text = "index,nearest,furthest\n";
  for (size_t i = 0; i < h.size(); ++i) {
    absl::StrAppend(&text, i, ",", absl::StrFormat("%.17g", h.nearest[i]), ",",
                    absl::StrFormat("%.17g", h.furthest[i]), "\n");
  }
  return WriteText(path, text);
}

absl::StatusOr<std::string> RenderReport(const TraceFile& trace,
                                         const std::string& format) {
  if (format != "csv" && format != "markdown") {
    return absl::InvalidArgumentError(
        absl::StrCat("report format must be csv or markdown, got '", format,
                     "'"));
  }
  const bool md = format == "markdown";
  std::vector<std::string> ids;
  if (!trace.records.empty()) {
    for (const auto& g : trace.records.front().generators) ids.push_back(g.id);
  }
  std::vector<std::string> header = {"iteration", "dataset_size", "sigma",
                                     "frechet"};
  for (const auto& id : ids) {
    header.push_back(absl::StrCat("w[", id, "]"));
    header.push_back(absl::StrCat("N[", id, "]"));
  }
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : trace.records) {
    std::vector<std::string> row = {absl::StrCat(r.iteration),
                                    absl::StrCat(r.dataset_size),
                                    Fixed(r.sigma, 5), Fixed(r.frechet, 5)};
    for (const auto& g : r.generators) {
      row.push_back(Fixed(g.weight, 4));
      row.push_back(absl::StrCat(g.allocation));
    }
    rows.push_back(std::move(row));
  }

  std::string out;
  const json& h = trace.header;
  if (md) {
    absl::StrAppend(&out, "# Run report: ", h.value("task", ""), "\n\n");
    absl::StrAppend(&out, "## Privacy\n\n| key | value |\n|---|---|\n");
    for (const char* key :
         {"epsilon", "delta", "iterations", "parties", "level", "sensitivity",
          "releases", "per_round_epsilon", "sigma_total", "sigma_local",
          "aggregate_sigma", "composition_consistent"}) {
      if (h.contains(key)) {
        absl::StrAppend(&out, "| ", key, " | ", h[key].dump(), " |\n");
      }
    }
    absl::StrAppend(&out, "\nFréchet distances are measured with the run's "
                          "embedder (",
                    h.value("embedder", ""), ").\n\n## Iterations\n\n");
    absl::StrAppend(&out, "| ", absl::StrJoin(header, " | "), " |\n|");
    for (size_t i = 0; i < header.size(); ++i) out += "---|";
    out += "\n";
    for (const auto& row : rows) {
      absl::StrAppend(&out, "| ", absl::StrJoin(row, " | "), " |\n");
    }
  } else {
    absl::StrAppend(&out, absl::StrJoin(header, ","), "\n");
    for (const auto& row : rows) {
      absl::StrAppend(&out, absl::StrJoin(row, ","), "\n");
    }
  }
  return out;
}

}  // namespace wasp
