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

#ifndef WASP_TRACE_IO_H_
#define WASP_TRACE_IO_H_

#include <fstream>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "json.hpp"
#include "wasp/orchestrator.h"
#include "wasp/run_config.h"

namespace wasp {

// Run-level facts written as the first line of a trace file.
struct TraceHeader {
  std::string task;
  int64_t n = 0;
  int iterations = 0;
  int q = 0;
  int s = 0;
  uint64_t seed = 0;
  bool infinite_epsilon = false;
  double epsilon = 0;
  double delta = 0;
  int parties = 1;
  std::string level;
  bool contrastive = true;
  bool weighting = true;
  std::vector<std::string> generators;
  CompositionReport privacy;
  std::string embedder;

  bool operator==(const TraceHeader&) const = default;
};

TraceHeader MakeTraceHeader(const RunConfig& config,
                            const CompositionReport& privacy);

nlohmann::json TraceHeaderToJson(const TraceHeader& header);
nlohmann::json IterationRecordToJson(const IterationRecord& record);
absl::StatusOr<IterationRecord> IterationRecordFromJson(
    const nlohmann::json& j);

// Appends records to a JSONL trace as they complete, flushing each line.
class TraceWriter {
 public:
  static absl::StatusOr<TraceWriter> Open(const std::string& path,
                                          const TraceHeader& header);

  absl::Status Append(const IterationRecord& record);

 private:
  explicit TraceWriter(std::string path) : path_(std::move(path)) {}

  std::string path_;
  std::ofstream out_;
};

struct TraceFile {
  nlohmann::json header;
  std::vector<IterationRecord> records;
};

absl::StatusOr<TraceFile> ReadTrace(const std::string& path);

// One row per (iteration, generator): iteration,generator,raw_w,w,N_k,owned.
absl::Status WriteMetricsCsv(const std::string& path,
                             const std::vector<IterationRecord>& records);

// Histogram columns: index,nearest,furthest.
absl::Status WriteHistogramCsv(const std::string& path,
                               const VoteHistograms& h);

// Weights, noise scale and Fréchet trajectory as "csv" or "markdown".
absl::StatusOr<std::string> RenderReport(const TraceFile& trace,
                                         const std::string& format);

}  // namespace wasp

#endif  // WASP_TRACE_IO_H_
